"""Critical formulas removed one epsilon term at a time, highest rank first.

Run: python3 demos/elimination_trace.py
"""

from epscalc.corpus import critical_corpus, identity_corpus
from epscalc.elimination import eliminate_all, proof_metrics
from epscalc.kernel import check_proof
from epscalc.parser import pretty
from epscalc.transforms import identity_axioms_used


def show(name, p):
    mt = proof_metrics(p)
    q, trace = eliminate_all(p)
    print(f"{name}: {len(p)} lines, rank {mt.rank}, orders {mt.r_order}")
    for s in trace.steps:
        b, a = s.before, s.after
        print(f"  {s.strategy:8} {pretty(s.term):40} (rank {b.rank}, order {b.order(b.rank)})"
              f" -> (rank {a.rank}, order {a.order(a.rank) if a.rank else 0})")
    print(f"  result: {len(q)} lines in {q.calculus}, checks {check_proof(q).ok}, "
          f"identity axioms {sorted(identity_axioms_used(q)) or '-'}, lex descent {trace.lex_descent()}\n")


crit = critical_corpus()
for name in ["single", "two-witnesses", "subordinate-three", "rank3"]:
    show(name, crit[name])

# Identity axioms for epsilon terms need the special-term step before the critical ones.
ident = identity_corpus()
for name in ["slot", "nested-special"]:
    show(name, ident[name])
