"""From a quantifier proof of the drinker formula to a Herbrand disjunction.

The proof lives in EC-forall.  Embedding replaces its quantifier axioms by
critical formulas; eliminating those yields an epsilon-free proof of a
disjunction of instances of the matrix.

Run: python3 demos/drinker_pipeline.py
"""

from epscalc.corpus import drinker
from epscalc.elimination import herbrand_disjunction, proof_metrics
from epscalc.kernel import check_proof, format_proof
from epscalc.parser import pretty
from epscalc.semantics import generically_valid
from epscalc.transforms import embed_proof

p = drinker()
print("quantifier proof:")
print(format_proof(p))
print("eigenvariables:", check_proof(p).eigenvariables)

q = embed_proof(p)
mt = proof_metrics(q)
print(f"\nembedded in {q.calculus}: {len(q)} lines, rank {mt.rank}, "
      f"critical terms {[pretty(c.term) for c in mt.critical]}")
print("conclusion:", pretty(q.conclusion))

res = herbrand_disjunction(q)
print("\nskeleton:", pretty(res.skeleton))
for w in res.witnesses:
    print("  witnesses:", ", ".join(f"{h} := {pretty(t)}" for h, t in zip(res.holes, w)))
print("disjunction:", pretty(res.proof.conclusion))
print(f"checks in {res.proof.calculus}:", check_proof(res.proof).ok, f"({len(res.proof)} lines)")

v = generically_valid(res.proof.conclusion, max_n=3)
print(f"valid on all {v.structures} structures up to size 3:", v.holds)
