"""Epsilon terms, their types, and the translation of quantifiers.

Run: python3 demos/syntax_tour.py
"""

from epscalc.parser import parse_formula, parse_term, pretty
from epscalc.syntax import alpha_equiv, degree, epsilon_type, rank, substitute
from epscalc.translate import epsilon_translate

# Bound names do not matter; free ones do.
a, b = parse_term("eps x. R(x, y)"), parse_term("eps z. R(z, y)")
print("alpha-equivalent:", pretty(a), "~", pretty(b), alpha_equiv(a, b))

# Substituting for y under the binder renames x only when it would capture.
print("capture-avoiding:", pretty(substitute(a, "y", parse_term("f(x)"))))

# Every epsilon term is an instance of a type with one slot per immediate subterm.
for text in ["eps x. P(x, f(c), f(c))", "eps x. P(x, eps y. Q(y))", "eps x. P(x, eps y. Q(x, y))"]:
    e = parse_term(text)
    ty, args = epsilon_type(e)
    print(f"{text:32} type {pretty(ty.pattern):28} slots {[pretty(t) for t in args]}  "
          f"degree {degree(e)}  rank {rank(e)}")

# Quantifiers disappear into epsilon terms.
f = parse_formula("ex x. P(x) -> (all y. P(y))")
out, trace = epsilon_translate(f)
for step in trace.steps:
    print(f"  {step.clause:10} {pretty(step.source)}  =>  {pretty(step.result)}")
print("translation:", pretty(out))
