"""Extensionality holds under choice functions but fails under choice operators.

A choice function sees only the set of satisfiers, so P and ~~P get the same
witness.  An intensional operator is indexed by the epsilon type, so it may
pick differently for the two terms.

Run: python3 demos/intensional_divergence.py
"""

import json

from epscalc.parser import parse_formula
from epscalc.semantics import (
    check_consequence, choice_function_count, enumerate_intensional_operators, epsilon_types, generically_valid,
)

EXT = "(P(eps x. ~(P(x) <-> ~~P(x))) <-> ~~P(eps x. ~(P(x) <-> ~~P(x)))) -> eps x. P(x) = eps x. ~~P(x)"
f = parse_formula(EXT)

print("choice functions for n = 1, 2, 3:", [choice_function_count(n) for n in (1, 2, 3)])
types = epsilon_types(f)
print(f"{len(types)} epsilon types, {sum(1 for _ in enumerate_intensional_operators(2, types))} operators on n = 2")

v = generically_valid(f, max_n=2)
print("extensional: valid up to size 2:", v.holds, f"({v.structures} structures)")

v = check_consequence([], f, "v", max_n=2, intensional=True)
print("intensional: valid up to size 2:", v.holds)
print(json.dumps(v.counterexample.to_json(), indent=2))

# Local consequence differs from generic validity on open formulas.
for mode in "ltgv":
    w = check_consequence([parse_formula("P(x)")], parse_formula("all y. P(y)"), mode, 2)
    print(f"P(x) entails all y. P(y) in mode {mode}: {w.holds}")
