"""Random expressions over a three-symbol signature.

The same generator drives hypothesis strategies (``draw``-based picks) and
seeded bulk runs (``random.Random`` picks).  Binder variables never shadow an
enclosing binder, and a body that lost its binder variable gets a conjunct
mentioning it, so every output satisfies the binder condition.
"""

from __future__ import annotations

import random

from hypothesis import strategies as st

from epscalc.syntax import (
    And, App, Atom, Bot, Eps, Eq, Exists, Forall, Iff, Imp, Not, Or, Signature, Top, Var,
)

VARS = ("x", "y", "z", "w")
SIG = Signature({"c": 0, "f": 1}, {"R": 2})
MAX_SIZE = 12


class Gen:
    def __init__(self, pick):
        self.pick = pick  # pick(n) -> int in range(n)

    def leaf(self):
        k = self.pick(len(VARS) + 1)
        return App("c", ()) if k == len(VARS) else Var(VARS[k])

    def term(self, budget: int, binders: frozenset = frozenset()):
        if budget <= 1:
            return self.leaf()
        k = self.pick(4)
        if k == 0:
            return App("f", (self.term(budget - 1, binders),))
        if k == 1:
            return self.eps(budget - 1, binders)
        return self.leaf()

    def binder_body(self, budget, binders):
        free = [v for v in VARS if v not in binders]
        if not free:
            return None, None
        x = free[self.pick(len(free))]
        body = self.formula(budget, binders | {x})
        if x not in body.fv:
            body = And(body, Atom("R", (Var(x), App("c", ()))))
        return x, body

    def eps(self, budget, binders):
        x, body = self.binder_body(budget, binders)
        return self.leaf() if x is None else Eps(x, body)

    def formula(self, budget: int, binders: frozenset = frozenset()):
        if budget <= 2:
            k = self.pick(6)
            if k == 0:
                return Top()
            if k == 1:
                return Bot()
            return Atom("R", (self.leaf(), self.leaf()))
        k = self.pick(7)
        if k == 0:
            split = 1 + self.pick(budget - 2)
            return Atom("R", (self.term(split, binders), self.term(budget - 1 - split, binders)))
        if k == 1:
            split = 1 + self.pick(budget - 2)
            return Eq(self.term(split, binders), self.term(budget - 1 - split, binders))
        if k == 2:
            return Not(self.formula(budget - 1, binders))
        if k in (3, 4):
            cls = (And, Or, Imp, Iff)[self.pick(4)]
            split = 1 + self.pick(budget - 2)
            return cls(self.formula(split, binders), self.formula(budget - 1 - split, binders))
        x, body = self.binder_body(budget - 1, binders)
        if x is None:
            return Top()
        return (Forall if k == 5 else Exists)(x, body)


def random_expr(rng: random.Random, kind: str = "any"):
    """An expression of size at most ``MAX_SIZE``."""
    g = Gen(rng.randrange)
    while True:
        budget = 3 + rng.randrange(8)
        if kind == "eps" or (kind == "any" and rng.random() < 0.3):
            e = g.eps(budget, frozenset()) if kind == "eps" else g.term(budget)
        else:
            e = g.formula(budget)
        if e.size <= MAX_SIZE and (kind != "eps" or isinstance(e, Eps)):
            return e


@st.composite
def formulas(draw, budget: int = 9):
    return Gen(lambda n: draw(st.integers(0, n - 1))).formula(draw(st.integers(1, budget)))


@st.composite
def terms(draw, budget: int = 8):
    return Gen(lambda n: draw(st.integers(0, n - 1))).term(draw(st.integers(1, budget)))


@st.composite
def eps_terms(draw, budget: int = 8):
    g = Gen(lambda n: draw(st.integers(0, n - 1)))
    return g.eps(draw(st.integers(1, budget)), frozenset())


def expressions(budget: int = 9):
    return st.one_of(formulas(budget), terms(budget))
