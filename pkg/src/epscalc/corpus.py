"""Sample proofs shared by the demos and the test suite."""

from __future__ import annotations

from .kernel import Justification, Proof, ProofLine
from .parser import parse_formula

TRIVIAL = "S(c) | ~S(c)"
DRINKER = "ex x. (P(x) -> all y. P(y))"


def proof(lines, hypotheses=(), calculus="ECeps") -> Proof:
    """A proof from ``(formula, rule, refs)`` triples with 1-based refs."""
    return Proof(tuple(ProofLine(parse_formula(f), Justification(r, tuple(i - 1 for i in refs)))
                       for f, r, refs in lines),
                 tuple(parse_formula(h) for h in hypotheses), calculus)


def combine(lines, conclusion: str, hypotheses=(), calculus="ECeps") -> Proof:
    """Axiom or hypothesis lines, then ``A1 -> ... -> An -> E`` as a tautology and n modus ponens steps."""
    fs = [f for f, _ in lines]

    def chain(rest):
        out = f"({conclusion})"
        for f in reversed(rest):
            out = f"({f}) -> {out}"
        return out

    out = [(f, r, ()) for f, r in lines]
    out.append((chain(fs), "Taut", ()))
    cur = len(out)
    for i in range(len(fs)):
        out.append((chain(fs[i + 1:]), "MP", (i + 1, cur)))
        cur = len(out)
    return proof(out, hypotheses, calculus)


def drinker() -> Proof:
    """``ex x. (P(x) -> all y. P(y))`` with quantifier rules."""
    e = DRINKER
    body = "P(x) -> all y. P(y)"
    return proof([
        (f"(P(z) -> all y. P(y)) -> {e}", "AxExists", ()),
        (f"((P(z) -> all y. P(y)) -> {e}) -> (~({e}) -> P(z))", "Taut", ()),
        (f"~({e}) -> P(z)", "MP", (1, 2)),
        (f"~({e}) -> all y. P(y)", "RForall", (3,)),
        (f"({body}) -> {e}", "AxExists", ()),
        (f"(({body}) -> {e}) -> ((~({e}) -> all y. P(y)) -> {e})", "Taut", ()),
        (f"(~({e}) -> all y. P(y)) -> {e}", "MP", (5, 6)),
        (e, "MP", (4, 7)),
    ], calculus="ECforall")


_E2 = "eps x. P(x, eps y. Q(x, y))"

# name -> (lines, conclusion, hypotheses); conclusions are epsilon free
CRITICAL = {
    "single": ([("P(c) -> P(eps x. P(x))", "Crit")], TRIVIAL, ()),
    "two-witnesses": ([("P(c) -> P(eps x. P(x))", "Crit"), ("P(d) -> P(eps x. P(x))", "Crit")], TRIVIAL, ()),
    "two-terms": ([("P(c) -> P(eps x. P(x))", "Crit"), ("Q(c) -> Q(eps y. Q(y))", "Crit")], TRIVIAL, ()),
    "nested-witness": ([("P(eps y. Q(y)) -> P(eps x. P(x))", "Crit"), ("Q(c) -> Q(eps y. Q(y))", "Crit")],
                       TRIVIAL, ()),
    "self-witness": ([("P(f(c)) -> P(eps x. P(x))", "Crit"),
                      ("P(f(eps x. P(x))) -> P(eps x. P(x))", "Crit")], TRIVIAL, ()),
    "universal": ([("~P(c) -> ~P(eps x. ~P(x))", "Crit"), ("P(c) -> P(eps y. P(y))", "Crit")], TRIVIAL, ()),
    "binary": ([("R(c, d) -> R(eps x. R(x, d), d)", "Crit"), ("R(d, d) -> R(eps x. R(x, d), d)", "Crit"),
                ("R(c, c) -> R(eps x. R(x, c), c)", "Crit")], TRIVIAL, ()),
    "hypotheses": ([("P(c)", "Hyp"), ("P(c) -> S(d)", "Hyp"), ("P(c) -> P(eps x. P(x))", "Crit")],
                   "S(d)", ("P(c)", "P(c) -> S(d)")),
    "subordinate": ([(f"P(c, eps z. Q(c, z)) -> P({_E2}, eps z. Q({_E2}, z))", "Crit")], TRIVIAL, ()),
    "subordinate-pair": ([(f"P(c, eps z. Q(c, z)) -> P({_E2}, eps z. Q({_E2}, z))", "Crit"),
                         ("Q(c, d) -> Q(c, eps y. Q(c, y))", "Crit")], TRIVIAL, ()),
    "subordinate-three": ([(f"P(c, eps z. Q(c, z)) -> P({_E2}, eps z. Q({_E2}, z))", "Crit"),
                          ("Q(c, d) -> Q(c, eps y. Q(c, y))", "Crit"),
                          (f"Q({_E2}, c) -> Q({_E2}, eps z. Q({_E2}, z))", "Crit")], TRIVIAL, ()),
    "rank3": ([("U(c, eps y. V(c, y, eps w. W(c, y, w))) -> "
                "U(eps x. U(x, eps y. V(x, y, eps w. W(x, y, w))), "
                "eps y. V(eps x. U(x, eps y2. V(x, y2, eps w. W(x, y2, w))), y, "
                "eps w. W(eps x. U(x, eps y2. V(x, y2, eps w2. W(x, y2, w2))), y, w)))", "Crit")],
              TRIVIAL, ()),
}

_ER = "eps x. R(x, eps y. Q(x, y, d))"

# proofs using identity axioms for epsilon terms
IDENTITY = {
    "slot": [("c = d -> eps x. R(x, c) = eps x. R(x, d)", "EqEps"),
             ("R(c, d) -> R(eps x. R(x, d), d)", "Crit")],
    "slot-chain": [("c = d -> eps x. R(x, c) = eps x. R(x, d)", "EqEps"),
                   ("d = f(c) -> eps x. R(x, d) = eps x. R(x, f(c))", "EqEps"),
                   ("R(c, f(c)) -> R(eps x. R(x, f(c)), f(c))", "Crit")],
    "two-slots": [("c = d -> eps x. U(x, c, c) = eps x. U(x, d, c)", "EqEps"),
                  ("c = d -> eps x. U(x, d, c) = eps x. U(x, d, d)", "EqEps"),
                  ("U(c, d, d) -> U(eps x. U(x, d, d), d, d)", "Crit")],
    "back-and-forth": [("c = d -> eps x. R(x, c) = eps x. R(x, d)", "EqEps"),
                       ("d = c -> eps x. R(x, d) = eps x. R(x, c)", "EqEps"),
                       ("R(c, c) -> R(eps x. R(x, c), c)", "Crit"),
                       ("R(c, d) -> R(eps x. R(x, d), d)", "Crit")],
    "nested-special": [(f"c = d -> eps x. R(x, eps y. Q(x, y, c)) = {_ER}", "EqEps"),
                       (f"R(c, eps z. Q(c, z, d)) -> R({_ER}, eps z. Q({_ER}, z, d))", "Crit"),
                       ("Q(c, c, d) -> Q(c, eps z. Q(c, z, d), d)", "Crit")],
    "nested-two-specials": [(f"c = d -> eps x. R(x, eps y. Q(x, y, c)) = {_ER}", "EqEps"),
                           ("c = d -> eps z. Q(c, z, c) = eps z. Q(c, z, d)", "EqEps"),
                           (f"R(c, eps z. Q(c, z, d)) -> R({_ER}, eps z. Q({_ER}, z, d))", "Crit"),
                           ("Q(c, c, d) -> Q(c, eps z. Q(c, z, d), d)", "Crit")],
}


def critical_corpus() -> dict[str, Proof]:
    return {name: combine(lines, concl, hyps) for name, (lines, concl, hyps) in CRITICAL.items()}


def identity_corpus() -> dict[str, Proof]:
    return {name: combine(lines, TRIVIAL) for name, lines in IDENTITY.items()}


def hypothetical() -> dict[str, tuple[Proof, str]]:
    """Proofs from hypotheses, each with a hypothesis to discharge."""
    return {
        "modus-ponens": (proof([
            ("Q(c)", "Hyp", ()),
            ("Q(c) -> (P(c) -> S(c))", "Hyp", ()),
            ("P(c) -> S(c)", "MP", (1, 2)),
            ("P(c)", "Hyp", ()),
            ("S(c)", "MP", (4, 3)),
        ], ["Q(c)", "Q(c) -> (P(c) -> S(c))", "P(c)"]), "P(c)"),
        "exists-rule": (proof([
            ("(all y. (P(y) -> Q(c))) -> (P(z) -> Q(c))", "AxForall", ()),
            ("all y. (P(y) -> Q(c))", "Hyp", ()),
            ("P(z) -> Q(c)", "MP", (2, 1)),
            ("(ex x. P(x)) -> Q(c)", "RExists", (3,)),
        ], ["all y. (P(y) -> Q(c))"], "ECforall"), "all y. (P(y) -> Q(c))"),
        "forall-rule": (proof([
            ("(all y. (Q(c) -> P(y))) -> (Q(c) -> P(z))", "AxForall", ()),
            ("all y. (Q(c) -> P(y))", "Hyp", ()),
            ("Q(c) -> P(z)", "MP", (2, 1)),
            ("Q(c) -> (all x. P(x))", "RForall", (3,)),
        ], ["all y. (Q(c) -> P(y))"], "ECforall"), "all y. (Q(c) -> P(y))"),
        "critical": (proof([
            ("P(c)", "Hyp", ()),
            ("P(c) -> P(eps x. P(x))", "Crit", ()),
            ("P(eps x. P(x))", "MP", (1, 2)),
        ], ["P(c)"]), "P(c)"),
    }
