"""The epsilon translation, replacing quantifiers by epsilon terms."""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import Binder, Eps, Exists, Expr, Forall, Not, substitute


@dataclass(frozen=True)
class TraceStep:
    source: Expr
    clause: str  # 'exists', 'forall' or 'epsilon'
    result: Expr


@dataclass
class TranslationTrace:
    steps: list[TraceStep] = field(default_factory=list)

    def lookup(self, source: Expr) -> Expr | None:
        for s in self.steps:
            if s.source.canon == source.canon:
                return s.result
        return None

    def replay(self, e: Expr) -> Expr:
        """Rebuild the translation of ``e`` from recorded steps only."""
        if not any(isinstance(n, Binder) for n in _nodes(e)):
            return e
        hit = self.lookup(e)
        if hit is not None:
            return hit
        return e.rebuild([self.replay(c) for c in e.children()])


def _nodes(e):
    yield e
    for c in e.children():
        yield from _nodes(c)


def epsilon_translate(e: Expr) -> tuple[Expr, TranslationTrace]:
    trace = TranslationTrace()
    return _tr(e, trace), trace


def translate(e: Expr) -> Expr:
    return _tr(e, None)


def _tr(e: Expr, trace: TranslationTrace | None) -> Expr:
    if isinstance(e, (Exists, Forall)):
        body = _tr(e.body, trace)
        if isinstance(e, Exists):
            witness = Eps(e.var, body)
            clause = "exists"
        else:
            witness = Eps(e.var, Not(body))
            clause = "forall"
        out = substitute(body, e.var, witness)
    elif isinstance(e, Eps):
        out = Eps(e.var, _tr(e.body, trace))
        clause = "epsilon"
    else:
        kids = e.children()
        if not kids:
            return e
        new = [_tr(c, trace) for c in kids]
        if all(a is b for a, b in zip(new, kids)):
            return e
        return e.rebuild(new)
    if trace is not None:
        trace.steps.append(TraceStep(e, clause, out))
    return out
