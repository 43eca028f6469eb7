"""Concrete syntax: ASCII parser and pretty-printer.

Grammar, loosest binding first::

    formula := imp ('<->' formula)?
    imp     := or ('->' imp)?
    or      := and ('|' and)*
    and     := unary ('&' unary)*
    unary   := '~' unary | ('all' | 'ex') VAR '.' formula | primary
    primary := '(' formula ')' | '_|_' | 'T' | PRED ['(' terms ')'] | term '=' term
    term    := 'eps' VAR '.' formula | '(' term ')' | FN ['(' terms ')'] | VAR

Binder bodies extend as far right as possible.  Without a signature, symbols
are classified by spelling: capitalised names are predicates, a lower-case
name applied to arguments is a function, and bare lower-case names are
variables when they start with ``u``-``z`` or ``_`` and constants otherwise.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    KEYWORDS, And, App, Atom, Binder, Bot, Eps, Eq, EpsilonSyntaxError, Exists, Expr, Forall, Formula,
    Iff, Imp, Not, Or, Signature, Term, Top, Var,
)


class ParseError(EpsilonSyntaxError):
    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        super().__init__(message if pos is None else f"{message} at position {pos}")


class UndeclaredSymbol(ParseError):
    pass


class ArityMismatch(ParseError):
    pass


_TOKEN = re.compile(r"\s*(?:(<->|->|_\|_|[~&|().,=])|([A-Za-z_][A-Za-z0-9_]*))")


@dataclass
class _Tok:
    kind: str  # 'sym', 'id', 'end'
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(1) if m.group(1) else m.start(2)
        if m.group(1):
            toks.append(_Tok("sym", m.group(1), start))
        else:
            toks.append(_Tok("id", m.group(2), start))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


def _is_variable_name(name: str) -> bool:
    return name.startswith("_") or name[0] in "uvwxyz"


class _Parser:
    def __init__(self, text: str, sig: Signature | None):
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = sig

    # -- token helpers
    def peek(self, k: int = 0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind == "sym" and t.text == text

    def at_kw(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "id" and t.text == text

    def take(self) -> _Tok:
        t = self.peek()
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        t = self.peek()
        if not (t.kind == "sym" and t.text == text):
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.pos)
        return self.take()

    # -- symbol classification
    def classify(self, name: str, applied: bool, pos: int) -> str:
        if name.startswith("_"):
            if applied:
                raise ParseError(f"{name} is reserved for variables", pos)
            return "var"
        if self.sig is None:
            if name[0].isupper():
                return "pred"
            if applied:
                return "fn"
            return "var" if _is_variable_name(name) else "fn"
        if name in self.sig.predicates:
            return "pred"
        if name in self.sig.functions:
            return "fn"
        if applied or name[0].isupper():
            raise UndeclaredSymbol(f"undeclared symbol {name!r}", pos)
        return "var"

    def check_arity(self, kind: str, name: str, n: int, pos: int) -> None:
        if self.sig is None:
            return
        table = self.sig.predicates if kind == "pred" else self.sig.functions
        if table[name] != n:
            raise ArityMismatch(f"{name} expects {table[name]} arguments, got {n}", pos)

    # -- grammar
    def formula(self) -> Formula:
        left = self.imp()
        if self.at("<->"):
            self.take()
            return Iff(left, self.formula())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.at("->"):
            self.take()
            return Imp(left, self.imp())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.at("|"):
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.at("&"):
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        if self.at("~"):
            self.take()
            return Not(self.unary())
        if self.at_kw("all") or self.at_kw("ex"):
            kw = self.take()
            var = self.binder_var()
            body = self.formula()
            return self.bind(Forall if kw.text == "all" else Exists, var, body, kw.pos)
        return self.primary()

    def binder_var(self) -> str:
        t = self.take()
        if t.kind != "id" or t.text in KEYWORDS:
            raise ParseError("expected a variable after binder", t.pos)
        if self.sig is not None and (t.text in self.sig.functions or t.text in self.sig.predicates):
            raise ParseError(f"{t.text} is a declared symbol, not a variable", t.pos)
        self.expect(".")
        return t.text

    @staticmethod
    def bind(cls, var, body, pos):
        try:
            return cls(var, body)
        except EpsilonSyntaxError as exc:
            raise type(exc)(f"{exc} (binder at position {pos})") from None

    def primary(self) -> Formula:
        t = self.peek()
        if self.at("("):
            save = self.i
            try:
                left = self.term()
                if self.at("="):
                    return self.identity(left)
            except ParseError:
                pass
            self.i = save
            self.take()
            f = self.formula()
            self.expect(")")
            return f
        if self.at("_|_"):
            self.take()
            return Bot()
        if self.at_kw("T"):
            self.take()
            return Top()
        if t.kind == "id" and t.text not in KEYWORDS:
            applied = self.at("(", 1)
            if self.classify(t.text, applied, t.pos) == "pred":
                self.take()
                args = self.arglist() if applied else ()
                self.check_arity("pred", t.text, len(args), t.pos)
                return Atom(t.text, args)
        left = self.term()
        if not self.at("="):
            found = self.peek()
            raise ParseError(f"expected '=' after term, found {found.text or 'end of input'!r}", found.pos)
        return self.identity(left)

    def identity(self, left: Term) -> Formula:
        t = self.expect("=")
        if self.sig is not None and not self.sig.identity:
            raise UndeclaredSymbol("identity is not part of the signature", t.pos)
        return Eq(left, self.term())

    def arglist(self) -> tuple[Term, ...]:
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.term())
            while self.at(","):
                self.take()
                args.append(self.term())
        self.expect(")")
        return tuple(args)

    def term(self) -> Term:
        t = self.peek()
        if self.at("("):
            self.take()
            inner = self.term()
            self.expect(")")
            return inner
        if self.at_kw("eps"):
            self.take()
            var = self.binder_var()
            return self.bind(Eps, var, self.formula(), t.pos)
        if t.kind != "id" or t.text in KEYWORDS:
            raise ParseError(f"expected a term, found {t.text or 'end of input'!r}", t.pos)
        applied = self.at("(", 1)
        kind = self.classify(t.text, applied, t.pos)
        if kind == "pred":
            raise ParseError(f"predicate {t.text} used as a term", t.pos)
        self.take()
        if kind == "var":
            return Var(t.text)
        args = self.arglist() if applied else ()
        self.check_arity("fn", t.text, len(args), t.pos)
        return App(t.text, args)

    def finish(self):
        t = self.peek()
        if t.kind != "end":
            raise ParseError(f"unexpected {t.text!r}", t.pos)


def parse(text: str, sig: Signature | None = None, kind: str = "formula") -> Expr:
    """Parse a formula (or a term with ``kind="term"``)."""
    p = _Parser(text, sig)
    if kind == "formula":
        out = p.formula()
    elif kind == "term":
        out = p.term()
    else:
        raise ValueError(f"kind must be 'formula' or 'term', not {kind!r}")
    p.finish()
    return out


def parse_formula(text: str, sig: Signature | None = None) -> Formula:
    return parse(text, sig, "formula")


def parse_term(text: str, sig: Signature | None = None) -> Term:
    return parse(text, sig, "term")


# ---------------------------------------------------------------------------
# printing

_PREC = {Iff: 1, Imp: 2, Or: 3, And: 4}
_OPS = {Iff: "<->", Imp: "->", Or: "|", And: "&"}


def pretty(e: Expr) -> str:
    if isinstance(e, Term):
        return _term(e, True)
    return _formula(e, 0)


def _term(t: Term, delimited_right: bool) -> str:
    # delimited_right: whether a ',' or ')' is guaranteed to follow
    if isinstance(t, Var):
        return t.name
    if isinstance(t, App):
        if not t.args:
            return t.fn + ("()" if _is_variable_name(t.fn) else "")
        return f"{t.fn}({', '.join(_term(a, True) for a in t.args)})"
    if isinstance(t, Eps):
        s = f"eps {t.var}. {_formula(t.body, 0)}"
        return s if delimited_right else f"({s})"
    raise TypeError(t)


def _formula(f: Formula, ctx: int) -> str:
    if isinstance(f, Atom):
        if not f.args:
            return f.pred
        return f"{f.pred}({', '.join(_term(a, True) for a in f.args)})"
    if isinstance(f, Eq):
        return f"{_term(f.left, False)} = {_term(f.right, False)}"
    if isinstance(f, Bot):
        return "_|_"
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Not):
        return "~" + _formula(f.arg, 5)
    if isinstance(f, Binder):
        s = f"{'all' if isinstance(f, Forall) else 'ex'} {f.var}. {_formula(f.body, 0)}"
        return f"({s})" if ctx > 0 else s
    prec = _PREC[type(f)]
    if isinstance(f, (Imp, Iff)):
        s = f"{_formula(f.left, prec + 1)} {_OPS[type(f)]} {_formula(f.right, prec)}"
    else:
        s = f"{_formula(f.left, prec)} {_OPS[type(f)]} {_formula(f.right, prec + 1)}"
    return f"({s})" if ctx > prec else s
