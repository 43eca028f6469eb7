"""Terms and formulas of the epsilon calculus.

Expressions are immutable dataclasses with named variables.  Alpha-equivalence,
hashing into dictionaries and ordering all go through ``canon``, a string form
in which bound variables are replaced by de Bruijn indices, so two expressions
are alpha-equivalent exactly when their canonical strings coincide.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping, Union


class EpsilonSyntaxError(ValueError):
    """Base class for malformed expressions and parse failures."""


class VacuousBinder(EpsilonSyntaxError):
    """A binder whose variable is not free in its body, or is re-bound inside it."""


IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
KEYWORDS = frozenset({"all", "ex", "eps", "T"})
FRESH_PREFIX = "_v"


class Expr:
    """Common behaviour of terms and formulas."""

    def children(self) -> tuple["Expr", ...]:
        return ()

    def rebuild(self, children) -> "Expr":
        return self

    @cached_property
    def fv(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for c in self.children():
            out |= c.fv
        return out

    @cached_property
    def bound(self) -> frozenset[str]:
        """Names used by binders anywhere inside the expression."""
        out: frozenset[str] = frozenset()
        for c in self.children():
            out |= c.bound
        return out

    @cached_property
    def names(self) -> frozenset[str]:
        """Every variable name occurring in the expression, free or bound."""
        return self.fv | self.bound

    @cached_property
    def canon(self) -> str:
        return _canon(self, ())

    @cached_property
    def size(self) -> int:
        return 1 + sum(c.size for c in self.children())

    def __str__(self) -> str:
        from .parser import pretty

        return pretty(self)


class Term(Expr):
    pass


class Formula(Expr):
    pass


@dataclass(frozen=True, eq=True, repr=False)
class Var(Term):
    name: str

    @cached_property
    def fv(self) -> frozenset[str]:
        return frozenset((self.name,))

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


@dataclass(frozen=True, repr=False)
class App(Term):
    fn: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def children(self):
        return self.args

    def rebuild(self, children):
        return App(self.fn, tuple(children))

    def __repr__(self) -> str:
        return f"App({self.fn!r}, {self.args!r})"


class Binder(Expr):
    var: str
    body: "Formula"

    def children(self):
        return (self.body,)

    def rebuild(self, children):
        return type(self)(self.var, children[0])

    def _check_binder(self) -> None:
        if self.var not in self.body.fv:
            raise VacuousBinder(f"{self.var} has no free occurrence in the body of {self!r}")
        if self.var in self.body.bound:
            raise VacuousBinder(f"{self.var} is bound again inside the body of {self!r}")

    @cached_property
    def fv(self) -> frozenset[str]:
        return self.body.fv - {self.var}

    @cached_property
    def bound(self) -> frozenset[str]:
        return self.body.bound | {self.var}


@dataclass(frozen=True, repr=False)
class Eps(Binder, Term):
    var: str
    body: "Formula"

    def __post_init__(self):
        self._check_binder()

    def __repr__(self) -> str:
        return f"Eps({self.var!r}, {self.body!r})"


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    pred: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def children(self):
        return self.args

    def rebuild(self, children):
        return Atom(self.pred, tuple(children))

    def __repr__(self) -> str:
        return f"Atom({self.pred!r}, {self.args!r})"


@dataclass(frozen=True, repr=False)
class Eq(Formula):
    left: Term
    right: Term

    def children(self):
        return (self.left, self.right)

    def rebuild(self, children):
        return Eq(*children)

    def __repr__(self) -> str:
        return f"Eq({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Bot(Formula):
    def __repr__(self) -> str:
        return "Bot()"


@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self) -> str:
        return "Top()"


@dataclass(frozen=True, repr=False)
class Not(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)

    def rebuild(self, children):
        return Not(children[0])

    def __repr__(self) -> str:
        return f"Not({self.arg!r})"


class Binary(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)

    def rebuild(self, children):
        return type(self)(*children)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class And(Binary):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Or(Binary):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Imp(Binary):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Iff(Binary):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Forall(Binder, Formula):
    var: str
    body: Formula

    def __post_init__(self):
        self._check_binder()

    def __repr__(self) -> str:
        return f"Forall({self.var!r}, {self.body!r})"


@dataclass(frozen=True, repr=False)
class Exists(Binder, Formula):
    var: str
    body: Formula

    def __post_init__(self):
        self._check_binder()

    def __repr__(self) -> str:
        return f"Exists({self.var!r}, {self.body!r})"


Expression = Union[Term, Formula]

_TAGS = {Not: "~", And: "&", Or: "|", Imp: "->", Iff: "<->", Eq: "=",
         Eps: "eps", Forall: "all", Exists: "ex"}


def _canon(e: Expr, env: tuple[str, ...]) -> str:
    # env holds enclosing binder names, innermost last
    if env and not (e.fv & set(env)):
        return e.canon
    if isinstance(e, Var):
        for i in range(len(env) - 1, -1, -1):
            if env[i] == e.name:
                return f"#{len(env) - 1 - i}"
        return e.name
    if isinstance(e, App):
        return f"{e.fn}({','.join(_canon(a, env) for a in e.args)})"
    if isinstance(e, Atom):
        return f"{e.pred}[{','.join(_canon(a, env) for a in e.args)}]"
    if isinstance(e, Bot):
        return "_|_"
    if isinstance(e, Top):
        return "T"
    if isinstance(e, Binder):
        return f"{_TAGS[type(e)]}.({_canon(e.body, env + (e.var,))})"
    return f"{_TAGS[type(e)]}({','.join(_canon(c, env) for c in e.children())})"


# ---------------------------------------------------------------------------
# basic queries

def free_vars(e: Expr) -> frozenset[str]:
    return e.fv


def is_closed(e: Expr) -> bool:
    return not e.fv


def alpha_equiv(a: Expr, b: Expr) -> bool:
    """True iff ``a`` and ``b`` differ only in the names of bound variables."""
    if a is b:
        return True
    return isinstance(a, Term) == isinstance(b, Term) and a.canon == b.canon


def fresh_var(avoid) -> str:
    """Smallest ``_vN`` not in ``avoid``."""
    n = 0
    while f"{FRESH_PREFIX}{n}" in avoid:
        n += 1
    return f"{FRESH_PREFIX}{n}"


def contains_epsilon(e: Expr) -> bool:
    return any(isinstance(x, Eps) for x in iter_nodes(e))


def contains_quantifier(e: Expr) -> bool:
    return any(isinstance(x, (Forall, Exists)) for x in iter_nodes(e))


def iter_nodes(e: Expr) -> Iterator[Expr]:
    stack = [e]
    while stack:
        x = stack.pop()
        yield x
        stack.extend(reversed(x.children()))


# ---------------------------------------------------------------------------
# substitution

def substitute(e: Expr, x: str, t: Term) -> Expr:
    """``e[x/t]``, renaming bound variables of ``e`` where ``t`` would be captured."""
    return substitute_many(e, {x: t})


def substitute_many(e: Expr, mapping: Mapping[str, Term]) -> Expr:
    """Simultaneous capture-avoiding substitution."""
    return _subst(e, mapping, frozenset())


def _subst(e: Expr, mapping: Mapping[str, Term], above: frozenset[str]) -> Expr:
    # above: binder names enclosing e in the output; a renamed binder must not reuse them
    relevant = {x: t for x, t in mapping.items() if x in e.fv}
    if not relevant:
        return e
    if isinstance(e, Var):
        return relevant[e.name]
    if isinstance(e, Binder):
        danger: set[str] = set()
        for t in relevant.values():
            danger |= t.names
        var, body = e.var, e.body
        if var in danger:
            new = fresh_var(danger | body.names | set(relevant) | {var} | above)
            body = _subst(body, {var: Var(new)}, above)
            var = new
        return type(e)(var, _subst(body, relevant, above | {var}))
    return e.rebuild([_subst(c, relevant, above) for c in e.children()])


def rename_bound(e: Expr, avoid) -> Expr:
    """Alpha-variant of ``e`` none of whose binders uses a name in ``avoid``."""
    avoid = set(avoid)
    if not (e.bound & avoid):
        return e
    if isinstance(e, Binder):
        body = rename_bound(e.body, avoid)
        var = e.var
        if var in avoid:
            new = fresh_var(avoid | body.names | e.names)
            body = substitute_many(body, {var: Var(new)})
            var = new
        return type(e)(var, body)
    return e.rebuild([rename_bound(c, avoid) for c in e.children()])


# ---------------------------------------------------------------------------
# subterms

Path = tuple[int, ...]


@dataclass(frozen=True)
class Occurrence:
    term: Term
    path: Path
    immediate: bool


def subterm_occurrences(e: Expr) -> list[Occurrence]:
    """All subterm occurrences of ``e`` (the root excluded), left to right.

    A position counts only if none of the term's variables is bound by a
    binder of ``e`` above it.  ``immediate`` marks occurrences not lying
    inside another subterm occurrence.
    """
    out: list[Occurrence] = []

    def walk(node: Expr, path: Path, bound: frozenset[str], inside: bool) -> None:
        occ = False
        if path and isinstance(node, Term) and not (node.fv & bound):
            occ = True
            out.append(Occurrence(node, path, not inside))
        if isinstance(node, Binder):
            bound = bound | {node.var}
        for i, c in enumerate(node.children()):
            walk(c, path + (i,), bound, inside or occ)

    walk(e, (), frozenset(), False)
    return out


def subexpr_at(e: Expr, path: Path) -> Expr:
    for i in path:
        e = e.children()[i]
    return e


def replace_at(e: Expr, replacements: Mapping[Path, Term], _path: Path = ()) -> Expr:
    """Replace the subterms at the given paths.  The caller guarantees no capture."""
    if _path in replacements:
        return replacements[_path]
    if not any(p[: len(_path)] == _path for p in replacements):
        return e
    return e.rebuild([replace_at(c, replacements, _path + (i,)) for i, c in enumerate(e.children())])


def replace_subterm(e: Expr, t: Term, u: Term) -> Expr:
    """``e[[t/u]]``: replace every subterm occurrence of a term alpha-equivalent to ``t`` by ``u``."""
    key = t.canon
    danger = u.names
    tsize = t.size

    def walk(node: Expr, bound: frozenset[str]) -> Expr:
        if node.size < tsize:
            return node
        if isinstance(node, Term) and not (node.fv & bound) and node.canon == key:
            return u
        if isinstance(node, Binder):
            var, body = node.var, node.body
            if var in danger:
                new = fresh_var(danger | node.names | t.names | bound)
                body = substitute_many(body, {var: Var(new)})
                var = new
            nb = walk(body, bound | {var})
            if nb is body and var == node.var:
                return node
            return type(node)(var, nb)
        kids = node.children()
        new = [walk(c, bound) for c in kids]
        if all(a is b for a, b in zip(new, kids)):
            return node
        return node.rebuild(new)

    return walk(e, frozenset())


def has_subterm(e: Expr, t: Term) -> bool:
    key = t.canon
    return any(o.term.canon == key for o in subterm_occurrences(e)) or (
        isinstance(e, Term) and e.canon == key)


def epsilon_subterms(e: Expr) -> list[Term]:
    """Epsilon terms occurring as subterms of ``e`` (root included), deduplicated up to alpha."""
    seen: dict[str, Term] = {}
    if isinstance(e, Eps):
        seen[e.canon] = e
    for o in subterm_occurrences(e):
        if isinstance(o.term, Eps):
            seen.setdefault(o.term.canon, o.term)
    return list(seen.values())


# ---------------------------------------------------------------------------
# epsilon types, degree, rank

ARGVAR_PREFIX = "_x"
BOUND_PREFIX = "_b"


@dataclass(frozen=True)
class EpsilonType:
    """An epsilon term over argument variables ``_x1 .. _xn``, one occurrence each."""

    pattern: Eps
    argvars: tuple[str, ...]

    @property
    def arity(self) -> int:
        return len(self.argvars)

    @property
    def key(self) -> str:
        return self.pattern.canon

    def instantiate(self, args) -> Eps:
        args = tuple(args)
        if len(args) != self.arity:
            raise ValueError(f"type has {self.arity} slots, got {len(args)} arguments")
        return substitute_many(self.pattern, dict(zip(self.argvars, args)))

    def __str__(self) -> str:
        return str(self.pattern)


def _normalize_binders(e: Expr, depth: int = 0) -> Expr:
    if isinstance(e, Binder):
        name = f"{BOUND_PREFIX}{depth}"
        body = e.body
        if name != e.var:
            body = substitute_many(body, {e.var: Var(name)}) if name not in body.names else \
                substitute_many(rename_bound(body, {name}), {e.var: Var(name)})
        return type(e)(name, _normalize_binders(body, depth + 1))
    kids = e.children()
    if not kids:
        return e
    return e.rebuild([_normalize_binders(c, depth) for c in kids])


def epsilon_type(e: Term) -> tuple[EpsilonType, tuple[Term, ...]]:
    """The canonical type of an epsilon term and the terms filling its slots."""
    if not isinstance(e, Eps):
        raise TypeError(f"not an epsilon term: {e}")
    occs = [o for o in subterm_occurrences(e) if o.immediate]
    argvars = tuple(f"{ARGVAR_PREFIX}{i + 1}" for i in range(len(occs)))
    abstracted = replace_at(e, {o.path: Var(v) for o, v in zip(occs, argvars)})
    pattern = _normalize_binders(abstracted)
    return EpsilonType(pattern, argvars), tuple(o.term for o in occs)


def degree(t: Term) -> int:
    if not isinstance(t, Eps):
        return 0
    return _degree(t)


_DEGREE: dict[str, int] = {}


def _degree(t: Eps) -> int:
    hit = _DEGREE.get(t.canon)
    if hit is None:
        nested = [o.term for o in subterm_occurrences(t) if isinstance(o.term, Eps)]
        hit = 1 + max((_degree(n) for n in nested), default=0)
        _DEGREE[t.canon] = hit
    return hit


_RANK: dict[str, int] = {}


def subordinate_terms(t: Eps) -> list[Eps]:
    """Epsilon terms occurring inside ``t`` with the variable bound by ``t`` free in them."""
    return [n for n in iter_nodes(t.body) if isinstance(n, Eps) and t.var in n.fv]


def rank(t: Term) -> int:
    if not isinstance(t, Eps):
        raise TypeError(f"rank is defined for epsilon terms only: {t}")
    hit = _RANK.get(t.canon)
    if hit is None:
        hit = 1 + max((rank(s) for s in subordinate_terms(t)), default=0)
        _RANK[t.canon] = hit
    return hit


# ---------------------------------------------------------------------------
# signatures


@dataclass
class Signature:
    functions: dict[str, int] = field(default_factory=dict)
    predicates: dict[str, int] = field(default_factory=dict)
    identity: bool = True
    epsilon: bool = True
    quantifiers: bool = True

    def __post_init__(self):
        for name in list(self.functions) + list(self.predicates):
            if not IDENTIFIER.match(name) or name.startswith("_") or name in KEYWORDS:
                raise EpsilonSyntaxError(f"illegal symbol name {name!r}")
        clash = set(self.functions) & set(self.predicates)
        if clash:
            raise EpsilonSyntaxError(f"symbols declared as both function and predicate: {sorted(clash)}")

    @classmethod
    def from_json(cls, data: dict) -> "Signature":
        return cls(
            functions={f["name"]: int(f["arity"]) for f in data.get("functions", [])},
            predicates={p["name"]: int(p["arity"]) for p in data.get("predicates", [])},
            identity=bool(data.get("identity", True)),
            epsilon=bool(data.get("epsilon", True)),
            quantifiers=bool(data.get("quantifiers", True)),
        )

    def to_json(self) -> dict:
        return {
            "functions": [{"name": n, "arity": a} for n, a in self.functions.items()],
            "predicates": [{"name": n, "arity": a} for n, a in self.predicates.items()],
            "identity": self.identity,
        }

    def merged(self, other: "Signature") -> "Signature":
        return Signature({**self.functions, **other.functions}, {**self.predicates, **other.predicates},
                         self.identity or other.identity)

    def constants(self) -> list[str]:
        return [n for n, a in self.functions.items() if a == 0]

    def violations(self, e: Expr) -> list[str]:
        """Symbols of ``e`` that the signature does not declare (or declares with another arity)."""
        bad = []
        for n in iter_nodes(e):
            if isinstance(n, App) and self.functions.get(n.fn) != n.arity:
                bad.append(f"function {n.fn}/{n.arity}")
            elif isinstance(n, Atom) and self.predicates.get(n.pred) != n.arity:
                bad.append(f"predicate {n.pred}/{n.arity}")
            elif isinstance(n, Eq) and not self.identity:
                bad.append("identity")
        return bad


def signature_of(*exprs: Expr, identity: bool | None = None) -> Signature:
    fns: dict[str, int] = {}
    preds: dict[str, int] = {}
    has_eq = False
    for e in exprs:
        for n in iter_nodes(e):
            if isinstance(n, App):
                fns[n.fn] = n.arity
            elif isinstance(n, Atom):
                preds[n.pred] = n.arity
            elif isinstance(n, Eq):
                has_eq = True
    return Signature(fns, preds, has_eq if identity is None else identity)


# ---------------------------------------------------------------------------
# small constructors


def disjunction(ds) -> Formula:
    ds = list(ds)
    if not ds:
        return Bot()
    out = ds[-1]
    for d in reversed(ds[:-1]):
        out = Or(d, out)
    return out


def conjunction(cs) -> Formula:
    cs = list(cs)
    if not cs:
        return Top()
    out = cs[-1]
    for c in reversed(cs[:-1]):
        out = And(c, out)
    return out


def dedup(exprs) -> list:
    seen = set()
    out = []
    for e in exprs:
        if e.canon not in seen:
            seen.add(e.canon)
            out.append(e)
    return out
