"""Finite structures, choice semantics and brute-force truth checking.

Domain elements are ``0 .. n-1``.  A subset of the domain is a bitmask, so an
extensional choice function is a table indexed by ``0 .. 2**n - 1``.  An
intensional choice operator maps an epsilon type key and a tuple of slot
values to such a table.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .syntax import (
    And, App, Atom, Bot, Eps, Eq, EpsilonType, Exists, Expr, Forall, Formula, Iff, Imp, Not, Or,
    Signature, Term, Top, Var, epsilon_type, iter_nodes, signature_of,
)

DEFAULT_CHOICE_BOUND = 3
DEFAULT_OPERATOR_BUDGET = 1 << 20
MODES = ("l", "t", "g", "v")
_MODE_ALIASES = {"plain": "t", "truth": "t", "local": "l", "generic": "g", "valid": "v"}


class SemanticsError(ValueError):
    pass


class Uninterpreted(SemanticsError):
    pass


class BoundExceeded(SemanticsError):
    pass


# ---------------------------------------------------------------------------
# structures


@dataclass(frozen=True)
class Structure:
    size: int
    functions: Mapping[str, Mapping[tuple[int, ...], int]] = field(default_factory=dict)
    predicates: Mapping[str, frozenset[tuple[int, ...]]] = field(default_factory=dict)

    def __post_init__(self):
        if self.size < 1:
            raise SemanticsError("the domain must be nonempty")
        fns = {}
        for name, table in self.functions.items():
            if isinstance(table, int):
                table = {(): table}
            table = {tuple(k): v for k, v in table.items()}
            arities = {len(k) for k in table}
            if len(arities) != 1:
                raise SemanticsError(f"function {name} has mixed arities")
            k = arities.pop()
            if len(table) != self.size ** k or any(not 0 <= v < self.size for v in table.values()) or \
                    any(not 0 <= a < self.size for key in table for a in key):
                raise SemanticsError(f"function {name} is not a total map into the domain")
            fns[name] = table
        preds = {}
        for name, ext in self.predicates.items():
            ext = frozenset((m,) if isinstance(m, int) else tuple(m) for m in ext)
            if len({len(m) for m in ext}) > 1 or any(not 0 <= a < self.size for m in ext for a in m):
                raise SemanticsError(f"predicate {name} has an ill-formed extension")
            preds[name] = ext
        object.__setattr__(self, "functions", fns)
        object.__setattr__(self, "predicates", preds)

    @property
    def domain(self) -> range:
        return range(self.size)

    def function_arity(self, name: str) -> int:
        return len(next(iter(self.functions[name])))

    def interprets(self, sig: Signature) -> bool:
        for name, k in sig.functions.items():
            if name not in self.functions or self.function_arity(name) != k:
                return False
        for name, k in sig.predicates.items():
            ext = self.predicates.get(name)
            if ext is None or any(len(m) != k for m in ext):
                return False
        return True

    def to_json(self) -> dict:
        fns = {}
        for name, table in sorted(self.functions.items()):
            k = self.function_arity(name)
            fns[name] = table[()] if k == 0 else _nest(table, self.size, k)
        preds = {name: [list(m) for m in sorted(ext)] for name, ext in sorted(self.predicates.items())}
        return {"domain": self.size, "functions": fns, "predicates": preds}

    @classmethod
    def from_json(cls, data: Mapping) -> "Structure":
        n = int(data["domain"])
        fns = {name: _unnest(table) for name, table in data.get("functions", {}).items()}
        preds = {name: [tuple(m) if isinstance(m, list) else (m,) for m in ext]
                 for name, ext in data.get("predicates", {}).items()}
        return cls(n, fns, preds)


def _nest(table, n, k, prefix=()):
    if len(prefix) == k:
        return table[prefix]
    return [_nest(table, n, k, prefix + (a,)) for a in range(n)]


def _unnest(value, prefix=()) -> dict:
    if isinstance(value, int):
        return {prefix: value}
    out = {}
    for a, sub in enumerate(value):
        out.update(_unnest(sub, prefix + (a,)))
    return out


def enumerate_structures(sig: Signature, n: int) -> Iterator[Structure]:
    """Every structure of size ``n`` for ``sig``, in a fixed order."""
    fnames = sorted(sig.functions)
    pnames = sorted(sig.predicates)
    fn_choices = []
    for name in fnames:
        keys = list(itertools.product(range(n), repeat=sig.functions[name]))
        fn_choices.append([dict(zip(keys, vals)) for vals in itertools.product(range(n), repeat=len(keys))])
    pred_choices = []
    for name in pnames:
        tuples = list(itertools.product(range(n), repeat=sig.predicates[name]))
        pred_choices.append([frozenset(t for i, t in enumerate(tuples) if bits >> i & 1)
                             for bits in range(1 << len(tuples))])
    for fvals in itertools.product(*fn_choices):
        for pvals in itertools.product(*pred_choices):
            yield Structure(n, dict(zip(fnames, fvals)), dict(zip(pnames, pvals)))


# ---------------------------------------------------------------------------
# choice functions and operators


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for a in elements:
        m |= 1 << a
    return m


def members(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


@dataclass(frozen=True)
class ExtChoiceFunction:
    table: tuple[int, ...]

    def __post_init__(self):
        n = len(self.table).bit_length() - 1
        if n < 1 or len(self.table) != 1 << n:
            raise SemanticsError("a choice table needs one entry per subset of a nonempty domain")
        object.__setattr__(self, "table", tuple(self.table))
        if not 0 <= self.table[0] < n:
            raise SemanticsError("the value at the empty set must be a domain element")
        for mask in range(1, len(self.table)):
            if not mask >> self.table[mask] & 1:
                raise SemanticsError(f"choice for {members(mask)} is {self.table[mask]}, not a member")

    @property
    def size(self) -> int:
        return len(self.table).bit_length() - 1

    def __call__(self, mask: int) -> int:
        return self.table[mask]

    def to_json(self) -> dict:
        return {str(mask): v for mask, v in enumerate(self.table)}

    @classmethod
    def from_json(cls, data: Mapping) -> "ExtChoiceFunction":
        entries = {int(k): int(v) for k, v in data.items()}
        return cls(tuple(entries[m] for m in range(len(entries))))

    @classmethod
    def least(cls, n: int) -> "ExtChoiceFunction":
        return cls(tuple(0 if m == 0 else (m & -m).bit_length() - 1 for m in range(1 << n)))


def choice_function_count(n: int) -> int:
    return n * math.prod(bin(m).count("1") for m in range(1, 1 << n))


def enumerate_choice_functions(m: Structure | int, bound: int = DEFAULT_CHOICE_BOUND) -> Iterator[ExtChoiceFunction]:
    n = m if isinstance(m, int) else m.size
    if n > bound:
        raise BoundExceeded(f"domain size {n} exceeds the choice-function bound {bound}")
    options = [range(n)] + [members(mask) for mask in range(1, 1 << n)]
    for table in itertools.product(*options):
        yield ExtChoiceFunction(table)


SlotKey = tuple[str, tuple[int, ...]]


@dataclass(frozen=True)
class IntChoiceOperator:
    """Choice functions indexed by (epsilon type key, slot values).

    Keys missing from ``entries`` fall back to ``default``; without a default
    they are an error.
    """

    entries: Mapping[SlotKey, ExtChoiceFunction] = field(default_factory=dict)
    default: ExtChoiceFunction | None = None

    def __post_init__(self):
        sizes = {f.size for f in self.entries.values()}
        if self.default is not None:
            sizes.add(self.default.size)
        if len(sizes) > 1:
            raise SemanticsError("choice functions of an operator must share a domain")

    def choose(self, key: str, args: tuple[int, ...]) -> ExtChoiceFunction:
        f = self.entries.get((key, args), self.default)
        if f is None:
            raise Uninterpreted(f"operator has no choice function for type {key} at {args}")
        return f

    def to_json(self) -> dict:
        out: dict = {}
        for (key, args), f in self.entries.items():
            out.setdefault(key, {})[",".join(map(str, args))] = f.to_json()
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "IntChoiceOperator":
        entries = {}
        for key, by_args in data.items():
            for args, table in by_args.items():
                t = tuple(int(a) for a in args.split(",")) if args else ()
                entries[(key, t)] = ExtChoiceFunction.from_json(table)
        return cls(entries)


Chooser = Union[ExtChoiceFunction, IntChoiceOperator]


def epsilon_types(*exprs: Expr) -> list[EpsilonType]:
    """The distinct types of all epsilon subterms, in order of first occurrence."""
    seen: dict[str, EpsilonType] = {}
    for e in exprs:
        for node in iter_nodes(e):
            if isinstance(node, Eps):
                ty, _ = epsilon_type(node)
                seen.setdefault(ty.key, ty)
    return list(seen.values())


def enumerate_intensional_operators(m: Structure | int, types: Sequence[EpsilonType],
                                    budget: int = DEFAULT_OPERATOR_BUDGET,
                                    bound: int = DEFAULT_CHOICE_BOUND) -> Iterator[IntChoiceOperator]:
    """All operators over the keys ``types x domain**arity``, lazily."""
    n = m if isinstance(m, int) else m.size
    keys = [(ty.key, args) for ty in types for args in itertools.product(range(n), repeat=ty.arity)]
    keys = list(dict.fromkeys(keys))
    total = choice_function_count(n) ** len(keys)
    if total > budget:
        raise BoundExceeded(f"{total} operators over {len(keys)} keys exceed the budget {budget}")
    fns = list(enumerate_choice_functions(n, bound))
    for combo in itertools.product(fns, repeat=len(keys)):
        yield IntChoiceOperator(dict(zip(keys, combo)))


# ---------------------------------------------------------------------------
# assignments and evaluation


@dataclass(frozen=True)
class Assignment:
    values: Mapping[str, int] = field(default_factory=dict)
    default: int = 0

    def __call__(self, x: str) -> int:
        return self.values.get(x, self.default)

    def updated(self, x: str, m: int) -> "Assignment":
        return Assignment({**self.values, x: m}, self.default)

    def to_json(self) -> dict:
        return dict(sorted(self.values.items()))


def assignments(m: Structure | int, variables: Iterable[str]) -> Iterator[Assignment]:
    n = m if isinstance(m, int) else m.size
    vs = sorted(set(variables))
    for vals in itertools.product(range(n), repeat=len(vs)):
        yield Assignment(dict(zip(vs, vals)))


class _Evaluator:
    def __init__(self, m: Structure, chooser: Chooser):
        self.m = m
        self.chooser = chooser
        self.intensional = isinstance(chooser, IntChoiceOperator)
        self.types: dict[int, tuple[Eps, str, tuple[Term, ...]]] = {}

    def slot_terms(self, e: Eps):
        hit = self.types.get(id(e))
        if hit is None or hit[0] is not e:
            ty, args = epsilon_type(e)
            hit = (e, ty.key, args)
            self.types[id(e)] = hit
        return hit[1], hit[2]

    def term(self, t: Term, s: dict) -> int:
        if isinstance(t, Var):
            return s.get(t.name, s.get(None, 0))
        if isinstance(t, App):
            table = self.m.functions.get(t.fn)
            if table is None:
                raise Uninterpreted(f"function {t.fn} is not interpreted")
            key = tuple(self.term(a, s) for a in t.args)
            if key not in table:
                raise Uninterpreted(f"function {t.fn} is not interpreted at arity {len(key)}")
            return table[key]
        if isinstance(t, Eps):
            mask = self.satisfiers(t.var, t.body, s)
            if not self.intensional:
                return self.chooser(mask)
            key, args = self.slot_terms(t)
            return self.chooser.choose(key, tuple(self.term(a, s) for a in args))(mask)
        raise TypeError(t)

    def satisfiers(self, x: str, body: Formula, s: dict) -> int:
        mask = 0
        inner = dict(s)
        for a in range(self.m.size):
            inner[x] = a
            if self.formula(body, inner):
                mask |= 1 << a
        return mask

    def formula(self, f: Formula, s: dict) -> bool:
        if isinstance(f, Atom):
            ext = self.m.predicates.get(f.pred)
            if ext is None:
                raise Uninterpreted(f"predicate {f.pred} is not interpreted")
            return tuple(self.term(a, s) for a in f.args) in ext
        if isinstance(f, Eq):
            return self.term(f.left, s) == self.term(f.right, s)
        if isinstance(f, Top):
            return True
        if isinstance(f, Bot):
            return False
        if isinstance(f, Not):
            return not self.formula(f.arg, s)
        if isinstance(f, And):
            return self.formula(f.left, s) and self.formula(f.right, s)
        if isinstance(f, Or):
            return self.formula(f.left, s) or self.formula(f.right, s)
        if isinstance(f, Imp):
            return not self.formula(f.left, s) or self.formula(f.right, s)
        if isinstance(f, Iff):
            return self.formula(f.left, s) == self.formula(f.right, s)
        if isinstance(f, (Forall, Exists)):
            inner = dict(s)
            want = isinstance(f, Exists)
            for a in range(self.m.size):
                inner[f.var] = a
                if self.formula(f.body, inner) == want:
                    return want
            return not want
        raise TypeError(f)


def _env(s: Assignment | Mapping[str, int] | None) -> dict:
    if s is None:
        return {}
    if isinstance(s, Assignment):
        env = dict(s.values)
        env[None] = s.default
        return env
    return dict(s)


def eval(m: Structure, chooser: Chooser, s: Assignment | Mapping[str, int] | None, e: Expr):  # noqa: A001
    """The value of a term (an element) or of a formula (a bool)."""
    ev = _Evaluator(m, chooser)
    env = _env(s)
    if isinstance(e, Term):
        return ev.term(e, env)
    return ev.formula(e, env)


def satisfies(m: Structure, chooser: Chooser, s, formulas: Iterable[Formula]) -> bool:
    ev = _Evaluator(m, chooser)
    env = _env(s)
    return all(ev.formula(f, env) for f in formulas)


# ---------------------------------------------------------------------------
# truth notions


def _free(formulas: Iterable[Formula]) -> frozenset[str]:
    out: frozenset[str] = frozenset()
    for f in formulas:
        out |= f.fv
    return out


def choosers_for(m: Structure, formulas: Sequence[Formula], intensional: bool = False,
                 budget: int = DEFAULT_OPERATOR_BUDGET) -> list[Chooser]:
    if intensional:
        return list(enumerate_intensional_operators(m, epsilon_types(*formulas), budget))
    return list(enumerate_choice_functions(m))


def check_truth_mode(m: Structure, e: Formula, mode: str, phi: Chooser | None = None,
                     s: Assignment | Mapping[str, int] | None = None, intensional: bool = False,
                     choosers: Sequence[Chooser] | None = None) -> bool:
    """Whether ``e`` is locally true, true, generically true or generically valid in ``m``.

    ``local`` needs ``phi`` and ``s``; ``truth`` needs ``phi``; ``generic``
    needs ``s``.  Universally quantified choosers range over ``choosers``
    when given, otherwise over every extensional choice function (or every
    intensional operator on the types of ``e``).
    """
    mode = {"l": "local", "t": "truth", "plain": "truth", "g": "generic", "v": "valid"}.get(mode, mode)
    if mode in ("local", "truth") and phi is None:
        raise SemanticsError(f"{mode} truth needs a choice function")
    if mode in ("local", "generic") and s is None:
        raise SemanticsError(f"{mode} truth needs an assignment")
    if mode not in ("local", "truth", "generic", "valid"):
        raise SemanticsError(f"unknown truth mode {mode!r}")
    phis = [phi] if mode in ("local", "truth") else (
        list(choosers) if choosers is not None else choosers_for(m, [e], intensional))
    envs = [s] if mode in ("local", "generic") else list(assignments(m, e.fv))
    return all(satisfies(m, p, env, [e]) for p in phis for env in envs)


@dataclass
class Counterexample:
    structure: Structure
    chooser: Chooser
    assignment: Assignment
    premise_assignment: Assignment | None = None

    def to_json(self) -> dict:
        out = self.structure.to_json()
        if isinstance(self.chooser, IntChoiceOperator):
            out["intensional"] = self.chooser.to_json()
        else:
            out["choice"] = self.chooser.to_json()
        out["assignment"] = self.assignment.to_json()
        if self.premise_assignment is not None:
            out["premise_assignment"] = self.premise_assignment.to_json()
        return out


@dataclass
class Verdict:
    holds: bool
    mode: str
    max_n: int
    structures: int
    counterexample: Counterexample | None = None

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "mode": self.mode,
            "max_domain": self.max_n,
            "structures_checked": self.structures,
            "counterexample": None if self.counterexample is None else self.counterexample.to_json(),
        }


def _first_failure(m, phis, envs, formulas):
    for p in phis:
        for env in envs:
            if not satisfies(m, p, env, formulas):
                return p, env
    return None


def check_consequence(gamma: Sequence[Formula], a: Formula, mode: str, max_n: int = 2,
                      sig: Signature | None = None, intensional: bool = False,
                      budget: int = DEFAULT_OPERATOR_BUDGET, min_n: int = 1) -> Verdict:
    """Search every structure of size ``min_n .. max_n`` for a counterexample.

    ``l``: premises and conclusion at the same M, chooser and s.
    ``t``: premises true for all s imply the conclusion true for all s, per M and chooser.
    ``g``: premises generically true at s imply the conclusion generically valid in M.
    ``v``: premises generically valid imply the conclusion generically valid.
    """
    mode = _MODE_ALIASES.get(mode, mode)
    if mode not in MODES:
        raise SemanticsError(f"unknown consequence mode {mode!r}")
    gamma = list(gamma)
    sig = sig or signature_of(*gamma, a)
    variables = _free(gamma + [a])
    checked = 0
    for n in range(min_n, max_n + 1):
        envs = list(assignments(n, variables))
        a_envs = list(assignments(n, a.fv))
        for m in enumerate_structures(sig, n):
            checked += 1
            phis = choosers_for(m, gamma + [a], intensional, budget)
            cex = None
            if mode == "l":
                for p in phis:
                    for env in envs:
                        if satisfies(m, p, env, gamma) and not satisfies(m, p, env, [a]):
                            cex = Counterexample(m, p, env)
                            break
                    if cex:
                        break
            elif mode == "t":
                for p in phis:
                    if all(satisfies(m, p, env, gamma) for env in envs):
                        bad = _first_failure(m, [p], a_envs, [a])
                        if bad:
                            cex = Counterexample(m, *bad)
                            break
            elif mode == "g":
                bad = _first_failure(m, phis, a_envs, [a])
                if bad:
                    for env in envs:
                        if all(satisfies(m, p, env, gamma) for p in phis):
                            cex = Counterexample(m, *bad, premise_assignment=env)
                            break
            else:
                if _first_failure(m, phis, envs, gamma) is None:
                    bad = _first_failure(m, phis, a_envs, [a])
                    if bad:
                        cex = Counterexample(m, *bad)
            if cex is not None:
                return Verdict(False, mode, max_n, checked, cex)
    return Verdict(True, mode, max_n, checked)


def generically_valid(f: Formula, max_n: int = 2, sig: Signature | None = None,
                      intensional: bool = False) -> Verdict:
    return check_consequence([], f, "v", max_n, sig, intensional)


# ---------------------------------------------------------------------------
# model files


def load_model(data: Mapping) -> tuple[Structure, Chooser | None, Assignment]:
    m = Structure.from_json(data)
    chooser: Chooser | None = None
    if "choice" in data:
        chooser = ExtChoiceFunction.from_json(data["choice"])
    elif "intensional" in data:
        chooser = IntChoiceOperator.from_json(data["intensional"])
    if chooser is not None and (
            chooser.size if isinstance(chooser, ExtChoiceFunction) else
            next((f.size for f in chooser.entries.values()), m.size)) != m.size:
        raise SemanticsError("choice table does not match the domain size")
    s = Assignment({k: int(v) for k, v in data.get("assignment", {}).items()})
    return m, chooser, s


def dump_model(m: Structure, chooser: Chooser | None = None, s: Assignment | None = None) -> dict:
    out = m.to_json()
    if isinstance(chooser, IntChoiceOperator):
        out["intensional"] = chooser.to_json()
    elif chooser is not None:
        out["choice"] = chooser.to_json()
    if s is not None:
        out["assignment"] = s.to_json()
    return out
