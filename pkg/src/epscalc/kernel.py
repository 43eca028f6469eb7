"""Hilbert-style proofs for the elementary and epsilon calculi, and their checker."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .parser import parse_formula, pretty
from .syntax import (
    App, Atom, Binder, Bot, Eps, Eq, Exists, Expr, Forall, Formula, Iff, Imp, Not, And, Or,
    Signature, Term, Top, Var, alpha_equiv, contains_epsilon, contains_quantifier, epsilon_type,
    fresh_var, signature_of, subterm_occurrences, substitute,
)
from .translate import translate


class ProofError(ValueError):
    """A proof transformation was asked to do something its preconditions forbid."""


class AtomLimitExceeded(ValueError):
    pass


AXIOMS = ("Taut", "Eq1", "Eq2", "Eq2Pred", "Eq2Fn", "EqEps", "Crit", "Ext", "ExtMinus",
          "AxExists", "AxForall")
RULES = ("MP", "RExists", "RForall")
IDENTITY_AXIOMS = frozenset({"Eq1", "Eq2", "Eq2Pred", "Eq2Fn", "EqEps"})
RESTRICTED_IDENTITY = frozenset({"Eq1", "Eq2Pred", "Eq2Fn", "EqEps"})


@dataclass(frozen=True)
class Calculus:
    name: str
    epsilon: bool
    ext: bool
    quantifiers: bool

    def allows(self, rule: str, identity: bool) -> bool:
        if rule in ("Hyp", "Taut", "MP"):
            return True
        if rule in IDENTITY_AXIOMS:
            return identity and (rule != "EqEps" or self.epsilon)
        if rule == "Crit":
            return self.epsilon
        if rule in ("Ext", "ExtMinus"):
            return self.ext
        if rule in ("AxExists", "AxForall", "RExists", "RForall"):
            return self.quantifiers
        return False


CALCULI = {
    "EC": Calculus("EC", False, False, False),
    "ECeps": Calculus("ECeps", True, False, False),
    "ECepsExt": Calculus("ECepsExt", True, True, False),
    "ECforall": Calculus("ECforall", False, False, True),
    "ECepsForall": Calculus("ECepsForall", True, False, True),
}


@dataclass(frozen=True)
class Justification:
    rule: str
    refs: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rule != "Hyp" and self.rule not in AXIOMS and self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}")
        want = {"MP": 2, "RExists": 1, "RForall": 1}.get(self.rule, 0)
        if len(self.refs) != want:
            raise ValueError(f"{self.rule} takes {want} premise(s), got {len(self.refs)}")


@dataclass(frozen=True)
class ProofLine:
    formula: Formula
    just: Justification


@dataclass(frozen=True)
class Proof:
    lines: tuple[ProofLine, ...]
    hypotheses: tuple[Formula, ...] = ()
    calculus: str = "ECeps"
    sig: Optional[Signature] = None

    def __post_init__(self):
        if not self.lines:
            raise ValueError("a proof has at least one line")
        if self.calculus not in CALCULI:
            raise ValueError(f"unknown calculus {self.calculus!r}")
        for i, line in enumerate(self.lines):
            if any(r < 0 or r >= i for r in line.just.refs):
                raise ValueError(f"line {i + 1} refers forward or out of range")

    @property
    def conclusion(self) -> Formula:
        return self.lines[-1].formula

    @property
    def signature(self) -> Signature:
        if self.sig is not None:
            return self.sig
        return signature_of(*self.hypotheses, *(l.formula for l in self.lines))

    def replace(self, **kw) -> "Proof":
        data = dict(lines=self.lines, hypotheses=self.hypotheses, calculus=self.calculus, sig=self.sig)
        data.update(kw)
        return Proof(**data)

    def __len__(self) -> int:
        return len(self.lines)

    def __str__(self) -> str:
        return format_proof(self)


def format_proof(p: Proof) -> str:
    width = len(str(len(p.lines)))
    out = []
    if p.hypotheses:
        out.append("hypotheses: " + "; ".join(pretty(h) for h in p.hypotheses))
    for i, line in enumerate(p.lines):
        refs = ",".join(str(r + 1) for r in line.just.refs)
        tag = line.just.rule + (f" {refs}" if refs else "")
        out.append(f"{i + 1:>{width}}. {pretty(line.formula)}    [{tag}]")
    return "\n".join(out)


# ---------------------------------------------------------------------------
# tautologies

def _atom_limit() -> int:
    return int(os.environ.get("EPSILON_MAX_ATOMS", "20"))


def propositional_atoms(a: Formula) -> dict[str, Formula]:
    """Maximal non-propositional subformulas of ``a``, keyed by canonical form."""
    atoms: dict[str, Formula] = {}

    def walk(f):
        if isinstance(f, (Atom, Eq, Forall, Exists)):
            atoms.setdefault(f.canon, f)
        else:
            for c in f.children():
                walk(c)

    walk(a)
    return atoms


def is_tautology(a: Formula, max_atoms: int | None = None) -> bool:
    """Truth-table check with the non-propositional parts treated as atoms.

    Each atom's column of the truth table is packed into one Python integer,
    so the whole table is evaluated with a handful of bitwise operations.
    """
    atoms = propositional_atoms(a)
    limit = _atom_limit() if max_atoms is None else max_atoms
    k = len(atoms)
    if k > limit:
        raise AtomLimitExceeded(f"{k} propositional atoms exceed the limit of {limit}")
    rows = 1 << k
    full = (1 << rows) - 1
    cols = {}
    for i, key in enumerate(atoms):
        half = 1 << i
        block = ((1 << half) - 1) << half
        cols[key] = block * (full // ((1 << (2 * half)) - 1))

    def ev(f) -> int:
        if isinstance(f, (Atom, Eq, Forall, Exists)):
            return cols[f.canon]
        if isinstance(f, Top):
            return full
        if isinstance(f, Bot):
            return 0
        if isinstance(f, Not):
            return full ^ ev(f.arg)
        l, r = ev(f.left), ev(f.right)
        if isinstance(f, And):
            return l & r
        if isinstance(f, Or):
            return l | r
        if isinstance(f, Imp):
            return (full ^ l) | r
        return full ^ (l ^ r)

    return ev(a) == full


# ---------------------------------------------------------------------------
# matching up to renaming of bound variables

def _match(p: Expr, t: Expr, holes: dict, penv: dict, tenv: dict, depth: int) -> bool:
    """Does ``t`` instantiate pattern ``p``, binding free hole variables consistently?"""
    if not (p.fv & (holes.keys() | penv.keys())) and not (t.fv & tenv.keys()):
        return isinstance(p, Term) == isinstance(t, Term) and p.canon == t.canon
    if isinstance(p, Var):
        if p.name in penv:
            return isinstance(t, Var) and tenv.get(t.name) == penv[p.name]
        if p.name in holes:
            if not isinstance(t, Term) or (t.fv & tenv.keys()):
                return False
            prev = holes[p.name]
            if prev is None:
                holes[p.name] = t
                return True
            return prev.canon == t.canon
        return isinstance(t, Var) and t.name == p.name and t.name not in tenv
    if type(p) is not type(t):
        return False
    if isinstance(p, App) and (p.fn != t.fn or p.arity != t.arity):
        return False
    if isinstance(p, Atom) and (p.pred != t.pred or p.arity != t.arity):
        return False
    if isinstance(p, Binder):
        return _match(p.body, t.body, holes, {**penv, p.var: depth}, {**tenv, t.var: depth}, depth + 1)
    return all(_match(a, b, holes, penv, tenv, depth) for a, b in zip(p.children(), t.children()))


def match_instance(pattern: Expr, hole: str, target: Expr) -> Optional[Term]:
    """The term ``s`` with ``pattern[hole/s]`` alpha-equivalent to ``target``, if any.

    Returns ``Var(hole)`` when the hole does not occur but the rest matches.
    """
    holes = {hole: None}
    if not _match(pattern, target, holes, {}, {}, 0):
        return None
    return holes[hole] if holes[hole] is not None else Var(hole)


def ctx_equal(a: Expr, b: Expr) -> bool:
    return _match(a, b, {}, {}, {}, 0)


def generalize(left: Expr, right: Expr, t: Term, u: Term, hole: str | None = None) -> Optional[tuple[Expr, str]]:
    """Find ``A`` with ``A[x/t] == left`` and ``A[x/u] == right`` (up to renaming).

    Positions where the two sides differ must be subterm occurrences holding
    ``t`` on the left and ``u`` on the right; they become the fresh variable ``x``.
    """
    if hole is None:
        hole = fresh_var(left.names | right.names | t.names | u.names)
    tk, uk = t.canon, u.canon

    def walk(l, r, lenv, renv, depth):
        if _match(l, r, {}, lenv, renv, depth):
            return l
        if isinstance(l, Term) and isinstance(r, Term) and not (l.fv & lenv.keys()) \
                and not (r.fv & renv.keys()) and l.canon == tk and r.canon == uk:
            return Var(hole)
        if type(l) is not type(r):
            return None
        if isinstance(l, App) and (l.fn != r.fn or l.arity != r.arity):
            return None
        if isinstance(l, Atom) and (l.pred != r.pred or l.arity != r.arity):
            return None
        if isinstance(l, Binder):
            body = walk(l.body, r.body, {**lenv, l.var: depth}, {**renv, r.var: depth}, depth + 1)
            return None if body is None else type(l)(l.var, body)
        kids = []
        for a, b in zip(l.children(), r.children()):
            k = walk(a, b, lenv, renv, depth)
            if k is None:
                return None
            kids.append(k)
        return l.rebuild(kids)

    out = walk(left, right, {}, {}, 0)
    return None if out is None else (out, hole)


# ---------------------------------------------------------------------------
# axiom schemas

@dataclass(frozen=True)
class CritMatch:
    body: Formula      # A(x)
    var: str           # x
    witness: Term      # t
    term: Eps          # eps x A(x)


def match_crit(f: Formula) -> Optional[CritMatch]:
    if not isinstance(f, Imp):
        return None
    lhs, rhs = f.left, f.right
    for o in subterm_occurrences(rhs):
        e = o.term
        if not isinstance(e, Eps):
            continue
        if substitute(e.body, e.var, e).canon != rhs.canon:
            continue
        w = match_instance(e.body, e.var, lhs)
        if w is not None:
            return CritMatch(e.body, e.var, w, e)
    return None


def _slot_change(args1, args2, t: Term, u: Term) -> Optional[int]:
    """Index where ``args1`` holds ``t`` and ``args2`` holds ``u``, all other slots agreeing."""
    if len(args1) != len(args2):
        return None
    diff = [i for i, (a, b) in enumerate(zip(args1, args2)) if a.canon != b.canon]
    if len(diff) > 1:
        return None
    if diff:
        i = diff[0]
        return i if args1[i].canon == t.canon and args2[i].canon == u.canon else None
    if t.canon != u.canon:
        return None
    return next((i for i, a in enumerate(args1) if a.canon == t.canon), None)


def _identity_parts(f: Formula):
    if isinstance(f, Imp) and isinstance(f.left, Eq):
        return f.left.left, f.left.right, f.right
    return None


def match_eq2(f: Formula):
    parts = _identity_parts(f)
    if parts is None or not isinstance(parts[2], Iff):
        return None
    t, u, body = parts
    g = generalize(body.left, body.right, t, u)
    if g is None:
        return None
    return {"t": t, "u": u, "A": g[0], "x": g[1]}


def _pred_args(f: Formula):
    if isinstance(f, Atom):
        return ("P", f.pred), f.args
    if isinstance(f, Eq):
        return ("=",), (f.left, f.right)
    return None, None


def match_eq2_pred(f: Formula):
    parts = _identity_parts(f)
    if parts is None or not isinstance(parts[2], Imp):
        return None
    t, u, body = parts
    k1, a1 = _pred_args(body.left)
    k2, a2 = _pred_args(body.right)
    if k1 is None or k1 != k2:
        return None
    i = _slot_change(a1, a2, t, u)
    return None if i is None else {"t": t, "u": u, "position": i}


def match_eq2_fn(f: Formula):
    parts = _identity_parts(f)
    if parts is None or not isinstance(parts[2], Eq):
        return None
    t, u, body = parts
    l, r = body.left, body.right
    if not (isinstance(l, App) and isinstance(r, App) and l.fn == r.fn):
        return None
    i = _slot_change(l.args, r.args, t, u)
    return None if i is None else {"t": t, "u": u, "position": i}


def match_eq_eps(f: Formula):
    parts = _identity_parts(f)
    if parts is None or not isinstance(parts[2], Eq):
        return None
    t, u, body = parts
    l, r = body.left, body.right
    if not (isinstance(l, Eps) and isinstance(r, Eps)):
        return None
    ty1, a1 = epsilon_type(l)
    ty2, a2 = epsilon_type(r)
    if ty1 != ty2:
        return None
    i = _slot_change(a1, a2, t, u)
    return None if i is None else {"type": ty1, "slot": i, "t": t, "u": u, "left": l, "right": r}


def ext_antecedent(a: Eps, b: Eps) -> Formula:
    """``(all z (A(z) <-> B(z)))`` under the epsilon translation."""
    z = fresh_var(a.names | b.names)
    return translate(Forall(z, Iff(substitute(a.body, a.var, Var(z)), substitute(b.body, b.var, Var(z)))))


def match_ext(f: Formula):
    if not (isinstance(f, Imp) and isinstance(f.right, Eq)):
        return None
    a, b = f.right.left, f.right.right
    if not (isinstance(a, Eps) and isinstance(b, Eps)):
        return None
    if ext_antecedent(a, b).canon != f.left.canon:
        return None
    return {"A": a, "B": b}


def match_ext_minus(f: Formula):
    if not (isinstance(f, Imp) and isinstance(f.right, Iff) and isinstance(f.left, Iff)):
        return None
    for o in subterm_occurrences(f.left):
        d = o.term
        if not (isinstance(d, Eps) and isinstance(d.body, Not) and isinstance(d.body.arg, Iff)):
            continue
        p, q = d.body.arg.left, d.body.arg.right
        if d.var not in p.fv or d.var not in q.fv:
            continue
        a, b = Eps(d.var, p), Eps(d.var, q)
        if ext_antecedent(a, b).canon != f.left.canon:
            continue
        if generalize(f.right.left, f.right.right, a, b) is not None:
            return {"A": a, "B": b}
    return None


def match_ax_exists(f: Formula):
    if isinstance(f, Imp) and isinstance(f.right, Exists):
        w = match_instance(f.right.body, f.right.var, f.left)
        if w is not None:
            return {"A": f.right.body, "x": f.right.var, "t": w}
    return None


def match_ax_forall(f: Formula):
    if isinstance(f, Imp) and isinstance(f.left, Forall):
        w = match_instance(f.left.body, f.left.var, f.right)
        if w is not None:
            return {"A": f.left.body, "x": f.left.var, "t": w}
    return None


def match_eq1(f: Formula):
    if isinstance(f, Eq) and f.left.canon == f.right.canon:
        return {"t": f.left}
    return None


_MATCHERS = {
    "Eq1": match_eq1, "Eq2": match_eq2, "Eq2Pred": match_eq2_pred, "Eq2Fn": match_eq2_fn,
    "EqEps": match_eq_eps, "Crit": match_crit, "Ext": match_ext, "ExtMinus": match_ext_minus,
    "AxExists": match_ax_exists, "AxForall": match_ax_forall,
}


def match_axiom(f: Formula, schema: str, calculus: str | None = None, identity: bool = True):
    """Bindings witnessing that ``f`` is an instance of ``schema``, or ``None``."""
    if calculus is not None and not CALCULI[calculus].allows(schema, identity):
        return None
    if schema == "Taut":
        return {} if is_tautology(f) else None
    return _MATCHERS[schema](f)


# ---------------------------------------------------------------------------
# checking

@dataclass
class CheckReport:
    ok: bool
    failures: list[tuple[int, str]] = field(default_factory=list)
    eigenvariables: list[str] = field(default_factory=list)
    critical_terms: list[tuple[Term, list[int]]] = field(default_factory=list)
    conclusion: Optional[Formula] = None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "conclusion": pretty(self.conclusion) if self.conclusion is not None else None,
            "failures": [{"line": i + 1, "reason": r} for i, r in self.failures],
            "eigenvariables": list(self.eigenvariables),
            "critical_terms": [{"term": pretty(t), "lines": [i + 1 for i in ls]} for t, ls in self.critical_terms],
        }


def _rule_premise(p: Proof, i: int) -> tuple[Optional[str], Optional[str]]:
    """(eigenvariable, error) for an RExists/RForall line."""
    line = p.lines[i]
    f = line.formula
    prem = p.lines[line.just.refs[0]].formula
    if line.just.rule == "RExists":
        if not (isinstance(f, Imp) and isinstance(f.left, Exists) and isinstance(prem, Imp)):
            return None, "R-exists needs 'ex x. B -> C' from 'B(x) -> C'"
        if f.right.canon != prem.right.canon:
            return None, "R-exists: consequents differ"
        q, instance = f.left, prem.left
    else:
        if not (isinstance(f, Imp) and isinstance(f.right, Forall) and isinstance(prem, Imp)):
            return None, "R-forall needs 'C -> all x. B' from 'C -> B(x)'"
        if f.left.canon != prem.left.canon:
            return None, "R-forall: antecedents differ"
        q, instance = f.right, prem.right
    w = match_instance(q.body, q.var, instance)
    if not isinstance(w, Var):
        return None, "premise is not an instance of the quantified formula at a variable"
    return w.name, None


def eigenvariables(p: Proof) -> list[str]:
    out = []
    for i, line in enumerate(p.lines):
        if line.just.rule in ("RExists", "RForall"):
            v, _ = _rule_premise(p, i)
            if v is not None and v not in out:
                out.append(v)
    return out


def _language_problem(f: Formula, calc: Calculus, sig: Optional[Signature]) -> Optional[str]:
    if not calc.epsilon and contains_epsilon(f):
        return f"epsilon terms are not part of the language of {calc.name}"
    if not calc.quantifiers and contains_quantifier(f):
        return f"quantifiers are not part of the language of {calc.name}"
    if sig is not None:
        bad = sig.violations(f)
        if bad:
            return "not in the signature: " + ", ".join(sorted(set(bad)))
    return None


# schema instances depend only on the formula, so verdicts are shared across proofs
_AXIOM_CACHE: dict[tuple[str, str], bool] = {}


def check_line(p: Proof, i: int) -> Optional[str]:
    """Reason why line ``i`` is not correctly justified, or ``None``."""
    calc = CALCULI[p.calculus]
    sig = p.sig
    identity = sig.identity if sig is not None else True
    line = p.lines[i]
    f, rule = line.formula, line.just.rule
    problem = _language_problem(f, calc, sig)
    if problem:
        return problem
    if not calc.allows(rule, identity):
        return f"{rule} is not available in {calc.name}" + ("" if identity else " without identity")
    if rule == "Hyp":
        if any(alpha_equiv(f, h) for h in p.hypotheses):
            return None
        return "not among the hypotheses"
    if rule == "MP":
        k, l = line.just.refs
        b, bc = p.lines[k].formula, p.lines[l].formula
        if isinstance(bc, Imp) and bc.left.canon == b.canon and bc.right.canon == f.canon:
            return None
        return f"MP: line {l + 1} is not 'line {k + 1} -> this line'"
    if rule in ("RExists", "RForall"):
        _, err = _rule_premise(p, i)
        return err
    key = (rule, f.canon)
    ok = _AXIOM_CACHE.get(key)
    if ok is None:
        try:
            ok = match_axiom(f, rule) is not None
        except AtomLimitExceeded as exc:
            return str(exc)
        if len(_AXIOM_CACHE) > 200_000:
            _AXIOM_CACHE.clear()
        _AXIOM_CACHE[key] = ok
    return None if ok else f"not an instance of {rule}"


def check_proof(p: Proof) -> CheckReport:
    failures: list[tuple[int, str]] = []
    crit: dict[str, tuple[Term, list[int]]] = {}
    for i, line in enumerate(p.lines):
        reason = check_line(p, i)
        if reason:
            failures.append((i, reason))
        elif line.just.rule == "Crit":
            m = match_crit(line.formula)
            crit.setdefault(m.term.canon, (m.term, []))[1].append(i)
    eig = []
    hyp_fv = set().union(*(h.fv for h in p.hypotheses)) if p.hypotheses else set()
    for i, line in enumerate(p.lines):
        if line.just.rule not in ("RExists", "RForall"):
            continue
        v, err = _rule_premise(p, i)
        if v is None:
            continue
        eig.append(v)
        later = [k for k in range(i, len(p.lines)) if v in p.lines[k].formula.fv]
        if later:
            failures.append((i, f"eigenvariable {v} occurs free in line {later[0] + 1}"))
        if v in hyp_fv:
            failures.append((i, f"eigenvariable {v} occurs free in a hypothesis"))
    failures.sort()
    return CheckReport(not failures, failures, list(dict.fromkeys(eig)), list(crit.values()), p.conclusion)


def assert_checks(p: Proof, what: str = "proof") -> Proof:
    rep = check_proof(p)
    if not rep.ok:
        i, reason = rep.failures[0]
        raise ProofError(f"{what} does not check: line {i + 1}: {pretty(p.lines[i].formula)}: {reason}")
    return p


# ---------------------------------------------------------------------------
# building proofs

class ProofBuilder:
    """Accumulates proof lines; every helper returns the index of the line it adds."""

    def __init__(self, hypotheses: Iterable[Formula] = ()):
        self.lines: list[ProofLine] = []
        self.hypotheses: list[Formula] = list(hypotheses)

    def add(self, formula: Formula, rule: str, *refs: int) -> int:
        self.lines.append(ProofLine(formula, Justification(rule, tuple(refs))))
        return len(self.lines) - 1

    def formula(self, i: int) -> Formula:
        return self.lines[i].formula

    def hyp(self, formula: Formula) -> int:
        if not any(alpha_equiv(formula, h) for h in self.hypotheses):
            self.hypotheses.append(formula)
        return self.add(formula, "Hyp")

    def taut(self, formula: Formula) -> int:
        return self.add(formula, "Taut")

    def mp(self, i: int, j: int) -> int:
        bc = self.lines[j].formula
        if not isinstance(bc, Imp):
            raise ProofError("MP needs an implication")
        return self.add(bc.right, "MP", i, j)

    def chain(self, premises: list[int], target: Formula) -> int:
        """Add the tautology ``P1 -> (P2 -> ... -> target)`` and detach every premise."""
        imp = target
        for i in reversed(premises):
            imp = Imp(self.lines[i].formula, imp)
        k = self.taut(imp)
        for i in premises:
            k = self.mp(i, k)
        return k

    def splice(self, proof: Proof, subst=None) -> int:
        """Append the lines of ``proof``; return the index of its conclusion."""
        off = len(self.lines)
        for line in proof.lines:
            f = line.formula if subst is None else subst(line.formula)
            self.lines.append(ProofLine(f, Justification(line.just.rule, tuple(r + off for r in line.just.refs))))
        for h in proof.hypotheses:
            if not any(alpha_equiv(h, g) for g in self.hypotheses):
                self.hypotheses.append(h)
        return len(self.lines) - 1

    def build(self, calculus: str = "ECeps", sig: Optional[Signature] = None) -> Proof:
        return Proof(tuple(self.lines), tuple(self.hypotheses), calculus, sig)


# ---------------------------------------------------------------------------
# file format

def proof_from_json(data: dict) -> Proof:
    sig = Signature.from_json(data["signature"]) if data.get("signature") is not None else None
    hyps = tuple(parse_formula(h, sig) for h in data.get("hypotheses", []))
    lines = []
    for entry in data["lines"]:
        f = parse_formula(entry["formula"], sig)
        refs = tuple(int(r) - 1 for r in entry.get("refs", []))
        lines.append(ProofLine(f, Justification(entry["rule"], refs)))
    return Proof(tuple(lines), hyps, data.get("calculus", "ECeps"), sig)


def proof_to_json(p: Proof) -> dict:
    # an inferred signature is not written back; it would forbid new symbols downstream
    out = {"signature": p.sig.to_json()} if p.sig is not None else {}
    return out | {
        "calculus": p.calculus,
        "hypotheses": [pretty(h) for h in p.hypotheses],
        "lines": [{"formula": pretty(l.formula), "rule": l.just.rule, "refs": [r + 1 for r in l.just.refs]}
                  for l in p.lines],
    }
