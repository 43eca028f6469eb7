"""The first epsilon theorem as a proof rewriter, with and without identity."""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Optional

from .kernel import (
    Justification, Proof, ProofBuilder, ProofError, ProofLine, _match, assert_checks, check_proof, match_axiom, match_crit,
    match_eq2, match_eq_eps,
)
from .parser import pretty
from .syntax import (
    Eps, Eq, Expr, Formula, Imp, Not, Term, Var, alpha_equiv, contains_epsilon, contains_quantifier,
    dedup, degree, disjunction, epsilon_type, fresh_var, rank, replace_subterm, substitute,
)
from .transforms import cone, deduction_transform, derive_eq2, symmetry, transitivity

MAX_STEPS = 400


class EliminationError(ProofError):
    """An elimination step produced something it should not have; indicates a bug."""


# ---------------------------------------------------------------------------
# bookkeeping

@dataclass(frozen=True)
class CriticalTerm:
    term: Eps
    witnesses: tuple[Term, ...]
    lines: tuple[int, ...]


@dataclass(frozen=True)
class SpecialTerm:
    term: Eps
    lines: tuple[int, ...]


@dataclass
class ProofMetrics:
    rank: int
    r_degree: dict[int, int]
    r_order: dict[int, int]
    critical: list[CriticalTerm]
    special: list[SpecialTerm]

    def order(self, r: int | None = None) -> int:
        return self.r_order.get(self.rank if r is None else r, 0)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "r_degree": {str(k): v for k, v in sorted(self.r_degree.items())},
            "r_order": {str(k): v for k, v in sorted(self.r_order.items())},
            "critical": [{"term": pretty(c.term), "witnesses": [pretty(w) for w in c.witnesses],
                          "lines": [i + 1 for i in c.lines]} for c in self.critical],
            "special": [{"term": pretty(s.term), "lines": [i + 1 for i in s.lines]} for s in self.special],
        }


def proof_metrics(p: Proof, check: bool = True) -> ProofMetrics:
    if check:
        rep = check_proof(p)
        if not rep.ok:
            i, reason = rep.failures[0]
            raise ProofError(f"proof does not check: line {i + 1}: {reason}")
    crit: dict[str, tuple[Eps, list[Term], list[int]]] = {}
    spec: dict[str, tuple[Eps, list[int]]] = {}
    for i, line in enumerate(p.lines):
        if line.just.rule == "Crit":
            m = match_crit(line.formula)
            entry = crit.setdefault(m.term.canon, (m.term, [], []))
            entry[1].append(m.witness)
            entry[2].append(i)
        elif line.just.rule == "EqEps":
            m = match_eq_eps(line.formula)
            spec.setdefault(m["right"].canon, (m["right"], []))[1].append(i)
    critical = [CriticalTerm(e, tuple(dedup(ws)), tuple(ls)) for e, ws, ls in crit.values()]
    r_degree: dict[int, int] = {}
    r_order: dict[int, int] = {}
    for c in critical:
        r = rank(c.term)
        r_order[r] = r_order.get(r, 0) + 1
        r_degree[r] = max(r_degree.get(r, 0), degree(c.term))
    return ProofMetrics(max(r_order, default=0), r_degree, r_order, critical,
                        [SpecialTerm(e, tuple(ls)) for e, ls in spec.values()])


@dataclass(frozen=True)
class ElimStep:
    term: Eps
    strategy: str          # "critical" or "special"
    before: ProofMetrics
    after: ProofMetrics
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"term": pretty(self.term), "strategy": self.strategy, "before": self.before.to_json(),
                "after": self.after.to_json(), **self.detail}


@dataclass
class ElimTrace:
    steps: list[ElimStep] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"steps": [s.to_json() for s in self.steps]}

    def lex_descent(self) -> bool:
        """Every critical step strictly lowers (rank, order at that rank)."""
        for s in self.steps:
            if s.strategy != "critical":
                continue
            r = s.before.rank
            if (s.after.rank, s.after.order(s.after.rank)) >= (r, s.before.order(r)):
                return False
        return True


# ---------------------------------------------------------------------------
# the order on type instances

class InstanceOrder:
    """Strict order on instances of epsilon types.

    Slot terms are ordered by degree, ties broken by canonical form; instances
    of one type first by their largest slot degree, then slot by slot.
    """

    def __init__(self, terms=()):
        self.instances = dedup(t for t in terms if isinstance(t, Eps))
        slots = [a for t in self.instances for a in epsilon_type(t)[1]]
        self.base = sorted(dedup(slots), key=self.slot_key)

    @staticmethod
    def slot_key(t: Term) -> tuple[int, str]:
        return degree(t), t.canon

    def key(self, e: Eps) -> tuple:
        _, args = epsilon_type(e)
        keys = tuple(self.slot_key(a) for a in args)
        return max((k[0] for k in keys), default=0), keys

    def less(self, a: Eps, b: Eps) -> bool:
        ta, tb = epsilon_type(a)[0], epsilon_type(b)[0]
        if ta != tb:
            raise ValueError("only instances of one epsilon type are compared")
        return self.key(a) < self.key(b)

    def sorted(self, terms=None) -> list[Eps]:
        return sorted(dedup(self.instances if terms is None else terms), key=self.key)

    def maximal(self, terms) -> Eps:
        return max(terms, key=self.key)


def instance_order(terms) -> InstanceOrder:
    return InstanceOrder(terms)


def _multiset_less(new: Counter, old: Counter, key) -> bool:
    """Multiset extension of the order given by ``key``."""
    if new == old:
        return False
    grew = [x for x in new if new[x] > old.get(x, 0)]
    shrank = [y for y in old if old[y] > new.get(y, 0)]
    return all(any(key(y) > key(x) for y in shrank) for x in grew)


def _special_profile(p: Proof, type_key: str) -> tuple[Counter, dict]:
    counts: Counter = Counter()
    terms = {}
    for line in p.lines:
        if line.just.rule == "EqEps":
            e = match_eq_eps(line.formula)["right"]
            if epsilon_type(e)[0].key == type_key:
                counts[e.canon] += 1
                terms[e.canon] = e
    return counts, terms


# ---------------------------------------------------------------------------
# shared machinery

def compact(p: Proof) -> Proof:
    """Reuse the first derivation of every repeated formula."""
    first: dict[str, int] = {}
    index: list[int] = []
    lines = []
    for line in p.lines:
        key = line.formula.canon
        if key in first:
            index.append(first[key])
            continue
        refs = tuple(index[r] for r in line.just.refs)
        lines.append(ProofLine(line.formula, Justification(line.just.rule, refs)))
        first[key] = len(lines) - 1
        index.append(len(lines) - 1)
    if index[-1] != len(lines) - 1:
        last = lines[index[-1]]
        lines.append(ProofLine(last.formula, last.just))
    return p.replace(lines=tuple(lines))


def prune(p: Proof) -> Proof:
    """Drop repeated lines and lines the conclusion does not depend on."""
    p = compact(p)
    return cone(p, len(p.lines) - 1)


def _discharge(p: Proof, a: Formula) -> Proof:
    return deduction_transform(p, a, lazy=True)


def _combine(p: Proof, branches: list[tuple[Proof, list[Formula]]]) -> tuple[Proof, list[Formula]]:
    """Splice proofs of ``H_k -> D_k`` whose antecedents cover all cases; conclude the joint disjunction."""
    b = ProofBuilder(p.hypotheses)
    idx = [b.splice(d) for d, _ in branches]
    disjuncts = dedup(f for _, ds in branches for f in ds)
    b.chain(idx, disjunction(disjuncts))
    return b.build(p.calculus, p.sig), disjuncts


def _copy_line(b: ProofBuilder, g: Formula, line, m: list[int], original: Formula) -> int:
    rule = line.just.rule
    if rule == "MP":
        return b.add(g, "MP", *(m[r] for r in line.just.refs))
    if rule == "Hyp":
        if not alpha_equiv(g, original):
            raise ProofError("a hypothesis contains the epsilon term being eliminated")
        return b.add(g, "Hyp")
    if rule in ("RExists", "RForall"):
        raise ProofError("elimination works on quantifier-free epsilon proofs")
    if g is not original and g.canon != original.canon and match_axiom(g, rule) is None:
        raise EliminationError(f"replacement broke a {rule} line: {pretty(g)}")
    return b.add(g, rule)


def _check_step(p: Proof, what: str) -> Proof:
    rep = check_proof(p)
    if not rep.ok:
        i, reason = rep.failures[0]
        raise EliminationError(f"{what} produced an incorrect proof: line {i + 1}: "
                               f"{pretty(p.lines[i].formula)}: {reason}")
    return p


# ---------------------------------------------------------------------------
# critical formulas

def _select_critical(mt: ProofMetrics) -> CriticalTerm:
    top = [c for c in mt.critical if rank(c.term) == mt.rank]
    return min(top, key=lambda c: (-degree(c.term), c.term.canon))


def _critical_step(p: Proof, disjuncts: list[Formula], c: CriticalTerm) -> tuple[Proof, list[Formula]]:
    e = c.term
    lines = set(c.lines)
    body = lambda s: substitute(e.body, e.var, s)
    branches = []
    for t in c.witnesses:
        h = body(t)
        b = ProofBuilder(p.hypotheses)
        hyp = b.hyp(h)
        m: list[int] = []
        for i, line in enumerate(p.lines):
            g = replace_subterm(line.formula, e, t)
            if i in lines:
                m.append(b.chain([hyp], g))
            else:
                m.append(_copy_line(b, g, line, m, line.formula))
        branches.append((_discharge(b.build(p.calculus, p.sig), h),
                         [replace_subterm(d, e, t) for d in disjuncts]))
    neg = Not(disjunction([body(t) for t in c.witnesses]))
    b = ProofBuilder(p.hypotheses)
    hyp = b.hyp(neg)
    m = []
    for i, line in enumerate(p.lines):
        if i in lines:
            m.append(b.chain([hyp], line.formula))
        else:
            m.append(_copy_line(b, line.formula, line, m, line.formula))
    branches.append((_discharge(b.build(p.calculus, p.sig), neg), list(disjuncts)))
    return _combine(p, branches)


def eliminate_one(p: Proof, e: Formula | None = None) -> Proof:
    """Remove every critical formula of one epsilon term of maximal rank."""
    mt = proof_metrics(p)
    _expect_conclusion(p, e)
    if mt.rank == 0:
        raise ProofError("the proof has no critical formulas")
    if any(rank(s.term) >= mt.rank for s in mt.special):
        raise ProofError("identity axioms for epsilon terms of maximal rank are present; "
                         "eliminate special terms first")
    c = _select_critical(mt)
    out, _ = _critical_step(prune(p), [p.conclusion], c)
    _check_step(out, "critical step")
    after = proof_metrics(out, check=False)
    if after.rank > mt.rank or after.order(mt.rank) != mt.order() - 1:
        raise EliminationError("critical step did not lower the order at maximal rank")
    return out


def _expect_conclusion(p: Proof, e: Formula | None) -> None:
    if e is not None and not alpha_equiv(p.conclusion, e):
        raise ProofError("the proof does not conclude the given formula")


# ---------------------------------------------------------------------------
# identity: special epsilon terms

def normalize_identity(p: Proof) -> Proof:
    """Replace every general Eq2 line by a derivation from the restricted identity axioms."""
    rep = check_proof(p)
    if not rep.ok:
        raise ProofError("proof does not check")
    if not any(l.just.rule == "Eq2" for l in p.lines):
        return p
    b = ProofBuilder(p.hypotheses)
    m: list[int] = []
    for line in p.lines:
        if line.just.rule == "Eq2":
            mt = match_eq2(line.formula)
            sub = derive_eq2(mt["t"], mt["u"], mt["A"], mt["x"])
            k = b.splice(sub)
            if b.formula(k).canon != line.formula.canon:
                k = b.chain([k], line.formula)
            m.append(k)
        else:
            m.append(b.add(line.formula, line.just.rule, *(m[r] for r in line.just.refs)))
    return assert_checks(b.build(p.calculus, p.sig), "normalized proof")


def _select_special(p: Proof, mt: ProofMetrics) -> tuple[Eps, int]:
    threshold = mt.rank
    cands = [s for s in mt.special if rank(s.term) >= threshold]
    r = max(rank(s.term) for s in cands)
    cands = [s for s in cands if rank(s.term) == r]
    d = max(degree(s.term) for s in cands)
    cands = [s for s in cands if degree(s.term) == d]
    tkey = min(epsilon_type(s.term)[0].key for s in cands)
    cands = [s for s in cands if epsilon_type(s.term)[0].key == tkey]
    order = InstanceOrder([s.term for s in cands])
    top = order.maximal([s.term for s in cands])
    chosen = next(s for s in cands if s.term.canon == top.canon)
    # prefer an axiom whose left-hand term is below the chosen one
    best = chosen.lines[0]
    for i in chosen.lines:
        left = match_eq_eps(p.lines[i].formula)["left"]
        if order.key(left) < order.key(top):
            best = i
            break
    return top, best


class _Equalities:
    """Derives ``a = b`` from equations available as lines, closing under symmetry and transitivity."""

    def __init__(self, b: ProofBuilder, facts: list[int]):
        self.b = b
        self.edges: dict[str, list[tuple[str, Term, int, bool]]] = {}
        self.terms: dict[str, Term] = {}
        for i in facts:
            f = b.formula(i)
            l, r = f.left, f.right
            self.terms[l.canon], self.terms[r.canon] = l, r
            self.edges.setdefault(l.canon, []).append((r.canon, r, i, False))
            self.edges.setdefault(r.canon, []).append((l.canon, l, i, True))

    def prove(self, a: Term, c: Term) -> int:
        b = self.b
        acc = b.add(Eq(a, a), "Eq1")
        if a.canon == c.canon:
            return acc
        prev = {a.canon: None}
        queue = deque([a.canon])
        while queue:
            n = queue.popleft()
            if n == c.canon:
                break
            for m, _, i, flipped in self.edges.get(n, []):
                if m not in prev:
                    prev[m] = (n, i, flipped)
                    queue.append(m)
        if c.canon not in prev:
            raise EliminationError(f"cannot derive {pretty(a)} = {pretty(c)} from the available equations")
        path = []
        n = c.canon
        while prev[n] is not None:
            path.append((prev[n][0], n, prev[n][1], prev[n][2]))
            n = prev[n][0]
        for src, dst, i, flipped in reversed(path):
            s, d = self.terms.get(src, a), self.terms[dst]
            edge = i
            if flipped:
                edge = b.mp(i, symmetry(b, d, s))
            acc = transitivity(b, a, s, d, acc, edge)
        return acc


def _rebuild_eq_eps(b: ProofBuilder, hyp: int, g: Formula, top: Eps, order: InstanceOrder) -> int:
    """Derive the broken axiom ``s = v -> l = r`` (same type ``l``, ``r``) from ``t = u`` and fresh EqEps lines."""
    ante, concl = g.left, g.right
    l, r = concl.left, concl.right
    if l.canon == r.canon:
        return b.chain([b.add(Eq(l, l), "Eq1")], g)
    if not (isinstance(l, Eps) and isinstance(r, Eps)):
        raise EliminationError("broken identity axiom is not between epsilon terms")
    ty, la = epsilon_type(l)
    ty2, ra = epsilon_type(r)
    if ty != ty2:
        raise EliminationError("broken identity axiom mixes epsilon types")
    sub = ProofBuilder(b.hypotheses)
    h1 = sub.hyp(b.formula(hyp))
    h2 = sub.hyp(ante)
    eqs = _Equalities(sub, [h1, h2])
    diff = [i for i in range(len(la)) if la[i].canon != ra[i].canon]
    plan = list(diff)
    for perm in permutations(diff):
        cur = list(la)
        ok = True
        for k in perm[:-1]:
            cur[k] = ra[k]
            mid = ty.instantiate(cur)
            if not order.key(mid) < order.key(top):
                ok = False
                break
        if ok:
            plan = list(perm)
            break
    acc = sub.add(Eq(l, l), "Eq1")
    cur = list(la)
    prev_term = l
    for k in plan:
        eq = eqs.prove(la[k], ra[k])
        cur[k] = ra[k]
        nxt = ty.instantiate(cur)
        step = sub.add(Imp(Eq(la[k], ra[k]), Eq(prev_term, nxt)), "EqEps")
        step = sub.mp(eq, step)
        acc = transitivity(sub, l, prev_term, nxt, acc, step)
        prev_term = nxt
    if sub.formula(acc).canon != concl.canon:
        acc = sub.chain([acc], concl)
    d = _discharge(sub.build("ECeps"), ante)
    return b.splice(d)


def _repair_crit(b: ProofBuilder, hyp: int, g: Formula, e: Eps, e1: Eps, slot: int,
                 t: Term, u: Term, witness: Term) -> int:
    """Derive ``A(s) -> A(e1)`` (no longer critical) from ``t = u`` and a critical formula of ``e1``."""
    ty, args = epsilon_type(e)
    z = fresh_var(g.names | e.names | e1.names | t.names | u.names | witness.names)
    args = list(args)
    args[slot] = Var(z)
    ez = ty.instantiate(args)
    at = lambda s: substitute(ez.body, ez.var, s)
    s1 = replace_subterm(witness, e, e1)
    crit = b.add(Imp(substitute(e1.body, e1.var, s1), substitute(e1.body, e1.var, e1)), "Crit")
    i1 = b.splice(derive_eq2(t, u, at(s1), z))
    i2 = b.splice(derive_eq2(t, u, at(e1), z))
    return b.chain([hyp, i1, crit, i2], g)


def _special_step(p: Proof, disjuncts: list[Formula], e: Eps, li: int) -> tuple[Proof, list[Formula]]:
    ax = match_eq_eps(p.lines[li].formula)
    t, u, e1, slot = ax["t"], ax["u"], ax["left"], ax["slot"]
    tu = Eq(t, u)
    order = InstanceOrder([e, e1])
    b = ProofBuilder(p.hypotheses)
    hyp = b.hyp(tu)
    m: list[int] = []
    for i, line in enumerate(p.lines):
        f, rule = line.formula, line.just.rule
        g = replace_subterm(f, e, e1)
        if rule == "EqEps" and match_eq_eps(g) is None:
            m.append(_rebuild_eq_eps(b, hyp, g, e, order))
        elif rule == "Crit" and match_crit(f).term.canon == e.canon:
            m.append(_repair_crit(b, hyp, g, e, e1, slot, t, u, match_crit(f).witness))
        else:
            m.append(_copy_line(b, g, line, m, f))
    same = (_discharge(b.build(p.calculus, p.sig), tu), [replace_subterm(d, e, e1) for d in disjuncts])
    neg = Not(tu)
    b = ProofBuilder(p.hypotheses)
    hyp = b.hyp(neg)
    m = []
    for i, line in enumerate(p.lines):
        if i == li:
            m.append(b.chain([hyp], line.formula))
        else:
            m.append(_copy_line(b, line.formula, line, m, line.formula))
    other = (_discharge(b.build(p.calculus, p.sig), neg), list(disjuncts))
    return _combine(p, [same, other])


def _guard_special(before: Proof, after: Proof, e: Eps) -> None:
    tkey = epsilon_type(e)[0].key
    old, old_terms = _special_profile(before, tkey)
    new, new_terms = _special_profile(after, tkey)
    order = InstanceOrder(list(old_terms.values()) + list(new_terms.values()))
    terms = {**old_terms, **new_terms}
    if not _multiset_less(new, old, lambda k: order.key(terms[k])):
        raise EliminationError(f"special step on {pretty(e)} did not descend in the instance order")


def _special_round(p: Proof, disjuncts: list[Formula], trace: ElimTrace, threshold_rank: int,
                   before: ProofMetrics) -> tuple[Proof, list[Formula]]:
    mt = before
    e, li = _select_special(p, mt)
    out, ds = _special_step(p, disjuncts, e, li)
    out = prune(out)
    _check_step(out, "special step")
    _guard_special(p, out, e)
    after = proof_metrics(out, check=False)
    if after.rank > mt.rank:
        raise EliminationError("special step raised the rank")
    trace.steps.append(ElimStep(e, "special", mt, after, {"axiom": pretty(p.lines[li].formula)}))
    return out, ds


def eliminate_special(p: Proof, e: Formula | None = None, trace: ElimTrace | None = None) -> Proof:
    """Remove the EqEps axioms whose epsilon terms have the proof's rank (all of them at rank 0)."""
    _expect_conclusion(p, e)
    if any(l.just.rule == "Eq2" for l in p.lines):
        raise ProofError("general Eq2 lines present; run normalize_identity first")
    trace = trace if trace is not None else ElimTrace()
    mt = proof_metrics(p)
    r = mt.rank
    ds = [p.conclusion]
    for _ in range(MAX_STEPS):
        if not any(rank(s.term) >= r for s in mt.special):
            return p
        p, ds = _special_round(p, ds, trace, r, mt)
        mt = proof_metrics(p, check=False)
    raise EliminationError("special elimination did not terminate within the step limit")


# ---------------------------------------------------------------------------
# the whole pipeline

def _erase(p: Proof, disjuncts: list[Formula]) -> tuple[Proof, list[Formula]]:
    """Replace every maximal epsilon term by a variable (distinct terms, distinct variables)."""
    avoid = set()
    for l in p.lines:
        avoid |= l.formula.names
    for h in p.hypotheses:
        avoid |= h.names
    names: dict[str, Var] = {}

    def erase(f: Expr) -> Expr:
        if isinstance(f, Eps):
            if f.canon not in names:
                v = fresh_var(avoid)
                avoid.add(v)
                names[f.canon] = Var(v)
            return names[f.canon]
        kids = f.children()
        if not kids:
            return f
        new = [erase(k) for k in kids]
        return f if all(a is b for a, b in zip(new, kids)) else f.rebuild(new)

    b = ProofBuilder(p.hypotheses)
    m: list[int] = []
    for line in p.lines:
        f, rule = line.formula, line.just.rule
        if rule == "Crit":
            raise EliminationError("critical formula left at erasure")
        if rule == "EqEps":
            ax = match_eq_eps(f)
            if ax["left"].canon != ax["right"].canon:
                raise EliminationError("identity axiom for epsilon terms left at erasure")
            g = erase(f)
            m.append(b.chain([b.add(g.right, "Eq1")], g))
            continue
        if rule == "Hyp" and contains_epsilon(f):
            raise ProofError("hypotheses containing epsilon terms cannot be erased")
        m.append(b.add(erase(f), rule, *(m[r] for r in line.just.refs)))
    return b.build("EC", p.sig), [erase(d) for d in disjuncts]


def _run(p: Proof, disjuncts: list[Formula], trace: ElimTrace) -> tuple[Proof, list[Formula]]:
    for _ in range(MAX_STEPS):
        mt = proof_metrics(p, check=False)
        if any(rank(s.term) >= mt.rank for s in mt.special):
            p, disjuncts = _special_round(p, disjuncts, trace, mt.rank, mt)
            continue
        if mt.rank == 0:
            break
        c = _select_critical(mt)
        out, disjuncts = _critical_step(p, disjuncts, c)
        out = prune(out)
        _check_step(out, "critical step")
        after = proof_metrics(out, check=False)
        if after.rank > mt.rank or (after.rank == mt.rank and after.order() >= mt.order()):
            raise EliminationError("critical step did not descend in (rank, order)")
        trace.steps.append(ElimStep(c.term, "critical", mt, after,
                                    {"witnesses": [pretty(w) for w in c.witnesses]}))
        p = out
    else:
        raise EliminationError("elimination did not terminate within the step limit")
    if any(contains_epsilon(l.formula) for l in p.lines):
        p, disjuncts = _erase(p, disjuncts)
    else:
        p = p.replace(calculus="EC")
    return p, disjuncts


def eliminate_all(p: Proof, e: Formula | None = None) -> tuple[Proof, ElimTrace]:
    """An EC proof of the same epsilon-free conclusion, without critical formulas."""
    rep = check_proof(p)
    if not rep.ok:
        i, reason = rep.failures[0]
        raise ProofError(f"proof does not check: line {i + 1}: {reason}")
    _expect_conclusion(p, e)
    concl = p.conclusion
    if contains_epsilon(concl) or contains_quantifier(concl):
        raise ProofError("the conclusion must be free of epsilon terms and quantifiers")
    if p.calculus not in ("EC", "ECeps"):
        raise ProofError("elimination expects a proof in EC or ECeps")
    trace = ElimTrace()
    mt = proof_metrics(p, check=False)
    if not mt.critical and not mt.special and not any(contains_epsilon(l.formula) for l in p.lines) \
            and not any(l.just.rule == "Eq2" for l in p.lines):
        return p, trace
    q = normalize_identity(p)
    out, _ = _run(prune(q), [concl], trace)
    if not alpha_equiv(out.conclusion, concl):
        raise EliminationError("elimination changed the conclusion")
    return _check_step(out, "elimination"), trace


# ---------------------------------------------------------------------------
# Herbrand disjunctions

@dataclass
class HerbrandResult:
    proof: Proof
    disjuncts: list[Formula]
    skeleton: Formula
    holes: tuple[str, ...]
    witnesses: list[tuple[Term, ...]]
    trace: ElimTrace

    def to_json(self) -> dict:
        return {
            "skeleton": pretty(self.skeleton),
            "holes": list(self.holes),
            "witnesses": [[pretty(t) for t in w] for w in self.witnesses],
            "disjunction": pretty(self.proof.conclusion),
            "trace": self.trace.to_json(),
        }


def skeleton(e: Formula, avoid: Iterable[str] = ()) -> tuple[Formula, tuple[str, ...], tuple[Term, ...]]:
    """``e`` with its maximal epsilon terms abstracted to fresh variables."""
    avoid = set(e.names) | set(avoid)
    holes: dict[str, tuple[str, Term]] = {}

    def walk(f: Expr) -> Expr:
        if isinstance(f, Eps):
            if f.canon not in holes:
                v = fresh_var(avoid)
                avoid.add(v)
                holes[f.canon] = (v, f)
            return Var(holes[f.canon][0])
        kids = f.children()
        return f if not kids else f.rebuild([walk(k) for k in kids])

    s = walk(e)
    return s, tuple(v for v, _ in holes.values()), tuple(t for _, t in holes.values())


def _match_skeleton(s: Formula, holes: tuple[str, ...], d: Formula) -> Optional[tuple[Term, ...]]:
    env = {h: None for h in holes}
    if not _match(s, d, env, {}, {}, 0):
        return None
    return tuple(env[h] if env[h] is not None else Var(h) for h in holes)


def herbrand_disjunction(p: Proof, e: Formula | None = None) -> HerbrandResult:
    """An EC proof of a disjunction of instances of the conclusion's epsilon-free skeleton."""
    rep = check_proof(p)
    if not rep.ok:
        i, reason = rep.failures[0]
        raise ProofError(f"proof does not check: line {i + 1}: {reason}")
    _expect_conclusion(p, e)
    if p.calculus not in ("EC", "ECeps") or contains_quantifier(p.conclusion):
        raise ProofError("Herbrand extraction expects a quantifier-free proof in ECeps")
    concl = p.conclusion
    trace = ElimTrace()
    q = normalize_identity(p)
    out, ds = _run(prune(q), [concl], trace)
    # hole names must differ from the variables that replaced erased epsilon terms
    skel, holes, _ = skeleton(concl, set().union(*(d.names for d in ds)))
    witnesses = []
    for d in ds:
        w = _match_skeleton(skel, holes, d)
        if w is None:
            raise EliminationError(f"disjunct {pretty(d)} is not an instance of the conclusion")
        witnesses.append(w)
    return HerbrandResult(_check_step(out, "Herbrand extraction"), ds, skel, holes, witnesses, trace)


def structural_lemma_holds(p: Proof, e: Eps) -> bool:
    """Occurrences of ``e`` in other critical formulas sit inside their bodies or witnesses."""
    w = Var(fresh_var(set().union(*(l.formula.names for l in p.lines))))
    for line in p.lines:
        if line.just.rule != "Crit":
            continue
        cm = match_crit(line.formula)
        if cm.term.canon == e.canon:
            continue
        if match_crit(replace_subterm(line.formula, e, w)) is None:
            return False
    return True
