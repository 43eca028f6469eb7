"""Constructive proof transformations: substitution, deduction, embedding, identity."""

from __future__ import annotations

from .kernel import (
    Justification, Proof, ProofBuilder, ProofError, ProofLine, _rule_premise, assert_checks,
    check_proof, eigenvariables, match_axiom, match_instance,
)
from .syntax import (
    And, App, Atom, Binder, Bot, Eq, Forall, Formula, Iff, Imp, Not, Term, Var,
    alpha_equiv, contains_epsilon, contains_quantifier, epsilon_type, fresh_var, substitute,
)
from .translate import translate


def minimal_calculus(p_or_lines) -> str:
    """Smallest of the five calculi whose language and rules cover the given lines."""
    lines = p_or_lines.lines if isinstance(p_or_lines, Proof) else p_or_lines
    eps = any(contains_epsilon(l.formula) or l.just.rule == "Crit" for l in lines)
    quant = any(contains_quantifier(l.formula) or l.just.rule in ("AxExists", "AxForall", "RExists", "RForall")
                for l in lines)
    ext = any(l.just.rule in ("Ext", "ExtMinus") for l in lines)
    if ext:
        return "ECepsExt"
    if quant:
        return "ECepsForall" if eps else "ECforall"
    return "ECeps" if eps else "EC"


def cone(p: Proof, k: int) -> Proof:
    """The lines that line ``k`` depends on, as a proof of its own."""
    need = {k}
    for i in range(k, -1, -1):
        if i in need:
            need.update(p.lines[i].just.refs)
    keep = sorted(need)
    index = {old: new for new, old in enumerate(keep)}
    lines = tuple(ProofLine(p.lines[i].formula,
                            Justification(p.lines[i].just.rule, tuple(index[r] for r in p.lines[i].just.refs)))
                  for i in keep)
    return p.replace(lines=lines)


# ---------------------------------------------------------------------------
# substitution

def substitute_proof(p: Proof, x: str, t: Term) -> Proof:
    """``p[x/t]``: substitute in every line (and hypothesis), keeping justifications."""
    eig = eigenvariables(p)
    if x in eig:
        raise ProofError(f"{x} is an eigenvariable of the proof")
    clash = sorted(t.fv & set(eig))
    if clash:
        raise ProofError(f"the substituted term contains eigenvariable(s) {', '.join(clash)}")
    lines = tuple(ProofLine(substitute(l.formula, x, t), l.just) for l in p.lines)
    hyps = tuple(substitute(h, x, t) for h in p.hypotheses)
    return p.replace(lines=lines, hypotheses=hyps)


# ---------------------------------------------------------------------------
# deduction

def deduction_transform(p: Proof, a: Formula, lazy: bool = False) -> Proof:
    """A proof of ``a -> B`` from the hypotheses other than ``a``.

    Every line ``C`` is turned into a derivation of ``a -> C``.  With ``lazy``
    only lines that depend on a hypothesis ``a`` are rewritten; the rest are
    copied unchanged, which keeps repeated discharges from multiplying sizes.
    """
    eig = set(eigenvariables(p))
    bad = sorted(a.fv & eig)
    if bad:
        raise ProofError(f"discharged formula contains eigenvariable(s) {', '.join(bad)} free")
    rest = [h for h in p.hypotheses if not alpha_equiv(h, a)]
    b = ProofBuilder(rest)
    m: list[int] = []
    dep: list[bool] = []
    for line in p.lines:
        f, rule, refs = line.formula, line.just.rule, line.just.refs
        is_a = rule == "Hyp" and alpha_equiv(f, a)
        d = is_a or any(dep[r] for r in refs)
        if lazy and not d:
            m.append(b.add(f, rule, *(m[r] for r in refs)))
        elif is_a or rule == "Taut":
            m.append(b.taut(Imp(a, f)))
        elif rule == "MP":
            k, l = refs
            if lazy and not dep[k]:
                m.append(b.chain([m[l], m[k]], Imp(a, f)))
            elif lazy and not dep[l]:
                m.append(b.chain([m[k], m[l]], Imp(a, f)))
            else:
                bk, bl = p.lines[k].formula, p.lines[l].formula
                j = b.taut(Imp(Imp(a, bk), Imp(Imp(a, bl), Imp(a, f))))
                j = b.mp(m[k], j)
                m.append(b.mp(m[l], j))
        elif rule == "RExists":
            # from a -> (B(y) -> C) get (ex x. B) -> (a -> C), then swap
            prem = p.lines[refs[0]].formula
            j = b.taut(Imp(b.formula(m[refs[0]]), Imp(prem.left, Imp(a, prem.right))))
            j = b.mp(m[refs[0]], j)
            j = b.add(Imp(f.left, Imp(a, f.right)), "RExists", j)
            j2 = b.taut(Imp(b.formula(j), Imp(a, f)))
            m.append(b.mp(j, j2))
        elif rule == "RForall":
            # from a -> (C -> B(y)) get (a & C) -> all x. B, then curry
            prem = p.lines[refs[0]].formula
            j = b.taut(Imp(b.formula(m[refs[0]]), Imp(And(a, prem.left), prem.right)))
            j = b.mp(m[refs[0]], j)
            j = b.add(Imp(And(a, f.left), f.right), "RForall", j)
            j2 = b.taut(Imp(b.formula(j), Imp(a, f)))
            m.append(b.mp(j, j2))
        else:
            j = b.add(f, rule)
            k = b.taut(Imp(f, Imp(a, f)))
            m.append(b.mp(j, k))
        dep.append(d)
    if lazy and not dep[-1]:
        b.chain([m[-1]], Imp(a, p.conclusion))
    return b.build(p.calculus, p.sig)


def undischarge(p: Proof, a: Formula) -> Proof:
    """From a proof of ``a -> B``, a proof of ``B`` from the hypotheses plus ``a``."""
    c = p.conclusion
    if not (isinstance(c, Imp) and alpha_equiv(c.left, a)):
        raise ProofError("conclusion is not an implication with the given antecedent")
    b = ProofBuilder(p.hypotheses)
    last = b.splice(p)
    h = b.hyp(a)
    b.add(c.right, "MP", h, last)
    return b.build(p.calculus, p.sig)


def refutation(p: Proof) -> Proof:
    """From a proof of ``A``, a proof of falsum from the hypotheses plus ``~A``."""
    a = p.conclusion
    b = ProofBuilder(p.hypotheses)
    last = b.splice(p)
    h = b.hyp(Not(a))
    b.chain([last, h], Bot())
    return b.build(p.calculus, p.sig)


# ---------------------------------------------------------------------------
# embedding

def embed_proof(p: Proof) -> Proof:
    """Replace a quantifier proof by an epsilon proof of the translated conclusion."""
    if p.calculus not in ("ECforall", "ECepsForall"):
        raise ProofError("embedding expects a proof in a calculus with quantifiers")
    rep = check_proof(p)
    if not rep.ok:
        i, reason = rep.failures[0]
        raise ProofError(f"input proof does not check: line {i + 1}: {reason}")
    for h in p.hypotheses:
        if h.fv:
            raise ProofError("hypotheses must be sentences")
    return assert_checks(_embed(p), "embedded proof")


def _embed(p: Proof) -> Proof:
    b = ProofBuilder(translate(h) for h in p.hypotheses)
    m: list[int] = []
    for i, line in enumerate(p.lines):
        f, rule = translate(line.formula), line.just.rule
        if rule == "MP":
            k, l = line.just.refs
            m.append(b.add(f, "MP", m[k], m[l]))
        elif rule == "AxExists":
            m.append(b.add(f, "Crit"))
        elif rule == "AxForall":
            # A(eps x ~A) -> A(t) is the contrapositive of a critical formula
            mt = match_axiom(line.formula, "AxForall")
            body = translate(mt["A"])
            c = b.add(Imp(Not(substitute(body, mt["x"], translate(mt["t"]))), Not(f.left)), "Crit")
            m.append(b.chain([c], f))
        elif rule in ("RExists", "RForall"):
            y, _ = _rule_premise(p, i)
            q = translate(line.formula.left if rule == "RExists" else line.formula.right)
            # q is A(eps x A) or A(eps x ~A); recover the witness term from the translated premise
            prem = translate(p.lines[line.just.refs[0]].formula)
            inst = prem.left if rule == "RExists" else prem.right
            w = _witness_for(inst, y, q)
            sub = substitute_proof(_embed(cone(p, line.just.refs[0])), y, w)
            m.append(b.splice(sub))
        else:
            m.append(b.add(f, rule))
    sig = p.sig
    return b.build("ECeps" if not any(l.just.rule in ("Ext", "ExtMinus") for l in b.lines) else "ECepsExt", sig)


def _witness_for(inst: Formula, y: str, target: Formula) -> Term:
    """The epsilon term ``w`` with ``inst[y/w]`` alpha-equivalent to ``target``."""
    w = match_instance(inst, y, target)
    if w is None or isinstance(w, Var):
        raise ProofError("could not recover the epsilon witness of a quantifier rule")
    return w


# ---------------------------------------------------------------------------
# identity

def symmetry(b: ProofBuilder, l: Term, r: Term) -> int:
    """Add a derivation of ``l = r -> r = l`` from Eq1 and Eq2Pred."""
    e1 = b.add(Eq(l, l), "Eq1")
    e2 = b.add(Imp(Eq(l, r), Imp(Eq(l, l), Eq(r, l))), "Eq2Pred")
    return b.chain([e1, e2], Imp(Eq(l, r), Eq(r, l)))


def transitivity(b: ProofBuilder, a: Term, mid: Term, c: Term, first: int, second: int) -> int:
    """From lines ``a = mid`` and ``mid = c`` derive ``a = c`` (Eq2Pred on the identity predicate)."""
    k = b.add(Imp(Eq(mid, c), Imp(Eq(a, mid), Eq(a, c))), "Eq2Pred")
    k = b.mp(second, k)
    return b.mp(first, k)


class _EqDeriver:
    def __init__(self, t: Term, u: Term, x: str, avoid):
        self.t, self.u, self.x = t, u, x
        self.tu = Eq(t, u)
        self.b = ProofBuilder()
        self.avoid = set(avoid) | t.names | u.names | {x}

    def fresh(self) -> str:
        v = fresh_var(self.avoid)
        self.avoid.add(v)
        return v

    def at(self, e, s: Term):
        return substitute(e, self.x, s)

    # t = u -> s[t] = s[u]
    def term(self, s: Term) -> int:
        b, tu = self.b, self.tu
        lt, lu = self.at(s, self.t), self.at(s, self.u)
        target = Imp(tu, Eq(lt, lu))
        if self.x not in s.fv:
            return b.chain([b.add(Eq(s, s), "Eq1")], target)
        if isinstance(s, Var):
            return b.taut(target)
        if isinstance(s, App):
            args = list(s.args)
            cur = [self.at(a, self.t) for a in args]
            build = lambda xs: App(s.fn, tuple(xs))
            rule = "Eq2Fn"
        else:
            ty, args = epsilon_type(s)
            args = list(args)
            cur = [self.at(a, self.t) for a in args]
            build = ty.instantiate
            rule = "EqEps"
        c0 = build(cur)
        acc = b.chain([b.add(Eq(c0, c0), "Eq1")], Imp(tu, Eq(c0, c0)))
        for i, a in enumerate(args):
            if self.x not in a.fv:
                continue
            inner = self.term(a)
            prev = build(cur)
            cur[i] = self.at(a, self.u)
            nxt = build(cur)
            step = b.add(Imp(Eq(self.at(a, self.t), self.at(a, self.u)), Eq(prev, nxt)), rule)
            trans = b.add(Imp(Eq(prev, nxt), Imp(Eq(c0, prev), Eq(c0, nxt))), "Eq2Pred")
            acc = b.chain([inner, step, trans, acc], Imp(tu, Eq(c0, nxt)))
        return b.chain([acc], target)

    def symmetric(self, l: Term, r: Term) -> int:
        return symmetry(self.b, l, r)

    def atomic(self, f: Formula) -> int:
        b, tu = self.b, self.tu
        target = Imp(tu, Iff(self.at(f, self.t), self.at(f, self.u)))
        if isinstance(f, Atom):
            args = list(f.args)
            build = lambda xs: Atom(f.pred, tuple(xs))
        else:
            args = [f.left, f.right]
            build = lambda xs: Eq(xs[0], xs[1])
        cur = [self.at(a, self.t) for a in args]
        used = []
        for i, a in enumerate(args):
            if self.x not in a.fv:
                continue
            at, au = self.at(a, self.t), self.at(a, self.u)
            prev = build(cur)
            cur[i] = au
            nxt = build(cur)
            used.append(self.term(a))
            used.append(b.add(Imp(Eq(at, au), Imp(prev, nxt)), "Eq2Pred"))
            used.append(self.symmetric(at, au))
            used.append(b.add(Imp(Eq(au, at), Imp(nxt, prev)), "Eq2Pred"))
        return b.chain(used, target)

    def formula(self, f: Formula) -> int:
        b, tu = self.b, self.tu
        target = Imp(tu, Iff(self.at(f, self.t), self.at(f, self.u)))
        if self.x not in f.fv:
            return b.taut(target)
        if isinstance(f, (Atom, Eq)):
            return self.atomic(f)
        if isinstance(f, Binder):
            return self.quantifier(f, target)
        return b.chain([self.formula(c) for c in f.children()], target)

    def quantifier(self, f: Formula, target: Formula) -> int:
        b, tu = self.b, self.tu
        ft, fu = self.at(f, self.t), self.at(f, self.u)
        sides = []
        for forward in (True, False):
            # each direction gets its own eigenvariable: it may not occur free below its rule line
            y = self.fresh()
            body = substitute(f.body, f.var, Var(y))
            inner = self.formula(body)
            bt, bu = self.at(body, self.t), self.at(body, self.u)
            src, dst, s_body, d_body = (ft, fu, bt, bu) if forward else (fu, ft, bu, bt)
            if isinstance(f, Forall):
                ax = b.add(Imp(src, s_body), "AxForall")
                k = b.chain([inner, ax], Imp(And(tu, src), d_body))
                k = b.add(Imp(And(tu, src), dst), "RForall", k)
            else:
                ax = b.add(Imp(d_body, dst), "AxExists")
                k = b.chain([inner, ax], Imp(s_body, Imp(tu, dst)))
                k = b.add(Imp(src, Imp(tu, dst)), "RExists", k)
            sides.append(k)
        return b.chain(sides, target)


def derive_eq2(t: Term, u: Term, a: Formula, x: str) -> Proof:
    """A proof of ``t = u -> (a[x/t] <-> a[x/u])`` using only the restricted identity axioms."""
    d = _EqDeriver(t, u, x, a.names)
    d.formula(a)
    lines = d.b.lines
    return assert_checks(Proof(tuple(lines), (), minimal_calculus(lines)), "identity derivation")


def identity_axioms_used(p: Proof) -> set[str]:
    return {l.just.rule for l in p.lines if l.just.rule in ("Eq1", "Eq2", "Eq2Pred", "Eq2Fn", "EqEps")}
