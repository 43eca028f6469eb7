import pytest

from epscalc.corpus import critical_corpus, drinker, hypothetical, identity_corpus, proof
from epscalc.kernel import ProofError, check_proof, match_axiom
from epscalc.parser import parse_formula as F, parse_term as T, pretty
from epscalc.syntax import Imp, alpha_equiv, contains_quantifier, substitute
from epscalc.transforms import (
    cone, deduction_transform, derive_eq2, embed_proof, identity_axioms_used, minimal_calculus, refutation,
    substitute_proof, undischarge,
)
from epscalc.translate import translate


def _all_proofs():
    out = {"drinker": (drinker(), "P(c)")}
    out.update({f"crit-{k}": (p, "Q(d)") for k, p in critical_corpus().items()})
    out.update({f"id-{k}": (p, "Q(d)") for k, p in identity_corpus().items()})
    out.update({f"hyp-{k}": v for k, v in hypothetical().items()})
    return out


CORPUS = _all_proofs()


# -- substitution


def test_substitute_taut_line():
    p = proof([("P(x) -> P(x)", "Taut", ())])
    q = substitute_proof(p, "x", T("c"))
    assert pretty(q.conclusion) == "P(c) -> P(c)" and check_proof(q).ok


def test_substitute_keeps_crit():
    p = proof([("P(y) -> P(eps x. P(x))", "Crit", ())])
    q = substitute_proof(p, "y", T("f(c)"))
    assert pretty(q.conclusion) == "P(f(c)) -> P(eps x. P(x))"
    assert match_axiom(q.conclusion, "Crit") is not None


def test_substitute_rejects_eigenvariable():
    with pytest.raises(ProofError):
        substitute_proof(drinker(), "z", T("c"))


@pytest.mark.parametrize("name", ["crit-single", "crit-binary", "hyp-critical", "id-slot"])
def test_substitution_commutes_with_conclusion(name):
    p, _ = CORPUS[name]
    for x, t in [("x", T("f(d)")), ("w", T("eps y. Q(y)"))]:
        q = substitute_proof(p, x, t)
        assert check_proof(q).ok
        assert alpha_equiv(q.conclusion, substitute(p.conclusion, x, t))


def test_substitute_free_variable_proof():
    p = proof([("P(y) -> P(eps x. P(x))", "Crit", ()),
               ("(P(y) -> P(eps x. P(x))) -> (~P(eps x. P(x)) -> ~P(y))", "Taut", ()),
               ("~P(eps x. P(x)) -> ~P(y)", "MP", (1, 2))])
    q = substitute_proof(p, "y", T("eps z. Q(z)"))
    assert check_proof(q).ok
    assert alpha_equiv(q.conclusion, F("~P(eps x. P(x)) -> ~P(eps z. Q(z))"))


# -- deduction


def test_discharge_single_hypothesis():
    p = proof([("P(c)", "Hyp", ())], ["P(c)"])
    q = deduction_transform(p, F("P(c)"))
    assert check_proof(q).ok and q.hypotheses == ()
    assert any(alpha_equiv(l.formula, F("P(c) -> P(c)")) for l in q.lines)


def test_discharge_uses_three_line_mp_pattern():
    p, a = CORPUS["hyp-modus-ponens"]
    q = deduction_transform(p, F(a))
    assert check_proof(q).ok
    mps = [i for i, l in enumerate(q.lines) if l.just.rule == "MP"]
    for i in mps:
        k, l = q.lines[i].just.refs
        assert q.lines[l].formula.canon == Imp(q.lines[k].formula, q.lines[i].formula).canon


def test_discharge_absent_formula():
    p = critical_corpus()["single"]
    a = F("Q(d)")
    q = deduction_transform(p, a)
    assert check_proof(q).ok
    assert alpha_equiv(q.conclusion, Imp(a, p.conclusion))


def test_discharge_rejects_eigenvariable():
    p = drinker()
    with pytest.raises(ProofError):
        deduction_transform(p, F("P(z)"))


@pytest.mark.parametrize("name", sorted(CORPUS))
@pytest.mark.parametrize("lazy", [False, True])
def test_deduction_round_trip(name, lazy):
    p, a = CORPUS[name]
    a = F(a)
    q = deduction_transform(p, a, lazy=lazy)
    rep = check_proof(q)
    assert rep.ok, rep.failures
    assert alpha_equiv(q.conclusion, Imp(a, p.conclusion))
    assert all(not alpha_equiv(h, a) for h in q.hypotheses)
    r = undischarge(q, a)
    assert check_proof(r).ok and alpha_equiv(r.conclusion, p.conclusion)


@pytest.mark.parametrize("name", ["hyp-modus-ponens", "crit-hypotheses", "drinker"])
def test_refutation(name):
    p, _ = CORPUS[name]
    q = refutation(p)
    assert check_proof(q).ok and pretty(q.conclusion) == "_|_"


def test_cone_keeps_dependencies():
    p, _ = CORPUS["hyp-modus-ponens"]
    c = cone(p, 2)
    assert len(c) == 3 and check_proof(c).ok


# -- embedding


def test_embed_exists_axiom():
    p = proof([("P(c) -> (ex x. P(x))", "AxExists", ())], calculus="ECforall")
    q = embed_proof(p)
    assert len(q) == 1 and q.lines[0].just.rule == "Crit"
    assert alpha_equiv(q.conclusion, F("P(c) -> P(eps x. P(x))"))


def test_embed_forall_axiom():
    p = proof([("(all x. P(x)) -> P(c)", "AxForall", ())], calculus="ECforall")
    q = embed_proof(p)
    assert check_proof(q).ok
    assert alpha_equiv(q.conclusion, F("P(eps x. ~P(x)) -> P(c)"))
    assert [l.just.rule for l in q.lines] == ["Crit", "Taut", "MP"]
    assert alpha_equiv(q.lines[0].formula, F("~P(c) -> ~P(eps x. ~P(x))"))


def test_embed_drinker():
    q = embed_proof(drinker())
    assert check_proof(q).ok and q.calculus == "ECeps"
    e = F("P(eps x. P(x) -> P(eps y. ~P(y))) -> P(eps y. ~P(y))")
    assert alpha_equiv(q.conclusion, e)
    assert alpha_equiv(q.conclusion, translate(drinker().conclusion))


@pytest.mark.parametrize("name", ["hyp-exists-rule", "hyp-forall-rule", "drinker"])
def test_embedding_removes_quantifiers(name):
    p, _ = CORPUS[name]
    q = embed_proof(p)
    assert check_proof(q).ok
    assert not any(contains_quantifier(l.formula) for l in q.lines)
    assert not any(l.just.rule in ("AxExists", "AxForall", "RExists", "RForall") for l in q.lines)
    assert [h.canon for h in q.hypotheses] == [translate(h).canon for h in p.hypotheses]
    assert alpha_equiv(q.conclusion, translate(p.conclusion))


def test_embed_rejects_eps_calculus():
    with pytest.raises(ProofError):
        embed_proof(critical_corpus()["single"])


# -- identity


def test_derive_eq2_atomic():
    q = derive_eq2(T("c"), T("d"), F("P(x)"), "x")
    assert check_proof(q).ok and q.calculus == "EC"
    assert alpha_equiv(q.conclusion, F("c = d -> (P(c) <-> P(d))"))
    assert identity_axioms_used(q) <= {"Eq1", "Eq2Pred", "Eq2Fn"}


def test_derive_eq2_identity_predicate():
    q = derive_eq2(T("c"), T("d"), F("x = e"), "x")
    assert check_proof(q).ok and "Eq2Pred" in identity_axioms_used(q)


def test_derive_eq2_vacuous():
    q = derive_eq2(T("c"), T("d"), F("P(e)"), "x")
    assert check_proof(q).ok and identity_axioms_used(q) == set()


@pytest.mark.parametrize("a,calc", [
    ("R(f(x), x) & ~P(x)", "EC"),
    ("P(eps y. R(y, x))", "ECeps"),
    ("all y. R(y, x)", "ECforall"),
    ("ex y. R(y, eps z. R(z, x))", "ECepsForall"),
])
def test_derive_eq2_compound(a, calc):
    q = derive_eq2(T("c"), T("d"), F(a), "x")
    assert check_proof(q).ok and q.calculus == calc
    assert "Eq2" not in identity_axioms_used(q)
    want = Imp(F("c = d"), F(f"({pretty(substitute(F(a), 'x', T('c')))}) <-> "
                              f"({pretty(substitute(F(a), 'x', T('d')))})"))
    assert alpha_equiv(q.conclusion, want)


def test_minimal_calculus():
    assert minimal_calculus(critical_corpus()["single"]) == "ECeps"
    assert minimal_calculus(drinker()) == "ECforall"
