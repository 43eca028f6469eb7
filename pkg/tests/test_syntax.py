import pytest
from hypothesis import assume, given, settings

from epscalc.parser import parse_formula as F, parse_term as T, pretty
from epscalc.syntax import (
    App, Atom, Eps, EpsilonSyntaxError, Exists, Forall, Signature, Term, VacuousBinder, Var, alpha_equiv, degree,
    epsilon_type, free_vars, fresh_var, rank, rename_bound, replace_at, replace_subterm, signature_of, subexpr_at,
    substitute, subterm_occurrences,
)

from gen import eps_terms, expressions, terms


# -- binder condition


def test_binder_needs_free_occurrence():
    with pytest.raises(VacuousBinder):
        F("all x. P(c)")
    with pytest.raises(VacuousBinder):
        Eps("x", Atom("P", (App("c", ()),)))


def test_binder_forbids_rebinding():
    with pytest.raises(EpsilonSyntaxError):
        F("ex x. P(x) & all x. Q(x)")


def test_app_arity_fixed_by_args():
    assert App("f", (Var("x"), Var("y"))).arity == 2


# -- free variables


@pytest.mark.parametrize("text,fv", [
    ("eps x. P(x)", set()),
    ("eps x. R(x, y)", {"y"}),
    ("eps x. ~R(x, eps y. R(x, y))", set()),
])
def test_free_vars(text, fv):
    assert free_vars(T(text)) == fv


# -- alpha equivalence


@pytest.mark.parametrize("a,b,same", [
    ("P(eps x. P(x))", "P(eps y. P(y))", True),
    ("P(x)", "P(y)", False),
    ("all x. P(x) & (ex y. R(x, y))", "all y. P(y) & (ex x. R(y, x))", True),
    ("all x. ex y. R(x, y)", "all x. ex y. R(y, x)", False),
])
def test_alpha_equiv_examples(a, b, same):
    assert alpha_equiv(F(a), F(b)) is same


# -- substitution


def test_substitute_plain():
    assert substitute(F("P(x) -> Q(x)"), "x", T("c")) == F("P(c) -> Q(c)")


def test_substitute_avoids_capture():
    out = substitute(T("eps y. R(x, y)"), "x", T("f(y)"))
    assert alpha_equiv(out, T("eps z. R(f(y), z)"))
    assert out.fv == {"y"}


def test_substitute_ignores_bound():
    e = F("all x. P(x)")
    assert substitute(e, "x", T("c")) == e


def test_fresh_var_prefix():
    v = fresh_var({"_v0", "x"})
    assert v.startswith("_v") and v != "_v0"


# -- subterms and replacement


def _occ(text):
    return {(pretty(o.term), o.immediate) for o in subterm_occurrences(F(text))}


def test_occurrences_simple():
    assert _occ("P(f(c))") == {("f(c)", True), ("c", False)}


def test_occurrences_skip_bound_variables():
    occ = {(pretty(o.term), o.immediate) for o in subterm_occurrences(T("eps x. P(x, g(x, c))"))}
    assert occ == {("c", True)}
    assert subterm_occurrences(T("eps x. P(x)")) == []


def _abstraction_ok(e, o):
    # brute-force criterion: abstracting the occurrence must give a legal expression
    x = fresh_var(e.names | o.term.names)
    try:
        back = replace_at(e, {o.path: Var(x)})
    except EpsilonSyntaxError:
        return False
    return alpha_equiv(substitute(back, x, subexpr_at(e, o.path)), e)


@settings(max_examples=200, deadline=None)
@given(expressions())
def test_occurrences_are_abstractable(e):
    for o in subterm_occurrences(e):
        assert _abstraction_ok(e, o)
        assert not (o.term.fv & _binders_above(e, o.path))


def _binders_above(e, path):
    out = set()
    node = e
    for i in path:
        if hasattr(node, "var"):
            out.add(node.var)
        node = node.children()[i]
    return out


def test_replace_subterm_examples():
    assert replace_subterm(F("P(eps x. P(x)) & Q(eps x. P(x))"), T("eps x. P(x)"), T("c")) == F("P(c) & Q(c)")
    out = replace_subterm(T("eps x. P(x, eps y. Q(y))"), T("eps z. Q(z)"), T("c"))
    assert alpha_equiv(out, T("eps x. P(x, c)"))


@settings(max_examples=200, deadline=None)
@given(expressions(), terms(4))
def test_replace_identity(e, t):
    assert alpha_equiv(replace_subterm(e, t, t), e)


@settings(max_examples=200, deadline=None)
@given(expressions(), terms(4))
def test_replace_absent_is_noop(e, t):
    assume(all(o.term.canon != t.canon for o in subterm_occurrences(e)) and e.canon != t.canon)
    assert alpha_equiv(replace_subterm(e, t, T("c")), e)


# -- types, degree, rank


def test_type_without_slots():
    ty, args = epsilon_type(T("eps x. P(x)"))
    assert args == () and ty.arity == 0 and alpha_equiv(ty.pattern, T("eps x. P(x)"))


def test_type_repeated_slots():
    ty, args = epsilon_type(T("eps x. P(x, f(c), f(c))"))
    assert [pretty(a) for a in args] == ["f(c)", "f(c)"]
    assert pretty(ty.pattern) == "eps _b0. P(_b0, _x1, _x2)"


def test_type_with_bound_subterm():
    ty, args = epsilon_type(T("eps x. P(x, g(x, c))"))
    assert [pretty(a) for a in args] == ["c"]
    assert pretty(ty.pattern) == "eps _b0. P(_b0, g(_b0, _x1))"


def test_type_rejects_non_epsilon():
    with pytest.raises(TypeError):
        epsilon_type(T("f(c)"))


@pytest.mark.parametrize("text,deg", [("eps x. P(x)", 1), ("eps x. P(x, eps y. Q(y))", 2), ("f(c)", 0)])
def test_degree(text, deg):
    assert degree(T(text)) == deg


@pytest.mark.parametrize("text,rk", [("eps x. P(x, eps y. Q(y))", 1), ("eps x. P(x, eps y. Q(x, y))", 2)])
def test_rank(text, rk):
    assert rank(T(text)) == rk


def test_rank_rejects_non_epsilon():
    with pytest.raises(TypeError):
        rank(T("c"))


# -- laws


@settings(max_examples=300, deadline=None)
@given(expressions())
def test_alpha_variant_is_equivalent(e):
    v = rename_bound(e, set(e.bound))
    assert alpha_equiv(e, v) and alpha_equiv(v, e)
    w = rename_bound(v, set(v.bound))
    assert alpha_equiv(e, w)


@settings(max_examples=300, deadline=None)
@given(expressions())
def test_rename_round_trip(e):
    for x in sorted(e.fv):
        y = fresh_var(e.names)
        assert alpha_equiv(substitute(substitute(e, x, Var(y)), y, Var(x)), e)


@settings(max_examples=300, deadline=None)
@given(expressions(), terms(4), terms(4))
def test_substitution_commutes(e, t, u):
    x, y = "x", "y"
    assume(x not in u.fv and y not in t.fv)
    a = substitute(substitute(e, x, t), y, u)
    b = substitute(substitute(e, y, u), x, t)
    assert alpha_equiv(a, b)


@settings(max_examples=300, deadline=None)
@given(expressions())
def test_substitution_respects_alpha(e):
    v = rename_bound(e, set(e.bound))
    assert alpha_equiv(substitute(e, "x", T("f(y)")), substitute(v, "x", T("f(y)")))


@settings(max_examples=300, deadline=None)
@given(expressions())
def test_print_parse_round_trip(e):
    assert (T if isinstance(e, Term) else F)(pretty(e)) == e


@settings(max_examples=300, deadline=None)
@given(eps_terms())
def test_type_reconstruction_and_rank(e):
    ty, args = epsilon_type(e)
    assert alpha_equiv(ty.instantiate(args), e)
    assert rank(ty.pattern) == rank(e)
    assert ty.pattern.fv == set(ty.argvars)
    v = rename_bound(e, set(e.bound))
    ty2, args2 = epsilon_type(v)
    assert ty2 == ty and all(alpha_equiv(a, b) for a, b in zip(args, args2))
    assert degree(v) == degree(e) and rank(v) == rank(e)


def test_signature_of_and_violations():
    e = F("P(f(c)) & x = c")
    sig = signature_of(e)
    assert sig.functions == {"f": 1, "c": 0} and sig.predicates == {"P": 1} and sig.identity
    assert Signature({"c": 0}, {"P": 1}, identity=False).violations(e) == ["function f/1", "identity"]


def test_quantifier_nodes():
    e = F("all x. ex y. R(x, y)")
    assert isinstance(e, Forall) and isinstance(e.body, Exists)
