import itertools
import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from epscalc.corpus import critical_corpus, drinker, hypothetical, identity_corpus
from epscalc.parser import parse_formula as F, parse_term as T
from epscalc.semantics import (
    Assignment, BoundExceeded, ExtChoiceFunction, IntChoiceOperator, SemanticsError, Structure, Uninterpreted,
    assignments, check_consequence, check_truth_mode, choice_function_count, dump_model, enumerate_choice_functions,
    enumerate_intensional_operators, enumerate_structures, epsilon_types, eval, generically_valid, load_model,
    mask_of, members, satisfies,
)
from epscalc.syntax import Imp, Signature, signature_of, substitute
from epscalc.transforms import embed_proof

from gen import VARS, formulas, terms

P1 = Structure(2, {"c": 0}, {"P": {1}})
P0 = Structure(2, {"c": 0}, {"P": set()})


# -- structures and choice functions


def test_structure_validation():
    with pytest.raises(SemanticsError):
        Structure(0)
    with pytest.raises(SemanticsError):
        Structure(2, {"f": {(0,): 1}})
    with pytest.raises(SemanticsError):
        Structure(2, {"c": 2})
    with pytest.raises(SemanticsError):
        Structure(2, predicates={"R": {(0, 1), 1}})


def test_structure_enumeration_count():
    sig = Signature({"c": 0, "f": 1}, {"P": 1, "R": 2})
    assert sum(1 for _ in enumerate_structures(sig, 2)) == 2 * 4 * 4 * 16
    assert all(m.interprets(sig) for m in enumerate_structures(sig, 2))


def test_masks():
    assert mask_of([0, 2]) == 5 and members(5) == [0, 2] and members(0) == []


def test_choice_function_invariant():
    with pytest.raises(SemanticsError):
        ExtChoiceFunction((0, 1, 1, 0))  # mask 1 is {0}
    ExtChoiceFunction((1, 0, 1, 0))
    with pytest.raises(SemanticsError):
        ExtChoiceFunction((2, 0, 1, 0))
    with pytest.raises(SemanticsError):
        ExtChoiceFunction((0, 0, 1))


def _brute_force_count(n):
    # every map from subsets to elements, filtered by the choice condition
    subsets = range(1 << n)
    return sum(1 for table in itertools.product(range(n), repeat=len(subsets))
               if all(s == 0 or s >> v & 1 for s, v in zip(subsets, table)))


@pytest.mark.parametrize("n,count", [(1, 1), (2, 4), (3, 72)])
def test_choice_function_counts(n, count):
    fns = list(enumerate_choice_functions(n))
    assert len(fns) == count == _brute_force_count(n) == choice_function_count(n)
    assert len(set(fns)) == count


def test_choice_function_bound():
    with pytest.raises(BoundExceeded):
        list(enumerate_choice_functions(4))
    assert sum(1 for _ in enumerate_choice_functions(4, bound=4)) == choice_function_count(4)


def test_choice_function_enumeration_deterministic():
    assert list(enumerate_choice_functions(3)) == list(enumerate_choice_functions(3))


@pytest.mark.parametrize("texts,count", [((), 1), (("P(eps x. P(x))",), 4),
                                         (("P(eps x. P(x)) & Q(eps x. Q(x))",), 16),
                                         (("R(eps x. R(x, c), c)",), 4 ** 2)])
def test_intensional_operator_counts(texts, count):
    types = epsilon_types(*map(F, texts))
    assert sum(1 for _ in enumerate_intensional_operators(2, types)) == count


def test_intensional_budget():
    types = epsilon_types(F("P(eps x. P(x)) & Q(eps x. Q(x)) & S(eps x. S(x))"))
    with pytest.raises(BoundExceeded):
        list(enumerate_intensional_operators(2, types, budget=63))
    assert sum(1 for _ in enumerate_intensional_operators(2, types, budget=64)) == 64


def test_types_merge_alpha_variants():
    assert len(epsilon_types(F("P(eps x. P(x)) -> P(eps y. P(y))"))) == 1


# -- evaluation


def test_eps_with_satisfier():
    assert {eval(P1, phi, {}, T("eps x. P(x)")) for phi in enumerate_choice_functions(2)} == {1}


def test_eps_without_satisfier():
    for phi in enumerate_choice_functions(2):
        assert eval(P0, phi, {}, T("eps x. P(x)")) == phi(0)


def test_eval_quantifiers_and_identity():
    phi = ExtChoiceFunction.least(2)
    assert eval(P1, phi, {}, F("ex x. P(x)")) and not eval(P1, phi, {}, F("all x. P(x)"))
    assert eval(P1, phi, {"y": 0}, F("y = c")) and not eval(P1, phi, {"y": 1}, F("y = c"))


def test_eval_uninterpreted():
    with pytest.raises(Uninterpreted):
        eval(P1, ExtChoiceFunction.least(2), {}, F("Q(c)"))
    with pytest.raises(Uninterpreted):
        eval(P1, ExtChoiceFunction.least(2), {}, T("g(c)"))


def test_intensional_missing_key():
    with pytest.raises(Uninterpreted):
        eval(P1, IntChoiceOperator(), {}, T("eps x. P(x)"))


def test_intensional_uses_slot_values():
    m = Structure(2, {"c": 0, "d": 1}, {"R": set()})
    ty = epsilon_types(T("eps x. R(x, c)"))[0]
    psi = IntChoiceOperator({(ty.key, (0,)): ExtChoiceFunction((0, 0, 1, 0)),
                             (ty.key, (1,)): ExtChoiceFunction((1, 0, 1, 0))})
    assert eval(m, psi, {}, T("eps x. R(x, c)")) == 0
    assert eval(m, psi, {}, T("eps x. R(x, d)")) == 1


@st.composite
def structures(draw, sig=Signature({"c": 0, "f": 1}, {"R": 2})):
    n = draw(st.integers(1, 3))
    fns = {name: {k: draw(st.integers(0, n - 1)) for k in itertools.product(range(n), repeat=a)}
           for name, a in sig.functions.items()}
    preds = {name: {k for k in itertools.product(range(n), repeat=a) if draw(st.booleans())}
             for name, a in sig.predicates.items()}
    m = Structure(n, fns, preds)
    phi = ExtChoiceFunction(tuple(draw(st.sampled_from(members(mask) or list(range(n))))
                                  for mask in range(1 << n)))
    s = Assignment({v: draw(st.integers(0, n - 1)) for v in VARS})
    return m, phi, s


@settings(max_examples=300, deadline=None)
@given(structures(), formulas(9), terms(5))
def test_substitution_lemma(msp, a, u):
    m, phi, s = msp
    value = eval(m, phi, s, u)
    assert eval(m, phi, s, substitute(a, "x", u)) == eval(m, phi, s.updated("x", value), a)


@settings(max_examples=300, deadline=None)
@given(structures(), formulas(10), st.data())
def test_locality(msp, a, data):
    m, phi, s = msp
    other = Assignment({v: s(v) if v in a.fv else data.draw(st.integers(0, m.size - 1)) for v in VARS},
                       default=data.draw(st.integers(0, m.size - 1)))
    assert eval(m, phi, s, a) == eval(m, phi, other, a)


@settings(max_examples=300, deadline=None)
@given(structures(), formulas(10))
def test_constant_operator_is_extensional(msp, a):
    m, phi, s = msp
    assert eval(m, IntChoiceOperator(default=phi), s, a) == eval(m, phi, s, a)


# -- truth notions


def test_crit_valid_up_to_three():
    crit = F("P(c) -> P(eps x. P(x))")
    for n in (1, 2, 3):
        sig = signature_of(crit)
        assert all(check_truth_mode(m, crit, "valid") for m in enumerate_structures(sig, n))


def test_ext_valid_extensionally():
    ext = F("(P(eps x. ~(P(x) <-> Q(x))) <-> Q(eps x. ~(P(x) <-> Q(x)))) -> eps x. P(x) = eps x. Q(x)")
    assert generically_valid(ext, max_n=2).holds


def test_empty_predicate_modes():
    a, b = F("P(eps x. P(x))"), F("~P(eps x. P(x))")
    for phi in enumerate_choice_functions(2):
        assert not check_truth_mode(P0, a, "truth", phi)
    assert check_truth_mode(P0, b, "generic", s=Assignment())
    assert check_truth_mode(P0, b, "valid")
    assert not check_truth_mode(P1, F("P(x)"), "valid")
    assert check_truth_mode(P1, F("P(x)"), "local", ExtChoiceFunction.least(2), {"x": 1})


def test_truth_mode_arguments():
    with pytest.raises(SemanticsError):
        check_truth_mode(P1, F("P(c)"), "truth")
    with pytest.raises(SemanticsError):
        check_truth_mode(P1, F("P(c)"), "generic")
    with pytest.raises(SemanticsError):
        check_truth_mode(P1, F("P(c)"), "sometimes")


# -- consequence


@pytest.mark.parametrize("mode", ["l", "t", "plain", "g", "v"])
def test_premise_is_consequence(mode):
    a = F("R(c, eps y. R(y, c))")
    assert check_consequence([a], a, mode, 2).holds


def test_generic_mode_not_reflexive_on_open_formulas():
    a = F("R(x, eps y. R(y, x))")
    assert check_consequence([a], a, "l", 2).holds
    assert not check_consequence([a], a, "g", 2).holds


def test_modes_differ_on_open_formulas():
    gamma, a = [F("P(x)")], F("P(c)")
    assert not check_consequence(gamma, a, "l").holds
    assert check_consequence([F("P(x)")], F("all y. P(y)"), "t").holds
    assert not check_consequence([F("P(x)")], F("all y. P(y)"), "l").holds


def test_generic_mode_as_written():
    # premises generically true at one s force the conclusion at every s
    v = check_consequence([F("P(x)")], F("P(y)"), "g", 2)
    assert not v.holds and v.counterexample.premise_assignment is not None
    assert check_consequence([F("all x. P(x)")], F("P(y)"), "g", 2).holds


def test_counterexample_bundle():
    v = check_consequence([F("P(c)")], F("P(eps x. Q(x))"), "v", 2)
    assert not v.holds
    cx = v.counterexample
    data = json.loads(json.dumps(v.to_json()))
    assert data["holds"] is False and data["mode"] == "v"
    m, phi, s = load_model(data["counterexample"])
    assert m == cx.structure and phi == cx.chooser
    assert satisfies(m, phi, s, [F("P(c)")]) or not satisfies(m, phi, s, [F("P(eps x. Q(x))")])


SENTENCES = [
    ([], "P(c) | ~P(c)"),
    (["P(c)"], "ex x. P(x)"),
    (["ex x. P(x)"], "P(c)"),
    (["all x. P(x)"], "P(eps x. Q(x))"),
    (["P(c)", "c = d"], "P(d)"),
    (["ex x. P(x)"], "P(eps x. P(x))"),
    (["P(eps x. P(x))"], "all x. P(x)"),
    (["~P(eps x. ~P(x))"], "all x. ~P(x) -> Q(c)"),
]


@pytest.mark.parametrize("gamma,a", SENTENCES)
def test_local_and_plain_agree_on_sentences(gamma, a):
    gamma, a = [F(g) for g in gamma], F(a)
    loc = check_consequence(gamma, a, "l", 2).holds
    assert not loc or check_consequence(gamma, a, "t", 2).holds
    assert loc == check_consequence(gamma, a, "t", 2).holds


@pytest.mark.parametrize("gamma,a", [(g, a) for g, a in SENTENCES if g])
def test_semantic_deduction(gamma, a):
    *sigma, last = [F(g) for g in gamma]
    a = F(a)
    imp = Imp(last, a)
    assert check_consequence(sigma + [last], a, "t", 2).holds == check_consequence(sigma, imp, "t", 2).holds


def test_intensional_divergence():
    ext = F("(P(eps x. ~(P(x) <-> ~~P(x))) <-> ~~P(eps x. ~(P(x) <-> ~~P(x)))) -> eps x. P(x) = eps x. ~~P(x)")
    assert generically_valid(ext, 2).holds
    v = generically_valid(ext, 2, intensional=True)
    assert not v.holds and v.counterexample.structure.size == 2
    assert isinstance(v.counterexample.chooser, IntChoiceOperator)


# -- soundness of accepted proofs


def _corpus():
    out = {"drinker": drinker(), "drinker-embedded": embed_proof(drinker())}
    out.update({f"crit-{k}": p for k, p in critical_corpus().items()})
    out.update({f"id-{k}": p for k, p in identity_corpus().items()})
    out.update({f"hyp-{k}": p for k, (p, _) in hypothetical().items()})
    return out


def _structure_count(sig, n):
    return math.prod(n ** (n ** a) for a in sig.functions.values()) * \
        math.prod(2 ** (n ** a) for a in sig.predicates.values())


@pytest.mark.parametrize("name,p", sorted(_corpus().items()))
def test_proof_lines_follow_locally(name, p):
    sig = signature_of(*p.hypotheses, *(l.formula for l in p.lines))
    if _structure_count(sig, 2) > 4096:
        pytest.skip("signature too large for exhaustive search at n = 2")
    for line in p.lines:
        assert check_consequence(list(p.hypotheses), line.formula, "l", 2, sig).holds


# -- model files


def test_model_round_trip():
    m = Structure(2, {"c": 1, "f": {(0,): 1, (1,): 0}, "g": {(a, b): a & b for a in range(2) for b in range(2)}},
                  {"P": {1}, "R": {(0, 1)}})
    phi = ExtChoiceFunction.least(2)
    s = Assignment({"x": 1})
    data = json.loads(json.dumps(dump_model(m, phi, s)))
    assert data["functions"]["g"] == [[0, 0], [0, 1]]
    assert load_model(data) == (m, phi, s)


def test_intensional_model_round_trip():
    ty = epsilon_types(T("eps x. R(x, c)"))[0]
    psi = IntChoiceOperator({(ty.key, (0,)): ExtChoiceFunction((0, 0, 1, 0)),
                             (ty.key, (1,)): ExtChoiceFunction((1, 0, 1, 1))})
    m = Structure(2, {"c": 0}, {"R": set()})
    _, back, _ = load_model(json.loads(json.dumps(dump_model(m, psi))))
    assert back == psi


def test_model_size_mismatch():
    data = dump_model(P1, ExtChoiceFunction.least(3))
    with pytest.raises(SemanticsError):
        load_model(data)


def test_assignments_cover_domain():
    assert len(list(assignments(3, ["x", "y", "x"]))) == 9
