from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohult.acceptance import shipped_scenario, small_structures
from cohult.filters.cube import ArityMismatch
from cohult.filters.systems import CoherentFilterSystem, CoherentUltrafilterFinite
from cohult.logic.definable import DefinableFunction, Fragment
from cohult.logic.embeddings import LinearEmbedding
from cohult.logic.structures import FiniteStructure, Vec, eval_formula
from cohult.ultrapower import (
    VocabularyMismatch,
    check_transitions,
    coherent_ultraproduct_at,
    find_isomorphism,
    materialize_ultrapower,
    principal_map,
)
from cohult.ultrapower.ambient import (
    MaterializedAmbient,
    OutsideFragment,
    WitnessNotFound,
    classes_equal,
    derive_filter,
    h_infinity,
    los_satisfies,
)
from cohult.ultrapower.classes import class_make, class_push, embedding_j

SCN = shipped_scenario("infinitesimal")
E = derive_filter(SCN.M, SCN.N, SCN.embed, SCN.f)
ID = DefinableFunction.identity(1)
EPS = class_make((0,), ID)  # f(0) = eps
ONE = Vec.basis("one")


def j(q):
    return embedding_j(ONE.scale(Fraction(q)))


def phi(src):
    return SCN.M.formula(src)


def test_derived_examples():
    assert los_satisfies(E, phi("(< 0 x0)"), [EPS])
    assert not classes_equal(E, EPS, j(0))
    assert h_infinity(E, EPS) == Vec.basis("eps")
    # f(1) = one is the image of j(one)
    assert classes_equal(E, class_make((1,), ID), j(1))
    # eps + one is the sum of the classes at 0 and 1
    s = class_make((0, 1), DefinableFunction.from_term("(+ x0 x1)", 2))
    assert classes_equal(E, s, class_make((2,), ID))


def test_infinitesimal_below_every_reciprocal():
    for n in range(1, 30):
        assert los_satisfies(E, phi("(< x0 x1)"), [EPS, j(Fraction(1, n))])
        assert los_satisfies(E, phi("(< x1 x0)"), [class_make((3,), ID), j(Fraction(-1, n))])


def test_decisions_carry_witnesses():
    fns = (ID,)
    verdict, s = E.decide(phi("(< 0 x0)"), fns, (0,))
    assert verdict and SCN.M.less(Vec(), s[0])
    verdict, s = E.decide(phi("(< (scl 1/2 one) x0)"), fns, (0,))
    assert not verdict and not SCN.M.less(ONE.scale(Fraction(1, 2)), s[0])


def test_principal_indices():
    assert [E.is_principal(a) for a in range(SCN.lam)] == [False, True, False, False, False, True, False, True]


def test_outside_fragment():
    with pytest.raises(OutsideFragment):
        los_satisfies(E, phi("(exists y (< y x0))"), [EPS])
    gen = derive_filter(SCN.M, SCN.N, SCN.embed, SCN.f, Fragment.generated_by([phi("(not (< 0 x0))")]))
    assert los_satisfies(gen, phi("(< 0 x0)"), [EPS])
    with pytest.raises(OutsideFragment):
        los_satisfies(gen, phi("(not (= x0 x0))"), [EPS])


def test_order_reversing_map_has_no_witness():
    # with one sent to -one, -one < eps < one in N pulls back to one < s < -one
    flip = LinearEmbedding(SCN.M, SCN.N, {"one": -ONE})
    bad = derive_filter(SCN.M, SCN.N, flip, SCN.f)
    xs = [EPS, j(-1), j(1)]
    with pytest.raises(WitnessNotFound):
        los_satisfies(bad, phi("(and (< x0 x1) (< x2 x0))"), xs)


def test_class_make_drops_unused_indices():
    F = DefinableFunction.from_term("(+ x1 one)", 3, constants=["one"])
    x = class_make((0, 2, 5), F)
    assert x.support == (2,)
    assert h_infinity(E, x) == SCN.f[2] + ONE
    with pytest.raises(ArityMismatch):
        class_make((0,), F)


@given(st.sets(st.integers(0, 7), min_size=1, max_size=3))
def test_class_push_preserves_the_element(extra):
    x = class_make((0, 3), DefinableFunction.from_term("(+ x0 (scl 2 x1))", 2))
    b = tuple(sorted(set(extra) | {0, 3}))
    y = class_push(x, b)
    assert y.support == b
    assert h_infinity(E, y) == h_infinity(E, x)
    assert classes_equal(E, x, y)


def test_class_push_needs_a_superset():
    with pytest.raises(ArityMismatch):
        class_push(EPS, (1, 2))


def test_congruence_for_addition():
    x = class_make((0,), ID)
    x2 = class_push(x, (0, 4))
    y = class_make((4,), DefinableFunction.from_term("(scl 1/2 x0)", 1))
    plus = phi("(= (+ x0 x1) (+ x2 x1))")
    assert los_satisfies(E, plus, [x, y, x2])


def test_h_of_j_is_the_embedding():
    for q in (0, 1, -3, Fraction(2, 7)):
        assert h_infinity(E, j(q)) == SCN.embed(ONE.scale(q))


# ---------------------------------------------------------------- materialized

Z3 = FiniteStructure(3, {}, {"f": (1, {(i,): (i + 1) % 3 for i in range(3)})}, {"R": (1, [(0,)])})


def principal(size, g, arity=2):
    return CoherentUltrafilterFinite.from_system(CoherentFilterSystem.principal(size, g, max_arity=arity))


def test_single_point_structure():
    M = FiniteStructure(1, {}, {"f": (1, {(0,): 0})}, {"R": (1, [(0,)])})
    U = materialize_ultrapower(M, principal(1, (0, 0)), arity_bound=2)
    assert U.structure.size == 1 and U.structure.holds("R", [0])


def test_materialized_principal_is_isomorphic():
    U = materialize_ultrapower(Z3, principal(3, (2, 0)), arity_bound=2)
    assert check_transitions(U)["failures"] == 0
    pm = principal_map(U)
    assert pm["isomorphism_onto_image"]
    assert sorted(pm["values"]) == [0, 1, 2]
    assert find_isomorphism(U.structure, Z3) is not None


@settings(max_examples=25)
@given(st.integers(0, 233), st.data())
def test_lazy_los_matches_materialized(idx, data):
    M = list(small_structures(3))[idx]
    g = tuple(data.draw(st.integers(0, M.size - 1)) for _ in range(2))
    amb = MaterializedAmbient(M, principal(M.size, g))
    U = materialize_ultrapower(M, amb.E, arity_bound=2, ambient=amb)
    xs = [class_make((0,), ID), class_make((1,), DefinableFunction.from_term("(f x0)", 1))]
    for src in ("(R x0)", "(= x0 x1)", "(R (f x1))", "(not (= (f x0) x1))"):
        f = M.formula(src)
        assert los_satisfies(amb, f, xs) == U.satisfies(f, xs)
        # and both agree with M at the generating point
        assert los_satisfies(amb, f, xs) == eval_formula(M, f, {"x0": g[0], "x1": M.apply("f", [g[1]])})


def test_find_isomorphism_negative():
    other = FiniteStructure(3, {}, {"f": (1, {(i,): i for i in range(3)})}, {"R": (1, [(0,)])})
    assert find_isomorphism(Z3, other) is None


def test_ultraproduct_principal_index():
    fam = {(s,): FiniteStructure(s + 1, {}, {"f": (1, {(i,): 0 for i in range(s + 1)})}, {"R": (1, [(0,)])})
           for s in range(3)}
    for s0 in range(3):
        U = coherent_ultraproduct_at((0,), fam, principal(3, (s0, 1)))
        assert find_isomorphism(U.structure, fam[(s0,)]) is not None


def test_ultraproduct_of_equal_structures_matches_materialize():
    E2 = principal(3, (1, 2))
    U = coherent_ultraproduct_at((0,), {(s,): Z3 for s in range(3)}, E2)
    V = materialize_ultrapower(Z3, E2, arity_bound=2)
    assert find_isomorphism(U.structure, V.structure) is not None


def test_ultraproduct_over_empty_tuple():
    U = coherent_ultraproduct_at((), {(): Z3}, principal(3, (0,)))
    assert find_isomorphism(U.structure, Z3) is not None


def test_ultraproduct_vocabulary_mismatch():
    other = FiniteStructure(3, {}, {"g": (1, {(i,): i for i in range(3)})}, {})
    fam = {(0,): Z3, (1,): Z3, (2,): other}
    with pytest.raises(VocabularyMismatch):
        coherent_ultraproduct_at((0,), fam, principal(3, (0,)))
    with pytest.raises(ValueError):
        coherent_ultraproduct_at((0,), {(0,): Z3}, principal(3, (0,)))
