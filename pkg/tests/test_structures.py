from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cohult.logic.io import StructureFileError, dumps_structure, load_structure, loads_structure, dump_structure
from cohult.logic.structures import (
    ZERO,
    FiniteStructure,
    OrderedVectorSpace,
    QuantifierInSymbolic,
    UnboundVariable,
    UnknownSymbol,
    Vec,
    element_pool,
    eval_formula,
    eval_term,
)

N = OrderedVectorSpace(["one", "eps"])
FIN = FiniteStructure(2, {"c0": 0}, {"f": (1, {(0,): 1, (1,): 1})}, {"R": (1, [(1,)])})

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
vectors = st.builds(lambda a, b: Vec({"one": a, "eps": b}), rationals, rationals)


def test_eval_term_examples():
    assert eval_term(N, N.term("(+ one eps)"), {}) == Vec({"one": 1, "eps": 1})
    assert eval_term(N, N.term("(scl 2/3 one)"), {}) == Vec({"one": Fraction(2, 3)})
    assert eval_term(FIN, FIN.term("(f c0)"), {}) == 1
    with pytest.raises(UnboundVariable):
        eval_term(N, N.term("(+ x one)"), {})


def test_eval_formula_examples():
    eps = Vec.basis("eps")
    assert eval_formula(N, N.formula("(< 0 x)"), {"x": eps})
    assert eval_formula(N, N.formula("(< eps (scl 1/1000 one))"), {})
    assert eval_formula(FIN, FIN.formula("(exists x (= x c0))"), {})
    assert not eval_formula(FIN, FIN.formula("(exists x (and (R x) (= x c0)))"), {})
    with pytest.raises(QuantifierInSymbolic):
        eval_formula(N, N.formula("(exists x (= x one))"), {})


def test_unknown_symbols():
    with pytest.raises(UnknownSymbol):
        N.constant("zeta")
    with pytest.raises(UnknownSymbol):
        FIN.holds("S", [0])


def test_vec_normal_form():
    assert Vec({"one": 0}) == ZERO
    assert Vec([("one", 1), ("one", -1)]) == ZERO
    v = Vec({"one": Fraction(2, 4)})
    assert v.coord("one") == Fraction(1, 2)
    assert repr(Vec({"eps": 1, "one": Fraction(-1, 2)})) == "{eps:1, one:-1/2}"


def test_format_is_a_term_for_the_vector():
    v = Vec({"one": Fraction(-3, 2), "eps": 1})
    assert N.element(N.format(v)) == v
    assert N.format(ZERO) == "0"


@given(vectors, vectors, vectors)
def test_order_axioms(u, v, w):
    # totality (trichotomy), transitivity and translation invariance
    assert [N.less(u, v), u == v, N.less(v, u)].count(True) == 1
    if N.less(u, v) and N.less(v, w):
        assert N.less(u, w)
    assert N.less(u, v) == N.less(u + w, v + w)


@given(vectors, st.integers(1, 9))
def test_divisibility(v, n):
    part = v.scale(Fraction(1, n))
    total = ZERO
    for _ in range(n):
        total = total + part
    assert total == v


@given(rationals.filter(lambda q: q > 0))
def test_eps_is_infinitesimal(q):
    assert N.less(Vec.basis("eps"), Vec({"one": q}))


def test_element_pool_is_sorted_and_reproducible():
    pool = element_pool(N, depth=3)
    assert pool == element_pool(N, depth=3)
    assert all(not N.less(b, a) for a, b in zip(pool, pool[1:]))
    assert ZERO in pool and len(pool) == len(set(pool))


def test_structure_file_round_trip(tmp_path):
    for S in (FIN, N):
        text = dumps_structure(S)
        assert loads_structure(text) == S
        assert dumps_structure(loads_structure(text)) == text
    path = tmp_path / "m.struct"
    dump_structure(FIN, path)
    assert load_structure(path) == FIN


def test_nullary_function_in_file():
    S = FiniteStructure(2, {}, {"k": (0, {(): 1})}, {})
    assert loads_structure(dumps_structure(S)) == S


@pytest.mark.parametrize(
    "text",
    [
        "[structure]\nprofile = finite\n",
        "[structure]\nprofile = nope\n",
        "[constants]\nc = 0\n",
        "[structure]\nprofile = finite\nsize = 2\n[function f]\narity = 1\n0 = 1\n",
        "not ini at all",
    ],
)
def test_bad_structure_files(text):
    with pytest.raises(StructureFileError):
        loads_structure(text)


def test_finite_tables_are_validated():
    with pytest.raises(ValueError):
        FiniteStructure(2, {}, {"f": (1, {(0,): 1})}, {})
    with pytest.raises(ValueError):
        FiniteStructure(2, {"c": 5})
