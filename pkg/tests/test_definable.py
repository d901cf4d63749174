from itertools import product as cartesian

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cohult.logic.definable import (
    DefinableFunction,
    Fragment,
    NotTotal,
    atomic_formulas,
    definable_set,
    domain_elements,
    enumerate_terms,
    has_definable_skolem,
    is_qf_embedding,
)
from cohult.logic.embeddings import FiniteEmbedding, LinearEmbedding
from cohult.logic.structures import FiniteStructure, OrderedVectorSpace, Vec, eval_formula

# successor mod 3 with a marked point
Z3 = FiniteStructure(3, {"c0": 0}, {"f": (1, {(i,): (i + 1) % 3 for i in range(3)})}, {"R": (1, [(0,)])})
M = OrderedVectorSpace(["one"])
N = OrderedVectorSpace(["one", "eps"])


def test_definable_set_examples():
    ident = DefinableFunction.identity(1)
    d = definable_set(Z3, Z3.formula("(R x0)"), [ident])
    assert sorted(d.materialized.points()) == [(0,)]
    succ = DefinableFunction.from_term("(f x0)", 1)
    d = definable_set(Z3, Z3.formula("(R x0)"), [succ])
    assert sorted(d.materialized.points()) == [(2,)]
    # diagonal in two variables
    pr0, pr1 = DefinableFunction.identity(2, 0), DefinableFunction.identity(2, 1)
    d = definable_set(Z3, Z3.formula("(= x0 x1)"), [pr0, pr1])
    assert sorted(d.materialized.points()) == [(0, 0), (1, 1), (2, 2)]


def test_definable_set_with_domain():
    chi = Z3.formula("(not (= z c0))")
    d = definable_set(Z3, Z3.formula("(= x0 x0)"), [DefinableFunction.identity(1)], chi)
    assert d.domain_points == (1, 2) and d.materialized.npoints == 2


def test_definable_set_symbolic_is_lazy():
    d = definable_set(M, M.formula("(< 0 x0)"), [DefinableFunction.identity(1)])
    assert d.materialized is None and d.arity == 1


def test_definable_set_rejects_extra_variables():
    with pytest.raises(ValueError):
        definable_set(Z3, Z3.formula("(= x0 y)"), [DefinableFunction.identity(1)])
    with pytest.raises(ValueError):
        definable_set(Z3, Z3.formula("(= x0 x1)"), [DefinableFunction.identity(1), DefinableFunction.identity(2)])


def _naive(S, phi, fns, n):
    return {s for s in cartesian(range(S.size), repeat=n)
            if eval_formula(S, phi, {f"x{j}": F(S, s) for j, F in enumerate(fns)})}


@given(st.sampled_from(atomic_formulas(Z3, ["x0", "x1"], 2)), st.integers(1, 2))
def test_definable_set_matches_naive(phi, n):
    terms = enumerate_terms(Z3, [f"x{i}" for i in range(n)], 2)
    fns = [DefinableFunction.from_term(t, n) for t in terms[:2]]
    d = definable_set(Z3, phi, fns)
    assert set(d.materialized.points()) == _naive(Z3, phi, fns, n)


def test_definable_function_terms_and_params():
    F = DefinableFunction.from_term("(+ x0 m)", 1, {"m": Vec.basis("one")})
    assert F(N, [Vec.basis("eps")]) == Vec({"one": 1, "eps": 1})
    assert DefinableFunction.constant(2, 1)(Z3, [0, 2]) == 1
    assert F.support() == (0,)
    with pytest.raises(ValueError):
        DefinableFunction.from_term("(+ x0 q)", 1)
    with pytest.raises(ValueError):
        F(N, [])


def test_definable_function_reindex():
    F = DefinableFunction.from_term("(f x1)", 2)
    G = F.reindex([0, 2], 3)
    assert G.support() == (2,)
    assert G(Z3, [0, 0, 1]) == F(Z3, [0, 1]) == 2


def test_graph_functions():
    inv = DefinableFunction.from_graph("(= (f y) x0)", 1)
    assert [inv(Z3, [i]) for i in range(3)] == [2, 0, 1]
    assert inv.is_total(Z3)
    bad = DefinableFunction.from_graph("(R y)", 1)
    assert bad(Z3, [1]) == 0
    none = DefinableFunction.from_graph("(and (R y) (not (R y)))", 1)
    assert not none.is_total(Z3)
    with pytest.raises(NotTotal):
        none(Z3, [0])
    many = DefinableFunction.from_graph("(= y y)", 1)
    with pytest.raises(NotTotal):
        many(Z3, [0])


def test_graph_domain_restricts_totality():
    # defined only off c0: x0 = f(y) has its unique y everywhere anyway
    partial = DefinableFunction.from_graph("(and (= (f y) x0) (not (= y c0)))", 1, constants=["c0"])
    assert not partial.is_total(Z3)
    restricted = DefinableFunction.from_graph(
        "(and (= (f y) x0) (not (= y c0)))", 1, constants=["c0"], domain=Z3.formula("(not (= z (f c0)))")
    )
    assert restricted.is_total(Z3)
    assert domain_elements(Z3, restricted.domain) == [0, 2]


def test_fragments():
    qf = Fragment.quantifier_free()
    assert Z3.formula("(not (R x))") in qf
    assert Z3.formula("(exists x (R x))") not in qf
    assert qf.is_quantifier_free and qf.closed_under_negation
    g = Fragment.generated_by([Z3.formula("(and (R x) (not (= x c0)))")])
    assert Z3.formula("(not (= x c0))") in g
    assert Z3.formula("(R (f x))") in g  # every atom
    assert Z3.formula("(not (R x))") not in g
    assert not g.closed_under_negation


def test_skolem_search():
    assert has_definable_skolem(Fragment.quantifier_free())
    found = has_definable_skolem(Fragment.generated_by([Z3.formula("(exists y (= (f y) x))")]), Z3, depth=2)
    assert not found  # the inverse of successor needs f(f(x))
    found = has_definable_skolem(Fragment.generated_by([Z3.formula("(exists y (= (f y) x))")]), Z3, depth=3)
    assert found and str(list(found.skolem.values())[0]) == "(f (f x))"
    assert has_definable_skolem(Fragment.generated_by([Z3.formula("(exists y (R y))")]), Z3)


def test_qf_embedding_examples():
    inc = LinearEmbedding.inclusion(M, N)
    corpus = atomic_formulas(M, ["x0", "x1"], 2)
    pool = [Vec({"one": q}) for q in (-2, -1, 0, 1, 3)]
    assert is_qf_embedding(M, N, inc, corpus, pool)
    flip = LinearEmbedding(M, N, {"one": Vec({"one": -1})})
    assert not is_qf_embedding(M, N, flip, corpus, pool)
    assert is_qf_embedding(Z3, Z3, FiniteEmbedding.identity(Z3), atomic_formulas(Z3, ["x0"], 2))
    with pytest.raises(ValueError):
        is_qf_embedding(M, N, inc, corpus, [])
