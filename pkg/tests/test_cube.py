import pytest
from hypothesis import given
from hypothesis import strategies as st

from cohult.filters.cube import (
    ArityMismatch,
    CubeSubset,
    NotSubset,
    all_tuples,
    decode,
    encode,
    fullify,
    index_tuple,
    is_full_over,
    project_tuple,
    projection_map,
    pullback,
    pushforward,
)


def pts(k, n, points):
    return CubeSubset.from_points(k, n, points)


def test_projection_map_examples():
    assert projection_map((1,), (1, 3)).map == (0,)
    assert projection_map((3,), (1, 3)).map == (1,)
    assert projection_map((), (2, 5)).map == ()
    with pytest.raises(NotSubset):
        projection_map((4,), (1, 3))


def test_project_tuple_examples():
    assert project_tuple((1, 3), (3,), ("x", "y")) == ("y",)
    assert project_tuple((1, 3), (1, 3), ("x", "y")) == ("x", "y")
    assert project_tuple((0, 1, 2), (0, 2), ("u", "v", "w")) == ("u", "w")
    with pytest.raises(ArityMismatch):
        project_tuple((1, 3), (3,), ("x",))


def test_index_tuple_validation():
    assert index_tuple([3, 1]) == (1, 3)
    with pytest.raises(ValueError):
        index_tuple([1, 1])
    with pytest.raises(ValueError):
        index_tuple([5], lam=3)


def test_encoding_is_little_endian():
    assert encode((1, 0), 2) == 1
    assert encode((0, 1), 2) == 2
    assert decode(5, 3, 2) == (2, 1)


def test_pullback_examples():
    X = pts(2, 1, [(1,)])
    assert set(pullback(X, (3,), (1, 3)).points()) == {(0, 1), (1, 1)}
    assert not pullback(CubeSubset.empty(2, 1), (3,), (1, 3))
    assert pullback(CubeSubset.full(2, 1), (3,), (1, 3)) == CubeSubset.full(2, 2)


def test_pushforward_examples():
    X = pts(2, 2, [(0, 0), (1, 1)])
    assert set(pushforward(X, (1, 3), (1,)).points()) == {(0,), (1,)}
    assert not pushforward(CubeSubset.empty(2, 2), (1, 3), (1,))
    assert set(pushforward(pts(2, 2, [(0, 1)]), (1, 3), (1,)).points()) == {(0,)}


def test_is_full_over_examples():
    c, b = (1, 3), (1,)
    assert is_full_over(pts(2, 2, [(0, 0), (0, 1)]), b, c)
    assert not is_full_over(pts(2, 2, [(0, 0)]), b, c)
    for bb in [(), (1,), (3,), (1, 3)]:
        assert is_full_over(CubeSubset.full(2, 2), bb, c)


def test_fullify_examples():
    c, b = (1, 3), (1,)
    assert set(fullify(pts(2, 2, [(0, 0)]), b, c).points()) == {(0, 0), (0, 1)}
    full = pts(2, 2, [(0, 0), (0, 1)])
    assert fullify(full, b, c) == full
    assert not fullify(CubeSubset.empty(2, 2), b, c)


def test_arity_checked():
    with pytest.raises(ArityMismatch):
        pullback(CubeSubset.full(2, 2), (3,), (1, 3))
    with pytest.raises(ArityMismatch):
        fullify(CubeSubset.full(2, 1), (1,), (1, 3))


def test_all_tuples_order():
    assert all_tuples(3, 2) == [(), (0,), (1,), (2,), (0, 1), (0, 2), (1, 2)]


# ---- properties


def chains():
    """``(k, a, b, c, mask on the c-cube)`` with ``a <= b <= c``."""
    @st.composite
    def build(draw):
        k = draw(st.integers(1, 3))
        c = tuple(sorted(draw(st.sets(st.integers(0, 3), min_size=0, max_size=3))))
        b = tuple(x for x in c if draw(st.booleans()))
        a = tuple(x for x in b if draw(st.booleans()))
        mask = draw(st.integers(0, (1 << k ** len(c)) - 1))
        return k, a, b, c, CubeSubset(k, len(c), mask)
    return build()


@given(chains(), st.data())
def test_projection_functoriality(chain, data):
    k, a, b, c, _ = chain
    s = tuple(data.draw(st.integers(0, k - 1)) for _ in c)
    assert project_tuple(b, a, project_tuple(c, b, s)) == project_tuple(c, a, s)


@given(chains())
def test_fullify_laws(chain):
    k, _, b, c, X = chain
    Xp = fullify(X, b, c)
    assert X <= Xp
    assert is_full_over(Xp, b, c)
    assert fullify(Xp, b, c) == Xp
    assert pushforward(Xp, c, b) == pushforward(X, c, b)
    # minimal: the fullification is the pullback of the image, the least full superset
    assert Xp == pullback(pushforward(X, c, b), b, c)


@given(chains(), st.data())
def test_fullify_monotone(chain, data):
    k, _, b, c, X = chain
    Y = CubeSubset(k, len(c), X.mask | data.draw(st.integers(0, (1 << k ** len(c)) - 1)))
    assert fullify(X, b, c) <= fullify(Y, b, c)


@given(chains())
def test_pullback_pushforward_galois(chain):
    k, _, b, c, X = chain
    # X is inside the pullback of its image, and images of pullbacks are exact
    assert X <= pullback(pushforward(X, c, b), b, c)
    Z = pushforward(X, c, b)
    assert pushforward(pullback(Z, b, c), c, b) == Z
