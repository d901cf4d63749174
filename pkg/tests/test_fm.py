import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cohult.logic.corpus import random_formula, random_linear_system
from cohult.logic.fm import (
    Affine,
    LinearConstraint,
    LinearConstraintSystem,
    NotLinear,
    Unsat,
    find_witness,
    fm_solve,
    grid_oracle,
    linearize,
    rref,
)
from cohult.logic.structures import OrderedVectorSpace, Vec, eval_formula

M = OrderedVectorSpace(["one"])
N = OrderedVectorSpace(["one", "eps"])
ONE = Vec.basis("one")
x = Affine.var("x")


def system(*cons):
    names = sorted({v for c in cons for v in c.expr.variables()})
    return LinearConstraintSystem(tuple(names), tuple(cons))


def test_fm_examples():
    # 0 < x < one: midpoint
    res = fm_solve(system(LinearConstraint(-x, "<"), LinearConstraint(x - Affine.of(const=ONE), "<")), M)
    assert res and res.values["x"] == ONE.scale(Fraction(1, 2))
    # one < x < 0
    res = fm_solve(system(LinearConstraint(Affine.of(const=ONE) - x, "<"), LinearConstraint(x, "<")), M)
    assert isinstance(res, Unsat) and not res
    # x = one + one
    res = fm_solve(system(LinearConstraint(x - Affine.of(const=ONE.scale(2)), "=")), M)
    assert res.values["x"] == ONE.scale(2)


def test_one_sided_bounds_step_by_the_unit():
    res = fm_solve(system(LinearConstraint(Affine.of(const=ONE.scale(3)) - x, "<")), M)
    assert res.values["x"] == ONE.scale(4)
    res = fm_solve(system(LinearConstraint(x - Affine.of(const=ONE), "<=")), M)
    assert res.values["x"] == Vec()


def test_strict_bounds_are_exact():
    # x < 0 and 0 <= x has no solution
    assert not fm_solve(system(LinearConstraint(x, "<"), LinearConstraint(-x, "<=")), M)
    assert fm_solve(system(LinearConstraint(x, "<="), LinearConstraint(-x, "<=")), M).values["x"] == Vec()


def test_constants_must_live_in_the_space():
    with pytest.raises(ValueError):
        fm_solve(system(LinearConstraint(x - Affine.of(const=Vec.basis("eps")), "<")), M)


def test_solving_in_a_larger_space():
    eps = Vec.basis("eps")
    # eps < x < one has the midpoint (one + eps)/2 in N
    res = fm_solve(system(
        LinearConstraint(Affine.of(const=eps) - x, "<"),
        LinearConstraint(x - Affine.of(const=ONE), "<"),
    ), N)
    assert res.values["x"] == (ONE + eps).scale(Fraction(1, 2))


def test_find_witness_handles_negation_and_disjunction():
    f = M.formula("(and (not (< x0 one)) (not (= x0 (scl 2 one))) (< x0 (scl 3 one)))")
    w = find_witness(M, f, ["x0"])
    assert w is not None and eval_formula(M, f, w)
    assert find_witness(M, M.formula("(and (< x0 0) (< one x0))"), ["x0"]) is None


def test_find_witness_with_fixed_parameters():
    f = M.formula("(< p x0)")
    w = find_witness(M, f, ["x0"], {"p": ONE.scale(5)})
    assert M.less(ONE.scale(5), w["x0"])


def test_linearize():
    a = linearize(N, N.term("(+ (scl 2 x) (- (+ one y)))"))
    assert a.coef("x") == 2 and a.coef("y") == -1 and a.const == -ONE
    with pytest.raises(NotLinear):
        linearize(N, N.term("(f x)"))


def test_rref_rank():
    red, piv = rref([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]], 2)
    assert piv == [0]


def test_grid_oracle_examples():
    assert grid_oracle(system(LinearConstraint(-x, "<"), LinearConstraint(x - Affine.of(const=ONE.scale(Fraction(1, 100))), "<")), M)
    assert not grid_oracle(system(LinearConstraint(x, "<"), LinearConstraint(-x, "<")), M)
    # feasible far outside the initial grid
    far = system(LinearConstraint(Affine.of(const=ONE.scale(1000)) - x, "<"))
    assert grid_oracle(far, M)


@given(st.integers(0, 10 ** 9))
def test_fm_matches_grid_oracle(seed):
    rng = random.Random(seed)
    for _ in range(5):
        sysm = random_linear_system(rng)
        res = fm_solve(sysm, M)
        assert bool(res) == grid_oracle(sysm, M)
        if res:
            assert all(c.holds(M, res.values) for c in sysm.constraints)


@given(st.integers(0, 10 ** 9))
def test_witness_soundness_for_random_formulas(seed):
    rng = random.Random(seed)
    f = random_formula(rng, N, ["x0", "x1"], 2, 2)
    w = find_witness(N, f, ["x0", "x1"])
    if w is not None:
        assert eval_formula(N, f, w)
    else:
        # no witness: the formula fails on a spread of sample points
        pts = [Vec({"one": a, "eps": b}) for a in (-2, 0, 1) for b in (-1, 0, 1)]
        assert not any(eval_formula(N, f, {"x0": p, "x1": q}) for p in pts for q in pts)
