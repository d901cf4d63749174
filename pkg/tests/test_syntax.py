import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cohult.logic.corpus import enumerate_formulas, random_formula
from cohult.logic.structures import FiniteStructure, OrderedVectorSpace
from cohult.logic.syntax import (
    And,
    App,
    Atom,
    Const,
    Exists,
    Not,
    ParseError,
    Scale,
    Var,
    depth,
    free_vars,
    is_quantifier_free,
    parse_formula,
    parse_term,
    rename_vars,
    subformulas,
    substitute,
)

OVS = OrderedVectorSpace(["one", "eps"])
FIN = FiniteStructure(3, {"c0": 0}, {"f": (1, {(0,): 1, (1,): 2, (2,): 0})}, {"R": (1, [(1,)])})


def test_parse_examples():
    assert parse_term("(+ x (scl 1/2 y))") == App("+", (Var("x"), Scale(Fraction(1, 2), Var("y"))))
    assert parse_formula("(< 0 x)") == Atom("<", (Const("0"), Var("x")))
    f = parse_formula("(and (< 0 x) (= x y))")
    assert isinstance(f, And) and len(f.args) == 2


def test_constants_are_declared_names():
    assert parse_term("one", ["one"]) == Const("one")
    assert parse_term("one") == Var("one")
    assert parse_formula("(exists z (= z c0))", ["c0"]) == Exists("z", Atom("=", (Var("z"), Const("c0"))))


@pytest.mark.parametrize(
    "src,pos",
    [("(+ x", 4), ("(< 0 x", 6), ("x)", 0), ("(scl x y)", 5), ("(+ x y z)", 1)],
)
def test_parse_errors_carry_positions(src, pos):
    parse = parse_term if src.startswith(("(+", "(scl")) else parse_formula
    with pytest.raises(ParseError) as info:
        parse(src)
    assert info.value.pos == pos


def test_numbers_only_inside_scaling():
    with pytest.raises(ParseError):
        parse_term("(+ x 3)")


@given(st.integers(0, 10 ** 6))
def test_print_parse_round_trip(seed):
    rng = random.Random(seed)
    for S in (OVS, FIN):
        f = random_formula(rng, S, ["x0", "x1"], 3, 3)
        assert parse_formula(str(f), S.vocabulary.constants) == f


def test_round_trip_over_enumerated_corpus():
    for f in enumerate_formulas(FIN, ["x0", "x1"], 2):
        assert parse_formula(str(f), ["c0"]) == f


def test_tree_helpers():
    f = parse_formula("(or (not (< x one)) (exists z (= z y)))", ["one"])
    assert free_vars(f) == {"x", "y"}
    assert not is_quantifier_free(f)
    assert depth(Var("x")) == 1
    assert depth(parse_formula("(< x y)")) == 2
    assert Not(Atom("<", (Var("x"), Const("one")))) in subformulas(f)


def test_substitute_is_simultaneous():
    f = parse_formula("(< x y)")
    g = substitute(f, {"x": Var("y"), "y": Var("x")})
    assert g == parse_formula("(< y x)")
    assert rename_vars(f, {"x": "z"}) == parse_formula("(< z y)")


def test_substitute_respects_binders():
    f = parse_formula("(exists x (= x y))")
    assert substitute(f, {"x": Var("w")}) == f


def test_enumerated_formula_count():
    fs = enumerate_formulas(FIN, ["x0", "x1"], 2)
    assert len(fs) == len(set(fs))
    assert all(depth(f) - 1 <= 2 for f in fs)
