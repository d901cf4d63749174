"""Seeded random corpora: terms, quantifier-free formulas and linear systems.

Every generator takes a :class:`random.Random` and draws from it in a
fixed order, so a seed determines the corpus.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from itertools import product as cartesian
from typing import Sequence

from cohult.logic.fm import OPS, Affine, LinearConstraint, LinearConstraintSystem
from cohult.logic.structures import OrderedVectorSpace, Structure, Vec
from cohult.logic.syntax import And, App, Atom, Const, Not, Or, Scale, Var
from cohult.logic.syntax import depth as tree_depth

SCALARS = (Fraction(2), Fraction(1, 2), Fraction(-1), Fraction(3), Fraction(-2, 3))


def random_term(rng: random.Random, S: Structure, variables: Sequence[str], depth: int = 2):
    """A term of height at most ``depth`` over ``variables`` and the symbols of ``S``."""
    consts = sorted(S.vocabulary.constants)
    leaves = [Var(v) for v in variables] + [Const(c) for c in consts]
    if depth <= 1 or rng.random() < 0.4:
        return rng.choice(leaves)
    fns = sorted(S.vocabulary.functions.items())
    options = [f for f in fns if f[1] > 0]
    scalable = isinstance(S, OrderedVectorSpace)
    pick = rng.randrange(len(options) + (1 if scalable else 0)) if options or scalable else None
    if pick is None:
        return rng.choice(leaves)
    if pick == len(options):
        return Scale(rng.choice(SCALARS), random_term(rng, S, variables, depth - 1))
    name, arity = options[pick]
    return App(name, tuple(random_term(rng, S, variables, depth - 1) for _ in range(arity)))


def random_atom(rng: random.Random, S: Structure, variables: Sequence[str], term_depth: int = 2):
    rels = sorted(S.vocabulary.relations.items()) + [("=", 2)]
    name, arity = rng.choice(rels)
    return Atom(name, tuple(random_term(rng, S, variables, term_depth) for _ in range(arity)))


def random_formula(
    rng: random.Random,
    S: Structure,
    variables: Sequence[str],
    depth: int = 2,
    term_depth: int = 2,
):
    """A quantifier-free formula with at most ``depth`` nested connectives."""
    if depth <= 0 or rng.random() < 0.3:
        return random_atom(rng, S, variables, term_depth)
    kind = rng.randrange(3)
    if kind == 0:
        return Not(random_formula(rng, S, variables, depth - 1, term_depth))
    parts = tuple(random_formula(rng, S, variables, depth - 1, term_depth) for _ in range(2))
    return And(parts) if kind == 1 else Or(parts)


def random_coefficient(rng: random.Random, bound: int = 3, max_den: int = 3) -> Fraction:
    """A rational in ``[-bound, bound]`` with denominator at most ``max_den``."""
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(-bound * den, bound * den), den)


def random_linear_system(
    rng: random.Random,
    max_vars: int = 3,
    max_constraints: int = 5,
    unit: str = "one",
) -> LinearConstraintSystem:
    """``sum c_i x_i + c op 0`` constraints with coefficients from :func:`random_coefficient`."""
    n = rng.randint(1, max_vars)
    names = [f"x{i}" for i in range(n)]
    cons = []
    for _ in range(rng.randint(1, max_constraints)):
        coeffs = {x: random_coefficient(rng) for x in names}
        const = Vec({unit: random_coefficient(rng)})
        cons.append(LinearConstraint(Affine.of(coeffs, const), rng.choice(OPS)))
    return LinearConstraintSystem(tuple(names), tuple(cons))


def _height(node) -> int:
    """Tree height with leaves at 0."""
    return tree_depth(node) - 1


def enumerate_formulas(S: Structure, variables: Sequence[str], max_height: int) -> list:
    """Every quantifier-free formula over ``variables`` of height at most ``max_height``.

    Height counts every node (terms included) with leaves at 0.  Equality
    and binary connectives are taken over unordered pairs; ``and``/``or``
    join two different formulas.  Constants of ``S`` are leaves too.
    """
    terms = {0: [Var(v) for v in variables] + [Const(c) for c in sorted(S.vocabulary.constants)]}
    fns = sorted((f, a) for f, a in S.vocabulary.functions.items() if a > 0)
    for h in range(1, max_height):
        below = [t for k in range(h) for t in terms[k]]
        new = []
        for name, arity in fns:
            for args in cartesian(below, repeat=arity):
                if max(_height(a) for a in args) == h - 1:
                    new.append(App(name, tuple(args)))
        terms[h] = new
    rels = sorted(S.vocabulary.relations.items())
    forms: dict = {}
    for h in range(1, max_height + 1):
        below_t = [t for k in range(h) for t in terms.get(k, [])]
        below_f = [f for k in range(1, h) for f in forms[k]]
        top_t = set(terms.get(h - 1, []))
        new = []
        for name, arity in rels:
            for args in cartesian(below_t, repeat=arity):
                if any(a in top_t for a in args):
                    new.append(Atom(name, tuple(args)))
        for s, t in combinations_with_replacement(below_t, 2):
            if s in top_t or t in top_t:
                new.append(Atom("=", (s, t)))
        top_f = forms.get(h - 1, [])
        new.extend(Not(f) for f in top_f)
        for f, g in combinations(below_f, 2):
            if f in top_f or g in top_f:
                new.append(And((f, g)))
                new.append(Or((f, g)))
        forms[h] = new
    return [f for h in sorted(forms) for f in forms[h]]
