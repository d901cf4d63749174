"""Finite explicit structures, ordered rational vector spaces, and Tarskian evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Iterable, Mapping, Sequence

from cohult.logic.syntax import (
    And,
    App,
    Atom,
    Const,
    Exists,
    Not,
    Or,
    Scale,
    Var,
    format_rational,
    parse_formula,
    parse_term,
)


class UnboundVariable(KeyError):
    pass


class QuantifierInSymbolic(ValueError):
    """Quantified formulas are evaluated by enumeration, which needs a finite universe."""


class UnknownSymbol(KeyError):
    pass


@dataclass(frozen=True)
class Vocabulary:
    constants: frozenset = frozenset()
    functions: Mapping[str, int] = field(default_factory=dict)
    relations: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        names = list(self.constants) + list(self.functions) + list(self.relations)
        if len(names) != len(set(names)):
            raise ValueError("symbol names must be unique across sorts")
        if any(n < 0 for n in list(self.functions.values()) + list(self.relations.values())):
            raise ValueError("arities must be nonnegative")


# ---------------------------------------------------------------- vectors


class Vec:
    """A vector with exact rational coordinates on named basis elements.

    Zero coordinates are dropped, so equal vectors have equal
    representations.  The order lives in the ambient space, not here.
    """

    __slots__ = ("_items", "_hash")

    def __init__(self, coords: Mapping[str, Fraction] | Iterable = ()):
        items = coords.items() if isinstance(coords, Mapping) else coords
        clean = {}
        for k, v in items:
            v = Fraction(v)
            if v:
                clean[k] = clean.get(k, 0) + v
        self._items = tuple(sorted((k, v) for k, v in clean.items() if v))
        self._hash = hash(self._items)

    @classmethod
    def basis(cls, name: str) -> Vec:
        return cls({name: 1})

    @property
    def items(self) -> tuple:
        return self._items

    def coord(self, name: str) -> Fraction:
        for k, v in self._items:
            if k == name:
                return v
        return Fraction(0)

    def support(self) -> frozenset:
        return frozenset(k for k, _ in self._items)

    def __add__(self, other: Vec) -> Vec:
        return Vec(list(self._items) + list(other._items))

    def __neg__(self) -> Vec:
        return Vec((k, -v) for k, v in self._items)

    def __sub__(self, other: Vec) -> Vec:
        return self + -other

    def scale(self, q) -> Vec:
        q = Fraction(q)
        return Vec((k, q * v) for k, v in self._items)

    def __bool__(self):
        return bool(self._items)

    def __eq__(self, other):
        return isinstance(other, Vec) and self._items == other._items

    def __hash__(self):
        return self._hash

    def __repr__(self):
        inner = ", ".join(f"{k}:{format_rational(v)}" for k, v in self._items)
        return "{" + inner + "}"


ZERO = Vec()


# ---------------------------------------------------------------- structures


class Structure:
    """Common interface: constants, function application, relation lookup."""

    vocabulary: Vocabulary
    is_finite: bool

    def constant(self, name: str):
        raise NotImplementedError

    def apply(self, fn: str, args: Sequence):
        raise NotImplementedError

    def holds(self, rel: str, args: Sequence) -> bool:
        raise NotImplementedError

    def scale(self, q: Fraction, x):
        raise UnknownSymbol("scl")

    def universe(self):
        raise QuantifierInSymbolic("universe of a symbolic structure is not enumerable")

    def term(self, src: str):
        return parse_term(src, self.vocabulary.constants)

    def formula(self, src: str):
        return parse_formula(src, self.vocabulary.constants)


class FiniteStructure(Structure):
    """Universe ``range(size)`` with explicit tables.

    ``functions`` maps a name to ``(arity, table)`` where ``table`` maps
    argument tuples to values; ``relations`` maps a name to
    ``(arity, set of tuples)``.  Equality is built in.
    """

    is_finite = True

    def __init__(
        self,
        size: int,
        constants: Mapping[str, int] | None = None,
        functions: Mapping[str, tuple] | None = None,
        relations: Mapping[str, tuple] | None = None,
    ):
        if size < 1:
            raise ValueError("universe must be nonempty")
        self.size = size
        self.constants = dict(constants or {})
        self.functions = {}
        for name, (arity, table) in (functions or {}).items():
            table = dict(table)
            for args in cartesian(range(size), repeat=arity):
                if args not in table:
                    raise ValueError(f"table of {name} is missing {args}")
                if not 0 <= table[args] < size:
                    raise ValueError(f"value of {name}{args} outside the universe")
            self.functions[name] = (arity, table)
        self.relations = {}
        for name, (arity, rows) in (relations or {}).items():
            rows = frozenset(tuple(r) for r in rows)
            if any(len(r) != arity or not all(0 <= x < size for x in r) for r in rows):
                raise ValueError(f"bad row in relation {name}")
            self.relations[name] = (arity, rows)
        for name, v in self.constants.items():
            if not 0 <= v < size:
                raise ValueError(f"constant {name} outside the universe")
        self.vocabulary = Vocabulary(
            frozenset(self.constants),
            {k: a for k, (a, _) in self.functions.items()},
            {k: a for k, (a, _) in self.relations.items()},
        )

    def constant(self, name):
        try:
            return self.constants[name]
        except KeyError:
            raise UnknownSymbol(name) from None

    def apply(self, fn, args):
        try:
            arity, table = self.functions[fn]
        except KeyError:
            raise UnknownSymbol(fn) from None
        if len(args) != arity:
            raise ValueError(f"{fn} takes {arity} arguments")
        return table[tuple(args)]

    def holds(self, rel, args):
        try:
            arity, rows = self.relations[rel]
        except KeyError:
            raise UnknownSymbol(rel) from None
        if len(args) != arity:
            raise ValueError(f"{rel} takes {arity} arguments")
        return tuple(args) in rows

    def universe(self):
        return range(self.size)

    def _key(self):
        return (
            self.size,
            tuple(sorted(self.constants.items())),
            tuple(sorted((k, a, tuple(sorted(t.items()))) for k, (a, t) in self.functions.items())),
            tuple(sorted((k, a, tuple(sorted(r))) for k, (a, r) in self.relations.items())),
        )

    def __eq__(self, other):
        return isinstance(other, FiniteStructure) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"FiniteStructure(size={self.size}, vocabulary={sorted(self.vocabulary.functions)}+{sorted(self.vocabulary.relations)})"


class OrderedVectorSpace(Structure):
    """The rational vector space on ``basis``, ordered lexicographically.

    ``basis`` is listed in descending Archimedean order: the sign of a
    vector is the sign of its coordinate on the first basis element where
    it is nonzero.  Constants are ``0`` and the basis names; the unit used
    for one-sided witnesses is ``basis[0]``.
    """

    is_finite = False

    def __init__(self, basis: Sequence[str]):
        basis = tuple(basis)
        if not basis or len(set(basis)) != len(basis):
            raise ValueError("basis must be a nonempty list of distinct names")
        if "0" in basis:
            raise ValueError("'0' is reserved for the zero vector")
        self.basis = basis
        self._rank = {b: i for i, b in enumerate(basis)}
        self.vocabulary = Vocabulary(frozenset(basis) | {"0"}, {"+": 2, "-": 1}, {"<": 2})

    @property
    def unit(self) -> Vec:
        return Vec.basis(self.basis[0])

    def contains(self, v: Vec) -> bool:
        return isinstance(v, Vec) and v.support() <= self._rank.keys()

    def sign(self, v: Vec) -> int:
        best = None
        for k, c in v.items:
            r = self._rank.get(k)
            if r is None:
                raise ValueError(f"{v!r} has a coordinate outside the basis {self.basis}")
            if best is None or r < best[0]:
                best = (r, c)
        if best is None:
            return 0
        return 1 if best[1] > 0 else -1

    def less(self, u: Vec, v: Vec) -> bool:
        return self.sign(v - u) > 0

    def constant(self, name):
        if name == "0":
            return ZERO
        if name in self._rank:
            return Vec.basis(name)
        raise UnknownSymbol(name)

    def apply(self, fn, args):
        if fn == "+" and len(args) == 2:
            return args[0] + args[1]
        if fn == "-" and len(args) == 1:
            return -args[0]
        raise UnknownSymbol(fn)

    def scale(self, q, x):
        return x.scale(q)

    def holds(self, rel, args):
        if rel == "<" and len(args) == 2:
            return self.less(args[0], args[1])
        raise UnknownSymbol(rel)

    def format(self, v: Vec) -> str:
        """Canonical term for ``v``: scaled basis elements summed in basis order."""
        parts = []
        for b in self.basis:
            c = v.coord(b)
            if c:
                parts.append(b if c == 1 else f"(scl {format_rational(c)} {b})")
        if not parts:
            return "0"
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = f"(+ {p} {out})"
        return out

    def element(self, src: str) -> Vec:
        return eval_term(self, self.term(src), {})

    def __eq__(self, other):
        return isinstance(other, OrderedVectorSpace) and self.basis == other.basis

    def __hash__(self):
        return hash(self.basis)

    def __repr__(self):
        return f"OrderedVectorSpace({list(self.basis)})"


# ---------------------------------------------------------------- evaluation


def eval_term(S: Structure, t, asg: Mapping):
    if isinstance(t, Var):
        try:
            return asg[t.name]
        except KeyError:
            raise UnboundVariable(t.name) from None
    if isinstance(t, Const):
        return S.constant(t.name)
    if isinstance(t, App):
        return S.apply(t.fn, [eval_term(S, a, asg) for a in t.args])
    if isinstance(t, Scale):
        return S.scale(t.q, eval_term(S, t.arg, asg))
    raise TypeError(f"not a term: {t!r}")


def eval_formula(S: Structure, f, asg: Mapping) -> bool:
    if isinstance(f, Atom):
        vals = [eval_term(S, a, asg) for a in f.args]
        if f.rel == "=":
            return vals[0] == vals[1]
        return S.holds(f.rel, vals)
    if isinstance(f, Not):
        return not eval_formula(S, f.arg, asg)
    if isinstance(f, And):
        return all(eval_formula(S, g, asg) for g in f.args)
    if isinstance(f, Or):
        return any(eval_formula(S, g, asg) for g in f.args)
    if isinstance(f, Exists):
        if not S.is_finite:
            raise QuantifierInSymbolic(f"cannot evaluate {f} over {S!r}")
        inner = dict(asg)
        for x in S.universe():
            inner[f.var] = x
            if eval_formula(S, f.body, inner):
                return True
        return False
    raise TypeError(f"not a formula: {f!r}")


DEFAULT_SCALARS = (Fraction(2), Fraction(1, 2), Fraction(-1, 3), Fraction(3))


def element_pool(
    M: OrderedVectorSpace,
    generators: Sequence[Vec] | None = None,
    depth: int = 3,
    scalars: Sequence[Fraction] = DEFAULT_SCALARS,
) -> list:
    """Values of terms of height at most ``depth`` over ``generators`` and ``0``.

    To keep the pool small, every sum has a generator (or its negative) on
    one side; scalings use ``scalars``.  The pool is returned sorted by the
    order of ``M``, so sampling from it with a seeded RNG is reproducible.
    """
    gens = list(generators) if generators is not None else [Vec.basis(b) for b in M.basis]
    base = set(gens) | {-g for g in gens} | {ZERO}
    level = set(base)
    for _ in range(depth - 1):
        nxt = set(level)
        for u in level:
            nxt.update(u + g for g in base)
            nxt.update(u.scale(q) for q in scalars)
        level = nxt
    return sorted(level, key=lambda v: tuple(v.coord(b) for b in M.basis))
