"""Index tuples, projections and subsets of finite cubes.

A point ``s`` of the cube ``A^n`` (``|A| = k``) has the little-endian
mixed-radix index ``sum(s[i] * k**i)``; a :class:`CubeSubset` stores its
members as a bitmask over those indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from cohult import kernels


class NotSubset(ValueError):
    """Raised when an index tuple is not contained in another."""


class ArityMismatch(ValueError):
    """Raised when a tuple or subset has the wrong length or arity."""


IndexTuple = tuple  # strictly increasing tuple of naturals


def index_tuple(indices: Iterable[int], lam: int | None = None) -> tuple[int, ...]:
    """Normalize ``indices`` to a strictly increasing tuple, checking bounds."""
    out = tuple(sorted(indices))
    if len(set(out)) != len(out):
        raise ValueError(f"repeated index in {out}")
    if out and out[0] < 0:
        raise ValueError(f"negative index in {out}")
    if lam is not None and out and out[-1] >= lam:
        raise ValueError(f"index {out[-1]} out of range for lambda={lam}")
    return out


def all_tuples(lam: int, max_arity: int) -> list[tuple[int, ...]]:
    """Every index tuple over ``range(lam)`` of length at most ``max_arity``.

    Ordered by length, then lexicographically; this is the canonical scan
    order used throughout.
    """
    out = []
    for n in range(min(lam, max_arity) + 1):
        out.extend(combinations(range(lam), n))
    return out


def meet(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(sorted(set(a) & set(b)))


def join(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(sorted(set(a) | set(b)))


@dataclass(frozen=True)
class ProjectionMap:
    """Order-preserving injection ``range(source_len) -> range(target_len)``."""

    source_len: int
    target_len: int
    map: tuple[int, ...]

    def __call__(self, i: int) -> int:
        return self.map[i]


def projection_map(a: Sequence[int], b: Sequence[int]) -> ProjectionMap:
    """The map sending position ``i`` of ``a`` to the position of ``a[i]`` in ``b``."""
    where = {x: j for j, x in enumerate(b)}
    try:
        pmap = tuple(where[x] for x in a)
    except KeyError as exc:
        raise NotSubset(f"{tuple(a)} is not a subset of {tuple(b)}") from exc
    return ProjectionMap(len(a), len(b), pmap)


def project_tuple(b: Sequence[int], a: Sequence[int], s: Sequence) -> tuple:
    """Restrict ``s`` (indexed by ``b``) to the coordinates indexed by ``a``."""
    if len(s) != len(b):
        raise ArityMismatch(f"tuple of length {len(s)} for index tuple of length {len(b)}")
    p = projection_map(a, b)
    return tuple(s[j] for j in p.map)


def encode(point: Sequence[int], base_size: int) -> int:
    idx = 0
    for i, x in enumerate(point):
        if not 0 <= x < base_size:
            raise ValueError(f"coordinate {x} outside base set of size {base_size}")
        idx += x * base_size ** i
    return idx


def decode(index: int, base_size: int, arity: int) -> tuple[int, ...]:
    out = []
    for _ in range(arity):
        out.append(index % base_size)
        index //= base_size
    return tuple(out)


def proj_table(base_size: int, a: Sequence[int], b: Sequence[int]):
    """Kernel projection table for ``pi^b_a`` on the cube of size ``base_size``."""
    p = projection_map(a, b)
    return kernels.table(base_size, len(b), p.map)


@dataclass(frozen=True)
class CubeSubset:
    """A subset of ``A^arity`` with ``|A| = base_size``, stored as a bitmask."""

    base_size: int
    arity: int
    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.npoints:
            raise ValueError("mask has bits outside the cube")

    @property
    def npoints(self) -> int:
        return self.base_size ** self.arity

    @classmethod
    def full(cls, base_size: int, arity: int) -> CubeSubset:
        return cls(base_size, arity, (1 << base_size ** arity) - 1)

    @classmethod
    def empty(cls, base_size: int, arity: int) -> CubeSubset:
        return cls(base_size, arity, 0)

    @classmethod
    def from_points(cls, base_size: int, arity: int, points: Iterable[Sequence[int]]) -> CubeSubset:
        mask = 0
        for p in points:
            if len(p) != arity:
                raise ArityMismatch(f"point {tuple(p)} in a cube of arity {arity}")
            mask |= 1 << encode(p, base_size)
        return cls(base_size, arity, mask)

    def points(self) -> Iterator[tuple[int, ...]]:
        m, i = self.mask, 0
        while m:
            if m & 1:
                yield decode(i, self.base_size, self.arity)
            m >>= 1
            i += 1

    def __contains__(self, point) -> bool:
        return bool((self.mask >> encode(point, self.base_size)) & 1)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __iter__(self):
        return self.points()

    def _check(self, other: CubeSubset):
        if (self.base_size, self.arity) != (other.base_size, other.arity):
            raise ArityMismatch("subsets of different cubes")

    def __and__(self, other: CubeSubset) -> CubeSubset:
        self._check(other)
        return CubeSubset(self.base_size, self.arity, self.mask & other.mask)

    def __or__(self, other: CubeSubset) -> CubeSubset:
        self._check(other)
        return CubeSubset(self.base_size, self.arity, self.mask | other.mask)

    def __invert__(self) -> CubeSubset:
        return CubeSubset(self.base_size, self.arity, ((1 << self.npoints) - 1) & ~self.mask)

    def __le__(self, other: CubeSubset) -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def __repr__(self) -> str:
        pts = ", ".join(str(p) for p in self.points())
        return f"CubeSubset(|A|={self.base_size}, n={self.arity}, {{{pts}}})"


def _expect_arity(X: CubeSubset, n: int):
    if X.arity != n:
        raise ArityMismatch(f"subset of arity {X.arity}, expected {n}")


def pullback(X: CubeSubset, a: Sequence[int], b: Sequence[int]) -> CubeSubset:
    """``{s in A^|b| : pi^b_a(s) in X}``."""
    _expect_arity(X, len(a))
    tab = proj_table(X.base_size, a, b)
    return CubeSubset(X.base_size, len(b), kernels.pullback(X.mask, tab))


def pushforward(X: CubeSubset, b: Sequence[int], a: Sequence[int]) -> CubeSubset:
    """Image of ``X`` (arity ``|b|``) under ``pi^b_a``."""
    _expect_arity(X, len(b))
    tab = proj_table(X.base_size, a, b)
    return CubeSubset(X.base_size, len(a), kernels.pushforward(X.mask, tab))


def is_full_over(X: CubeSubset, b: Sequence[int], c: Sequence[int]) -> bool:
    """Whether membership in ``X`` depends only on the ``b``-coordinates."""
    _expect_arity(X, len(c))
    return kernels.is_full(X.mask, proj_table(X.base_size, b, c))


def fullify(X: CubeSubset, b: Sequence[int], c: Sequence[int]) -> CubeSubset:
    """Smallest superset of ``X`` that is full over ``b``."""
    _expect_arity(X, len(c))
    tab = proj_table(X.base_size, b, c)
    return CubeSubset(X.base_size, len(c), kernels.fullify(X.mask, tab))
