"""Finitely generated filters on cubes and coherent systems of them."""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from cohult import kernels
from cohult.filters.cube import (
    ArityMismatch,
    CubeSubset,
    all_tuples,
    decode,
    index_tuple,
    proj_table,
)


class ImproperInput(ValueError):
    """Raised when an operation needs a proper filter (or an extension) and gets none."""


class FiniteFilter:
    """The filter on ``A^arity`` generated by finitely many subsets.

    Every finite intersection of generators is itself a member, so on a
    finite cube the filter is exactly the set of supersets of the
    intersection of all generators (the *core*).  Equality and hashing
    are semantic: two filters are equal when their cores coincide.
    """

    __slots__ = ("base_size", "arity", "generators", "_core")

    def __init__(self, base_size: int, arity: int, generators: Iterable[CubeSubset] = ()):
        self.base_size = base_size
        self.arity = arity
        self.generators = frozenset(generators)
        mask = (1 << base_size ** arity) - 1
        for g in self.generators:
            if (g.base_size, g.arity) != (base_size, arity):
                raise ArityMismatch("generator lives on a different cube")
            mask &= g.mask
        self._core = mask

    @classmethod
    def trivial(cls, base_size: int, arity: int) -> FiniteFilter:
        return cls(base_size, arity)

    @classmethod
    def principal(cls, base_size: int, point: Sequence[int]) -> FiniteFilter:
        return cls(base_size, len(point), [CubeSubset.from_points(base_size, len(point), [point])])

    @classmethod
    def from_core(cls, core: CubeSubset) -> FiniteFilter:
        return cls(core.base_size, core.arity, [core])

    @property
    def core(self) -> CubeSubset:
        return CubeSubset(self.base_size, self.arity, self._core)

    @property
    def core_mask(self) -> int:
        return self._core

    def __contains__(self, X: CubeSubset) -> bool:
        if (X.base_size, X.arity) != (self.base_size, self.arity):
            raise ArityMismatch("subset lives on a different cube")
        return self._core & ~X.mask == 0

    def contains_mask(self, mask: int) -> bool:
        return self._core & ~mask == 0

    @property
    def is_proper(self) -> bool:
        return self._core != 0

    @property
    def is_ultra(self) -> bool:
        # on a finite cube a proper filter decides everything iff its core is a point
        return self._core != 0 and self._core & (self._core - 1) == 0

    @property
    def point(self) -> tuple[int, ...] | None:
        """Generating point of a principal ultrafilter, else ``None``."""
        if not self.is_ultra:
            return None
        return decode(self._core.bit_length() - 1, self.base_size, self.arity)

    def decides(self, X: CubeSubset) -> bool:
        return X in self or ~X in self

    def with_generators(self, *extra: CubeSubset) -> FiniteFilter:
        return FiniteFilter(self.base_size, self.arity, self.generators | set(extra))

    def __le__(self, other: FiniteFilter) -> bool:
        """Semantic inclusion of filters: every member of ``self`` is in ``other``."""
        if (self.base_size, self.arity) != (other.base_size, other.arity):
            raise ArityMismatch("filters on different cubes")
        return other._core & ~self._core == 0

    def __eq__(self, other):
        if not isinstance(other, FiniteFilter):
            return NotImplemented
        return (self.base_size, self.arity, self._core) == (other.base_size, other.arity, other._core)

    def __hash__(self):
        return hash((self.base_size, self.arity, self._core))

    def __repr__(self):
        return f"FiniteFilter(|A|={self.base_size}, n={self.arity}, core={self.core!r})"


@dataclass(frozen=True)
class CoherenceCertificate:
    """A violation of coherence: ``X`` on the ``a``-cube and the failing direction.

    ``direction`` is ``"up"`` when ``X`` is in ``F_a`` but its pullback is
    not in ``F_b``, and ``"down"`` for the converse.  Certificates are falsy
    so ``if check_coherence(F):`` reads naturally.
    """

    a: tuple[int, ...]
    b: tuple[int, ...]
    X: CubeSubset
    direction: str

    def __bool__(self):
        return False

    def as_dict(self):
        return {
            "a": list(self.a),
            "b": list(self.b),
            "X": [list(p) for p in self.X.points()],
            "direction": self.direction,
        }


class CoherentFilterSystem:
    """Filters ``F_a`` for every index tuple ``a`` over ``range(lam)`` up to ``max_arity``.

    Construction does not enforce coherence; use :func:`check_coherence`.
    """

    def __init__(self, base_size: int, lam: int, components: Mapping, max_arity: int = 3):
        self.base_size = base_size
        self.lam = lam
        self.max_arity = max_arity
        comps = {}
        for a, F in components.items():
            a = index_tuple(a, lam)
            if len(a) > max_arity:
                raise ArityMismatch(f"component {a} exceeds max arity {max_arity}")
            if (F.base_size, F.arity) != (base_size, len(a)):
                raise ArityMismatch(f"component at {a} lives on the wrong cube")
            comps[a] = F
        missing = [a for a in all_tuples(lam, max_arity) if a not in comps]
        if missing:
            raise ValueError(f"system is missing components at {missing[:4]}")
        self._components = MappingProxyType(comps)

    @classmethod
    def trivial(cls, base_size: int, lam: int, max_arity: int = 3):
        comps = {a: FiniteFilter.trivial(base_size, len(a)) for a in all_tuples(lam, max_arity)}
        return cls(base_size, lam, comps, max_arity)

    @classmethod
    def from_cores(cls, base_size: int, lam: int, cores: Mapping, max_arity: int = 3):
        comps = {}
        for a, mask in cores.items():
            comps[a] = FiniteFilter(base_size, len(a), [CubeSubset(base_size, len(a), mask)])
        return cls(base_size, lam, comps, max_arity)

    @classmethod
    def principal(cls, base_size: int, g: Sequence[int], max_arity: int = 3):
        """The system whose component at ``a`` is principal at ``g o a``."""
        lam = len(g)
        comps = {
            a: FiniteFilter.principal(base_size, [g[i] for i in a]) for a in all_tuples(lam, max_arity)
        }
        return cls(base_size, lam, comps, max_arity)

    @property
    def components(self) -> Mapping:
        return self._components

    def tuples(self) -> list[tuple[int, ...]]:
        return all_tuples(self.lam, self.max_arity)

    def __getitem__(self, a) -> FiniteFilter:
        return self._components[index_tuple(a)]

    def replace(self, updates: Mapping) -> CoherentFilterSystem:
        comps = dict(self._components)
        comps.update({index_tuple(a): F for a, F in updates.items()})
        return type(self)(self.base_size, self.lam, comps, self.max_arity)

    def cores(self) -> dict:
        return {a: F.core_mask for a, F in self._components.items()}

    @property
    def is_proper(self) -> bool:
        return all(F.is_proper for F in self._components.values())

    @property
    def is_ultra(self) -> bool:
        return all(F.is_ultra for F in self._components.values())

    def __le__(self, other: CoherentFilterSystem) -> bool:
        """``self`` is extended by ``other``: componentwise semantic inclusion."""
        if (self.base_size, self.lam, self.max_arity) != (other.base_size, other.lam, other.max_arity):
            raise ArityMismatch("systems over different index sets")
        return all(F <= other[a] for a, F in self._components.items())

    def __eq__(self, other):
        if not isinstance(other, CoherentFilterSystem):
            return NotImplemented
        return (self.base_size, self.lam, self.max_arity) == (
            other.base_size,
            other.lam,
            other.max_arity,
        ) and self.cores() == other.cores()

    def __hash__(self):
        return hash((self.base_size, self.lam, self.max_arity, tuple(sorted(self.cores().items()))))

    def __repr__(self):
        return f"{type(self).__name__}(|A|={self.base_size}, lam={self.lam}, max_arity={self.max_arity})"


class CoherentUltrafilterFinite(CoherentFilterSystem):
    """A coherent system whose components are all ultrafilters."""

    def __init__(self, base_size, lam, components, max_arity=3):
        super().__init__(base_size, lam, components, max_arity)
        bad = [a for a, F in self.components.items() if not F.is_ultra]
        if bad:
            raise ImproperInput(f"component at {bad[0]} is not an ultrafilter")

    @classmethod
    def from_system(cls, F: CoherentFilterSystem) -> CoherentUltrafilterFinite:
        return cls(F.base_size, F.lam, F.components, F.max_arity)

    @property
    def witness(self) -> tuple[int, ...] | None:
        """The ``g: lam -> A`` inducing this system, when it is principal-coherent."""
        if self.lam > 0 and self.max_arity < 1:
            return None
        g = tuple(self[(alpha,)].point[0] for alpha in range(self.lam))
        for a, F in self.components.items():
            if F.point != tuple(g[i] for i in a):
                return None
        return g


def check_coherence(F: CoherentFilterSystem):
    """Exhaustively test coherence over all stored pairs ``a < b``.

    Returns ``True`` or the first :class:`CoherenceCertificate` found, in
    canonical tuple order and increasing subset index.
    """
    k = F.base_size
    tuples = F.tuples()
    for b in tuples:
        sb = set(b)
        for a in tuples:
            if len(a) >= len(b) or not sb.issuperset(a):
                continue
            tab = proj_table(k, a, b)
            x = kernels.coherence_scan(F[a].core_mask, F[b].core_mask, tab, k ** len(a))
            if x >= 0:
                X = CubeSubset(k, len(a), x)
                direction = "up" if X in F[a] else "down"
                return CoherenceCertificate(a, b, X, direction)
    return True

