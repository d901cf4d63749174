"""Maps between structures that know their own partial inverse."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from cohult.logic.fm import rref
from cohult.logic.structures import ZERO, FiniteStructure, OrderedVectorSpace, Vec


class LinearEmbedding:
    """The linear map ``M -> N`` fixed by the images of the basis of ``M``."""

    def __init__(self, M: OrderedVectorSpace, N: OrderedVectorSpace, images: Mapping[str, Vec] | None = None):
        self.M, self.N = M, N
        if images is None:
            images = {b: Vec.basis(b) for b in M.basis}
        missing = set(M.basis) - set(images)
        if missing:
            raise ValueError(f"no image for basis elements {sorted(missing)}")
        for b, v in images.items():
            if not N.contains(v):
                raise ValueError(f"image of {b} is not in {N!r}")
        self.images = {b: images[b] for b in M.basis}

    @classmethod
    def inclusion(cls, M: OrderedVectorSpace, N: OrderedVectorSpace) -> LinearEmbedding:
        return cls(M, N)

    def __call__(self, m: Vec) -> Vec:
        out = ZERO
        for b, c in m.items:
            out = out + self.images[b].scale(c)
        return out

    def preimage(self, n: Vec) -> Vec | None:
        """The ``m`` with ``self(m) == n``, or ``None`` when ``n`` is outside the image."""
        basis = list(self.M.basis)
        coords = list(self.N.basis)
        rows = [[self.images[b].coord(c) for b in basis] + [n.coord(c)] for c in coords]
        sol = solve_linear(rows, len(basis))
        if sol is None:
            return None
        m = Vec(dict(zip(basis, sol)))
        return m if self(m) == n else None


class FiniteEmbedding:
    def __init__(self, M: FiniteStructure, N: FiniteStructure, table: Mapping[int, int]):
        self.M, self.N = M, N
        self.table = {m: table[m] for m in M.universe()}
        self._inv = {}
        for m, n in self.table.items():
            self._inv.setdefault(n, m)

    @classmethod
    def identity(cls, M: FiniteStructure) -> FiniteEmbedding:
        return cls(M, M, {m: m for m in M.universe()})

    def __call__(self, m):
        return self.table[m]

    def preimage(self, n):
        return self._inv.get(n)


def solve_linear(rows: list[list[Fraction]], ncols: int):
    """One solution of an augmented system (free variables set to zero), or ``None``."""
    red, pivots = rref(rows, ncols)
    if any(row[ncols] for row in red[len(pivots):]):
        return None
    sol = [Fraction(0)] * ncols
    for i, col in enumerate(pivots):
        sol[col] = red[i][ncols]
    return sol
