"""Ultrapower elements ``[a, F]``: an index tuple and a definable function on it."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from cohult.filters.cube import ArityMismatch, NotSubset, index_tuple, join, projection_map
from cohult.logic.definable import DefinableFunction


@dataclass(frozen=True)
class UltrapowerClass:
    """A representative ``[support, fn]``; equality of classes is decided by an ambient."""

    support: tuple
    fn: DefinableFunction

    def __post_init__(self):
        if self.fn.arity != len(self.support):
            raise ArityMismatch(f"function of arity {self.fn.arity} on support {self.support}")

    def __str__(self):
        return f"[{list(self.support)}, {self.fn}]"


def class_make(a, F: DefinableFunction) -> UltrapowerClass:
    """The class of ``F`` on ``a``, with indices ``F`` ignores dropped from the support."""
    a = index_tuple(a)
    if F.arity != len(a):
        raise ArityMismatch(f"function of arity {F.arity} on a tuple of length {len(a)}")
    keep = F.support()
    if len(keep) == len(a):
        return UltrapowerClass(a, F)
    new_pos = {old: new for new, old in enumerate(keep)}
    positions = [new_pos.get(i, 0) for i in range(F.arity)]
    return UltrapowerClass(tuple(a[i] for i in keep), F.reindex(positions, len(keep)))


def class_push(x: UltrapowerClass, b) -> UltrapowerClass:
    """The same element represented on ``b``: ``F`` composed with the projection onto ``a``."""
    return _push(x, index_tuple(b))


@lru_cache(maxsize=1 << 16)
def _push(x: UltrapowerClass, b: tuple) -> UltrapowerClass:
    try:
        p = projection_map(x.support, b)
    except NotSubset:
        raise ArityMismatch(f"{b} does not contain the support {x.support}") from None
    return UltrapowerClass(b, x.fn.reindex(p.map, len(b)))


def common_support(xs) -> tuple:
    u = ()
    for x in xs:
        u = join(u, x.support)
    return u


def embedding_j(m) -> UltrapowerClass:
    """``j(m)``: the constant function with value ``m`` on the empty tuple."""
    return UltrapowerClass((), DefinableFunction.constant(0, m))
