"""Coherent ultrafilters as membership oracles on definable sets.

An ambient answers ``member(phi, fns, u)``: is the set of ``s`` in
``chi(M)^|u|`` with ``M |= phi(fns(s))`` in the component at ``u``?
Everything else (Łoś, equality of classes, ``j``) is phrased through it.
"""

from __future__ import annotations

import threading
from itertools import product as cartesian
from typing import Callable, Sequence

from cohult.filters.systems import CoherentUltrafilterFinite
from cohult.logic.definable import (
    DefinableFunction,
    Fragment,
    definable_set,
    domain_elements,
    input_name,
    is_qf_embedding,
)
from cohult.logic.fm import find_witness
from cohult.logic.structures import OrderedVectorSpace, Structure, eval_formula
from cohult.logic.syntax import Atom, Not, Var, free_vars, rename_vars, substitute
from cohult.ultrapower.classes import UltrapowerClass, class_push, common_support, embedding_j


class WitnessNotFound(RuntimeError):
    """An accepted definable set has no point in ``chi(M)``: the filter would be improper."""


class OutsideFragment(ValueError):
    pass


class Ambient:
    M: Structure
    lam: int
    fragment: Fragment

    def member(self, phi, fns: Sequence[DefinableFunction], u: tuple) -> bool:
        raise NotImplementedError


def _check_args(phi, n: int):
    extra = free_vars(phi) - {input_name(i) for i in range(n)}
    if extra:
        raise ValueError(f"formula has variables {sorted(extra)} beyond its {n} arguments")


def los_satisfies(E: Ambient, phi, xs: Sequence[UltrapowerClass]) -> bool:
    """Truth of ``phi(x0, ..., x{m-1})`` in the ultrapower at the classes ``xs``.

    All classes are pushed to the union of their supports and the
    resulting definable set is handed to the ambient.
    """
    if phi not in E.fragment:
        raise OutsideFragment(f"{phi} is not in the fragment")
    xs = list(xs)
    _check_args(phi, len(xs))
    u = common_support(xs)
    fns = tuple(class_push(x, u).fn for x in xs)
    return E.member(phi, fns, u)


EQUALITY = Atom("=", (Var("x0"), Var("x1")))


def classes_equal(E: Ambient, x: UltrapowerClass, y: UltrapowerClass) -> bool:
    return los_satisfies(E, EQUALITY, [x, y])


class MaterializedAmbient(Ambient):
    """A finite structure with an explicit coherent ultrafilter on ``chi(M)``.

    Definable sets depend only on ``M``, so ambients over the same structure
    may pass one ``cache`` dict around to share them.
    """

    def __init__(
        self,
        M: Structure,
        E: CoherentUltrafilterFinite,
        chi=None,
        fragment: Fragment | None = None,
        cache: dict | None = None,
    ):
        if not M.is_finite:
            raise ValueError("materialized ambients need a finite structure")
        self.M, self.E, self.chi = M, E, chi
        self.lam = E.lam
        self.fragment = fragment or Fragment.quantifier_free()
        self.domain = tuple(domain_elements(M, chi))
        if E.base_size != len(self.domain):
            raise ValueError(f"ultrafilter lives on {E.base_size} points, chi(M) has {len(self.domain)}")
        self._sets: dict = cache if cache is not None else {}
        self._lock = threading.Lock()

    def definable_mask(self, phi, fns) -> int:
        key = (phi, fns)
        mask = self._sets.get(key)
        if mask is None:
            mask = definable_set(self.M, phi, fns, self.chi).materialized.mask
            with self._lock:
                self._sets.setdefault(key, mask)
        return mask

    def member(self, phi, fns, u) -> bool:
        if len(u) > self.E.max_arity:
            raise ValueError(f"support {u} exceeds the stored arity {self.E.max_arity}")
        return self.E[u].contains_mask(self.definable_mask(phi, tuple(fns)))


class DerivedCoherentFilter(Ambient):
    """The filter on definable subsets of ``chi(M)^n`` read off an extension ``N``.

    ``f`` lists ``lam`` elements of ``N``.  A definable set
    ``phi o (F_1, ..., F_m)`` belongs to the component at ``u`` iff
    ``N |= phi(F_1^N(f"u), ...)``, where parameters are mapped into ``N``
    by ``embed``.  Each decision is certified by a point of ``chi(M)``
    satisfying whichever of ``phi`` and its negation was accepted.
    """

    def __init__(
        self,
        M: Structure,
        N: Structure,
        embed: Callable,
        f: Sequence,
        fragment: Fragment | None = None,
        embedding_verified: bool = True,
    ):
        self.M, self.N, self.embed = M, N, embed
        self.f = tuple(f)
        self.lam = len(self.f)
        self.fragment = fragment or Fragment.quantifier_free()
        self.embedding_verified = embedding_verified
        self.f_injective = len(set(self.f)) == len(self.f)
        self._cache: dict = {}
        self._lock = threading.Lock()

    def point(self, u) -> list:
        return [self.f[alpha] for alpha in u]

    def value(self, x: UltrapowerClass):
        """``h_infinity``: the function of ``x`` evaluated in ``N`` at ``f"support``."""
        return x.fn(self.N, self.point(x.support), self.embed)

    def is_principal(self, alpha: int) -> bool:
        """Component ``{alpha}`` is principal exactly when ``f(alpha)`` comes from ``M``."""
        return self.embed.preimage(self.f[alpha]) is not None

    def member(self, phi, fns, u) -> bool:
        return self.decide(phi, tuple(fns), tuple(u))[0]

    def decide(self, phi, fns: tuple, u: tuple):
        """``(verdict, witness)`` with the witness a point of ``chi(M)^|u|``."""
        key = (phi, fns, u)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        _check_args(phi, len(fns))
        pt = self.point(u)
        asg = {input_name(i): F(self.N, pt, self.embed) for i, F in enumerate(fns)}
        verdict = eval_formula(self.N, phi, asg)
        accepted = phi if verdict else Not(phi)
        s = self.witness(accepted, fns, len(u))
        if s is None:
            raise WitnessNotFound(f"no point of M satisfies {accepted} composed with {[str(F) for F in fns]}")
        with self._lock:
            return self._cache.setdefault(key, (verdict, tuple(s)))

    def witness(self, phi, fns, n: int):
        """A point ``s`` of ``M^n`` with ``M |= phi(F_1(s), ...)``, or ``None``."""
        if isinstance(self.M, OrderedVectorSpace):
            mapping, fixed = {}, {}
            for i, F in enumerate(fns):
                if F.body is None:
                    raise ValueError("graph-defined functions are only supported on finite structures")
                ren = {k: f"p{i}_{k}" for k, _ in F.params}
                mapping[input_name(i)] = rename_vars(F.body, ren)
                fixed.update({ren[k]: v for k, v in F.params})
            psi = substitute(phi, mapping)
            sol = find_witness(self.M, psi, [input_name(j) for j in range(n)], fixed)
            if sol is None:
                return None
            return [sol[input_name(j)] for j in range(n)]
        for s in cartesian(list(self.M.universe()), repeat=n):
            asg = {input_name(i): F(self.M, s) for i, F in enumerate(fns)}
            if eval_formula(self.M, phi, asg):
                return list(s)
        return None


def derive_filter(
    M: Structure,
    N: Structure,
    embed: Callable,
    f: Sequence,
    fragment: Fragment | None = None,
    corpus: Sequence | None = None,
    samples: Sequence | None = None,
) -> DerivedCoherentFilter:
    """Build the derived filter, recording whether ``embed`` passed the corpus check.

    Without a corpus, ``embedding_verified`` is left ``True`` unchecked.
    """
    ok = True
    if corpus is not None:
        ok = is_qf_embedding(M, N, embed, corpus, samples)
    return DerivedCoherentFilter(M, N, embed, f, fragment, ok)


def h_infinity(E: DerivedCoherentFilter, x: UltrapowerClass):
    return E.value(x)


__all__ = [
    "Ambient",
    "DerivedCoherentFilter",
    "EQUALITY",
    "MaterializedAmbient",
    "OutsideFragment",
    "WitnessNotFound",
    "classes_equal",
    "derive_filter",
    "embedding_j",
    "h_infinity",
    "los_satisfies",
]
