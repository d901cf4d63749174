"""Extending coherent filters, completing them to ultrafilters, and products."""

from __future__ import annotations

from itertools import product as cartesian
from typing import Sequence

from cohult import kernels
from cohult.filters.cube import (
    ArityMismatch,
    CubeSubset,
    all_tuples,
    fullify,
    join,
    meet,
    proj_table,
    pullback,
    pushforward,
)
from cohult.filters.systems import (
    CoherentFilterSystem,
    CoherentUltrafilterFinite,
    FiniteFilter,
    ImproperInput,
)


def transfer_generator(Fa_star: FiniteFilter, a, b) -> CubeSubset:
    """The set added at ``b`` when ``F_a`` is enlarged to ``Fa_star``.

    Of the sets ``pullback(pushforward(X))`` over members ``X`` of
    ``Fa_star`` full over ``a & b`` the smallest comes from the smallest such
    ``X``, the fullification of the core; the rest are supersets of it and
    generate nothing new.
    """
    ab = meet(a, b)
    X = fullify(Fa_star.core, ab, a)
    return pullback(pushforward(X, a, ab), ab, b)


def one_step_extend(F: CoherentFilterSystem, a, Fa_star: FiniteFilter) -> CoherentFilterSystem:
    """Enlarge ``F_a`` to ``Fa_star`` and propagate the new sets to every component."""
    a = tuple(a)
    if (Fa_star.base_size, Fa_star.arity) != (F.base_size, len(a)):
        raise ArityMismatch("extension lives on the wrong cube")
    if not Fa_star.is_proper:
        raise ImproperInput(f"extension at {a} is improper")
    if not F[a] <= Fa_star:
        raise ImproperInput(f"filter at {a} is not contained in the proposed extension")
    updates = {b: F[b].with_generators(transfer_generator(Fa_star, a, b)) for b in F.tuples()}
    return CoherentFilterSystem(F.base_size, F.lam, {**F.components, **updates}, F.max_arity)


def _close(F: CoherentFilterSystem) -> CoherentFilterSystem:
    """Shrink cores until ``core_b`` is the image of ``core_c`` for all stored ``b < c``."""
    k = F.base_size
    cores = F.cores()
    tuples = F.tuples()
    pairs = [(b, c) for c in tuples for b in tuples if len(b) < len(c) and set(b) <= set(c)]
    changed = True
    while changed:
        changed = False
        for b, c in pairs:
            tab = proj_table(k, b, c)
            down = cores[b] & kernels.pushforward(cores[c], tab)
            up = cores[c] & kernels.pullback(down, tab)
            if (down, up) != (cores[b], cores[c]):
                cores[b], cores[c] = down, up
                changed = True
    updates = {
        a: F[a].with_generators(CubeSubset(k, len(a), m))
        for a, m in cores.items()
        if m != F[a].core_mask
    }
    return F.replace(updates) if updates else F


def coherent_extend(F: CoherentFilterSystem, a, Fa_star: FiniteFilter) -> CoherentFilterSystem:
    """Enlarge ``F_a`` to ``Fa_star`` and route the change through ``a | b``.

    ``X`` joins the filter at ``b`` when its pullback to ``a | b`` lies in
    the filter generated there by ``F_{a|b}`` and the pullback of
    ``Fa_star``.  In core terms the new core at ``b`` is the image of
    ``core(F_{a|b}) & pullback(core(Fa_star))``.  Unlike
    :func:`one_step_extend` the result is coherent and proper whenever
    every join is stored.

    When ``lam`` exceeds the arity bound some joins are missing; those
    components get the one-step transfer set instead and the cores are
    then shrunk to a coherent fixpoint.  A truncated system need not have
    a proper coherent extension at all, so this can raise.
    """
    a = tuple(a)
    if (Fa_star.base_size, Fa_star.arity) != (F.base_size, len(a)):
        raise ArityMismatch("extension lives on the wrong cube")
    if not Fa_star.is_proper:
        raise ImproperInput(f"extension at {a} is improper")
    if not F[a] <= Fa_star:
        raise ImproperInput(f"filter at {a} is not contained in the proposed extension")
    updates = {}
    for b in F.tuples():
        u = join(a, b)
        if len(u) <= F.max_arity:
            G = F[u].core & pullback(Fa_star.core, a, u)
            updates[b] = F[b].with_generators(pushforward(G, u, b))
        else:
            updates[b] = F[b].with_generators(transfer_generator(Fa_star, a, b))
    E = CoherentFilterSystem(F.base_size, F.lam, {**F.components, **updates}, F.max_arity)
    if F.lam > F.max_arity:
        E = _close(E)
        if not E.is_proper:
            raise ImproperInput(f"no proper coherent extension at {a} within max arity {F.max_arity}")
    return E


def first_undecided(core_mask: int) -> int | None:
    """Smallest subset index not decided by the filter with this core.

    ``X`` is undecided iff it meets the core without containing it.  Every
    index below ``1 << min(core)`` names a set disjoint from the core, and
    the singleton of ``min(core)`` is undecided whenever the core has two or
    more points, so the scan stops there.
    """
    if core_mask == 0 or core_mask & (core_mask - 1) == 0:
        return None
    return core_mask & -core_mask


def complete_to_ultra(F: CoherentFilterSystem) -> CoherentUltrafilterFinite:
    """Extend a proper coherent filter to a coherent ultrafilter.

    Tuples are visited in canonical order; at each one the first undecided
    subset (by index) is added and propagated with :func:`coherent_extend`
    until the component is an ultrafilter.  :func:`one_step_extend` is not
    used here because its output can be incoherent.
    """
    if not F.is_proper:
        raise ImproperInput("cannot complete an improper coherent filter")
    E = F
    for a in E.tuples():
        while (x := first_undecided(E[a].core_mask)) is not None:
            X = CubeSubset(E.base_size, len(a), x)
            E = coherent_extend(E, a, E[a].with_generators(X))
    return CoherentUltrafilterFinite.from_system(E)


def _sections(mask: int, n0pts: int, n1pts: int) -> list[int]:
    """Row ``i`` is the mask of ``{t : (i, t) in X}`` for a product-cube mask."""
    rows = []
    for i in range(n0pts):
        sec = 0
        for j in range(n1pts):
            if (mask >> (i + n0pts * j)) & 1:
                sec |= 1 << j
        rows.append(sec)
    return rows


def product_contains(F0: FiniteFilter, F1: FiniteFilter, X: CubeSubset) -> bool:
    """Section test: ``X`` is in the product iff the rows whose section is in ``F1`` form a set in ``F0``."""
    n0pts = F0.base_size ** F0.arity
    n1pts = F1.base_size ** F1.arity
    good = 0
    for i, sec in enumerate(_sections(X.mask, n0pts, n1pts)):
        if F1.contains_mask(sec):
            good |= 1 << i
    return F0.contains_mask(good)


def filter_product(F0: FiniteFilter, F1: FiniteFilter) -> FiniteFilter:
    """The product filter on ``A^(n0 + n1)``, tuples ordered ``s0 + s1``.

    Membership is decided by the section test only; the generating core is
    found by deleting points from the full cube one at a time and keeping
    each deletion that stays inside the product.
    """
    if F0.base_size != F1.base_size:
        raise ArityMismatch("product of filters on different base sets")
    k = F0.base_size
    n = F0.arity + F1.arity
    current = CubeSubset.full(k, n)
    if not product_contains(F0, F1, current):
        raise ImproperInput("product of filters does not contain the full cube")
    for p in range(current.npoints):
        trial = CubeSubset(k, n, current.mask & ~(1 << p))
        if product_contains(F0, F1, trial):
            current = trial
    return FiniteFilter.from_core(current)


def product_ultrafilter(seeds: Sequence[FiniteFilter], max_arity: int = 3) -> CoherentUltrafilterFinite:
    """The coherent ultrafilter with ``E_{alpha} = seeds[alpha]``.

    ``E_a`` for ``a = (a0 < ... < a_{n-1})`` is the product
    ``seeds[a0] x E_{(a1, ..., a_{n-1})}``.
    """
    if not seeds:
        raise ValueError("need at least one seed")
    k = seeds[0].base_size
    for i, U in enumerate(seeds):
        if U.base_size != k or U.arity != 1:
            raise ArityMismatch(f"seed {i} is not a filter on the base set")
        if not U.is_ultra:
            raise ImproperInput(f"seed {i} is not an ultrafilter")
    lam = len(seeds)
    comps: dict = {(): FiniteFilter.trivial(k, 0)}
    for a in all_tuples(lam, max_arity):
        if a:
            comps[a] = filter_product(seeds[a[0]], comps[a[1:]])
    return CoherentUltrafilterFinite(k, lam, comps, max_arity)


def enumerate_coherent_systems(base_size: int, lam: int, max_arity: int):
    """Yield every coherent filter system (proper or not) for the given bounds.

    Top-level tuples (length ``min(lam, max_arity)``) get arbitrary cores;
    coherence forces each lower core to be the image of every top core
    above it, so assignments whose images disagree are skipped.
    """
    tuples = all_tuples(lam, max_arity)
    top_len = min(lam, max_arity)
    tops = [a for a in tuples if len(a) == top_len]
    k = base_size
    choices = [range(1 << k ** top_len)] * len(tops)
    for masks in cartesian(*choices):
        cores = dict(zip(tops, masks))
        ok = True
        for a in tuples:
            if len(a) == top_len:
                continue
            image = None
            for b, m in zip(tops, masks):
                if set(a) <= set(b):
                    img = pushforward(CubeSubset(k, top_len, m), b, a).mask
                    if image is None:
                        image = img
                    elif img != image:
                        ok = False
                        break
            if not ok:
                break
            cores[a] = image
        if ok:
            yield CoherentFilterSystem.from_cores(k, lam, cores, max_arity)


def enumerate_coherent_ultrafilters(base_size: int, lam: int, max_arity: int):
    """Proper coherent ultrafilters, filtered out of :func:`enumerate_coherent_systems`."""
    for F in enumerate_coherent_systems(base_size, lam, max_arity):
        if F.is_proper and F.is_ultra:
            yield CoherentUltrafilterFinite.from_system(F)
