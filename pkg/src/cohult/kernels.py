"""Backend selection for the cube-subset kernels.

The compiled extension is used when it imports and the cube fits in a
64-bit mask; otherwise calls fall through to the pure-Python module.
Set ``COHULT_PURE_PYTHON=1`` to force the fallback.
"""

import os
from array import array
from functools import lru_cache

from cohult import _pykernels

if os.environ.get("COHULT_PURE_PYTHON"):
    _ckernels = None
else:
    try:
        from cohult import _ckernels
    except ImportError:  # pragma: no cover - depends on the build
        _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"
MAX_COMPILED_POINTS = 64

__all__ = [
    "BACKEND",
    "backends",
    "coherence_scan",
    "duud_scan",
    "fullify",
    "is_full",
    "nicefull_scan",
    "pullback",
    "pushforward",
    "table",
]


def backends():
    """Names and modules of every importable backend."""
    out = {"python": _pykernels}
    if _ckernels is not None:
        out["cython"] = _ckernels
    return out


@lru_cache(maxsize=None)
def table(base_size, target_len, pmap):
    """Projection table from the ``target_len``-cube down along ``pmap``.

    Entry ``t`` is the index of ``s o pmap`` where ``s`` is the point with
    index ``t``.
    """
    k = base_size
    n = k ** target_len
    weights = [k ** i for i in range(len(pmap))]
    out = array("i", bytes(4 * n))
    for t in range(n):
        idx = 0
        rest = t
        digits = []
        for _ in range(target_len):
            digits.append(rest % k)
            rest //= k
        for i, p in enumerate(pmap):
            idx += digits[p] * weights[i]
        out[t] = idx
    return out


def _impl(npts):
    if _ckernels is not None and npts <= MAX_COMPILED_POINTS:
        return _ckernels
    return _pykernels


def pullback(mask, tab):
    return _impl(len(tab)).pullback(mask, tab)


def pushforward(mask, tab):
    return _impl(len(tab)).pushforward(mask, tab)


def fullify(mask, tab):
    return _impl(len(tab)).fullify(mask, tab)


def is_full(mask, tab):
    return _impl(len(tab)).is_full(mask, tab)


def coherence_scan(core_a, core_b, tab, npts_a):
    return _impl(len(tab)).coherence_scan(core_a, core_b, tab, npts_a)


def nicefull_scan(t_c_ac, t_a_ac, t_a_ab, t_ac_ab, t_c_b, nb, na):
    widest = max(len(t_c_ac), len(t_a_ac))
    return _impl(widest).nicefull_scan(t_c_ac, t_a_ac, t_a_ab, t_ac_ab, t_c_b, nb, na)


def duud_scan(t_a_ab, t_b_ab, t_c_a, t_c_b, n_ab):
    widest = max(len(t_c_a), len(t_a_ab), len(t_b_ab))
    return _impl(widest).duud_scan(t_a_ab, t_b_ab, t_c_a, t_c_b, n_ab)
