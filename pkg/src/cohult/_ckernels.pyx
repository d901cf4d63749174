# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled cube-subset kernels; masks must fit in 64 bits.

Same signatures and results as ``cohult._pykernels``.
"""

from array import array

ctypedef unsigned long long u64


cdef inline u64 _pull(u64 mask, const int[:] table) nogil:
    cdef u64 out = 0
    cdef Py_ssize_t t
    for t in range(table.shape[0]):
        if (mask >> table[t]) & 1:
            out |= (<u64>1) << t
    return out


cdef inline u64 _push(u64 mask, const int[:] table) nogil:
    cdef u64 out = 0
    cdef Py_ssize_t t
    for t in range(table.shape[0]):
        if (mask >> t) & 1:
            out |= (<u64>1) << table[t]
    return out


def pullback(u64 mask, const int[:] table):
    return _pull(mask, table)


def pushforward(u64 mask, const int[:] table):
    return _push(mask, table)


def fullify(u64 mask, const int[:] table):
    return _pull(_push(mask, table), table)


def is_full(u64 mask, const int[:] table):
    return _pull(_push(mask, table), table) == mask


def coherence_scan(u64 core_a, u64 core_b, const int[:] table, int npts_a):
    cdef u64 x, limit = (<u64>1) << npts_a
    cdef bint left, right, found = False
    with nogil:
        x = 0
        while x < limit:
            left = (core_a & ~x) == 0
            right = (core_b & ~_pull(x, table)) == 0
            if left != right:
                found = True
                break
            x += 1
    return x if found else -1


def nicefull_scan(const int[:] t_c_ac, const int[:] t_a_ac, const int[:] t_a_ab,
                  const int[:] t_ac_ab, const int[:] t_c_b, int nb, int na):
    cdef Py_ssize_t ny = (<Py_ssize_t>1) << na
    cdef u64[:] hyp = array("Q", bytes(8 * ny))
    cdef u64[:] concl = array("Q", bytes(8 * ny))
    cdef unsigned char[:] w_full = bytearray(ny)
    cdef u64 y, z, x, w, yp, zlimit = (<u64>1) << nb
    cdef long long count = 0
    cdef Py_ssize_t i
    for i in range(ny):
        y = <u64>i
        hyp[i] = _pull(_push(y, t_a_ac), t_c_ac)
        yp = _pull(_push(y, t_a_ab), t_a_ab)
        w = _push(yp, t_a_ac)
        concl[i] = _pull(w, t_c_ac)
        w_full[i] = _pull(_push(w, t_ac_ab), t_ac_ab) == w
    z = 0
    while z < zlimit:
        x = _pull(z, t_c_b)
        for i in range(ny):
            if hyp[i] & ~x:
                continue
            count += 1
            if concl[i] & ~x:
                return count, (x, <u64>i, 1)
            if not w_full[i]:
                return count, (x, <u64>i, 2)
        z += 1
    return count, None


def duud_scan(const int[:] t_a_ab, const int[:] t_b_ab, const int[:] t_c_a,
              const int[:] t_c_b, int n_ab):
    cdef u64 z, x, lhs, rhs, limit = (<u64>1) << n_ab
    cdef long long count = 0
    z = 0
    while z < limit:
        x = _pull(z, t_a_ab)
        lhs = _pull(_push(x, t_a_ab), t_b_ab)
        rhs = _push(_pull(x, t_c_a), t_c_b)
        count += 1
        if lhs != rhs:
            return count, x
        z += 1
    return count, -1
