"""Pure-Python cube-subset kernels.

Subsets of a finite cube are integer bitmasks: bit ``i`` is set when the
point with mixed-radix index ``i`` is a member.  A projection table maps
each point index of the larger cube to the index of its projection.

This module is the fallback for the compiled ``_ckernels`` extension and
has the same call signatures.  It also handles masks wider than 64 bits.
"""


def pullback(mask, table):
    out = 0
    for t, p in enumerate(table):
        if (mask >> p) & 1:
            out |= 1 << t
    return out


def pushforward(mask, table):
    out = 0
    for t, p in enumerate(table):
        if (mask >> t) & 1:
            out |= 1 << p
    return out


def fullify(mask, table):
    return pullback(pushforward(mask, table), table)


def is_full(mask, table):
    return fullify(mask, table) == mask


def coherence_scan(core_a, core_b, table, npts_a):
    """First ``X`` with ``X in F_a`` disagreeing with ``pullback(X) in F_b``, else -1."""
    for x in range(1 << npts_a):
        left = (core_a & ~x) == 0
        right = (core_b & ~pullback(x, table)) == 0
        if left != right:
            return x
    return -1


def nicefull_scan(t_c_ac, t_a_ac, t_a_ab, t_ac_ab, t_c_b, nb, na):
    """Exhaustive check of the two fullification clauses for one (a, b, c).

    Returns ``(instances, certificate)`` where the certificate is
    ``(X, Y, clause)`` for the first failure or ``None``.
    """
    count = 0
    # per-Y quantities do not depend on X
    ys = []
    for y in range(1 << na):
        hyp = pullback(pushforward(y, t_a_ac), t_c_ac)
        y_plus = fullify(y, t_a_ab)
        w = pushforward(y_plus, t_a_ac)
        concl = pullback(w, t_c_ac)
        w_full = pullback(pushforward(w, t_ac_ab), t_ac_ab) == w
        ys.append((y, hyp, concl, w_full))
    for z in range(1 << nb):
        x = pullback(z, t_c_b)
        for y, hyp, concl, w_full in ys:
            if hyp & ~x:
                continue
            count += 1
            if concl & ~x:
                return count, (x, y, 1)
            if not w_full:
                return count, (x, y, 2)
    return count, None


def duud_scan(t_a_ab, t_b_ab, t_c_a, t_c_b, n_ab):
    """Exhaustive down-then-up versus up-then-down comparison.

    Enumerates every ``X`` full over ``a & b`` as a pullback of a subset of
    the intersection cube.  Returns ``(instances, X or -1)``.
    """
    count = 0
    for z in range(1 << n_ab):
        x = pullback(z, t_a_ab)
        lhs = pullback(pushforward(x, t_a_ab), t_b_ab)
        rhs = pushforward(pullback(x, t_c_a), t_c_b)
        count += 1
        if lhs != rhs:
            return count, x
    return count, -1
