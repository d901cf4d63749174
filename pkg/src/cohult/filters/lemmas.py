"""Exhaustive small-scale checks of the fullification, transfer and extension lemmas.

Every suite returns a :class:`SuiteResult` holding the number of
instances examined and the counterexample certificates found (an empty
list means the statement held everywhere in range).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product as cartesian

from cohult import kernels
from cohult.filters.construct import (
    coherent_extend,
    complete_to_ultra,
    enumerate_coherent_systems,
    enumerate_coherent_ultrafilters,
    one_step_extend,
    product_ultrafilter,
)
from cohult.filters.cube import (
    CubeSubset,
    all_tuples,
    decode,
    fullify,
    is_full_over,
    meet,
    proj_table,
    project_tuple,
    pullback,
    pushforward,
)
from cohult.filters.systems import FiniteFilter, check_coherence


@dataclass
class SuiteResult:
    name: str
    instances: int = 0
    certificates: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.certificates

    def as_dict(self):
        out = {
            "instances": self.instances,
            "counterexamples": len(self.certificates),
            "passed": self.passed,
        }
        if self.certificates:
            out["first_certificate"] = self.certificates[0]
        out.update(self.details)
        return out


def _pts(mask, k, n):
    return [list(p) for p in CubeSubset(k, n, mask).points()]


def _sub_tuples(c):
    n = len(c)
    for bits in range(1 << n):
        yield tuple(c[i] for i in range(n) if bits >> i & 1)


def du_equals_ud_check(a, b, c, X: CubeSubset) -> bool:
    """Compare pushing ``X`` down to ``a & b`` and up to ``b`` with going up to ``c`` then down to ``b``."""
    if not (set(a) <= set(c) and set(b) <= set(c)):
        raise ValueError("need a and b inside c")
    ab = meet(a, b)
    if not is_full_over(X, ab, a):
        raise ValueError("X must be full over the intersection of a and b")
    lhs = pullback(pushforward(X, a, ab), ab, b)
    rhs = pushforward(pullback(X, a, c), c, b)
    return lhs == rhs


def nicefull_instance(a, b, c, X: CubeSubset, Y: CubeSubset, fullify_fn=fullify) -> int | None:
    """Check both fullification clauses at one instance.

    Returns ``None`` when the hypothesis fails (vacuous), ``0`` when both
    clauses hold, otherwise the number of the failing clause.
    """
    ac, ab = meet(a, c), meet(a, b)
    if not pullback(pushforward(Y, a, ac), ac, c) <= X:
        return None
    Yp = fullify_fn(Y, ab, a)
    if not pullback(pushforward(Yp, a, ac), ac, c) <= X:
        return 1
    if not is_full_over(pushforward(Yp, a, ac), ab, ac):
        return 2
    return 0


def _triples(lam, max_arity):
    tuples = all_tuples(lam, max_arity)
    for c in tuples:
        for b in _sub_tuples(c):
            for a in tuples:
                yield a, b, c


def nicefull_suite(k, lam, max_arity, fullify_fn=None) -> SuiteResult:
    """Both clauses for every ``a``, ``b <= c``, ``X`` full over ``b`` and admissible ``Y``.

    With ``fullify_fn`` given, the per-instance reference path is used with
    that function in place of fullification (the negative-control hook).
    """
    res = SuiteResult("nicefull")
    for a, b, c in _triples(lam, max_arity):
        ac, ab = meet(a, c), meet(a, b)
        if fullify_fn is None:
            count, cert = kernels.nicefull_scan(
                proj_table(k, ac, c),
                proj_table(k, ac, a),
                proj_table(k, ab, a),
                proj_table(k, ab, ac),
                proj_table(k, b, c),
                k ** len(b),
                k ** len(a),
            )
            res.instances += count
            if cert is not None:
                x, y, clause = cert
                res.certificates.append(_nicefull_cert(a, b, c, k, x, y, clause))
            continue
        for z in range(1 << k ** len(b)):
            X = pullback(CubeSubset(k, len(b), z), b, c)
            for y in range(1 << k ** len(a)):
                Y = CubeSubset(k, len(a), y)
                verdict = nicefull_instance(a, b, c, X, Y, fullify_fn)
                if verdict is None:
                    continue
                res.instances += 1
                if verdict:
                    res.certificates.append(_nicefull_cert(a, b, c, k, X.mask, y, verdict))
                    return res
    return res


def _nicefull_cert(a, b, c, k, x, y, clause):
    return {
        "a": list(a),
        "b": list(b),
        "c": list(c),
        "X": _pts(x, k, len(c)),
        "Y": _pts(y, k, len(a)),
        "clause": int(clause),
    }


def duud_suite(k, lam, max_arity) -> SuiteResult:
    """Down-then-up equals up-then-down for all ``a, b <= c`` and all admissible ``X``."""
    res = SuiteResult("du_equals_ud")
    tuples = all_tuples(lam, max_arity)
    for c in tuples:
        subs = list(_sub_tuples(c))
        for a in subs:
            for b in subs:
                ab = meet(a, b)
                count, x = kernels.duud_scan(
                    proj_table(k, ab, a),
                    proj_table(k, ab, b),
                    proj_table(k, a, c),
                    proj_table(k, b, c),
                    k ** len(ab),
                )
                res.instances += count
                if x >= 0:
                    res.certificates.append(
                        {"a": list(a), "b": list(b), "c": list(c), "X": _pts(x, k, len(a))}
                    )
    return res


def _nonempty_submasks(mask):
    sub = mask
    while sub:
        yield sub
        sub = (sub - 1) & mask


def _displayed_sets(Fa_star: FiniteFilter, a, b):
    """Every ``pullback(pushforward(X))`` over members ``X`` of ``Fa_star`` full over ``a & b``."""
    k = Fa_star.base_size
    ab = meet(a, b)
    for z in range(1 << k ** len(ab)):
        X = pullback(CubeSubset(k, len(ab), z), ab, a)
        if X in Fa_star:
            yield pullback(pushforward(X, a, ab), ab, b)


def extfip_suite(k, lam, max_arity) -> SuiteResult:
    """Finite intersection property of ``F_b`` plus the transferred sets.

    The family is materialized literally (every full member of the
    extension), independently of :func:`one_step_extend`.
    """
    res = SuiteResult("extfip")
    for F in enumerate_coherent_systems(k, lam, max_arity):
        for a in F.tuples():
            for core in _nonempty_submasks(F[a].core_mask):
                Fa_star = FiniteFilter(k, len(a), [CubeSubset(k, len(a), core)])
                for b in F.tuples():
                    res.instances += 1
                    family = set(F[b].generators) | set(_displayed_sets(Fa_star, a, b))
                    if not FiniteFilter(k, len(b), family).is_proper:
                        res.certificates.append(
                            {"F_cores": _cores_repr(F), "a": list(a), "b": list(b),
                             "extension_core": _pts(core, k, len(a))}
                        )
    return res


def onestep_suite(k, lam, max_arity, extend=one_step_extend, name="onestep") -> SuiteResult:
    """One-step extensions are proper, coherent, extend the input and hit the target.

    For the default ``extend`` each component is also compared with the
    filter generated by the literally materialized family, so the check
    does not rest on the core shortcut inside :func:`one_step_extend`.
    """
    res = SuiteResult(name)
    literal = extend is one_step_extend
    for F in enumerate_coherent_systems(k, lam, max_arity):
        for a in F.tuples():
            for core in _nonempty_submasks(F[a].core_mask):
                Fa_star = FiniteFilter(k, len(a), [CubeSubset(k, len(a), core)])
                res.instances += 1
                G = extend(F, a, Fa_star)
                problems = []
                if literal:
                    for b in F.tuples():
                        family = set(F[b].generators) | set(_displayed_sets(Fa_star, a, b))
                        if FiniteFilter(k, len(b), family) != G[b]:
                            problems.append(f"component {b} differs from the generated filter")
                if not G.is_proper:
                    problems.append("improper")
                cert = check_coherence(G)
                if cert is not True:
                    problems.append("incoherent")
                if not F <= G:
                    problems.append("does not extend input")
                if G[a] != Fa_star:
                    problems.append("target component differs")
                if problems:
                    res.certificates.append(
                        {"F_cores": _cores_repr(F), "a": list(a),
                         "extension_core": _pts(core, k, len(a)), "problems": problems}
                    )
    return res


def coherent_extend_suite(k, lam, max_arity) -> SuiteResult:
    """The same checks for the join-routed extension used by completion."""
    return onestep_suite(k, lam, max_arity, extend=coherent_extend, name="coherent_extend")


def _cores_repr(F):
    return {",".join(map(str, a)): _pts(m, F.base_size, len(a)) for a, m in sorted(F.cores().items())}


def completion_suite(k, lam, max_arity) -> SuiteResult:
    """Completion of every proper coherent filter is a coherent ultrafilter extending it."""
    res = SuiteResult("complete_to_ultra")
    for F in enumerate_coherent_systems(k, lam, max_arity):
        if not F.is_proper:
            continue
        res.instances += 1
        E = complete_to_ultra(F)
        problems = []
        if check_coherence(E) is not True:
            problems.append("incoherent")
        if not E.is_ultra:
            problems.append("not ultra")
        if not F <= E:
            problems.append("does not extend input")
        if E.witness is None:
            problems.append("not principal-coherent")
        if problems:
            res.certificates.append({"F_cores": _cores_repr(F), "problems": problems})
    return res


def enumeration_suite(k, lam, max_arity) -> SuiteResult:
    """Proper coherent ultrafilters correspond exactly to the functions ``lam -> A``."""
    res = SuiteResult("enumerate_ultra")
    seen = {}
    for E in enumerate_coherent_ultrafilters(k, lam, max_arity):
        res.instances += 1
        g = E.witness
        if g is None or g in seen or check_coherence(E) is not True:
            res.certificates.append({"E_cores": _cores_repr(E), "witness": g})
            continue
        seen[g] = E
    expected = set(cartesian(range(k), repeat=lam))
    missing = sorted(expected - set(seen))
    if missing:
        res.certificates.append({"missing_functions": [list(g) for g in missing[:8]]})
    res.details = {"ultrafilters": len(seen), "functions": k ** lam}
    return res


def tensor_oracle(seed_points, X_points) -> bool:
    """Membership in the iterated product of principal ultrafilters by nested sections.

    ``seed_points[i]`` is the point of the ``i``-th principal seed and
    ``X_points`` a set of tuples; no masks or cores are involved.
    """
    if not seed_points:
        return () in X_points
    head, rest = seed_points[0], seed_points[1:]
    good_rows = set()
    rows = {p[0] for p in X_points}
    for i in rows:
        section = {p[1:] for p in X_points if p[0] == i}
        if tensor_oracle(rest, section):
            good_rows.add(i)
    return head in good_rows


def product_suite(k, lam, max_arity, exhaustive_limit=512, samples=64, rng=None) -> SuiteResult:
    """Products of every vector of principal seeds: coherence plus the section-test oracle.

    Components whose cube has at most ``log2(exhaustive_limit)`` points are
    compared on every subset.  Larger cubes are compared on the sets that
    pin down a filter on a finite cube (the core and each point's
    complement) plus ``samples`` random subsets.
    """
    rng = rng or random.Random(0)
    res = SuiteResult("product_ultrafilter")
    for g in cartesian(range(k), repeat=lam):
        seeds = [FiniteFilter.principal(k, (x,)) for x in g]
        E = product_ultrafilter(seeds, max_arity)
        cert = check_coherence(E)
        if cert is not True:
            res.certificates.append({"seeds": list(g), "coherence": cert.as_dict()})
            continue
        for a in E.tuples():
            n = len(a)
            npts = k ** n
            Ea = E[a]
            if (1 << npts) <= exhaustive_limit:
                masks = range(1 << npts)
            else:
                full = (1 << npts) - 1
                masks = [Ea.core_mask] + [full & ~(1 << p) for p in range(npts)]
                masks += [rng.getrandbits(npts) for _ in range(samples)]
            pts = [decode(i, k, n) for i in range(npts)]
            sub_seeds = [g[i] for i in a]
            for m in masks:
                res.instances += 1
                X_points = {pts[i] for i in range(npts) if m >> i & 1}
                if Ea.contains_mask(m) != tensor_oracle(sub_seeds, X_points):
                    res.certificates.append({"seeds": list(g), "a": list(a), "X": _pts(m, k, n)})
                    break
    return res


def functoriality_suite(k, lam, max_arity) -> SuiteResult:
    """Projection composes: restricting ``c`` to ``b`` then to ``a`` equals restricting to ``a``."""
    res = SuiteResult("projection_functoriality")
    for c in all_tuples(lam, max_arity):
        for b in _sub_tuples(c):
            for a in _sub_tuples(b):
                for i in range(k ** len(c)):
                    s = decode(i, k, len(c))
                    res.instances += 1
                    two_step = project_tuple(b, a, project_tuple(c, b, s))
                    if two_step != project_tuple(c, a, s):
                        res.certificates.append({"a": list(a), "b": list(b), "c": list(c), "s": list(s)})
    return res


def fullification_suite(k, lam, max_arity) -> SuiteResult:
    """Fullification is extensive, full, minimal, idempotent, monotone and keeps the image."""
    res = SuiteResult("fullification")
    for c in all_tuples(lam, max_arity):
        npts = k ** len(c)
        if npts > 8:
            continue
        for b in _sub_tuples(c):
            tab = proj_table(k, b, c)
            fulls = [m for m in range(1 << npts) if kernels.is_full(m, tab)]
            for m in range(1 << npts):
                X = CubeSubset(k, len(c), m)
                Xp = fullify(X, b, c)
                res.instances += 1
                ok = (
                    X <= Xp
                    and is_full_over(Xp, b, c)
                    and fullify(Xp, b, c) == Xp
                    and pushforward(Xp, c, b) == pushforward(X, c, b)
                    # minimal: every full superset of X contains X+
                    and all(Xp.mask & ~f == 0 for f in fulls if m & ~f == 0)
                )
                # monotone against one-point enlargements
                for p in range(npts):
                    bigger = CubeSubset(k, len(c), m | 1 << p)
                    ok = ok and Xp <= fullify(bigger, b, c)
                if not ok:
                    res.certificates.append({"b": list(b), "c": list(c), "X": _pts(m, k, len(c))})
    return res
