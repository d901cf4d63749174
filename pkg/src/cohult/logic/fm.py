"""Exact linear feasibility over an ordered rational vector space.

Constraints have the form ``sum(q_i * x_i) + c  op  0`` with rational
``q_i``, a constant vector ``c`` and ``op`` one of ``<``, ``<=``, ``=``.
Variables range over the space itself, so a witness assigns a vector to
each variable.  Elimination is Fourier-Motzkin in declaration order;
equalities are used for substitution first.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as cartesian
from math import lcm
from typing import Mapping, Sequence

from cohult.logic.structures import (
    ZERO,
    OrderedVectorSpace,
    QuantifierInSymbolic,
    Vec,
    eval_formula,
)
from cohult.logic.syntax import And, App, Atom, Const, Exists, Not, Or, Scale, Var

OPS = ("<", "<=", "=")


class NotLinear(ValueError):
    pass


@dataclass(frozen=True)
class Affine:
    """``sum(coeffs) + const`` with coefficients sorted by variable name."""

    coeffs: tuple = ()
    const: Vec = ZERO

    @classmethod
    def of(cls, coeffs: Mapping[str, Fraction] | None = None, const: Vec = ZERO) -> Affine:
        clean = {}
        for k, v in (coeffs or {}).items():
            v = Fraction(v)
            if v:
                clean[k] = v
        return cls(tuple(sorted(clean.items())), const)

    @classmethod
    def var(cls, name: str) -> Affine:
        return cls(((name, Fraction(1)),), ZERO)

    def coef(self, x: str) -> Fraction:
        return dict(self.coeffs).get(x, Fraction(0))

    def variables(self) -> frozenset:
        return frozenset(k for k, _ in self.coeffs)

    def without(self, x: str) -> Affine:
        return Affine(tuple(kv for kv in self.coeffs if kv[0] != x), self.const)

    def __add__(self, other: Affine) -> Affine:
        d = dict(self.coeffs)
        for k, v in other.coeffs:
            d[k] = d.get(k, 0) + v
        return Affine.of(d, self.const + other.const)

    def scale(self, q) -> Affine:
        q = Fraction(q)
        return Affine.of({k: q * v for k, v in self.coeffs}, self.const.scale(q))

    def __neg__(self) -> Affine:
        return self.scale(-1)

    def __sub__(self, other: Affine) -> Affine:
        return self + -other

    def subst(self, x: str, expr: Affine) -> Affine:
        a = self.coef(x)
        if not a:
            return self
        return self.without(x) + expr.scale(a)

    def evaluate(self, values: Mapping[str, Vec]) -> Vec:
        out = self.const
        for k, v in self.coeffs:
            out = out + values[k].scale(v)
        return out

    def __str__(self):
        parts = [f"{v}*{k}" for k, v in self.coeffs]
        if self.const or not parts:
            parts.append(repr(self.const))
        return " + ".join(parts)


@dataclass(frozen=True)
class LinearConstraint:
    expr: Affine
    op: str

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown comparison {self.op!r}")

    def holds(self, M: OrderedVectorSpace, values: Mapping[str, Vec]) -> bool:
        s = M.sign(self.expr.evaluate(values))
        return s < 0 if self.op == "<" else s <= 0 if self.op == "<=" else s == 0

    def __str__(self):
        return f"{self.expr} {self.op} 0"


@dataclass(frozen=True)
class LinearConstraintSystem:
    variables: tuple
    constraints: tuple

    def __post_init__(self):
        known = set(self.variables)
        for c in self.constraints:
            extra = c.expr.variables() - known
            if extra:
                raise ValueError(f"undeclared variables {sorted(extra)}")


@dataclass(frozen=True)
class Witness:
    values: Mapping[str, Vec]

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Unsat:
    reason: str = ""

    def __bool__(self):
        return False


def _const_ok(M, c: LinearConstraint) -> bool:
    return c.holds(M, {})


def fm_solve(system: LinearConstraintSystem, M: OrderedVectorSpace):
    """A witness in ``M`` for every constraint, or :class:`Unsat`.

    Back-substitution takes the midpoint of the tightest bounds, the bound
    plus or minus ``M.unit`` when only one side is bounded, and zero when
    neither is.  The witness is checked against the original constraints
    before it is returned.
    """
    for c in system.constraints:
        if not M.contains(c.expr.const):
            raise ValueError(f"constant {c.expr.const!r} is not an element of {M!r}")
    cons = list(dict.fromkeys(system.constraints))
    steps = []
    for x in system.variables:
        eq = next((c for c in cons if c.op == "=" and c.expr.coef(x)), None)
        if eq is not None:
            # a*x + r = 0  gives  x = -r/a
            expr = eq.expr.without(x).scale(-1 / eq.expr.coef(x))
            steps.append((x, "eq", expr))
            cons = [LinearConstraint(c.expr.subst(x, expr), c.op) for c in cons if c is not eq]
        else:
            lowers, uppers, rest = [], [], []
            for c in cons:
                a = c.expr.coef(x)
                if not a:
                    rest.append(c)
                    continue
                bound = c.expr.without(x).scale(-1 / a)
                (uppers if a > 0 else lowers).append((bound, c.op == "<"))
            for lo, lo_strict in lowers:
                for hi, hi_strict in uppers:
                    rest.append(LinearConstraint(lo - hi, "<" if lo_strict or hi_strict else "<="))
            steps.append((x, "ineq", (lowers, uppers)))
            cons = rest
        keep = []
        for c in dict.fromkeys(cons):
            if c.expr.coeffs:
                keep.append(c)
            elif not _const_ok(M, c):
                return Unsat(f"eliminating {x} leaves {c}")
        cons = keep
    for c in cons:
        if not _const_ok(M, c):
            return Unsat(str(c))
    values: dict = {}
    for x, kind, data in reversed(steps):
        if kind == "eq":
            values[x] = data.evaluate(values)
            continue
        lowers, uppers = data
        lo = max((b.evaluate(values) for b, _ in lowers), key=_order_key(M), default=None)
        hi = min((b.evaluate(values) for b, _ in uppers), key=_order_key(M), default=None)
        if lo is not None and hi is not None:
            values[x] = (lo + hi).scale(Fraction(1, 2))
        elif lo is not None:
            values[x] = lo + M.unit
        elif hi is not None:
            values[x] = hi - M.unit
        else:
            values[x] = ZERO
    for c in system.constraints:
        if not c.holds(M, values):
            raise RuntimeError(f"witness {values} violates {c}; elimination bug")
    return Witness(values)


def _order_key(M: OrderedVectorSpace):
    """Sort key realizing the lexicographic order of ``M``."""

    def key(v: Vec):
        return tuple(v.coord(b) for b in M.basis)

    return key


# ---------------------------------------------------------------- formulas


def linearize(M: OrderedVectorSpace, t, fixed: Mapping[str, Vec] | None = None) -> Affine:
    """Affine form of a term; variables in ``fixed`` are replaced by their values."""
    fixed = fixed or {}
    if isinstance(t, Var):
        if t.name in fixed:
            return Affine((), fixed[t.name])
        return Affine.var(t.name)
    if isinstance(t, Const):
        return Affine((), M.constant(t.name))
    if isinstance(t, Scale):
        return linearize(M, t.arg, fixed).scale(t.q)
    if isinstance(t, App):
        if t.fn == "+" and len(t.args) == 2:
            return linearize(M, t.args[0], fixed) + linearize(M, t.args[1], fixed)
        if t.fn == "-" and len(t.args) == 1:
            return -linearize(M, t.args[0], fixed)
    raise NotLinear(f"{t} is not a linear term")


def _literal(M, atom: Atom, positive: bool, fixed) -> list:
    """Disjunction (list) of single constraints equivalent to the literal."""
    if atom.rel not in ("<", "="):
        raise NotLinear(f"relation {atom.rel!r} is not linear order or equality")
    s, t = (linearize(M, a, fixed) for a in atom.args)
    if atom.rel == "<":
        if positive:
            return [LinearConstraint(s - t, "<")]
        return [LinearConstraint(t - s, "<=")]
    if positive:
        return [LinearConstraint(s - t, "=")]
    return [LinearConstraint(s - t, "<"), LinearConstraint(t - s, "<")]


def dnf(M: OrderedVectorSpace, f, fixed: Mapping[str, Vec] | None = None, positive: bool = True):
    """Yield conjunctions (lists of constraints) whose disjunction is ``f``."""
    if isinstance(f, Atom):
        for c in _literal(M, f, positive, fixed):
            yield [c]
    elif isinstance(f, Not):
        yield from dnf(M, f.arg, fixed, not positive)
    elif isinstance(f, (And, Or)):
        conj = isinstance(f, And) == positive
        if conj:
            parts = [list(dnf(M, g, fixed, positive)) for g in f.args]
            for combo in cartesian(*parts):
                yield [c for clause in combo for c in clause]
        else:
            for g in f.args:
                yield from dnf(M, g, fixed, positive)
    elif isinstance(f, Exists):
        raise QuantifierInSymbolic(f"cannot linearize {f}")
    else:
        raise TypeError(f"not a formula: {f!r}")


def find_witness(
    M: OrderedVectorSpace, f, variables: Sequence[str], fixed: Mapping[str, Vec] | None = None
):
    """Values in ``M`` for ``variables`` making ``f`` true, or ``None``.

    Each disjunct of the normal form is solved in turn; a returned witness
    has been re-checked with the ordinary evaluator.
    """
    fixed = dict(fixed or {})
    variables = tuple(variables)
    for conj in dnf(M, f, fixed):
        res = fm_solve(LinearConstraintSystem(variables, tuple(conj)), M)
        if res:
            asg = {**fixed, **res.values}
            if not eval_formula(M, f, asg):
                raise RuntimeError(f"witness {res.values} fails {f}")
            return dict(res.values)
    return None


# ---------------------------------------------------------------- grid oracle


def rref(rows: list[list[Fraction]], ncols: int):
    """Reduced row echelon form of an augmented matrix (last column = rhs)."""
    rows = [r[:] for r in rows]
    pivots = []
    r = 0
    for col in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][col]
        rows[r] = [v / piv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    return rows, pivots


def _solve_square(rows: list[list[Fraction]], rhs: list[Fraction]):
    k = len(rows)
    red, pivots = rref([r + [b] for r, b in zip(rows, rhs)], k)
    if len(pivots) < k:
        return None
    return [red[i][k] for i in range(k)]


def _reduce(system: LinearConstraintSystem, unit: str):
    """Solve the equalities exactly and rewrite the rest in the free parameters.

    Returns ``None`` when the equalities are inconsistent, otherwise the
    number of free parameters and a list of ``(coeffs, const, op)`` with
    ``op`` in ``<``, ``<=`` meaning ``coeffs . t + const op 0``.
    """
    xs = list(system.variables)
    n = len(xs)
    eqs, ineqs = [], []
    for c in system.constraints:
        row = [c.expr.coef(x) for x in xs]
        d = c.expr.const.coord(unit)
        (eqs if c.op == "=" else ineqs).append((row, d, c.op))
    red, pivots = rref([row + [-d] for row, d, _ in eqs], n)
    if any(r[n] for r in red[len(pivots):]):
        return None
    free = [j for j in range(n) if j not in pivots]
    base = [Fraction(0)] * n
    param = [[Fraction(0)] * len(free) for _ in range(n)]
    for i, pc in enumerate(pivots):
        base[pc] = red[i][n]
        for fi, fcol in enumerate(free):
            param[pc][fi] = -red[i][fcol]
    for fi, fcol in enumerate(free):
        param[fcol][fi] = Fraction(1)
    reduced = []
    for row, d, op in ineqs:
        coeff = [sum(row[j] * param[j][fi] for j in range(n)) for fi in range(len(free))]
        reduced.append((coeff, d + sum(row[j] * base[j] for j in range(n)), op))
    return len(free), reduced


def _holds_at(reduced, t) -> bool:
    for coeff, const, op in reduced:
        v = const + sum(c * x for c, x in zip(coeff, t))
        if v > 0 or (op == "<" and v == 0):
            return False
    return True


def _grid_hit(reduced, k: int, D: int, R: int) -> bool:
    import numpy as np

    den = 1
    for coeff, const, _ in reduced:
        for v in coeff + [const]:
            den = lcm(den, v.denominator)
    span = np.arange(-R * D, R * D + 1, dtype=np.int64)
    grids = np.meshgrid(*([span] * k), indexing="ij")
    ok = np.ones(grids[0].shape, dtype=bool)
    for coeff, const, op in reduced:
        # (coeff . i / D + const) scaled by D * den stays integral
        val = np.full(grids[0].shape, int(const * D * den), dtype=np.int64)
        for fi in range(k):
            val += int(coeff[fi] * den) * grids[fi]
        ok &= val < 0 if op == "<" else val <= 0
    return bool(ok.any())


def _vertices(hyperplanes, k: int):
    """Every point where ``k`` of the hyperplanes ``(coeffs, const)`` meet in a single point."""
    from itertools import combinations

    out = set()
    for combo in combinations(hyperplanes, k):
        sol = _solve_square([list(h[0]) for h in combo], [-h[1] for h in combo])
        if sol is not None:
            out.add(tuple(sol))
    return out


def grid_oracle(system: LinearConstraintSystem, M: OrderedVectorSpace, D: int = 6, R: int = 4) -> bool:
    """Brute-force feasibility for one-dimensional ``M``, independent of elimination.

    Equalities are solved exactly (``x = p + N t``) and the inequalities
    rewritten over ``t``.  First every ``t`` with entries ``i / D``,
    ``|i / D| <= R`` is tried on an integer numpy grid.  If none works the
    grid is refined to the candidate points of the arrangement: the
    box radius is taken beyond every vertex of the hyperplanes together
    with the coordinate planes, and the candidates are the vertices of the
    closed system inside that box plus their barycenter.  When the open
    system is satisfiable the barycenter lies in it, so the search is
    complete.
    """
    if len(M.basis) != 1:
        raise ValueError("the grid oracle needs a one-dimensional space")
    red = _reduce(system, M.basis[0])
    if red is None:
        return False
    k, reduced = red
    if not reduced:
        return True
    if k == 0:
        return _holds_at(reduced, [])
    if _grid_hit(reduced, k, D, R):
        return True
    planes = [(tuple(c), b) for c, b, _ in reduced]
    axes = [(tuple(Fraction(int(i == j)) for j in range(k)), Fraction(0)) for i in range(k)]
    radius = 1 + max((abs(x) for v in _vertices(planes + axes, k) for x in v), default=0)
    box = []
    for i in range(k):
        e = tuple(Fraction(int(i == j)) for j in range(k))
        box.append((e, -radius))
        box.append((tuple(-x for x in e), -radius))
    closed = [(c, b, "<=") for c, b, _ in reduced] + [(list(e), b, "<=") for e, b in box]
    corners = [v for v in _vertices(planes + box, k) if _holds_at(closed, v)]
    if not corners:
        return False
    centre = [sum(v[i] for v in corners) / len(corners) for i in range(k)]
    return any(_holds_at(reduced, p) for p in corners + [centre])
