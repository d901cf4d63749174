"""Explicit ultrapowers of finite structures by materialized coherent ultrafilters.

Stage ``b`` holds definable functions ``chi(M)^|b| -> M`` as value tables;
the colimit identifies ``(b, t)`` and ``(c, t')`` when they agree on a set
in ``E_{b|c}``.  The quotient is returned as a :class:`FiniteStructure`
so formulas can be evaluated in it directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations
from itertools import product as cartesian
from typing import Mapping

from cohult.filters.cube import all_tuples, decode, encode, join, projection_map
from cohult.filters.systems import CoherentUltrafilterFinite
from cohult.logic.definable import DefinableFunction, domain_elements, input_name
from cohult.logic.structures import FiniteStructure, eval_formula
from cohult.logic.syntax import App, Var, free_vars
from cohult.ultrapower.ambient import MaterializedAmbient
from cohult.ultrapower.classes import UltrapowerClass


class VocabularyMismatch(ValueError):
    pass


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[ry] = rx


def _push_table(table: tuple, k: int, b, c) -> tuple:
    """``t o pi^c_b`` as a table over ``k^|c|`` points."""
    pmap = projection_map(b, c).map
    out = []
    for i in range(k ** len(c)):
        s = decode(i, k, len(c))
        j = 0
        for pos, p in enumerate(pmap):
            j += s[p] * k ** pos
        out.append(table[j])
    return tuple(out)


@lru_cache(maxsize=256)
def stage_closure(M: FiniteStructure, n: int, chi=None) -> tuple:
    """Term-definable functions of arity ``n`` as ``(term, table)`` pairs, first term per table.

    Generated by the projections and a parameter for every element of
    ``M``, closed under the function symbols.  Parameters are named
    ``m<value>``.
    """
    dom = domain_elements(M, chi)
    k = len(dom)
    pts = [tuple(dom[i] for i in decode(idx, k, n)) for idx in range(k ** n)]
    found: dict = {}
    frontier = []

    def add(term, table):
        if table not in found:
            found[table] = term
            frontier.append(table)

    for i in range(n):
        add(Var(input_name(i)), tuple(p[i] for p in pts))
    for m in M.universe():
        add(Var(f"m{m}"), (m,) * len(pts))
    fns = sorted(M.functions.items())
    while frontier:
        frontier.clear()
        tables = list(found)
        for name, (arity, table) in fns:
            if arity == 0:
                continue
            for args in cartesian(tables, repeat=arity):
                value = tuple(table[tuple(a[i] for a in args)] for i in range(len(pts)))
                add(App(name, tuple(found[a] for a in args)), value)
    return tuple((term, table) for table, term in found.items())


def _as_function(term, n: int) -> DefinableFunction:
    params = {}
    for v in free_vars(term):
        if v.startswith("m") and v[1:].isdigit():
            params[v] = int(v[1:])
    return DefinableFunction(n, body=term, params=tuple(params.items()))


@dataclass
class UltrapowerStructure:
    """The quotient structure together with one representative per element.

    ``structure`` is ``None`` for purely lazy ultrapowers; ``reps[k]`` is
    the representative of element ``k``; ``stage`` maps each index tuple to
    its ``(class, table)`` stage elements.
    """

    ambient: object
    structure: FiniteStructure | None = None
    reps: list = field(default_factory=list)
    stage: dict = field(default_factory=dict)
    index: dict = field(default_factory=dict)

    def locate(self, x: UltrapowerClass) -> int:
        """Index of the element represented by ``x``."""
        E = self.ambient
        k = len(E.domain)
        n = len(x.support)
        pts = [tuple(E.domain[i] for i in decode(idx, k, n)) for idx in range(k ** n)]
        table = tuple(x.fn(E.M, p) for p in pts)
        hit = self.index.get((x.support, table))
        if hit is not None:
            return hit
        for b, elems in self.stage.items():
            for _, t in elems:
                if _agree(E, x.support, table, b, t):
                    return self.index[(b, t)]
        raise KeyError(f"{x} is not equal to any materialized element")

    def satisfies(self, phi, xs) -> bool:
        asg = {input_name(i): self.locate(x) for i, x in enumerate(xs)}
        return eval_formula(self.structure, phi, asg)


def _agree(E: MaterializedAmbient, b, t, c, t2) -> bool:
    u = join(b, c)
    k = len(E.domain)
    p = _push_table(t, k, b, u)
    q = _push_table(t2, k, c, u)
    mask = 0
    for i, (x, y) in enumerate(zip(p, q)):
        if x == y:
            mask |= 1 << i
    return E.E[u].contains_mask(mask)


def _relation_mask(E: MaterializedAmbient, rows, tables) -> int:
    mask = 0
    for i, vals in enumerate(zip(*tables)):
        if vals in rows:
            mask |= 1 << i
    return mask


def materialize_ultrapower(
    M: FiniteStructure,
    E: CoherentUltrafilterFinite,
    arity_bound: int = 3,
    chi=None,
    ambient: MaterializedAmbient | None = None,
) -> UltrapowerStructure:
    """The directed colimit of the stage ultrapowers, as an explicit structure.

    Stage elements are term-definable (with parameters), so every function
    symbol maps a stage into itself and the quotient operations are read
    off representatives.  Relations hold when the defining set is in the
    component at the common support.
    """
    amb = ambient or MaterializedAmbient(M, E, chi)
    k = len(amb.domain)
    bound = min(arity_bound, E.max_arity)
    tuples = all_tuples(E.lam, bound)
    stage = {}
    uf = _UnionFind()
    for b in tuples:
        elems = []
        for term, table in stage_closure(M, len(b), chi):
            elems.append((UltrapowerClass(b, _as_function(term, len(b))), table))
            uf.add((b, table))
        stage[b] = elems
    # each component is principal on a finite base set, but membership is
    # still decided through E itself
    nodes = [(b, t) for b in tuples for _, t in stage[b]]
    for i, (b, t) in enumerate(nodes):
        for c, t2 in nodes[i + 1:]:
            if len(join(b, c)) <= bound and uf.find((b, t)) != uf.find((c, t2)):
                if _agree(amb, b, t, c, t2):
                    uf.union((b, t), (c, t2))
    roots: dict = {}
    index = {}
    reps = []
    rep_nodes = []
    for b in tuples:
        for x, t in stage[b]:
            r = uf.find((b, t))
            if r not in roots:
                roots[r] = len(reps)
                reps.append(x)
                rep_nodes.append((b, t))
            index[(b, t)] = roots[r]
    size = len(reps)
    functions = {}
    for name, (arity, table) in sorted(M.functions.items()):
        out = {}
        for args in cartesian(range(size), repeat=arity):
            u = ()
            for a in args:
                u = join(u, rep_nodes[a][0])
            pushed = [_push_table(rep_nodes[a][1], k, rep_nodes[a][0], u) for a in args]
            value = tuple(table[vals] for vals in zip(*pushed))
            out[args] = index[(u, value)]
        functions[name] = (arity, out)
    relations = {}
    for name, (arity, rows) in sorted(M.relations.items()):
        hold = []
        for args in cartesian(range(size), repeat=arity):
            u = ()
            for a in args:
                u = join(u, rep_nodes[a][0])
            pushed = [_push_table(rep_nodes[a][1], k, rep_nodes[a][0], u) for a in args]
            if E[u].contains_mask(_relation_mask(amb, rows, pushed)):
                hold.append(args)
        relations[name] = (arity, hold)
    constants = {name: index[((), (v,))] for name, v in M.constants.items()}
    Q = FiniteStructure(size, constants, functions, relations)
    return UltrapowerStructure(amb, Q, reps, stage, index)


def check_transitions(U: UltrapowerStructure) -> dict:
    """Transition maps are well defined, injective, and compose.

    For ``a < b < c`` inside the bound, pushing a stage element from ``a``
    to ``c`` directly gives the same table as going through ``b``, and the
    element it names does not change.
    """
    amb = U.ambient
    k = len(amb.domain)
    tuples = list(U.stage)
    checked = failures = 0
    for a in tuples:
        for b in tuples:
            if not (len(a) < len(b) and set(a) <= set(b)):
                continue
            for _, t in U.stage[a]:
                tb = _push_table(t, k, a, b)
                checked += 1
                if U.index.get((b, tb)) != U.index[(a, t)]:
                    failures += 1
                for c in tuples:
                    if len(b) < len(c) and set(b) <= set(c):
                        checked += 1
                        if _push_table(tb, k, b, c) != _push_table(t, k, a, c):
                            failures += 1
    return {"checked": checked, "failures": failures}


def principal_map(U: UltrapowerStructure) -> dict:
    """Send each element to its value at the generating point of ``E``.

    Returns the map and whether it is an isomorphism onto its image.
    """
    amb = U.ambient
    E = amb.E
    g = E.witness
    if g is None:
        raise ValueError("the ultrafilter is not principal-coherent")
    vals = [x.fn(amb.M, [amb.domain[g[i]] for i in x.support]) for x in U.reps]
    Q, M = U.structure, amb.M
    ok = len(set(vals)) == len(vals)
    for name, (arity, table) in Q.functions.items():
        for args, v in table.items():
            ok = ok and M.apply(name, [vals[a] for a in args]) == vals[v]
    for name, (arity, rows) in Q.relations.items():
        for args in cartesian(range(Q.size), repeat=arity):
            ok = ok and ((args in rows) == M.holds(name, [vals[a] for a in args]))
    for name, v in Q.constants.items():
        ok = ok and M.constant(name) == vals[v]
    return {"values": vals, "isomorphism_onto_image": ok}


def find_isomorphism(S: FiniteStructure, T: FiniteStructure):
    """A bijection ``S -> T`` preserving every symbol, found by trying all of them."""
    if S.size != T.size or S.vocabulary != T.vocabulary:
        return None
    for perm in permutations(range(T.size)):
        if all(perm[S.constants[c]] == T.constants[c] for c in S.constants) and all(
            perm[tab[args]] == T.functions[f][1][tuple(perm[a] for a in args)]
            for f, (_, tab) in S.functions.items()
            for args in tab
        ) and all(
            (tuple(perm[a] for a in args) in T.relations[r][1]) == (args in rows)
            for r, (ar, rows) in S.relations.items()
            for args in cartesian(range(S.size), repeat=ar)
        ):
            return perm
    return None


def coherent_ultraproduct_at(
    a,
    family: Mapping,
    E: CoherentUltrafilterFinite,
    arity_bound: int = 3,
    max_stage_elements: int = 200_000,
) -> UltrapowerStructure:
    """Colimit over ``b >= a`` of ``prod_s M_{pi^b_a(s)} / E_b``.

    ``family`` maps each ``s`` in ``A^|a|`` to a finite structure; all must
    share a vocabulary.  Two choice functions are equal modulo ``E_b``
    exactly when they agree on its core, so a stage element is stored as
    its values on the core points (in index order).
    """
    a = tuple(a)
    k = E.base_size
    keys = list(cartesian(range(k), repeat=len(a)))
    missing = [s for s in keys if s not in family]
    if missing:
        raise ValueError(f"family is missing structures at {missing[:3]}")
    if any(family[s].vocabulary != family[keys[0]].vocabulary for s in keys):
        raise VocabularyMismatch("structures in the family have different vocabularies")
    bound = min(arity_bound, E.max_arity)
    stages = [b for b in all_tuples(E.lam, bound) if set(a) <= set(b)]
    core_pts, owners, elems = {}, {}, {}
    for b in stages:
        pts = list(E[b].core.points())
        pmap = projection_map(a, b).map
        core_pts[b] = pts
        owners[b] = [tuple(s[p] for p in pmap) for s in pts]
        count = 1
        for o in owners[b]:
            count *= family[o].size
        if count > max_stage_elements:
            raise ValueError(f"stage {b} has {count} elements, over the budget")
        elems[b] = list(cartesian(*[range(family[o].size) for o in owners[b]]))

    def push(h, b, c):
        where = {s: i for i, s in enumerate(core_pts[b])}
        pmap = projection_map(b, c).map
        return tuple(h[where[tuple(t[p] for p in pmap)]] for t in core_pts[c])

    uf = _UnionFind()
    for b in stages:
        for h in elems[b]:
            uf.add((b, h))
    for b in stages:
        for c in stages:
            if len(b) < len(c) and set(b) <= set(c):
                for h in elems[b]:
                    uf.union((b, h), (c, push(h, b, c)))
    roots, index, nodes = {}, {}, []
    for b in stages:
        for h in elems[b]:
            r = uf.find((b, h))
            if r not in roots:
                roots[r] = len(nodes)
                nodes.append((b, h))
            index[(b, h)] = roots[r]
    size = len(nodes)

    def common(args):
        u = a
        for x in args:
            u = join(u, nodes[x][0])
        if u not in core_pts:
            raise ValueError(f"common support {u} exceeds the arity bound")
        return u, [push(nodes[x][1], nodes[x][0], u) for x in args]

    first = family[keys[0]]
    functions, relations = {}, {}
    for name, (arity, _) in sorted(first.functions.items()):
        out = {}
        for args in cartesian(range(size), repeat=arity):
            u, pushed = common(args)
            value = tuple(
                family[o].apply(name, [p[j] for p in pushed]) for j, o in enumerate(owners[u])
            )
            out[args] = index[(u, value)]
        functions[name] = (arity, out)
    for name, (arity, _) in sorted(first.relations.items()):
        hold = []
        for args in cartesian(range(size), repeat=arity):
            u, pushed = common(args)
            mask = 0
            for j, o in enumerate(owners[u]):
                if family[o].holds(name, [p[j] for p in pushed]):
                    mask |= 1 << encode(core_pts[u][j], k)
            if E[u].contains_mask(mask):
                hold.append(args)
        relations[name] = (arity, hold)
    constants = {}
    for name in first.constants:
        h = tuple(family[o].constant(name) for o in owners[a])
        constants[name] = index[(a, h)]
    Q = FiniteStructure(size, constants, functions, relations)
    return UltrapowerStructure(E, Q, list(nodes), {}, index)
