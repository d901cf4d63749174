"""Definable functions and sets, fragments, Skolem search and embedding checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Callable, Iterable, Mapping, Sequence

from cohult.filters.cube import CubeSubset, encode
from cohult.logic.structures import QuantifierInSymbolic, Structure, eval_formula, eval_term
from cohult.logic.syntax import (
    App,
    Atom,
    Const,
    Exists,
    Not,
    Var,
    free_vars,
    is_quantifier_free,
    parse_formula,
    parse_term,
    substitute,
    subformulas,
)


class NotTotal(ValueError):
    """A formula-defined graph has no value, or more than one, at some input."""


def input_name(i: int) -> str:
    return f"x{i}"


def _domain_holds(S: Structure, chi, m) -> bool:
    return chi is None or eval_formula(S, chi, {"z": m})


def domain_elements(S: Structure, chi=None) -> list:
    """``chi(S)`` for a finite structure, in universe order."""
    return [m for m in S.universe() if _domain_holds(S, chi, m)]


@dataclass(frozen=True)
class DefinableFunction:
    """An ``arity``-ary function given by a term or by a graph formula.

    Inputs are the variables ``x0 .. x{arity-1}``; a graph formula also
    uses ``y`` for the output.  ``params`` binds the remaining free
    variables to elements of the home structure.  ``domain`` is a formula
    in ``z`` (``None`` stands for ``z = z``).
    """

    arity: int
    body: object = None
    graph: object = None
    params: tuple = ()
    domain: object = None

    def __post_init__(self):
        if (self.body is None) == (self.graph is None):
            raise ValueError("give exactly one of body and graph")
        object.__setattr__(self, "params", tuple(sorted(dict(self.params).items())))
        allowed = {input_name(i) for i in range(self.arity)} | {k for k, _ in self.params}
        if self.graph is not None:
            allowed.add("y")
        extra = free_vars(self.definition) - allowed
        if extra:
            raise ValueError(f"free variables {sorted(extra)} are neither inputs nor parameters")

    @classmethod
    def from_term(cls, src, arity: int, params: Mapping | None = None, constants: Iterable[str] = (), domain=None):
        body = parse_term(src, constants) if isinstance(src, str) else src
        return cls(arity, body=body, params=tuple((params or {}).items()), domain=domain)

    @classmethod
    def from_graph(cls, src, arity: int, params: Mapping | None = None, constants: Iterable[str] = (), domain=None):
        graph = parse_formula(src, constants) if isinstance(src, str) else src
        return cls(arity, graph=graph, params=tuple((params or {}).items()), domain=domain)

    @classmethod
    def identity(cls, arity: int = 1, i: int = 0) -> DefinableFunction:
        return cls(arity, body=Var(input_name(i)))

    @classmethod
    def constant(cls, arity: int, value) -> DefinableFunction:
        """The constant function with value ``value``, held as a parameter."""
        return cls(arity, body=Var("m"), params=(("m", value),))

    @property
    def definition(self):
        return self.body if self.body is not None else self.graph

    def __call__(self, S: Structure, args: Sequence, embed: Callable | None = None):
        """Value at ``args`` in ``S``; ``embed`` maps the parameters into ``S`` first."""
        if len(args) != self.arity:
            raise ValueError(f"expected {self.arity} arguments, got {len(args)}")
        asg = {k: embed(v) if embed else v for k, v in self.params}
        asg.update({input_name(i): a for i, a in enumerate(args)})
        if self.body is not None:
            return eval_term(S, self.body, asg)
        hits = []
        for y in S.universe():
            asg["y"] = y
            if eval_formula(S, self.graph, asg):
                hits.append(y)
                if len(hits) > 1:
                    break
        if len(hits) != 1:
            raise NotTotal(f"graph {self.graph} has {len(hits)} values at {tuple(args)}")
        return hits[0]

    def support(self) -> tuple[int, ...]:
        """Input positions that occur in the definition (a syntactic check)."""
        used = free_vars(self.definition)
        return tuple(i for i in range(self.arity) if input_name(i) in used)

    def reindex(self, positions: Sequence[int], arity: int) -> DefinableFunction:
        """Rename input ``i`` to ``positions[i]`` and set the new arity.

        With ``positions`` an order-preserving map into a longer tuple this
        is composition with the corresponding projection.
        """
        if len(positions) != self.arity:
            raise ValueError("one position per input is needed")
        ren = {input_name(i): Var(f"__in{p}") for i, p in enumerate(positions)}
        back = {f"__in{p}": Var(input_name(p)) for p in positions}
        d = substitute(substitute(self.definition, ren), back)
        if self.body is not None:
            return DefinableFunction(arity, body=d, params=self.params, domain=self.domain)
        return DefinableFunction(arity, graph=d, params=self.params, domain=self.domain)

    def is_total(self, S: Structure) -> bool:
        """Checked by enumeration on finite structures; terms are always total."""
        if self.body is not None:
            return True
        dom = domain_elements(S, self.domain)
        try:
            for s in cartesian(dom, repeat=self.arity):
                self(S, s)
        except NotTotal:
            return False
        return True

    def __str__(self):
        kind = "term" if self.body is not None else "graph"
        ps = ", ".join(f"{k}={v!r}" for k, v in self.params)
        return f"<{kind} {self.definition} / {self.arity}{' [' + ps + ']' if ps else ''}>"


@dataclass(frozen=True)
class DefinableSetDescriptor:
    """``{s in chi(M)^n : M |= formula(f_1(s), ..., f_m(s))}``.

    ``materialized`` is filled for finite structures, over the cube whose
    base set is ``domain_points`` (the elements of ``chi(M)`` in order).
    """

    formula: object
    fns: tuple
    domain: object
    arity: int
    materialized: CubeSubset | None = None
    domain_points: tuple | None = None


def definable_set(S: Structure, phi, fns: Sequence[DefinableFunction], chi=None) -> DefinableSetDescriptor:
    """Descriptor of the set cut out by ``phi`` (in ``x0 .. x{m-1}``) composed with ``fns``."""
    fns = tuple(fns)
    arities = {f.arity for f in fns}
    if len(arities) > 1:
        raise ValueError("all functions must have the same arity")
    n = arities.pop() if arities else 0
    extra = free_vars(phi) - {input_name(i) for i in range(len(fns))}
    if extra:
        raise ValueError(f"formula has variables {sorted(extra)} beyond its {len(fns)} arguments")
    if not S.is_finite:
        return DefinableSetDescriptor(phi, fns, chi, n)
    dom = domain_elements(S, chi)
    k = len(dom)
    mask = 0
    for idx in cartesian(range(k), repeat=n):
        s = [dom[i] for i in idx]
        asg = {input_name(j): f(S, s) for j, f in enumerate(fns)}
        if eval_formula(S, phi, asg):
            mask |= 1 << encode(idx, k)
    return DefinableSetDescriptor(phi, fns, chi, n, CubeSubset(k, n, mask), tuple(dom))


# ---------------------------------------------------------------- fragments


@dataclass(frozen=True)
class Fragment:
    """A subformula-closed set of formulas containing every atomic formula.

    ``generators=None`` means the quantifier-free fragment closed under
    negation, conjunction and disjunction (an infinite set, decided by a
    syntactic test).  Otherwise the fragment is the subformula closure of
    the generators plus all atomic formulas.
    """

    generators: frozenset | None = None
    closure: frozenset = field(init=False, compare=False)

    def __post_init__(self):
        closure = frozenset()
        if self.generators is not None:
            closure = frozenset(g for f in self.generators for g in subformulas(f))
        object.__setattr__(self, "closure", closure)

    @classmethod
    def quantifier_free(cls) -> Fragment:
        return cls(None)

    @classmethod
    def generated_by(cls, formulas: Iterable) -> Fragment:
        return cls(frozenset(formulas))

    def __contains__(self, phi) -> bool:
        if self.generators is None:
            return is_quantifier_free(phi)
        return isinstance(phi, Atom) or phi in self.closure

    @property
    def is_quantifier_free(self) -> bool:
        return self.generators is None or all(is_quantifier_free(f) for f in self.closure)

    @property
    def closed_under_negation(self) -> bool:
        """Whether ``(not phi)`` is a member for every member ``phi`` that is not itself a negation."""
        if self.generators is None:
            return True
        return all(Not(f) in self or isinstance(f, Not) for f in self.closure)

    def existentials(self) -> list:
        return sorted((f for f in self.closure if isinstance(f, Exists)), key=str)


@dataclass(frozen=True)
class SkolemVerdict:
    """Result of a Skolem-function search; falsy when some existential has no term up to ``bound``."""

    found: bool
    bound: int | None
    skolem: Mapping = field(default_factory=dict)
    missing: tuple = ()

    def __bool__(self):
        return self.found


def enumerate_terms(S: Structure, variables: Sequence[str], depth: int) -> list:
    """Every term over ``variables``, the constants and function symbols of height at most ``depth``."""
    voc = S.vocabulary
    layers = [[Var(v) for v in variables] + [Const(c) for c in sorted(voc.constants)]]
    seen = list(layers[0])
    for _ in range(1, depth):
        new = []
        for fn, arity in sorted(voc.functions.items()):
            if arity == 0:
                continue
            for args in cartesian(seen, repeat=arity):
                if any(a in layers[-1] for a in args):
                    new.append(App(fn, tuple(args)))
        layers.append(new)
        seen.extend(new)
    return seen


def has_definable_skolem(frag: Fragment, S: Structure | None = None, depth: int = 2) -> SkolemVerdict:
    """Look for a term choosing a witness for every existential in ``frag``.

    Fragments without existentials pass vacuously.  Otherwise, over a
    finite structure, every term up to ``depth`` is tried for each
    ``exists x psi``: it must satisfy ``psi`` wherever a witness exists.
    """
    exs = frag.existentials() if frag.generators is not None else []
    if not exs:
        return SkolemVerdict(True, None)
    if S is None or not S.is_finite:
        raise QuantifierInSymbolic("Skolem search needs a finite structure")
    skolem, missing = {}, []
    for ex in exs:
        zs = sorted(free_vars(ex))
        rows = [dict(zip(zs, vals)) for vals in cartesian(list(S.universe()), repeat=len(zs))]
        rows = [r for r in rows if eval_formula(S, ex, r)]
        for t in enumerate_terms(S, zs, depth):
            if all(eval_formula(S, ex.body, {**r, ex.var: eval_term(S, t, r)}) for r in rows):
                skolem[ex] = t
                break
        else:
            missing.append(ex)
    return SkolemVerdict(not missing, depth, skolem, tuple(missing))


# ---------------------------------------------------------------- embeddings


def is_qf_embedding(
    M: Structure,
    N: Structure,
    emb: Callable,
    corpus: Iterable,
    samples: Sequence | None = None,
) -> bool:
    """Whether ``emb`` preserves every corpus formula at every tested assignment.

    Finite ``M`` is tested exhaustively; symbolic ``M`` on all assignments
    drawn from ``samples``.
    """
    pool = list(M.universe()) if M.is_finite else list(samples or [])
    if not pool:
        raise ValueError("no elements to test a symbolic structure on")
    for phi in corpus:
        xs = sorted(free_vars(phi))
        for vals in cartesian(pool, repeat=len(xs)):
            asg = dict(zip(xs, vals))
            image = {k: emb(v) for k, v in asg.items()}
            if eval_formula(M, phi, asg) != eval_formula(N, phi, image):
                return False
    return True


def atomic_formulas(S: Structure, variables: Sequence[str], term_depth: int = 1) -> list:
    """All atoms over ``variables`` with argument terms of height at most ``term_depth``."""
    terms = enumerate_terms(S, variables, term_depth)
    out = []
    rels = dict(S.vocabulary.relations)
    rels.setdefault("=", 2)
    for rel, arity in sorted(rels.items()):
        for args in cartesian(terms, repeat=arity):
            out.append(Atom(rel, tuple(args)))
    return out


__all__ = [
    "DefinableFunction",
    "DefinableSetDescriptor",
    "Fragment",
    "NotTotal",
    "SkolemVerdict",
    "atomic_formulas",
    "definable_set",
    "domain_elements",
    "enumerate_terms",
    "has_definable_skolem",
    "input_name",
    "is_qf_embedding",
]
