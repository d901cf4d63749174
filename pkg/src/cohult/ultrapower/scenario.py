"""Derived-ultrapower scenarios and the isomorphism report.

A scenario file is INI text::

    [scenario]
    name = infinitesimal
    lambda = 8

    [M]
    profile = ordered-vector-space
    basis = one

    [N]
    profile = ordered-vector-space
    basis = one, eps

    [embedding]
    kind = inclusion

    [enumeration]
    0 = eps
    1 = (+ one eps)

    [budgets]
    samples = 50
    seed = 12648430

``[M]`` and ``[N]`` take the keys of a ``[structure]`` section, or
``file = path`` (relative to the scenario file) for a structure file.
``[embedding]`` is ``kind = inclusion``, ``kind = identity`` or
``kind = images`` followed by one line per basis element (ordered spaces)
or per element (finite structures).  ``[enumeration]`` lists ``f(alpha)``
as terms of ``N``, one per index below ``lambda``.
"""

from __future__ import annotations

import configparser
import json
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from cohult.logic.corpus import random_formula, random_term
from cohult.logic.definable import DefinableFunction, Fragment, atomic_formulas, input_name
from cohult.logic.embeddings import FiniteEmbedding, LinearEmbedding, solve_linear
from cohult.logic.io import load_structure, loads_structure
from cohult.logic.structures import OrderedVectorSpace, Structure, element_pool, eval_formula
from cohult.logic.syntax import And, App, Not, ParseError, Scale, Var
from cohult.ultrapower.ambient import (
    DerivedCoherentFilter,
    WitnessNotFound,
    classes_equal,
    derive_filter,
    los_satisfies,
)
from cohult.ultrapower.classes import UltrapowerClass, class_make, class_push, embedding_j

SEED = 0xC0FFEE
DEFAULT_BUDGETS = {
    "samples": 50,
    "corpus": 200,
    "pairs": 100,
    "elementarity": 100,
    "completeness": 50,
    "depth": 3,
    "seed": SEED,
}
MAX_EXAMPLES = 5


class ScenarioError(ValueError):
    pass


@dataclass
class Scenario:
    name: str
    M: Structure
    N: Structure
    embed: object
    f: tuple
    fragment: Fragment = field(default_factory=Fragment.quantifier_free)
    budgets: dict = field(default_factory=lambda: dict(DEFAULT_BUDGETS))

    @property
    def lam(self) -> int:
        return len(self.f)


def _parser():
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    cp.optionxform = str
    return cp


def _structure(cp, section: str, base: Path) -> Structure:
    if not cp.has_section(section):
        raise ScenarioError(f"missing [{section}] section")
    sec = cp[section]
    if "file" in sec:
        return load_structure(base / sec["file"].strip())
    body = "\n".join(f"{k} = {v}" for k, v in sec.items())
    return loads_structure("[structure]\n" + body + "\n")


def _element(S: Structure, text: str):
    text = text.strip()
    if isinstance(S, OrderedVectorSpace):
        return S.element(text)
    value = int(text)
    if value not in S.universe():
        raise ScenarioError(f"{value} is not an element of {S!r}")
    return value


def loads_scenario(text: str, base_dir=".") -> Scenario:
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(str(exc)) from exc
    if not cp.has_section("scenario"):
        raise ScenarioError("missing [scenario] section")
    base = Path(base_dir)
    head = cp["scenario"]
    M = _structure(cp, "M", base)
    N = _structure(cp, "N", base)
    if M.is_finite != N.is_finite:
        raise ScenarioError("M and N must use the same profile")
    emb = dict(cp["embedding"]) if cp.has_section("embedding") else {"kind": "inclusion"}
    kind = emb.pop("kind", "inclusion").strip()
    try:
        if kind in ("inclusion", "identity"):
            embed = (
                LinearEmbedding.inclusion(M, N) if not M.is_finite
                else FiniteEmbedding(M, N, {m: m for m in M.universe()})
            )
        elif kind == "images":
            if M.is_finite:
                embed = FiniteEmbedding(M, N, {int(k): _element(N, v) for k, v in emb.items()})
            else:
                embed = LinearEmbedding(M, N, {k: _element(N, v) for k, v in emb.items()})
        else:
            raise ScenarioError(f"unknown embedding kind {kind!r}")
    except (KeyError, ValueError, ParseError) as exc:
        raise ScenarioError(f"bad embedding: {exc}") from exc
    lam = head.getint("lambda")
    if lam is None or lam < 1:
        raise ScenarioError("lambda must be a positive integer")
    if not cp.has_section("enumeration"):
        raise ScenarioError("missing [enumeration] section")
    enum = cp["enumeration"]
    try:
        f = tuple(_element(N, enum[str(alpha)]) for alpha in range(lam))
    except KeyError as exc:
        raise ScenarioError(f"enumeration has no entry for index {exc}") from None
    except (ValueError, ParseError) as exc:
        raise ScenarioError(f"bad enumeration entry: {exc}") from exc
    budgets = dict(DEFAULT_BUDGETS)
    if cp.has_section("budgets"):
        for k, v in cp["budgets"].items():
            if k not in budgets:
                raise ScenarioError(f"unknown budget {k!r}")
            budgets[k] = int(v, 0)
            if budgets[k] < 0 or (k != "seed" and budgets[k] == 0):
                raise ScenarioError(f"budget {k} must be positive")
    if cp.has_section("fragment") and cp["fragment"].get("kind", "quantifier-free").strip() != "quantifier-free":
        raise ScenarioError("only the quantifier-free fragment is supported in scenarios")
    return Scenario(head.get("name", "scenario"), M, N, embed, f, Fragment.quantifier_free(), budgets)


def load_scenario(path) -> Scenario:
    path = Path(path)
    return loads_scenario(path.read_text(), path.parent)


# ---------------------------------------------------------------- sampling


def sample_elements(S: Structure, need: int, rng: random.Random, depth: int = 3) -> list:
    """``need`` distinct elements of ``S`` (or all of a smaller finite universe).

    Symbolic pools are term closures of the basis; the depth is raised
    until the pool is large enough.
    """
    if S.is_finite:
        pool = list(S.universe())
    else:
        pool = element_pool(S, depth=depth)
        while len(pool) < need:
            depth += 1
            pool = element_pool(S, depth=depth)
    if len(pool) <= need:
        return pool
    return rng.sample(pool, need)


class _Check:
    def __init__(self):
        self.checked = 0
        self.failures = 0
        self.examples: list = []
        self.extra: dict = {}

    def record(self, ok: bool, what: str):
        self.checked += 1
        if not ok:
            self.failures += 1
            if len(self.examples) < MAX_EXAMPLES:
                self.examples.append(what)

    def as_dict(self):
        out = {"checked": self.checked, "failures": self.failures, "examples": self.examples}
        out.update(self.extra)
        return out


def _random_class(rng, E: DerivedCoherentFilter, pool_M) -> UltrapowerClass:
    n = rng.choice((1, 1, 2))
    support = tuple(sorted(rng.sample(range(E.lam), min(n, E.lam))))
    body = random_term(rng, E.M, [input_name(i) for i in range(len(support))], 2)
    params = ()
    if E.M.vocabulary.functions.get("+") == 2 and rng.random() < 0.3:
        body = App("+", (body, Var("m")))
        params = (("m", rng.choice(pool_M)),)
    return class_make(support, DefinableFunction(len(support), body=body, params=params))


def _equal_variant(rng, E: DerivedCoherentFilter, x: UltrapowerClass) -> UltrapowerClass:
    """A different representative of the same element."""
    spare = [b for b in range(E.lam) if b not in x.support]
    if spare and (rng.random() < 0.5 or not isinstance(E.M, OrderedVectorSpace)):
        b = tuple(sorted(x.support + (rng.choice(spare),)))
        return class_push(x, b)
    if isinstance(E.M, OrderedVectorSpace):
        half = Scale(Fraction(1, 2), x.fn.body)
        fn = DefinableFunction(x.fn.arity, body=App("+", (half, half)), params=x.fn.params)
        return UltrapowerClass(x.support, fn)
    return x


def _surjective_class(E: DerivedCoherentFilter, n, pool_M):
    """A class whose ``h``-image should be ``n``, and how it was found."""
    if n in E.f:
        return class_make((E.f.index(n),), DefinableFunction.identity(1)), "identity"
    m = E.embed.preimage(n)
    if m is not None:
        return embedding_j(m), "constant"
    if isinstance(E.M, OrderedVectorSpace):
        basis = list(E.M.basis)
        images = [E.embed(E.M.constant(b)) for b in basis]
        for alpha, v in enumerate(E.f):
            if E.is_principal(alpha):
                continue
            rows = [[v.coord(c)] + [im.coord(c) for im in images] + [n.coord(c)] for c in E.N.basis]
            sol = solve_linear(rows, 1 + len(basis))
            if sol is None:
                continue
            q, coords = sol[0], sol[1:]
            m = sum((E.M.constant(b).scale(c) for b, c in zip(basis, coords)), E.M.constant("0"))
            body = App("+", (Scale(q, Var("x0")), Var("m")))
            return class_make((alpha,), DefinableFunction(1, body=body, params=(("m", m),))), "affine"
        return None, "none"
    for alpha in range(E.lam):
        for m in pool_M:
            for t in (Var("x0"),) + tuple(App(fn, (Var("x0"),)) for fn, a in sorted(E.M.vocabulary.functions.items()) if a == 1):
                F = DefinableFunction(1, body=t)
                x = class_make((alpha,), F)
                if E.value(x) == n:
                    return x, "term"
    return None, "none"


def _formula_vars(k: int) -> list:
    return [input_name(i) for i in range(k)]


def verify_isomorphism(scn: Scenario, budgets: dict | None = None) -> dict:
    """Check that ``h_infinity`` is an isomorphism from the definable ultrapower onto ``N``.

    Every count in the report comes from seeded sampling, so equal
    scenarios and budgets give equal reports.
    """
    b = dict(scn.budgets)
    b.update(budgets or {})
    rng = random.Random(b["seed"])
    M, N = scn.M, scn.N
    pool_M = sample_elements(M, b["samples"], rng, b["depth"])
    pool_N = sample_elements(N, b["samples"], rng, b["depth"])
    corpus = atomic_formulas(M, ["x0", "x1"], 1)
    E = derive_filter(M, N, scn.embed, scn.f, scn.fragment, corpus, pool_M[:10])
    checks = {name: _Check() for name in (
        "h_j_identity", "los_differential", "j_elementarity", "injectivity",
        "surjectivity", "properness", "f_completeness",
    )}

    def guarded(check, fn, what):
        try:
            check.record(fn(), what)
        except WitnessNotFound as exc:
            check.record(False, f"{what}: {exc}")

    for m in pool_M:
        checks["h_j_identity"].record(E.value(embedding_j(m)) == scn.embed(m), f"h(j({m!r}))")

    for _ in range(b["corpus"]):
        k = rng.randint(1, 3)
        xs = [_random_class(rng, E, pool_M) for _ in range(k)]
        phi = random_formula(rng, M, _formula_vars(k), 2, 2)
        vals = {input_name(i): E.value(x) for i, x in enumerate(xs)}
        guarded(
            checks["los_differential"],
            lambda: los_satisfies(E, phi, xs) == eval_formula(N, phi, vals),
            f"{phi} at {[str(x) for x in xs]}",
        )

    for _ in range(b["elementarity"]):
        k = rng.randint(1, 3)
        ms = [rng.choice(pool_M) for _ in range(k)]
        phi = random_formula(rng, M, _formula_vars(k), 2, 2)
        asg = {input_name(i): m for i, m in enumerate(ms)}
        guarded(
            checks["j_elementarity"],
            lambda: los_satisfies(E, phi, [embedding_j(m) for m in ms]) == eval_formula(M, phi, asg),
            f"{phi} at {ms!r}",
        )

    inj = checks["injectivity"]
    equal_pairs = 0
    for i in range(b["pairs"]):
        x = _random_class(rng, E, pool_M)
        y = _equal_variant(rng, E, x) if i % 2 == 0 else _random_class(rng, E, pool_M)
        same = E.value(x) == E.value(y)
        equal_pairs += same
        guarded(inj, lambda: classes_equal(E, x, y) == same, f"{x} vs {y}")
    inj.extra["equal_pairs"] = equal_pairs

    sur = checks["surjectivity"]
    via: dict = {}
    for n in pool_N:
        x, how = _surjective_class(E, n, pool_M)
        via[how] = via.get(how, 0) + 1
        sur.record(x is not None and E.value(x) == n, f"no class for {n!r}")
    sur.extra["via"] = via

    prop = checks["properness"]
    principal = {}
    for alpha in range(E.lam):
        x = class_make((alpha,), DefinableFunction.identity(1))
        pre = scn.embed.preimage(E.f[alpha])
        candidates = list(pool_M) + ([pre] if pre is not None else [])
        try:
            in_range = any(classes_equal(E, x, embedding_j(m)) for m in candidates)
        except WitnessNotFound as exc:
            prop.record(False, f"index {alpha}: {exc}")
            continue
        principal[str(alpha)] = E.is_principal(alpha)
        prop.record(in_range == (pre is not None) == principal[str(alpha)], f"index {alpha}")
    prop.extra["principal"] = principal

    for _ in range(b["completeness"]):
        k = rng.randint(1, 2)
        xs = [_random_class(rng, E, pool_M) for _ in range(k)]
        phis = [random_formula(rng, M, _formula_vars(k), 1, 2) for _ in range(rng.randint(2, 3))]

        def conj_holds():
            accepted = [p if los_satisfies(E, p, xs) else Not(p) for p in phis]
            return los_satisfies(E, And(tuple(accepted)), xs)

        guarded(checks["f_completeness"], conj_holds, f"{[str(p) for p in phis]}")

    report = {
        "scenario": scn.name,
        "lambda": E.lam,
        "seed": b["seed"],
        "budgets": {k: v for k, v in b.items() if k != "seed"},
        "embedding": {"verified": E.embedding_verified, "f_injective": E.f_injective},
        "checks": {k: c.as_dict() for k, c in checks.items()},
    }
    failures = sum(c.failures for c in checks.values())
    report["failures"] = failures
    report["passed"] = failures == 0 and E.embedding_verified and E.f_injective
    return report


def dumps_report(report: dict) -> str:
    """Key-sorted JSON, so reports can be compared byte for byte."""
    return json.dumps(report, sort_keys=True, indent=2, default=str) + "\n"


def corrupt(scn: Scenario) -> Scenario:
    """The same scenario with ``f(1)`` overwritten by ``f(0)`` (a negative control)."""
    if scn.lam < 2:
        raise ValueError("need at least two indices to corrupt")
    return replace(scn, name=scn.name + "-corrupted", f=(scn.f[0], scn.f[0]) + scn.f[2:])
