"""Terms and formulas as immutable trees, with an s-expression reader and printer.

Grammar (prefix s-expressions)::

    term    := name | (+ term term) | (- term) | (scl RAT term) | (fn term ...)
    formula := (< term term) | (= term term) | (rel term ...)
             | (not formula) | (and formula ...) | (or formula ...)
             | (exists name formula)

A bare name is a constant when it is ``0`` or listed in ``constants``,
otherwise a variable.  ``RAT`` is an integer or ``p/q``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    """Function application; ``+`` and ``-`` are ordinary binary/unary symbols."""

    fn: str
    args: tuple

    def __str__(self):
        return f"({self.fn} {' '.join(map(str, self.args))})"


@dataclass(frozen=True)
class Scale:
    q: Fraction
    arg: "Term"

    def __str__(self):
        return f"(scl {format_rational(self.q)} {self.arg})"


Term = Union[Var, Const, App, Scale]


# ---------------------------------------------------------------- formulas


@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple

    def __str__(self):
        return f"({self.rel} {' '.join(map(str, self.args))})"


@dataclass(frozen=True)
class Not:
    arg: "Formula"

    def __str__(self):
        return f"(not {self.arg})"


@dataclass(frozen=True)
class And:
    args: tuple

    def __str__(self):
        return "(and" + "".join(" " + str(a) for a in self.args) + ")"


@dataclass(frozen=True)
class Or:
    args: tuple

    def __str__(self):
        return "(or" + "".join(" " + str(a) for a in self.args) + ")"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"

    def __str__(self):
        return f"(exists {self.var} {self.body})"


Formula = Union[Atom, Not, And, Or, Exists]

TERM_TYPES = (Var, Const, App, Scale)
FORMULA_TYPES = (Atom, Not, And, Or, Exists)


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def to_str(node) -> str:
    return str(node)


# ---------------------------------------------------------------- reader

_TOKEN = re.compile(r"\(|\)|[^\s()]+")
_RATIONAL = re.compile(r"[+-]?\d+(?:/\d+)?$")
_KEYWORDS = {"and", "or", "not", "exists", "scl"}


def _tokenize(src: str):
    return [(m.group(), m.start()) for m in _TOKEN.finditer(src)]


class _Reader:
    def __init__(self, src: str, constants: Iterable[str]):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0
        self.constants = frozenset(constants) | {"0"}

    def peek(self):
        if self.i >= len(self.tokens):
            raise ParseError("unexpected end of input", len(self.src))
        return self.tokens[self.i]

    def take(self, expected=None):
        tok, pos = self.peek()
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", pos)
        self.i += 1
        return tok, pos

    def done(self):
        if self.i != len(self.tokens):
            raise ParseError("trailing input", self.tokens[self.i][1])

    def name(self):
        tok, pos = self.take()
        if tok in "()" or tok in _KEYWORDS:
            raise ParseError(f"expected a name, found {tok!r}", pos)
        return tok, pos

    def term(self) -> Term:
        tok, pos = self.peek()
        if tok == ")":
            raise ParseError("unexpected ')'", pos)
        if tok != "(":
            self.i += 1
            if tok in _KEYWORDS:
                raise ParseError(f"keyword {tok!r} used as a term", pos)
            if tok in self.constants:
                return Const(tok)
            if _RATIONAL.match(tok):
                raise ParseError(f"numeric literal {tok!r} outside scl", pos)
            return Var(tok)
        self.take("(")
        head, hpos = self.take()
        if head in "()":
            raise ParseError("expected a function symbol", hpos)
        if head == "scl":
            qtok, qpos = self.take()
            if not _RATIONAL.match(qtok):
                raise ParseError(f"bad rational {qtok!r}", qpos)
            try:
                q = Fraction(qtok)
            except ZeroDivisionError:
                raise ParseError("zero denominator", qpos) from None
            arg = self.term()
            self.take(")")
            return Scale(q, arg)
        if head in _KEYWORDS:
            raise ParseError(f"keyword {head!r} in term position", hpos)
        args = []
        while self.peek()[0] != ")":
            args.append(self.term())
        self.take(")")
        if head == "+" and len(args) != 2:
            raise ParseError("'+' takes two arguments", hpos)
        if head == "-" and len(args) != 1:
            raise ParseError("'-' takes one argument", hpos)
        if not args:
            raise ParseError(f"application of {head!r} to no arguments", hpos)
        return App(head, tuple(args))

    def formula(self) -> Formula:
        _, pos = self.take("(")
        head, hpos = self.take()
        if head in "()":
            raise ParseError("expected a connective or relation", hpos)
        if head == "not":
            arg = self.formula()
            self.take(")")
            return Not(arg)
        if head in ("and", "or"):
            args = []
            while self.peek()[0] != ")":
                args.append(self.formula())
            self.take(")")
            return (And if head == "and" else Or)(tuple(args))
        if head == "exists":
            var, vpos = self.name()
            if var in self.constants:
                raise ParseError(f"cannot bind constant {var!r}", vpos)
            body = self.formula()
            self.take(")")
            return Exists(var, body)
        if head == "scl":
            raise ParseError("scl in formula position", hpos)
        args = []
        while self.peek()[0] != ")":
            args.append(self.term())
        self.take(")")
        if head in ("<", "=") and len(args) != 2:
            raise ParseError(f"{head!r} takes two arguments", hpos)
        if not args:
            raise ParseError(f"relation {head!r} with no arguments", hpos)
        return Atom(head, tuple(args))


def parse_term(src: str, constants: Iterable[str] = ()) -> Term:
    r = _Reader(src, constants)
    t = r.term()
    r.done()
    return t


def parse_formula(src: str, constants: Iterable[str] = ()) -> Formula:
    r = _Reader(src, constants)
    f = r.formula()
    r.done()
    return f


# ---------------------------------------------------------------- traversal


def is_term(node) -> bool:
    return isinstance(node, TERM_TYPES)


def children(node) -> tuple:
    if isinstance(node, (App, Atom, And, Or)):
        return node.args
    if isinstance(node, (Scale, Not)):
        return (node.arg,)
    if isinstance(node, Exists):
        return (node.body,)
    return ()


def depth(node) -> int:
    """Height of the whole tree, counting term nodes; a variable has depth 1."""
    kids = children(node)
    return 1 + (max(map(depth, kids)) if kids else 0)


def free_vars(node) -> frozenset:
    if isinstance(node, Var):
        return frozenset([node.name])
    if isinstance(node, Exists):
        return free_vars(node.body) - {node.var}
    out = frozenset()
    for c in children(node):
        out |= free_vars(c)
    return out


def constants_of(node) -> frozenset:
    if isinstance(node, Const):
        return frozenset([node.name])
    out = frozenset()
    for c in children(node):
        out |= constants_of(c)
    return out


def is_quantifier_free(f) -> bool:
    if isinstance(f, Exists):
        return False
    return all(is_quantifier_free(c) for c in children(f) if not is_term(c))


def subformulas(f) -> list:
    """``f`` and every formula below it, each once, parents before children."""
    out, seen, stack = [], set(), [f]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        out.append(g)
        stack.extend(reversed([c for c in children(g) if not is_term(c)]))
    return out


def atoms(f) -> list:
    return [g for g in subformulas(f) if isinstance(g, Atom)]


def substitute(node, mapping: Mapping[str, Term]):
    """Replace free variables by terms (no capture check beyond the bound name)."""
    if isinstance(node, Var):
        return mapping.get(node.name, node)
    if isinstance(node, Const):
        return node
    if isinstance(node, App):
        return App(node.fn, tuple(substitute(a, mapping) for a in node.args))
    if isinstance(node, Scale):
        return Scale(node.q, substitute(node.arg, mapping))
    if isinstance(node, Atom):
        return Atom(node.rel, tuple(substitute(a, mapping) for a in node.args))
    if isinstance(node, Not):
        return Not(substitute(node.arg, mapping))
    if isinstance(node, (And, Or)):
        return type(node)(tuple(substitute(a, mapping) for a in node.args))
    if isinstance(node, Exists):
        inner = {k: v for k, v in mapping.items() if k != node.var}
        return Exists(node.var, substitute(node.body, inner))
    raise TypeError(f"not a term or formula: {node!r}")


def rename_vars(node, mapping: Mapping[str, str]):
    return substitute(node, {k: Var(v) for k, v in mapping.items()})
