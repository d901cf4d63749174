"""Structure files: INI text with a ``[structure]`` header naming the profile.

Finite profile::

    [structure]
    profile = finite
    size = 3

    [constants]
    c0 = 0

    [function f]
    arity = 1
    0 = 1
    1 = 2
    2 = 0

    [relation R]
    arity = 1
    rows = 0; 2

Function table keys are comma-separated argument tuples (``()`` for a
nullary symbol); relation rows are tuples separated by ``;``.

Ordered vector space profile::

    [structure]
    profile = ordered-vector-space
    basis = one, eps

:func:`dump_structure` writes the canonical form, and reading it back
gives an equal structure.
"""

from __future__ import annotations

import configparser
from itertools import product as cartesian

from cohult.logic.structures import FiniteStructure, OrderedVectorSpace, Structure

FINITE = "finite"
SYMBOLIC = "ordered-vector-space"


class StructureFileError(ValueError):
    pass


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    cp.optionxform = str
    return cp


def _tuple(text: str) -> tuple[int, ...]:
    text = text.strip()
    if text in ("", "()"):
        return ()
    return tuple(int(x) for x in text.split(","))


def _fmt_tuple(t) -> str:
    return ",".join(map(str, t)) if t else "()"


def loads_structure(text: str) -> Structure:
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise StructureFileError(str(exc)) from exc
    if not cp.has_section("structure"):
        raise StructureFileError("missing [structure] section")
    head = cp["structure"]
    profile = head.get("profile", "").strip()
    if profile == SYMBOLIC:
        basis = [b.strip() for b in head.get("basis", "").split(",") if b.strip()]
        return OrderedVectorSpace(basis)
    if profile != FINITE:
        raise StructureFileError(f"unknown profile {profile!r}")
    try:
        size = int(head["size"])
        constants = {k: int(v) for k, v in cp["constants"].items()} if cp.has_section("constants") else {}
        functions, relations = {}, {}
        for sec in cp.sections():
            kind, _, name = sec.partition(" ")
            if kind == "function":
                body = dict(cp[sec])
                arity = int(body.pop("arity"))
                functions[name] = (arity, {_tuple(k): int(v) for k, v in body.items()})
            elif kind == "relation":
                arity = int(cp[sec]["arity"])
                rows = [r for r in cp[sec].get("rows", "").split(";") if r.strip()]
                relations[name] = (arity, [_tuple(r) for r in rows])
            elif sec not in ("structure", "constants"):
                raise StructureFileError(f"unknown section [{sec}]")
        return FiniteStructure(size, constants, functions, relations)
    except (KeyError, ValueError) as exc:
        if isinstance(exc, StructureFileError):
            raise
        raise StructureFileError(str(exc)) from exc


def dumps_structure(S: Structure) -> str:
    lines = ["[structure]"]
    if isinstance(S, OrderedVectorSpace):
        lines += [f"profile = {SYMBOLIC}", f"basis = {', '.join(S.basis)}", ""]
        return "\n".join(lines)
    if not isinstance(S, FiniteStructure):
        raise TypeError(f"cannot serialize {S!r}")
    lines += [f"profile = {FINITE}", f"size = {S.size}", ""]
    if S.constants:
        lines.append("[constants]")
        lines += [f"{k} = {v}" for k, v in sorted(S.constants.items())]
        lines.append("")
    for name, (arity, table) in sorted(S.functions.items()):
        lines += [f"[function {name}]", f"arity = {arity}"]
        for args in cartesian(range(S.size), repeat=arity):
            lines.append(f"{_fmt_tuple(args)} = {table[args]}")
        lines.append("")
    for name, (arity, rows) in sorted(S.relations.items()):
        lines += [f"[relation {name}]", f"arity = {arity}"]
        lines.append("rows = " + "; ".join(_fmt_tuple(r) for r in sorted(rows)))
        lines.append("")
    return "\n".join(lines)


def load_structure(path) -> Structure:
    with open(path, encoding="utf-8") as fh:
        return loads_structure(fh.read())


def dump_structure(S: Structure, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_structure(S))
