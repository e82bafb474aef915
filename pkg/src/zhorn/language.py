"""Constraint languages and the line-oriented instance file format.

::

    # comments start with '#'
    relation S/2 := (x1 = 1 mod 4 | x2 = 0) & (x2 = 1 mod 4 | x2 = 0)
    relation ONE/1 := (x1 = 1)
    constraints
    S(a, b)
    ONE(a)
    +(a, a, b)

A relation body is a formula over ``x1..xARITY`` and may continue on the
following lines.  The ternary relation ``+`` (``x1 + x2 = x3``) is always
available.  A file with neither ``relation`` nor ``constraints`` lines is a
raw formula.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .formula import Formula, ParseError, conjoin, format_formula, parse_formula, rename, standardize

__all__ = [
    "PLUS",
    "params",
    "InputError",
    "Relation",
    "ConstraintLanguage",
    "Constraint",
    "ParsedInput",
    "parse_input",
    "format_language",
    "format_instance",
    "instantiate",
]

PLUS = "+"


class InputError(ValueError):
    """Malformed language, instance, or relation reference."""


def params(arity: int) -> tuple[str, ...]:
    return tuple(f"x{i}" for i in range(1, arity + 1))


@dataclass(frozen=True)
class Relation:
    name: str
    arity: int
    formula: Formula

    def __post_init__(self):
        extra = set(self.formula.variables) - set(params(self.arity))
        if extra:
            raise InputError(
                f"relation {self.name}/{self.arity} uses variables outside x1..x{self.arity}: "
                + ", ".join(sorted(extra))
            )


_PLUS_RELATION = Relation(PLUS, 3, parse_formula("x1 + x2 - x3 = 0", params(3)))


@dataclass(frozen=True)
class ConstraintLanguage:
    """Named relations with standard quantifier-free definitions; ``+`` is implicit."""

    relations: tuple[Relation, ...] = ()

    @classmethod
    def from_formulas(cls, definitions: Mapping[str, tuple[int, Formula | str]]) -> "ConstraintLanguage":
        rels = []
        for name, (arity, phi) in definitions.items():
            if isinstance(phi, str):
                phi = parse_formula(phi)
            rels.append(Relation(name, arity, standardize(phi.with_variables(params(arity)))))
        return cls(tuple(rels))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.relations)

    def __getitem__(self, name: str) -> Relation:
        if name == PLUS:
            return _PLUS_RELATION
        for r in self.relations:
            if r.name == name:
                return r
        raise InputError(f"unknown relation {name!r}")

    def __contains__(self, name: str) -> bool:
        return name == PLUS or name in self.names

    def replace(self, formulas: Mapping[str, Formula]) -> "ConstraintLanguage":
        return ConstraintLanguage(
            tuple(
                Relation(r.name, r.arity, formulas[r.name].with_variables(params(r.arity)))
                if r.name in formulas
                else r
                for r in self.relations
            )
        )


Constraint = tuple[str, tuple[str, ...]]


@dataclass
class ParsedInput:
    language: ConstraintLanguage = field(default_factory=ConstraintLanguage)
    constraints: list[Constraint] = field(default_factory=list)
    formula: Formula | None = None


_RELATION = re.compile(r"^relation\s+([^\s/]+)\s*/\s*(\d+)\s*:=\s*(.*)$")
_CONSTRAINT = re.compile(r"^([^\s(]+)\s*\(([^)]*)\)\s*$")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def parse_input(text: str) -> ParsedInput:
    lines = [(n, ln.split("#", 1)[0].strip()) for n, ln in enumerate(text.splitlines(), 1)]
    lines = [(n, ln) for n, ln in lines if ln]
    if not any(ln.startswith("relation") or ln == "constraints" for _, ln in lines):
        body = "\n".join(ln for _, ln in lines)
        try:
            return ParsedInput(formula=parse_formula(body))
        except ParseError as e:
            raise InputError(str(e)) from None

    out = ParsedInput()
    pending: list[tuple[int, str, int, list[str]]] = []
    in_constraints = False
    for n, ln in lines:
        if ln == "constraints":
            in_constraints = True
            continue
        m = _RELATION.match(ln)
        if m:
            if in_constraints:
                raise InputError(f"line {n}: relation defined after the constraints section")
            name, arity = m.group(1), int(m.group(2))
            if name == PLUS or any(p[1] == name for p in pending):
                raise InputError(f"line {n}: relation {name!r} defined twice")
            pending.append((n, name, arity, [m.group(3)]))
        elif in_constraints:
            c = _CONSTRAINT.match(ln)
            if not c:
                raise InputError(f"line {n}: expected NAME(v1,...,vk), got {ln!r}")
            args = tuple(a.strip() for a in c.group(2).split(",")) if c.group(2).strip() else ()
            bad = [a for a in args if not _IDENT.match(a)]
            if bad:
                raise InputError(f"line {n}: invalid variable name {bad[0]!r}")
            out.constraints.append((c.group(1), args))
        elif pending:
            pending[-1][3].append(ln)
        else:
            raise InputError(f"line {n}: expected a relation definition, got {ln!r}")

    rels = []
    for n, name, arity, body in pending:
        try:
            phi = parse_formula("\n".join(body), params(arity))
        except ParseError as e:
            raise InputError(f"relation {name} (line {n}): {e}") from None
        rels.append(Relation(name, arity, standardize(phi)))
    out.language = ConstraintLanguage(tuple(rels))
    for name, args in out.constraints:
        check_constraint(out.language, name, args)
    return out


def check_constraint(lang: ConstraintLanguage, name: str, args: Sequence[str]) -> Relation:
    rel = lang[name]
    if len(args) != rel.arity:
        raise InputError(f"relation {name} has arity {rel.arity}, applied to {len(args)} variable(s)")
    return rel


def instantiate(lang: ConstraintLanguage, constraints: Iterable[Constraint]) -> Formula:
    """Conjunction of the relation definitions applied to their variable tuples."""
    parts = []
    for name, args in constraints:
        rel = check_constraint(lang, name, args)
        parts.append(rename(rel.formula, dict(zip(params(rel.arity), args))).with_variables(args))
    return conjoin(*parts) if parts else Formula.build([])


def format_language(lang: ConstraintLanguage) -> str:
    return "\n".join(f"relation {r.name}/{r.arity} := {format_formula(r.formula)}" for r in lang.relations)


def format_instance(lang: ConstraintLanguage, constraints: Iterable[Constraint]) -> str:
    body = [format_language(lang), "constraints"]
    body += [f"{name}({', '.join(args)})" for name, args in constraints]
    return "\n".join(line for line in body if line) + "\n"
