"""Quantifier-free formulas over (Z; +, 1).

Atoms are linear equations ``sum a_i x_i = b`` and modular linear equations
``sum a_i x_i = b mod d``.  Formulas are kept in conjunctive normal form and
every atom is stored in a normalized representative, so structural equality
of two formulas is meaningful.

Normalization rules:

* linear atoms divide out the gcd of their coefficients (or collapse to
  TRUE/FALSE when that gcd does not divide the constant), and the first
  coefficient is made positive;
* modular atoms reduce coefficients and constant into ``[0, d)`` and divide
  out ``gcd(coefficients, d)``; ``d == 1`` collapses to TRUE.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import reduce
from math import gcd
from typing import Iterable, Mapping, Union

__all__ = [
    "LinearEquation",
    "ModularEquation",
    "Literal",
    "Clause",
    "Formula",
    "ParseError",
    "make_linear",
    "make_modular",
    "var_key",
    "parse_formula",
    "parse_atom_list",
    "format_formula",
    "evaluate",
    "standardize",
    "introduce_quantifiers",
    "scale_variables",
    "substitute",
    "rename",
    "conjoin",
    "negate_clause",
    "TRUE",
    "FALSE",
]


def var_key(name: str):
    """Natural sort key: ``x2`` sorts before ``x10``."""
    return tuple(int(p) if p.isdigit() else p for p in re.split(r"(\d+)", name))


def _sorted_coeffs(coeffs: Mapping[str, int]) -> tuple[tuple[str, int], ...]:
    return tuple(sorted(((v, c) for v, c in coeffs.items() if c != 0), key=lambda vc: var_key(vc[0])))


@dataclass(frozen=True)
class LinearEquation:
    """``sum coeffs[v] * v = constant``.  Build with :func:`make_linear`."""

    coeffs: tuple[tuple[str, int], ...]
    constant: int

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.coeffs)

    def lhs(self, assignment: Mapping[str, int]) -> int:
        return sum(c * assignment[v] for v, c in self.coeffs)

    def holds(self, assignment: Mapping[str, int]) -> bool:
        return self.lhs(assignment) == self.constant

    def __str__(self) -> str:
        return f"{_format_linexpr(self.coeffs)} = {self.constant}"


@dataclass(frozen=True)
class ModularEquation:
    """``sum coeffs[v] * v = constant mod modulus``.  Build with :func:`make_modular`."""

    coeffs: tuple[tuple[str, int], ...]
    constant: int
    modulus: int

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.coeffs)

    def lhs(self, assignment: Mapping[str, int]) -> int:
        return sum(c * assignment[v] for v, c in self.coeffs)

    def holds(self, assignment: Mapping[str, int]) -> bool:
        return (self.lhs(assignment) - self.constant) % self.modulus == 0

    def __str__(self) -> str:
        return f"{_format_linexpr(self.coeffs)} = {self.constant} mod {self.modulus}"


Atom = Union[LinearEquation, ModularEquation]


def make_linear(coeffs: Mapping[str, int], constant: int) -> Atom | bool:
    """Normalized linear atom, or a bool when it is constant."""
    items = _sorted_coeffs(coeffs)
    if not items:
        return constant == 0
    g = reduce(gcd, (abs(c) for _, c in items))
    if constant % g:
        return False
    if items[0][1] < 0:
        g = -g
    return LinearEquation(tuple((v, c // g) for v, c in items), constant // g)


def make_modular(coeffs: Mapping[str, int], constant: int, modulus: int) -> Atom | bool:
    """Normalized modular atom, or a bool when it is constant."""
    if modulus <= 0:
        raise ValueError(f"modulus must be positive, got {modulus}")
    items = [(v, c % modulus) for v, c in _sorted_coeffs(coeffs)]
    items = [(v, c) for v, c in items if c]
    constant %= modulus
    g = reduce(gcd, (c for _, c in items), modulus)
    if constant % g:
        return False
    modulus //= g
    if modulus == 1:
        return True
    items = [(v, c // g) for v, c in items]
    return ModularEquation(tuple(items), constant // g, modulus)


@dataclass(frozen=True)
class Literal:
    atom: Atom
    positive: bool = True

    @property
    def is_linear(self) -> bool:
        return isinstance(self.atom, LinearEquation)

    def holds(self, assignment: Mapping[str, int]) -> bool:
        return self.atom.holds(assignment) == self.positive

    def negated(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    def __str__(self) -> str:
        if self.positive:
            return str(self.atom)
        if isinstance(self.atom, LinearEquation):
            return f"{_format_linexpr(self.atom.coeffs)} != {self.atom.constant}"
        return f"!({self.atom})"


@dataclass(frozen=True)
class Clause:
    """A disjunction of literals; the empty clause is FALSE."""

    literals: tuple[Literal, ...]

    @property
    def positives(self) -> tuple[Literal, ...]:
        return tuple(l for l in self.literals if l.positive)

    @property
    def negatives(self) -> tuple[Literal, ...]:
        return tuple(l for l in self.literals if not l.positive)

    @property
    def is_horn(self) -> bool:
        return len(self.positives) <= 1 and all(l.is_linear for l in self.negatives)

    def holds(self, assignment: Mapping[str, int]) -> bool:
        return any(l.holds(assignment) for l in self.literals)

    def __str__(self) -> str:
        if not self.literals:
            return "FALSE"
        return "(" + " | ".join(str(l) for l in self.literals) + ")"


def _make_clause(items: Iterable[tuple[Atom | bool, bool]]) -> Clause | None:
    """Clause from (atom, polarity) pairs; ``None`` means the clause is TRUE."""
    lits: list[Literal] = []
    seen: set[Literal] = set()
    for atom, positive in items:
        if isinstance(atom, bool):
            if atom == positive:
                return None
            continue
        lit = Literal(atom, positive)
        if lit.negated() in seen:
            return None
        if lit not in seen:
            seen.add(lit)
            lits.append(lit)
    return Clause(tuple(lits))


@dataclass(frozen=True)
class Formula:
    """CNF formula.  ``clauses == ()`` is TRUE; an empty clause makes it FALSE."""

    clauses: tuple[Clause, ...]
    variables: tuple[str, ...] = field(default=())

    @classmethod
    def build(
        cls,
        clauses: Iterable[Iterable[tuple[Atom | bool, bool]] | Clause],
        variables: Iterable[str] = (),
    ) -> "Formula":
        out: list[Clause] = []
        seen: set[Clause] = set()
        for c in clauses:
            if isinstance(c, Clause):
                c = ((l.atom, l.positive) for l in c.literals)
            clause = _make_clause(c)
            if clause is None or clause in seen:
                continue
            if not clause.literals:
                out, seen = [clause], {clause}
                break
            seen.add(clause)
            out.append(clause)
        names = set(variables)
        for clause in out:
            for lit in clause.literals:
                names.update(lit.atom.variables)
        return cls(tuple(out), tuple(sorted(names, key=var_key)))

    @property
    def is_false(self) -> bool:
        return any(not c.literals for c in self.clauses)

    @property
    def is_true(self) -> bool:
        return not self.clauses

    @property
    def is_standard(self) -> bool:
        return all(l.positive or l.is_linear for c in self.clauses for l in c.literals)

    def atoms(self) -> list[Atom]:
        seen: dict[Atom, None] = {}
        for c in self.clauses:
            for l in c.literals:
                seen.setdefault(l.atom, None)
        return list(seen)

    def with_variables(self, variables: Iterable[str]) -> "Formula":
        return Formula.build(self.clauses, tuple(self.variables) + tuple(variables))

    def __str__(self) -> str:
        return format_formula(self)


TRUE = Formula((), ())
FALSE = Formula((Clause(()),), ())


def conjoin(*formulas: Formula) -> Formula:
    clauses = [c for f in formulas for c in f.clauses]
    names = [v for f in formulas for v in f.variables]
    return Formula.build(clauses, names)


# --------------------------------------------------------------------------
# printing


def _format_linexpr(coeffs: tuple[tuple[str, int], ...]) -> str:
    if not coeffs:
        return "0"
    parts = []
    for i, (v, c) in enumerate(coeffs):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        term = v if mag == 1 else f"{mag}*{v}"
        if i == 0:
            parts.append(term if sign == "+" else f"-{term}")
        else:
            parts.append(f"{sign} {term}")
    return " ".join(parts)


def format_formula(phi: Formula) -> str:
    if phi.is_false:
        return "FALSE"
    if phi.is_true:
        return "TRUE"
    return " & ".join(str(c) for c in phi.clauses)


# --------------------------------------------------------------------------
# parsing


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.column = col


_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>!=|[()&|!=+\-*;,]))"
)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while True:
            m = _TOKEN.match(text, pos)
            if not m:
                rest = text[pos:]
                if rest.strip():
                    raise ParseError(f"unexpected character {rest.strip()[0]!r}", text, pos + len(rest) - len(rest.lstrip()))
                break
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0
        self.names: list[str] = []

    def peek(self, offset: int = 0):
        j = self.i + offset
        return self.tokens[j] if j < len(self.tokens) else ("eof", "", len(self.text))

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.next()
        if val != value or kind == "eof":
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", self.text, pos)

    def at(self, value: str) -> bool:
        kind, val, _ = self.peek()
        return kind != "eof" and val == value

    def error(self, message: str):
        _, val, pos = self.peek()
        raise ParseError(f"{message}, found {val or 'end of input'!r}", self.text, pos)

    # formula := clause ("&" clause)*
    def formula(self) -> list[list[tuple[Atom | bool, bool]]]:
        clauses = [self.clause()]
        while self.at("&"):
            self.next()
            clauses.append(self.clause())
        return clauses

    def clause(self) -> list[tuple[Atom | bool, bool]]:
        if self.at("(") and self._paren_is_clause():
            self.next()
            lits = [self.literal()]
            while self.at("|"):
                self.next()
                lits.append(self.literal())
            self.expect(")")
            return lits
        return [self.literal()]

    def _paren_is_clause(self) -> bool:
        # "(" opens a clause unless it only wraps a linear expression, e.g. "(x) = 1"
        depth = 0
        for j in range(self.i, len(self.tokens)):
            val = self.tokens[j][1]
            if val == "(":
                depth += 1
            elif val == ")":
                depth -= 1
                if depth == 0:
                    nxt = self.tokens[j + 1][1] if j + 1 < len(self.tokens) else ""
                    return nxt not in ("=", "!=", "+", "-", "*")
        return True

    def literal(self) -> tuple[Atom | bool, bool]:
        kind, val, _ = self.peek()
        if kind == "ident" and val in ("TRUE", "FALSE"):
            self.next()
            return (val == "TRUE", True)
        if self.at("!"):
            self.next()
            atom, positive = self.literal()
            return atom, not positive
        if self.at("(") and self._paren_is_clause():
            self.next()
            lit = self.literal()
            self.expect(")")
            return lit
        return self.atom()

    def atom(self) -> tuple[Atom | bool, bool]:
        lhs, lconst = self.linexpr()
        kind, op, pos = self.next()
        if op not in ("=", "!="):
            raise ParseError(f"expected '=' or '!=', found {op or 'end of input'!r}", self.text, pos)
        rhs, rconst = self.linexpr()
        coeffs = dict(lhs)
        for v, c in rhs.items():
            coeffs[v] = coeffs.get(v, 0) - c
        constant = rconst - lconst
        positive = op == "="
        kind, val, pos = self.peek()
        if kind == "ident" and val == "mod":
            self.next()
            kind, val, pos = self.next()
            if kind != "int":
                raise ParseError("modulus must be a positive integer", self.text, pos)
            modulus = int(val)
            if modulus <= 0:
                raise ParseError("modulus must be positive", self.text, pos)
            return make_modular(coeffs, constant, modulus), positive
        return make_linear(coeffs, constant), positive

    def linexpr(self) -> tuple[dict[str, int], int]:
        coeffs: dict[str, int] = {}
        constant = 0
        sign = 1
        if self.at("-"):
            self.next()
            sign = -1
        elif self.at("+"):
            self.next()
        while True:
            v, c = self.term()
            if v is None:
                constant += sign * c
            else:
                coeffs[v] = coeffs.get(v, 0) + sign * c
            if self.at("+"):
                sign = 1
            elif self.at("-"):
                sign = -1
            else:
                return coeffs, constant
            self.next()

    def term(self) -> tuple[str | None, int]:
        kind, val, pos = self.next()
        if kind == "int":
            if self.at("*"):
                self.next()
                kind2, name, pos2 = self.next()
                if kind2 != "ident" or name in ("mod", "TRUE", "FALSE"):
                    raise ParseError("expected variable after '*'", self.text, pos2)
                self.names.append(name)
                return name, int(val)
            return None, int(val)
        if kind == "ident" and val not in ("mod", "TRUE", "FALSE"):
            self.names.append(val)
            return val, 1
        if val == "(":
            coeffs, constant = self.linexpr()
            self.expect(")")
            if constant or len(coeffs) != 1:
                raise ParseError("parenthesized terms must be a single variable", self.text, pos)
            (v, c), = coeffs.items()
            return v, c
        raise ParseError(f"expected a term, found {val or 'end of input'!r}", self.text, pos)


def parse_formula(text: str, variables: Iterable[str] = ()) -> Formula:
    """Parse the ASCII formula language into a normalized CNF :class:`Formula`.

    >>> str(parse_formula("(2*x + 4*y = 6) & (x != 0)"))
    '(x + 2*y = 3) & (x != 0)'
    """
    p = _Parser(text)
    clauses = p.formula()
    if p.peek()[0] != "eof":
        p.error("unexpected trailing input")
    return Formula.build(clauses, [*variables, *p.names])


def parse_atom_list(text: str) -> list[Atom]:
    """Parse ``"x+y=2; x-y=0"`` into positive atoms; constant-true atoms are dropped."""
    atoms: list[Atom] = []
    for chunk in (c for c in re.split(r"[;\n]", text) if c.strip()):
        p = _Parser(chunk)
        atom, positive = p.atom()
        if p.peek()[0] != "eof":
            p.error("unexpected trailing input")
        if not positive:
            raise ParseError("negated atoms are not allowed here", chunk, 0)
        if atom is True:
            continue
        if atom is False:
            atoms.append(LinearEquation((), 1))
            continue
        atoms.append(atom)
    return atoms


# --------------------------------------------------------------------------
# semantics and transformations


def evaluate(phi: Formula, assignment: Mapping[str, int]) -> bool:
    missing = [v for v in phi.variables if v not in assignment]
    if missing:
        raise KeyError(f"assignment is missing variable(s): {', '.join(missing)}")
    return all(c.holds(assignment) for c in phi.clauses)


def _map_atoms(phi: Formula, fn, variables: Iterable[str] | None = None) -> Formula:
    """Rebuild ``phi`` applying ``fn(atom) -> list of (atom|bool, polarity-flip)``."""
    clauses = []
    for c in phi.clauses:
        items = []
        for lit in c.literals:
            for atom, positive in fn(lit.atom, lit.positive):
                items.append((atom, positive))
        clauses.append(items)
    return Formula.build(clauses, phi.variables if variables is None else variables)


def standardize(phi: Formula) -> Formula:
    """Replace every negated modular atom by the disjunction of the other residues."""

    def expand(atom, positive):
        if positive or isinstance(atom, LinearEquation):
            return [(atom, positive)]
        coeffs = dict(atom.coeffs)
        return [
            (make_modular(coeffs, r, atom.modulus), True)
            for r in range(atom.modulus)
            if r != atom.constant
        ]

    return _map_atoms(phi, expand)


def _fresh_names(taken: Iterable[str], prefix: str = "_k"):
    taken = set(taken)
    i = 0
    while True:
        i += 1
        name = f"{prefix}{i}"
        if name not in taken:
            yield name


def introduce_quantifiers(phi: Formula) -> Formula:
    """Linearize every modular atom with its own fresh integer variable.

    ``sum a_i x_i = b mod c`` becomes ``sum a_i x_i - c*k = b``.  The fresh
    variables are the names present in the result but not in ``phi``.
    """
    if not phi.is_standard:
        phi = standardize(phi)
    fresh = _fresh_names(phi.variables)
    new_vars = list(phi.variables)

    def linearize(atom, positive):
        if isinstance(atom, LinearEquation):
            return [(atom, positive)]
        k = next(fresh)
        new_vars.append(k)
        coeffs = dict(atom.coeffs)
        coeffs[k] = -atom.modulus
        return [(make_linear(coeffs, atom.constant), positive)]

    clauses = []
    for c in phi.clauses:
        clauses.append([pair for lit in c.literals for pair in linearize(lit.atom, lit.positive)])
    return Formula.build(clauses, new_vars)


def substitute(
    phi: Formula,
    mapping: Mapping[str, tuple[Mapping[str, int], int]],
    variables: Iterable[str] | None = None,
) -> Formula:
    """Substitute affine expressions ``v -> (coeffs, constant)`` for variables."""

    def sub(atom, positive):
        coeffs: dict[str, int] = {}
        shift = 0
        for v, c in atom.coeffs:
            if v in mapping:
                expr, const = mapping[v]
                for w, d in expr.items():
                    coeffs[w] = coeffs.get(w, 0) + c * d
                shift += c * const
            else:
                coeffs[v] = coeffs.get(v, 0) + c
        if isinstance(atom, LinearEquation):
            return [(make_linear(coeffs, atom.constant - shift), positive)]
        return [(make_modular(coeffs, atom.constant - shift, atom.modulus), positive)]

    if variables is None:
        kept = [v for v in phi.variables if v not in mapping]
        for expr, _ in mapping.values():
            kept.extend(expr)
        variables = kept
    return _map_atoms(phi, sub, variables)


def rename(phi: Formula, names: Mapping[str, str]) -> Formula:
    return substitute(phi, {v: ({w: 1}, 0) for v, w in names.items()})


def scale_variables(phi: Formula, lam: int) -> Formula:
    """Formula satisfied by ``a`` exactly when ``lam * a`` satisfies ``phi``."""
    if lam == 0:
        raise ValueError("scaling factor must be nonzero")
    return substitute(phi, {v: ({v: lam}, 0) for v in phi.variables}, phi.variables)


def negate_clause(clause: Clause, variables: Iterable[str] = ()) -> Formula:
    """Standard CNF for the negation of a single clause."""
    phi = Formula.build([[(l.atom, not l.positive)] for l in clause.literals], variables)
    return standardize(phi)
