"""Polynomial-time satisfiability for Horn formulas over (Z; +) with parameters.

The solver is positive unit resolution: unit positive clauses form a pool
``U`` of linear equations; a negative literal ``not phi`` is deleted
everywhere as soon as ``U`` implies ``phi`` over the integers; emptied
clauses mean UNSAT and clauses reduced to a single positive literal join
``U``.  Feasibility of ``U`` is re-checked after every unit addition.  On the
SAT exit each surviving clause still holds a disequality that ``U`` does not
entail, and :func:`construct_witness` satisfies all of them at once.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .formula import Clause, Formula, LinearEquation, Literal, introduce_quantifiers, standardize, var_key
from .language import Constraint, ConstraintLanguage, instantiate
from .lattice import IntMatrix, rank_rational, solve_diophantine
from .presburger import equation_rows, lattice_witness

__all__ = [
    "Status",
    "HornResult",
    "NotHornError",
    "is_horn",
    "horn_solve",
    "construct_witness",
    "solve_csp_instance",
]


class Status(str, enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    NOT_HORN = "NOT-HORN"


class NotHornError(ValueError):
    pass


@dataclass
class HornResult:
    status: Status
    assignment: dict[str, int] | None = None
    full_assignment: dict[str, int] | None = None
    units: list[LinearEquation] = field(default_factory=list)
    deleted: int = 0
    rounds: int = 0

    @property
    def sat(self) -> bool:
        return self.status is Status.SAT


def is_horn(phi: Formula) -> bool:
    """Horn test on the standard form (negated modular atoms are expanded first)."""
    return all(c.is_horn for c in standardize(phi).clauses)


class _UnitPool:
    """Unit equations with an integer-implication test against them."""

    def __init__(self, variables: Sequence[str]):
        self.variables = list(variables)
        self.index = {v: i for i, v in enumerate(self.variables)}
        self.units: list[LinearEquation] = []
        self._rows: list[list[int]] = []
        self._rank = 0
        self.feasible = True

    def _row(self, atom: LinearEquation) -> list[int]:
        row = [0] * (len(self.variables) + 1)
        for v, c in atom.coeffs:
            row[self.index[v]] = c
        row[-1] = atom.constant
        return row

    def add(self, atoms: Iterable[LinearEquation]) -> bool:
        for a in atoms:
            self.units.append(a)
            self._rows.append(self._row(a))
        rows, rhs, _ = equation_rows(self.units, (), self.variables)
        self.feasible = solve_diophantine(IntMatrix.from_rows(rows, len(self.variables)), rhs) is not None
        self._rank = rank_rational(self._rows)
        return self.feasible

    def implies(self, atom: LinearEquation) -> bool:
        if not self.feasible:
            return True
        return rank_rational(self._rows + [self._row(atom)]) == self._rank


def horn_solve(phi: Formula) -> HornResult:
    """Decide a Horn formula and build a witness on SAT.

    Modular positive literals are linearized first, one fresh variable per
    occurrence.  ``assignment`` covers the variables of ``phi``;
    ``full_assignment`` also covers the fresh ones.
    """
    std = standardize(phi)
    if not all(c.is_horn for c in std.clauses):
        raise NotHornError("formula is not Horn")
    lin = introduce_quantifiers(std)
    if lin.is_false:
        return HornResult(Status.UNSAT)

    pool = _UnitPool(lin.variables)
    active: list[tuple[list[LinearEquation], LinearEquation | None]] = []
    initial_units = []
    for clause in lin.clauses:
        negs = [l.atom for l in clause.negatives]
        pos = clause.positives[0].atom if clause.positives else None
        if negs:
            active.append((negs, pos))
        else:
            initial_units.append(pos)
    if not pool.add(initial_units):
        return HornResult(Status.UNSAT, units=pool.units)

    deleted = rounds = 0
    not_implied: set[LinearEquation] = set()  # valid until U grows
    while True:
        rounds += 1
        candidates = list(dict.fromkeys(a for negs, _ in active for a in negs))
        implied = set()
        for atom in candidates:
            if atom in not_implied:
                continue
            if pool.implies(atom):
                implied.add(atom)
            else:
                not_implied.add(atom)
        if not implied:
            break
        remaining = []
        new_units = []
        for negs, pos in active:
            kept = [a for a in negs if a not in implied]
            deleted += len(negs) - len(kept)
            if kept:
                remaining.append((kept, pos))
            elif pos is None:
                return HornResult(Status.UNSAT, units=pool.units, deleted=deleted, rounds=rounds)
            else:
                new_units.append(pos)
        active = remaining
        if new_units:
            not_implied.clear()
            if not pool.add(new_units):
                return HornResult(Status.UNSAT, units=pool.units, deleted=deleted, rounds=rounds)

    residual = [Clause(tuple(Literal(a, False) for a in negs)) for negs, _ in active]
    full = construct_witness(pool.units, residual, lin.variables)
    return HornResult(
        Status.SAT,
        assignment={v: full[v] for v in std.variables},
        full_assignment=full,
        units=pool.units,
        deleted=deleted,
        rounds=rounds,
    )


def construct_witness(
    units: Sequence[LinearEquation],
    residual: Sequence[Clause],
    variables: Iterable[str] = (),
) -> dict[str, int]:
    """Assignment satisfying ``units`` and at least one disequality per residual clause.

    Residual clauses contribute only their negative linear literals.  Those
    entailed by ``units`` are dropped; every clause must keep at least one.
    """
    names = set(variables)
    for a in units:
        names.update(a.variables)
    for c in residual:
        for l in c.literals:
            names.update(l.atom.variables)
    order = sorted(names, key=var_key)
    rows, rhs, _ = equation_rows(units, (), order)
    lattice = solve_diophantine(IntMatrix.from_rows(rows, len(order)), rhs)
    if lattice is None:
        raise ValueError("unit equations are infeasible")
    pool = _UnitPool(order)
    pool.add(units)
    surviving = []
    for clause in residual:
        diseqs = [l.atom for l in clause.negatives if l.is_linear and not pool.implies(l.atom)]
        if not diseqs:
            raise ValueError(f"residual clause {clause} has no disequality left to satisfy")
        surviving.extend(diseqs)
    point = lattice_witness(lattice, order, surviving)
    assert point is not None
    return dict(zip(order, point))


def solve_csp_instance(lang: ConstraintLanguage, instance: Iterable[Constraint]) -> HornResult:
    """Instantiate, conjoin and run :func:`horn_solve`; NOT-HORN if any clause is not Horn."""
    phi = instantiate(lang, list(instance))
    if not is_horn(phi):
        return HornResult(Status.NOT_HORN)
    return horn_solve(phi)
