"""Satisfiability, implication and equivalence for quantifier-free formulas.

A conjunction of equalities, congruences and disequalities is decided
exactly: congruences are linearized with fresh variables, the equalities are
parameterized as an affine lattice, and the surviving disequalities are
satisfied by the powers-of-S assignment on the lattice parameters.  CNF
formulas are decided by a pruned depth-first expansion into such
conjunctions, guarded by an expansion cap.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Mapping, Sequence

from .formula import (
    Clause,
    Formula,
    LinearEquation,
    ModularEquation,
    conjoin,
    negate_clause,
    standardize,
    var_key,
)
from .lattice import AffineLattice, IntMatrix, rank_rational, solve_diophantine

__all__ = [
    "ConjunctiveSystem",
    "ExpansionCapExceeded",
    "default_dnf_cap",
    "conjunction_sat",
    "lattice_witness",
    "implies",
    "formula_sat",
    "entails",
    "equivalent",
    "reduce_formula",
]

DEFAULT_DNF_CAP = 100_000


def default_dnf_cap() -> int:
    """Expansion cap, overridable through ``ZHORN_DNF_CAP``."""
    return int(os.environ.get("ZHORN_DNF_CAP", DEFAULT_DNF_CAP))


class ExpansionCapExceeded(RuntimeError):
    def __init__(self, size: int, cap: int):
        super().__init__(f"DNF expansion of {size} conjunctive systems exceeds the cap of {cap}")
        self.size = size
        self.cap = cap


@dataclass(frozen=True)
class ConjunctiveSystem:
    equalities: tuple[LinearEquation, ...] = ()
    disequalities: tuple[LinearEquation, ...] = ()
    congruences: tuple[ModularEquation, ...] = ()
    variables: tuple[str, ...] = field(default=())

    def all_variables(self) -> tuple[str, ...]:
        names = set(self.variables)
        for atom in (*self.equalities, *self.disequalities, *self.congruences):
            names.update(atom.variables)
        return tuple(sorted(names, key=var_key))


def equation_rows(
    equalities: Iterable[LinearEquation],
    congruences: Iterable[ModularEquation],
    variables: Sequence[str],
) -> tuple[list[list[int]], list[int], list[str]]:
    """Matrix rows for equalities plus linearized congruences (one fresh column each)."""
    equalities = list(equalities)
    congruences = list(congruences)
    n = len(variables)
    index = {v: i for i, v in enumerate(variables)}
    width = n + len(congruences)
    rows, rhs = [], []
    for eq in equalities:
        row = [0] * width
        for v, c in eq.coeffs:
            row[index[v]] = c
        rows.append(row)
        rhs.append(eq.constant)
    for j, cg in enumerate(congruences):
        row = [0] * width
        for v, c in cg.coeffs:
            row[index[v]] = c
        row[n + j] = -cg.modulus
        rows.append(row)
        rhs.append(cg.constant)
    names = list(variables) + [f"#k{j}" for j in range(len(congruences))]
    return rows, rhs, names


def lattice_witness(
    lattice: AffineLattice,
    variables: Sequence[str],
    disequalities: Iterable[Mapping[str, int] | LinearEquation],
) -> tuple[int, ...] | None:
    """Point of ``lattice`` avoiding every disequality, or ``None`` if one is entailed.

    Each disequality ``a.x != e`` becomes ``c.t != e'`` over the lattice
    parameters.  Constant ones are dropped (true) or fatal (false); for the
    rest, ``t_i = S**i`` with ``S`` one more than the largest
    ``sum |c| + |e'|`` satisfies them all.
    """
    index = {v: i for i, v in enumerate(variables)}
    rewritten = []
    for d in disequalities:
        coeffs = d.coeffs if isinstance(d, LinearEquation) else tuple(d.items())
        const = d.constant if isinstance(d, LinearEquation) else 0
        c = [sum(a * b[index[v]] for v, a in coeffs) for b in lattice.basis]
        e = const - sum(a * lattice.particular[index[v]] for v, a in coeffs)
        if not any(c):
            if e == 0:
                return None
            continue
        rewritten.append((c, e))
    S = 1 + max((sum(abs(x) for x in c) + abs(e) for c, e in rewritten), default=0)
    return lattice.point([S ** (i + 1) for i in range(len(lattice.basis))])


def conjunction_sat(system: ConjunctiveSystem) -> dict[str, int] | None:
    """Integer solution of a conjunctive system, or ``None`` when unsatisfiable."""
    variables = system.all_variables()
    rows, rhs, names = equation_rows(system.equalities, system.congruences, variables)
    lattice = solve_diophantine(IntMatrix.from_rows(rows, len(names)), rhs)
    if lattice is None:
        return None
    point = lattice_witness(lattice, names, system.disequalities)
    if point is None:
        return None
    return {v: point[i] for i, v in enumerate(variables)}


def implies(premises: Iterable[LinearEquation], conclusion: LinearEquation) -> bool:
    """Whether every integer solution of ``premises`` satisfies ``conclusion``.

    Integer-infeasible premises imply everything; otherwise integer and
    rational implication coincide, which is a rank comparison.  Constant
    atoms (``True``/``False`` from normalization) are accepted.
    """
    premises = [p for p in premises if p is not True]
    if any(p is False for p in premises) or conclusion is True:
        return True
    if conclusion is False:
        conclusion = LinearEquation((), 1)
    for atom in (*premises, conclusion):
        if not isinstance(atom, LinearEquation):
            raise TypeError("implies() works on linear equations only")
    names = set(conclusion.variables)
    for p in premises:
        names.update(p.variables)
    variables = sorted(names, key=var_key)
    rows, rhs, _ = equation_rows(premises, (), variables)
    if solve_diophantine(IntMatrix.from_rows(rows, len(variables)), rhs) is None:
        return True
    augmented = [r + [b] for r, b in zip(rows, rhs)]
    index = {v: i for i, v in enumerate(variables)}
    extra = [0] * (len(variables) + 1)
    for v, c in conclusion.coeffs:
        extra[index[v]] = c
    extra[-1] = conclusion.constant
    return rank_rational(augmented) == rank_rational(augmented + [extra])


class _Search:
    """Depth-first expansion of a standard CNF formula into conjunctive systems."""

    def __init__(self, phi: Formula):
        self.phi = phi
        self.clauses = sorted(phi.clauses, key=lambda c: len(c.literals))
        self.feasible_cache: dict[frozenset, bool] = {}

    def feasible(self, eqs: tuple, congs: tuple) -> bool:
        key = frozenset(eqs) | frozenset(congs)
        hit = self.feasible_cache.get(key)
        if hit is None:
            variables = sorted({v for a in key for v in a.variables}, key=var_key)
            rows, rhs, names = equation_rows(eqs, congs, variables)
            hit = solve_diophantine(IntMatrix.from_rows(rows, len(names)), rhs) is not None
            self.feasible_cache[key] = hit
        return hit

    def run(self) -> dict[str, int] | None:
        return self._dfs(0, (), (), (), frozenset())

    def _dfs(self, i, eqs, diseqs, congs, chosen):
        if i == len(self.clauses):
            system = ConjunctiveSystem(eqs, diseqs, congs, self.phi.variables)
            return conjunction_sat(system)
        clause = self.clauses[i]
        if any(l in chosen for l in clause.literals):
            return self._dfs(i + 1, eqs, diseqs, congs, chosen)
        for lit in clause.literals:
            if lit.negated() in chosen:
                continue
            atom = lit.atom
            if not lit.positive:
                found = self._dfs(i + 1, eqs, diseqs + (atom,), congs, chosen | {lit})
            elif isinstance(atom, LinearEquation):
                if not self.feasible(eqs + (atom,), congs):
                    continue
                found = self._dfs(i + 1, eqs + (atom,), diseqs, congs, chosen | {lit})
            else:
                if not self.feasible(eqs, congs + (atom,)):
                    continue
                found = self._dfs(i + 1, eqs, diseqs, congs + (atom,), chosen | {lit})
            if found is not None:
                return found
        return None


def formula_sat(phi: Formula, cap: int | None = None) -> dict[str, int] | None:
    """Satisfying assignment of ``phi`` over all its variables, or ``None``.

    Raises :class:`ExpansionCapExceeded` when the product of clause sizes
    exceeds ``cap`` (default :func:`default_dnf_cap`).
    """
    phi = standardize(phi)
    if phi.is_false:
        return None
    cap = default_dnf_cap() if cap is None else cap
    size = prod(len(c.literals) for c in phi.clauses)
    if size > cap:
        raise ExpansionCapExceeded(size, cap)
    return _Search(phi).run()


def entails(phi: Formula, clause: Clause, cap: int | None = None) -> bool:
    """Whether every solution of ``phi`` satisfies ``clause``."""
    return formula_sat(conjoin(phi, negate_clause(clause)), cap) is None


def equivalent(phi: Formula, psi: Formula, cap: int | None = None) -> bool:
    """Whether ``phi`` and ``psi`` define the same set (over the union of their variables)."""
    return all(entails(phi, c, cap) for c in psi.clauses) and all(
        entails(psi, c, cap) for c in phi.clauses
    )


def reduce_formula(phi: Formula, cap: int | None = None) -> Formula:
    """Greedily delete clauses, then literals, while equivalence is preserved.

    The result is reduced: no single clause or literal can be removed
    without changing the defined set.
    """
    phi = standardize(phi)
    if phi.is_false or phi.is_true:
        return phi
    variables = phi.variables
    clauses = list(phi.clauses)
    changed = True
    while changed:
        changed = False
        for i, clause in enumerate(clauses):
            rest = Formula.build(clauses[:i] + clauses[i + 1:], variables)
            if entails(rest, clause, cap):
                del clauses[i]
                changed = True
                break
        if changed:
            continue
        current = Formula.build(clauses, variables)
        for i, clause in enumerate(clauses):
            for j in range(len(clause.literals)):
                shorter = Clause(clause.literals[:j] + clause.literals[j + 1:])
                if entails(current, shorter, cap):
                    if not shorter.literals:
                        return Formula.build([shorter], variables)
                    clauses[i] = shorter
                    changed = True
                    break
            if changed:
                break
    return Formula.build(clauses, variables)
