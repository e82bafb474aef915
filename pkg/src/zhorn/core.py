"""Endomorphisms, cores, and exact one-variable decompositions.

Every endomorphism of a structure ``(Z; +, R1, ..., Rn)`` is a scaling
``x -> lam * x``.  Scaling a relation's definition is done syntactically by
:func:`divide_formula`, whose output is satisfied by ``a`` exactly when
``lam * a`` satisfies the input.  :func:`core_reduce` applies such divisions
with endomorphisms that are not self-embeddings until none is left within the
search bound.

One-variable formulas define eventually periodic sets: a union of residue
classes modulo ``period`` with finitely many points added or removed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd, lcm
from typing import Iterable

from .formula import (
    Formula,
    LinearEquation,
    ModularEquation,
    _map_atoms,
    evaluate,
    make_linear,
    make_modular,
    scale_variables,
    standardize,
)
from .language import ConstraintLanguage, Relation, params
from .presburger import entails, equivalent, formula_sat, reduce_formula

__all__ = [
    "divide_formula",
    "is_endomorphism",
    "is_self_embedding",
    "endomorphism_sample",
    "EndomorphismSample",
    "CoreResult",
    "core_reduce",
    "DEFAULT_CORE_BOUND",
    "syntactic_core_violations",
    "EventuallyPeriodicSet",
    "unary_decompose",
]

DEFAULT_CORE_BOUND = 64


def divide_formula(psi: Formula, lam: int) -> Formula:
    """The formula ``psi / lam``: ``a`` satisfies it iff ``lam * a`` satisfies ``psi``.

    >>> from zhorn.formula import parse_formula
    >>> str(divide_formula(parse_formula("(x = 2 mod 4)"), 2))
    '(x = 1 mod 2)'
    """
    if lam == 0:
        raise ValueError("cannot divide by 0")

    def divide(atom, positive):
        coeffs = dict(atom.coeffs)
        if isinstance(atom, LinearEquation):
            if atom.constant % lam:
                return [(False, positive)]
            return [(make_linear(coeffs, atom.constant // lam), positive)]
        d, c = atom.modulus, atom.constant
        ell = gcd(lam, d)
        if c % ell:
            return [(False, positive)]
        m = d // ell
        e = pow(lam // ell, -1, m) if m > 1 else 0
        return [(make_modular(coeffs, e * (c // ell), m), positive)]

    return _map_atoms(standardize(psi), divide)


def _relation_formula(rel: Relation) -> Formula:
    return rel.formula.with_variables(params(rel.arity))


def _sample_refutes(phi: Formula, lam: int, radius: int = 2) -> bool:
    """Cheap search for ``a`` in a small box with ``a`` in phi but ``lam*a`` not."""
    names = phi.variables
    if len(names) > 4:
        return False
    for point in itertools.product(range(-radius, radius + 1), repeat=len(names)):
        a = dict(zip(names, point))
        if evaluate(phi, a) and not evaluate(phi, {v: lam * x for v, x in a.items()}):
            return True
    return False


def _preserves(phi: Formula, lam: int, cap: int | None) -> bool:
    if lam == 0:
        return formula_sat(phi, cap) is None or evaluate(phi, dict.fromkeys(phi.variables, 0))
    if lam == 1:
        return True
    if _sample_refutes(phi, lam):
        return False
    return all(entails(phi, c, cap) for c in scale_variables(phi, lam).clauses)


def is_endomorphism(lang: ConstraintLanguage, lam: int, cap: int | None = None) -> bool:
    """Whether ``x -> lam * x`` maps every relation of ``lang`` into itself."""
    return all(_preserves(_relation_formula(r), lam, cap) for r in lang.relations)


def is_self_embedding(lang: ConstraintLanguage, lam: int, cap: int | None = None) -> bool:
    """Whether ``a in R  <->  lam * a in R`` holds for every relation."""
    if lam == 0:
        raise ValueError("0 is never a self-embedding")
    for r in lang.relations:
        phi = _relation_formula(r)
        if not equivalent(phi, scale_variables(phi, lam), cap):
            return False
    return True


def _signed_range(bound: int) -> list[int]:
    out = [0]
    for k in range(1, bound + 1):
        out += [k, -k]
    return out


@dataclass(frozen=True)
class EndomorphismSample:
    bound: int
    members: tuple[int, ...]
    pattern: str

    def __str__(self) -> str:
        return f"{self.pattern} (sampled on [-{self.bound}, {self.bound}])"


def _guess_pattern(members: set[int], bound: int) -> str:
    window = set(range(-bound, bound + 1))
    shapes = [("Z", window), ("Z\\{0}", window - {0}), ("{1}", {1})]
    for d in range(2, bound + 1):
        shapes.append((f"1+{d}Z", {x for x in window if (x - 1) % d == 0}))
    for name, s in shapes:
        if members == s:
            return name
        if 0 not in s and members == s | {0}:
            return f"{{0}} u {name}"
    return "irregular"


def endomorphism_sample(lang: ConstraintLanguage, bound: int, cap: int | None = None) -> EndomorphismSample:
    """Every ``lam`` in ``[-bound, bound]`` that is an endomorphism, plus a guessed closed form.

    The guess is one of ``Z``, ``Z\\{0}``, ``{1}``, ``1+dZ`` (optionally with 0
    added) or ``irregular``; only the sampled members are verified.
    """
    members = {lam for lam in _signed_range(bound) if is_endomorphism(lang, lam, cap)}
    return EndomorphismSample(bound, tuple(sorted(members)), _guess_pattern(members, bound))


@dataclass
class CoreResult:
    """Outcome of :func:`core_reduce`.

    ``kind`` is ``ONE-ELEMENT-CORE`` when 0 is an endomorphism, otherwise
    ``CORE``.  ``steps`` lists the applied ``lam`` values and ``factor`` is
    their product.  Each original relation is contained in its reduced
    counterpart, and ``a -> factor * a`` maps reduced tuples back into the
    original relations, so the two structures are homomorphically equivalent.
    The reduced language is a core only as far as the search bound reaches.
    """

    kind: str
    language: ConstraintLanguage
    steps: list[int] = field(default_factory=list)
    bound: int = DEFAULT_CORE_BOUND

    @property
    def factor(self) -> int:
        out = 1
        for lam in self.steps:
            out *= lam
        return out

    @property
    def one_element(self) -> bool:
        return self.kind == "ONE-ELEMENT-CORE"


def core_reduce(
    lang: ConstraintLanguage,
    bound: int = DEFAULT_CORE_BOUND,
    cap: int | None = None,
) -> CoreResult:
    """Divide by non-embedding endomorphisms ``|lam| > 1`` until none is found within ``bound``."""
    if is_endomorphism(lang, 0, cap):
        return CoreResult("ONE-ELEMENT-CORE", lang, [], bound)
    steps = []
    current = lang
    while True:
        for lam in _signed_range(bound)[3:]:
            if is_endomorphism(current, lam, cap) and not is_self_embedding(current, lam, cap):
                break
        else:
            return CoreResult("CORE", current, steps, bound)
        steps.append(lam)
        current = current.replace(
            {r.name: reduce_formula(divide_formula(_relation_formula(r), lam), cap) for r in current.relations}
        )


def syntactic_core_violations(lang: ConstraintLanguage, endomorphisms: Iterable[int]) -> list[str]:
    """Atoms that break the syntactic shape expected of a core.

    For every sampled endomorphism ``lam`` and modulus ``d`` of a modular atom,
    ``gcd(lam, d)`` must be 1; linear atoms must be homogeneous unless every
    sampled endomorphism is ``+-1``.
    """
    endos = [lam for lam in endomorphisms if lam != 0]
    only_units = all(abs(lam) == 1 for lam in endos)
    problems = []
    for r in lang.relations:
        for atom in r.formula.atoms():
            if isinstance(atom, ModularEquation):
                for lam in endos:
                    if gcd(lam, atom.modulus) != 1:
                        problems.append(f"{r.name}: {atom} shares a factor with endomorphism {lam}")
                        break
            elif atom.constant != 0 and not only_units:
                problems.append(f"{r.name}: {atom} is inhomogeneous")
    return problems


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


@dataclass(frozen=True)
class EventuallyPeriodicSet:
    """``(residue classes mod period  u  added) minus removed``.

    Canonical instances have minimal period, ``added`` disjoint from the
    residue classes and ``removed`` inside them.
    """

    period: int
    residues: frozenset[int] = frozenset()
    added: frozenset[int] = frozenset()
    removed: frozenset[int] = frozenset()

    @classmethod
    def make(
        cls,
        period: int,
        residues: Iterable[int] = (),
        added: Iterable[int] = (),
        removed: Iterable[int] = (),
    ) -> "EventuallyPeriodicSet":
        if period < 1:
            raise ValueError("period must be positive")
        res = frozenset(r % period for r in residues)
        add = frozenset(x for x in added if x % period not in res)
        rem = frozenset(x for x in removed if x % period in res) - frozenset(added)
        return cls(period, res, add, rem).canonical()

    @classmethod
    def empty(cls) -> "EventuallyPeriodicSet":
        return cls(1)

    @classmethod
    def everything(cls) -> "EventuallyPeriodicSet":
        return cls(1, frozenset({0}))

    def __contains__(self, x: int) -> bool:
        if x in self.added:
            return True
        if x in self.removed:
            return False
        return x % self.period in self.residues

    def is_finite(self) -> bool:
        return not self.residues

    def exceptions(self) -> frozenset[int]:
        return self.added | self.removed

    def _combine(self, other: "EventuallyPeriodicSet", op) -> "EventuallyPeriodicSet":
        period = lcm(self.period, other.period)
        residues = [
            r for r in range(period) if op(r % self.period in self.residues, r % other.period in other.residues)
        ]
        rs = set(residues)
        added, removed = [], []
        for x in self.exceptions() | other.exceptions():
            member = op(x in self, x in other)
            base = x % period in rs
            if member and not base:
                added.append(x)
            elif base and not member:
                removed.append(x)
        return EventuallyPeriodicSet.make(period, residues, added, removed)

    def union(self, other: "EventuallyPeriodicSet") -> "EventuallyPeriodicSet":
        return self._combine(other, lambda a, b: a or b)

    def intersection(self, other: "EventuallyPeriodicSet") -> "EventuallyPeriodicSet":
        return self._combine(other, lambda a, b: a and b)

    def complement(self) -> "EventuallyPeriodicSet":
        res = frozenset(range(self.period)) - self.residues
        return EventuallyPeriodicSet(self.period, res, self.removed, self.added).canonical()

    __or__ = union
    __and__ = intersection
    __invert__ = complement

    def canonical(self) -> "EventuallyPeriodicSet":
        for d in _divisors(self.period):
            if all((r in self.residues) == (r % d in self.residues) for r in range(self.period)):
                res = frozenset(r for r in self.residues if r < d)
                return EventuallyPeriodicSet(d, res, self.added, self.removed)
        return self

    def window_bound(self) -> int:
        return max((abs(x) for x in self.exceptions()), default=0)

    def to_formula(self, var: str = "x1") -> Formula:
        """Standard formula over ``var`` defining this set."""
        big = [(make_modular({var: 1}, r, self.period), True) for r in sorted(self.residues)]
        big += [(make_linear({var: 1}, x), True) for x in sorted(self.added)]
        clauses = [big] + [[(make_linear({var: 1}, x), False)] for x in sorted(self.removed)]
        return Formula.build(clauses, (var,))

    def __str__(self) -> str:
        parts = [f"period {self.period}", "residues {" + ", ".join(map(str, sorted(self.residues))) + "}"]
        parts.append("added {" + ", ".join(map(str, sorted(self.added))) + "}")
        parts.append("removed {" + ", ".join(map(str, sorted(self.removed))) + "}")
        return "; ".join(parts)


def _atom_set(atom) -> EventuallyPeriodicSet:
    ((_, a),) = atom.coeffs
    if isinstance(atom, LinearEquation):
        if atom.constant % a:
            return EventuallyPeriodicSet.empty()
        return EventuallyPeriodicSet.make(1, (), [atom.constant // a])
    d = atom.modulus
    return EventuallyPeriodicSet.make(d, [r for r in range(d) if (a * r - atom.constant) % d == 0])


def unary_decompose(phi: Formula) -> EventuallyPeriodicSet:
    """Exact eventually periodic decomposition of a formula in at most one variable."""
    if len(phi.variables) > 1:
        raise ValueError(f"expected at most one free variable, got {', '.join(phi.variables)}")
    out = EventuallyPeriodicSet.everything()
    for clause in phi.clauses:
        cs = EventuallyPeriodicSet.empty()
        for lit in clause.literals:
            s = _atom_set(lit.atom)
            cs = cs | (s if lit.positive else ~s)
        out = out & cs
    return out

