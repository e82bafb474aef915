"""P versus NP-complete for finite languages over (Z; +) with parameters.

The pipeline reduces the language to a core, then looks for a Horn
definition of every core relation.  All Horn gives a polynomial-time solver;
a relation proven not Horn-definable gives NP-completeness.  Non-Horn proofs
come from three exact sources:

* one-variable relations, through their eventually periodic decomposition;
* fully modular relations, through a failed coset test on the quotient
  modulo the lcm of the moduli;
* constant slices: fixing all but one coordinate of a Horn formula leaves a
  Horn formula, so a non-Horn slice refutes Horn-definability.

Anything else is decided by a bounded search for a Horn definition, which
may end in UNKNOWN.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import lcm
from typing import Mapping, Sequence

import numpy as np

from .core import CoreResult, EventuallyPeriodicSet, core_reduce, unary_decompose, DEFAULT_CORE_BOUND
from .formula import (
    Formula,
    LinearEquation,
    ModularEquation,
    conjoin,
    evaluate,
    make_linear,
    make_modular,
    negate_clause,
    standardize,
    substitute,
)
from .horn import HornResult, Status, is_horn, solve_csp_instance
from .language import PLUS, Constraint, ConstraintLanguage, instantiate, params
from .lattice import IntMatrix, determinant, hermite_normal_form
from .oracle import box_points, evaluate_points
from .presburger import ExpansionCapExceeded, formula_sat, reduce_formula

__all__ = [
    "Bounds",
    "QuotientStructure",
    "quotient",
    "CosetTest",
    "coset_test",
    "maltsev_coset_test",
    "quotient_relation",
    "HornTest",
    "unary_horn_test",
    "horn_search",
    "PPFormula",
    "sum_to_parameter_family",
    "Gadget",
    "GadgetError",
    "gadget_one_in_three",
    "Verdict",
    "classify",
    "solve_with_verdict",
]


@dataclass(frozen=True)
class Bounds:
    """Search limits for :func:`classify` and :func:`horn_search`."""

    core_bound: int = DEFAULT_CORE_BOUND
    coefficient: int = 10
    modulus: int = 12
    clauses: int = 4
    literals: int = 3
    slice_radius: int = 2
    cap: int | None = None


# ---------------------------------------------------------------- quotients


@dataclass(frozen=True)
class QuotientStructure:
    modulus: int
    arities: Mapping[str, int]
    relations: Mapping[str, frozenset[tuple[int, ...]]]

    def __str__(self) -> str:
        lines = [f"quotient modulo {self.modulus}"]
        for name in sorted(self.relations):
            tuples = sorted(self.relations[name])
            lines.append(f"{name}/{self.arities[name]}: " + " ".join("(" + ",".join(map(str, t)) + ")" for t in tuples))
        return "\n".join(lines)


def quotient_relation(phi: Formula, arity: int, d: int, cap: int | None = None) -> frozenset[tuple[int, ...]]:
    """Residue tuples ``a`` for which ``(q*d + a_1, ..., q*d + a_k)`` satisfies ``phi`` for some ``q``."""
    names = params(arity)
    q = "_q"
    out = set()
    for a in itertools.product(range(d), repeat=arity):
        lifted = substitute(phi, {v: ({q: d}, ai) for v, ai in zip(names, a)}, (q,))
        if formula_sat(lifted, cap) is not None:
            out.add(a)
    return frozenset(out)


def quotient(lang: ConstraintLanguage, d: int, cap: int | None = None) -> QuotientStructure:
    """The finite structure on ``Z/dZ`` induced by shared lifts ``x_i = q*d + a_i``."""
    if d < 1:
        raise ValueError("modulus must be positive")
    rels = {r.name: quotient_relation(r.formula, r.arity, d, cap) for r in lang.relations}
    return QuotientStructure(d, {r.name: r.arity for r in lang.relations}, rels)


@dataclass(frozen=True)
class CosetTest:
    passed: bool
    witness: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]] | None = None
    image: tuple[int, ...] | None = None

    def __str__(self) -> str:
        if self.passed:
            return "PASS"
        a, b, c = self.witness
        return f"FAIL: {a} - {b} + {c} = {self.image} is not in the relation"


def coset_test(tuples: frozenset[tuple[int, ...]], d: int) -> CosetTest:
    """Closure of a nonempty relation on ``Z/dZ`` under ``x - y + z``.

    With ``a0`` the first tuple, the relation is a coset iff ``R - a0`` is
    closed under addition, so only pairs need checking.
    """
    if not tuples:
        raise ValueError("the coset test needs a nonempty relation")
    ordered = sorted(tuples)
    a0 = ordered[0]
    for a, c in itertools.product(ordered, repeat=2):
        image = tuple((x - y + z) % d for x, y, z in zip(a, a0, c))
        if image not in tuples:
            return CosetTest(False, (a, a0, c), image)
    return CosetTest(True)


def maltsev_coset_test(Q: QuotientStructure, name: str) -> CosetTest:
    return coset_test(Q.relations[name], Q.modulus)


def _coset_formula(tuples: frozenset[tuple[int, ...]], d: int, names: Sequence[str]) -> Formula:
    """Conjunction of congruences defining the preimage of a coset in ``(Z/dZ)^k``."""
    k = len(names)
    if not tuples:
        return Formula.build([[]], names)
    a0 = min(tuples)
    gens = [[(t[i] - a0[i]) % d for t in tuples] + [d * (i == j) for j in range(k)] for i in range(k)]
    H, _ = hermite_normal_form(IntMatrix.from_rows(gens))
    basis = [[H[i, j] for j in range(k)] for i in range(k)]
    delta = abs(determinant(IntMatrix.from_rows(basis)))
    clauses = []
    for i in range(k):
        # row i of the adjugate: cofactors of column i
        row = []
        for j in range(k):
            minor = [[basis[r][c] for c in range(k) if c != i] for r in range(k) if r != j]
            row.append((-1) ** (i + j) * (determinant(IntMatrix.from_rows(minor, k - 1)) if k > 1 else 1))
        atom = make_modular(dict(zip(names, row)), sum(x * y for x, y in zip(row, a0)), delta)
        clauses.append([(atom, True)])
    return Formula.build(clauses, names)


# ---------------------------------------------------------------- Horn tests


@dataclass
class HornTest:
    """Outcome of a Horn-definability test.

    ``kind`` is ``HORN`` (with ``formula``), ``NON-HORN-CERTIFIED`` (with a
    ``method`` and ``certificate``) or ``UNKNOWN``.
    """

    kind: str
    formula: Formula | None = None
    method: str = ""
    certificate: str = ""
    reason: str = ""

    @property
    def horn(self) -> bool:
        return self.kind == "HORN"

    @property
    def non_horn(self) -> bool:
        return self.kind == "NON-HORN-CERTIFIED"


def unary_horn_test(E: EventuallyPeriodicSet, var: str = "x1") -> HornTest:
    """Horn-definability of a one-variable set.

    One-variable Horn clauses define points, cosets and cofinite sets, whose
    intersections are the empty set, singletons and single cosets of ``dZ``
    with finitely many points removed.  Nothing else is Horn.
    """
    E = E.canonical()
    size_ok = E.is_finite() and len(E.added) <= 1
    if size_ok or (not E.added and len(E.residues) == 1):
        if E.is_finite():
            body = [[(make_linear({var: 1}, x), True)] for x in E.added] or [[]]
        else:
            (r,) = E.residues
            body = [[(make_modular({var: 1}, r, E.period), True)]]
            body += [[(make_linear({var: 1}, x), False)] for x in sorted(E.removed)]
        return HornTest("HORN", Formula.build(body, (var,)), "unary", str(E))
    reason = "FINITE-NON-SINGLETON" if E.is_finite() else "MULTI-COSET"
    return HornTest("NON-HORN-CERTIFIED", None, "unary", str(E), reason)


def _is_fully_modular(phi: Formula) -> bool:
    atoms = phi.atoms()
    return bool(atoms) and all(isinstance(a, ModularEquation) for a in atoms)


def _slice_certificate(phi: Formula, radius: int) -> HornTest | None:
    names = phi.variables
    for i, v in enumerate(names):
        others = [w for w in names if w != v]
        for consts in itertools.product(range(-radius, radius + 1), repeat=len(others)):
            fixed = dict(zip(others, consts))
            sliced = substitute(phi, {w: ({}, c) for w, c in fixed.items()}, (v,))
            test = unary_horn_test(unary_decompose(sliced), v)
            if test.non_horn:
                where = ", ".join(f"{w} = {c}" for w, c in fixed.items())
                test.method = "slice"
                test.certificate = f"fixing {where}, the set of {v} is {test.certificate}"
                return test
    return None


def _canonical_form(coeffs: dict[str, int]) -> tuple:
    items = sorted((v, c) for v, c in coeffs.items() if c)
    if items and items[0][1] < 0:
        items = [(v, -c) for v, c in items]
    return tuple(items)


class _HornSearch:
    """Greedy cover of non-models by Horn clauses that hold on all models."""

    def __init__(self, phi: Formula, bounds: Bounds):
        self.phi = phi
        self.b = bounds
        self.names = list(phi.variables)
        k = len(self.names)
        radius = max(1, int((4000 ** (1 / k) - 1) // 2))
        self.points = box_points(k, radius)
        forms = {}
        for atom in phi.atoms():
            forms[_canonical_form(dict(atom.coeffs))] = None
        for i, v in enumerate(self.names):
            forms[((v, 1),)] = None
            for w in self.names[i + 1:]:
                forms[_canonical_form({v: 1, w: 1})] = None
                forms[_canonical_form({v: 1, w: -1})] = None
        positives = {}
        C, M = bounds.coefficient, bounds.modulus
        for f in forms:
            coeffs = dict(f)
            for c in range(-C, C + 1):
                positives[make_linear(coeffs, c)] = None
            for m in range(2, M + 1):
                for r in range(m):
                    positives[make_modular(coeffs, r, m)] = None
        self.positives = [a for a in positives if not isinstance(a, bool)]
        negatives = {a: None for a in phi.atoms() if isinstance(a, LinearEquation)}
        self.negatives = list(negatives)

    def _masks(self, atoms, pts):
        env = {v: pts[:, i] for i, v in enumerate(self.names)}
        return np.array(
            [evaluate_points(Formula.build([[(a, True)]], self.names), env) for a in atoms], dtype=bool
        ).reshape(len(atoms), len(pts))

    def _valid_clauses(self, pts, models):
        pos = self._masks(self.positives, pts)
        neg = self._masks(self.negatives, pts) if self.negatives else np.zeros((0, len(pts)), bool)
        out = []
        for size in range(min(2, self.b.literals) + 1):
            for S in itertools.combinations(range(len(self.negatives)), size):
                sel = models.copy()
                for j in S:
                    sel &= neg[j]
                if S and not sel.any():
                    out.append((S, None))
                elif size < self.b.literals:
                    out.extend((S, int(p)) for p in np.flatnonzero(pos[:, sel].all(axis=1)))
        # drop clauses subsumed by a shorter valid clause
        unit_pos = {p for S, p in out if not S}
        neg_only = [set(S) for S, p in out if p is None]
        kept = [
            (S, p)
            for S, p in out
            if not (S and p in unit_pos) and not (p is not None and any(n <= set(S) for n in neg_only))
        ]
        return kept, pos, neg

    def run(self) -> HornTest:
        extra: list[tuple[int, ...]] = []
        cap = self.b.cap
        for _ in range(8):
            pts = self.points if not extra else np.concatenate([self.points, np.array(extra, dtype=np.int64)])
            env = {v: pts[:, i] for i, v in enumerate(self.names)}
            models = evaluate_points(self.phi, env)
            clauses, pos, neg = self._valid_clauses(pts, models)
            bad = ~models
            chosen = []
            while bad.any() and len(chosen) <= self.b.clauses:
                best, best_gain = None, 0
                for S, p in clauses:
                    keep = bad.copy()
                    for j in S:
                        keep &= neg[j]
                    if p is not None:
                        keep &= ~pos[p]
                    gain = int(keep.sum())
                    if gain > best_gain:
                        best, best_gain, best_mask = (S, p), gain, keep
                if best is None:
                    break
                chosen.append(best)
                bad &= ~best_mask
            if bad.any() or len(chosen) > self.b.clauses:
                return HornTest("UNKNOWN", reason="no Horn definition within the search bounds")
            candidate = Formula.build(
                [
                    [(self.negatives[j], False) for j in S] + ([(self.positives[p], True)] if p is not None else [])
                    for S, p in chosen
                ],
                self.names,
            )
            try:
                point = self._counterexample(candidate)
            except ExpansionCapExceeded as e:
                return HornTest("UNKNOWN", reason=str(e))
            if point is None:
                return HornTest("HORN", reduce_formula(candidate, cap), "search", "equivalent Horn formula found")
            extra.append(tuple(point[v] for v in self.names))
        return HornTest("UNKNOWN", reason="Horn search did not converge")

    def _counterexample(self, candidate: Formula) -> dict[str, int] | None:
        for a, b in ((self.phi, candidate), (candidate, self.phi)):
            for clause in b.clauses:
                m = formula_sat(conjoin(a, negate_clause(clause, self.names)), self.b.cap)
                if m is not None:
                    return {v: m.get(v, 0) for v in self.names}
        return None


def horn_search(phi: Formula, bounds: Bounds = Bounds()) -> HornTest:
    """Find a Horn definition of ``phi`` or certify that none exists, within bounds."""
    phi = standardize(phi)
    try:
        reduced = reduce_formula(phi, bounds.cap)
    except ExpansionCapExceeded as e:
        return HornTest("UNKNOWN", reason=str(e))
    if is_horn(reduced):
        return HornTest("HORN", reduced, "syntactic", "the reduced definition is Horn")
    if len(phi.variables) <= 1:
        var = phi.variables[0] if phi.variables else "x1"
        return unary_horn_test(unary_decompose(phi), var)
    if _is_fully_modular(phi):
        d = lcm(*(a.modulus for a in phi.atoms()))
        tuples = _quotient_any(phi, d, bounds.cap)
        if not tuples:
            return HornTest("HORN", Formula.build([[]], phi.variables), "quotient", "empty relation")
        test = coset_test(tuples, d)
        if not test.passed:
            return HornTest("NON-HORN-CERTIFIED", None, "quotient", f"modulo {d}: {test}", "COSET-FAILURE")
        return HornTest("HORN", _coset_formula(tuples, d, phi.variables), "quotient", f"coset modulo {d}")
    cert = _slice_certificate(phi, bounds.slice_radius)
    if cert is not None:
        return cert
    return _HornSearch(phi, bounds).run()


def _quotient_any(phi: Formula, d: int, cap: int | None) -> frozenset[tuple[int, ...]]:
    names = phi.variables
    renamed = substitute(phi, {v: ({p: 1}, 0) for v, p in zip(names, params(len(names)))})
    return quotient_relation(renamed.with_variables(params(len(names))), len(names), d, cap)


# ---------------------------------------------------------------- gadget


class GadgetError(ValueError):
    pass


@dataclass(frozen=True)
class PPFormula:
    """``exists (other variables): constraints`` with two free variables."""

    free: tuple[str, str]
    constraints: tuple[Constraint, ...]

    def formula(self, lang: ConstraintLanguage) -> Formula:
        return instantiate(lang, self.constraints)

    def slice(self, lang: ConstraintLanguage, lam: int, window: int, cap: int | None = None) -> list[int]:
        """Members of ``{y : theta(lam, y)}`` inside ``[-window, window]``."""
        x, y = self.free
        phi = self.formula(lang)
        out = []
        for val in range(-window, window + 1):
            fixed = substitute(phi, {x: ({}, lam), y: ({}, val)})
            if formula_sat(fixed, cap) is not None:
                out.append(val)
        return out


def sum_to_parameter_family(relation: str) -> PPFormula:
    """``theta(x, y) = exists z: R(x, y) & R(x, z) & y + z = x``.

    For a slice of the shape ``{0} u (lam + 4Z)`` this leaves ``{0, lam}``.
    """
    return PPFormula(("x", "y"), ((relation, ("x", "y")), (relation, ("x", "z")), (PLUS, ("y", "z", "x"))))


@dataclass
class Gadget:
    language: ConstraintLanguage
    constraints: list[Constraint]
    variables: list[str]
    lam: str
    m1: int
    m2: int
    base_slice: list[int]
    issues: list[str] = field(default_factory=list)

    def decode(self, assignment: Mapping[str, int]) -> dict[str, bool]:
        """Truth values: a variable is true when it equals ``(m2 - m1) * lam``."""
        target = (self.m2 - self.m1) * assignment[self.lam]
        return {v: assignment[v] == target for v in self.variables}


def gadget_one_in_three(
    lang: ConstraintLanguage,
    theta: PPFormula,
    clauses: Sequence[tuple[str, str, str]],
    variables: Sequence[str] | None = None,
    window: int = 20,
    cap: int | None = None,
) -> Gadget:
    """CSP instance over ``lang`` that is solvable iff the 1-in-3-SAT instance is.

    The base slice ``A = {y : theta(1, y)}`` must be finite with at least two
    elements; ``m1 < m2`` are its two smallest members.  Every clause
    ``(p, q, r)`` becomes ``p + q + r = (m2 - m1) lam`` together with
    ``theta(lam, p + m1 lam)`` and likewise for ``q`` and ``r``, with one
    ``lam`` shared by all clauses.  The reduction is correct when every
    nonempty slice is ``lam * A`` with ``lam != 0``; windowed checks of that
    premise are reported in ``issues``.
    """
    if variables is None:
        variables = list(dict.fromkeys(v for c in clauses for v in c))
    variables = list(variables)
    for v in variables:
        if v.startswith("g_"):
            raise GadgetError(f"variable names starting with 'g_' are reserved: {v}")
    base = theta.slice(lang, 1, window, cap)
    half = window // 2
    if any(abs(y) > half for y in base):
        raise GadgetError(f"base slice is not finite within the window [-{window}, {window}]")
    if len(base) < 2:
        raise GadgetError(f"base slice {base} has fewer than two elements")
    m1, m2 = base[0], base[1]
    issues = []
    zero = theta.slice(lang, 0, window, cap)
    if zero:
        issues.append(f"theta(0, y) holds for y in {zero}, so lam = 0 is allowed")
    for lam in (-1, 2, 3):
        got = theta.slice(lang, lam, window, cap)
        want = [lam * a for a in base if abs(lam * a) <= window]
        if got and got != sorted(want):
            issues.append(f"slice at lam = {lam} is {got}, expected {sorted(want)}")

    lam_var, zero_var = "g_lam", "g_zero"
    cons: list[Constraint] = [(PLUS, (zero_var, zero_var, zero_var))]
    multiples = {0: zero_var, 1: lam_var}
    counter = itertools.count()

    def multiple(k: int) -> str:
        if k in multiples:
            return multiples[k]
        if k < 0:
            name = f"g_m{-k}neg"
            cons.append((PLUS, (multiple(-k), name, zero_var)))
        else:
            name = f"g_m{k}"
            cons.append((PLUS, (multiple(k - 1), lam_var, name)))
        multiples[k] = name
        return name

    def theta_on(y: str):
        fresh = {theta.free[0]: lam_var, theta.free[1]: y}
        tag = next(counter)
        for name, args in theta.constraints:
            mapped = tuple(fresh.setdefault(a, f"g_e{tag}_{a}") for a in args)
            cons.append((name, mapped))

    shifted = {}
    for v in variables:
        if m1 == 0:
            shifted[v] = v
        else:
            s = f"g_s_{v}"
            cons.append((PLUS, (v, multiple(m1), s)))
            shifted[v] = s
        theta_on(shifted[v])
    target = multiple(m2 - m1)
    for j, (p, q, r) in enumerate(clauses):
        part = f"g_sum{j}"
        cons.append((PLUS, (p, q, part)))
        cons.append((PLUS, (part, r, target)))
    return Gadget(lang, cons, variables, lam_var, m1, m2, base, issues)


# ---------------------------------------------------------------- classify


@dataclass
class Verdict:
    """Complexity verdict with its certificate.

    ``kind`` is ``TRIVIAL-P``, ``HORN-P``, ``NP-COMPLETE`` or ``UNKNOWN``.
    ``horn_language`` holds solver-ready Horn definitions of the core when
    the kind is ``HORN-P``.
    """

    kind: str
    justification: str
    core: CoreResult
    outcomes: dict[str, HornTest] = field(default_factory=dict)
    bounds: Bounds = field(default_factory=Bounds)
    horn_language: ConstraintLanguage | None = None


JUSTIFICATIONS = {
    "TRIVIAL-P": "one-element core: x -> 0 is an endomorphism, so the all-zero assignment solves every instance",
    "HORN-P": "Horn tractability: every core relation has a quantifier-free Horn definition, "
    "decided in polynomial time by unit resolution",
    "NP-COMPLETE": "non-Horn core hardness: a core with a relation that is not Horn-definable has an NP-complete CSP",
    "UNKNOWN": "dichotomy: the problem is in P or NP-complete, but the search bounds were exhausted",
}


def _search_task(args):
    phi, bounds = args
    return horn_search(phi, bounds)


def classify(lang: ConstraintLanguage, bounds: Bounds = Bounds(), jobs: int = 1) -> Verdict:
    """Core reduction, then a Horn test of every core relation."""
    core = core_reduce(lang, bounds.core_bound, bounds.cap)
    if core.one_element:
        return Verdict("TRIVIAL-P", JUSTIFICATIONS["TRIVIAL-P"], core, {}, bounds)
    rels = sorted(core.language.relations, key=lambda r: r.name)
    tasks = [(r.formula, bounds) for r in rels]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_search_task, tasks))
    else:
        results = [_search_task(t) for t in tasks]
    outcomes = {r.name: res for r, res in zip(rels, results)}
    if any(o.non_horn for o in outcomes.values()):
        return Verdict("NP-COMPLETE", JUSTIFICATIONS["NP-COMPLETE"], core, outcomes, bounds)
    if all(o.horn for o in outcomes.values()):
        horn_lang = core.language.replace({name: o.formula for name, o in outcomes.items()})
        return Verdict("HORN-P", JUSTIFICATIONS["HORN-P"], core, outcomes, bounds, horn_lang)
    return Verdict("UNKNOWN", JUSTIFICATIONS["UNKNOWN"], core, outcomes, bounds)


def solve_with_verdict(lang: ConstraintLanguage, verdict: Verdict, constraints: Sequence[Constraint]) -> HornResult:
    """Solve an instance of ``lang`` using a polynomial-time verdict.

    The instance is solved over the Horn core; scaling the witness by the
    core factor maps it back to a solution over ``lang``.
    """
    constraints = list(constraints)
    names = list(dict.fromkeys(v for _, args in constraints for v in args))
    if verdict.kind == "TRIVIAL-P":
        zero = dict.fromkeys(names, 0)
        return HornResult(Status.SAT, zero, zero)
    if verdict.kind != "HORN-P":
        raise ValueError(f"no polynomial-time certificate for a {verdict.kind} verdict")
    res = solve_csp_instance(verdict.horn_language, constraints)
    if res.status is not Status.SAT:
        return res
    factor = verdict.core.factor
    scaled = {v: factor * res.assignment.get(v, 0) for v in names}
    if not evaluate(instantiate(lang, constraints), scaled):
        raise AssertionError("scaled witness does not satisfy the original instance")
    return HornResult(Status.SAT, scaled, scaled, res.units, res.deleted, res.rounds)
