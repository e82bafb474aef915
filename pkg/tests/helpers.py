"""Random formula generators shared by the property suites."""

from __future__ import annotations

import random
from math import lcm

from hypothesis import strategies as st

from zhorn.formula import Formula, LinearEquation, ModularEquation, make_linear, make_modular

NAMES = ("x", "y", "z", "w")


def rand_linear(rng: random.Random, names, coef=5, const=5):
    while True:
        coeffs = {v: rng.randint(-coef, coef) for v in names if rng.random() < 0.7}
        atom = make_linear(coeffs, rng.randint(-const, const))
        if not isinstance(atom, bool):
            return atom


def rand_modular(rng: random.Random, names, coef=5, max_mod=4):
    while True:
        d = rng.randint(2, max_mod)
        coeffs = {v: rng.randint(-coef, coef) for v in names if rng.random() < 0.7}
        atom = make_modular(coeffs, rng.randint(0, d - 1), d)
        if not isinstance(atom, bool):
            return atom


def rand_formula(rng: random.Random, n_vars=3, n_clauses=4, width=3, coef=5, max_mod=4, negated_mod=True):
    names = NAMES[:n_vars]
    clauses = []
    for _ in range(rng.randint(1, n_clauses)):
        lits = []
        for _ in range(rng.randint(1, width)):
            if rng.random() < 0.5:
                lits.append((rand_linear(rng, names, coef, coef), rng.random() < 0.5))
            else:
                lits.append((rand_modular(rng, names, coef, max_mod), not negated_mod or rng.random() < 0.7))
        clauses.append(lits)
    return Formula.build(clauses, names)


def rand_horn(rng: random.Random, n_vars=4, n_clauses=6, coef=5, max_mod=4):
    """Horn formula: linear negatives, at most one positive literal per clause."""
    names = NAMES[:n_vars]
    clauses = []
    for _ in range(rng.randint(1, n_clauses)):
        negs = [(rand_linear(rng, names, coef, coef), False) for _ in range(rng.choice((0, 0, 1, 1, 2)))]
        pos = []
        if not negs or rng.random() < 0.7:
            atom = rand_linear(rng, names, coef, coef) if rng.random() < 0.6 else rand_modular(rng, names, coef, max_mod)
            pos = [(atom, True)]
        clauses.append(negs + pos)
    return Formula.build(clauses, names)


def derived_box(phi: Formula, cap_points: int = 200_000) -> int:
    """lcm of moduli plus the largest constant, shrunk until the box fits the point budget."""
    moduli = [a.modulus for a in phi.atoms() if isinstance(a, ModularEquation)]
    consts = [abs(a.constant) for a in phi.atoms()]
    B = max(1, lcm(*moduli, 1) + max(consts, default=0))
    n = max(1, len(phi.variables))
    while B > 1 and (2 * B + 1) ** n > cap_points:
        B -= 1
    return B


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def formulas(draw, **kw):
    return rand_formula(random.Random(draw(seeds)), **kw)


@st.composite
def horn_formulas(draw, **kw):
    return rand_horn(random.Random(draw(seeds)), **kw)


def is_linear(atom) -> bool:
    return isinstance(atom, LinearEquation)
