"""Brute-force ground truth on finite boxes.

Nothing here is a decision procedure: a point found in ``[-B, B]^n`` proves
satisfiability, but an empty box proves nothing.  Enumeration is vectorized
with numpy and refuses to run beyond ``cap`` points (default ``10**7``).
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping, Sequence

import numpy as np

from .formula import Clause, Formula, LinearEquation, var_key
from .language import PLUS, Constraint, ConstraintLanguage, check_constraint, params

__all__ = [
    "DEFAULT_BOX_CAP",
    "BoxTooLarge",
    "evaluate_points",
    "box_points",
    "box_sat",
    "box_models",
    "box_equiv",
    "box_implies",
    "enumerate_modular",
    "box_csp",
]

DEFAULT_BOX_CAP = 10**7
_CHUNK = 1 << 18


class BoxTooLarge(ValueError):
    def __init__(self, size: int, cap: int):
        super().__init__(f"box of {size} points exceeds the cap of {cap}")
        self.size = size
        self.cap = cap


def _check_size(n: int, B: int, cap: int) -> int:
    if B < 0:
        raise ValueError("box radius must be non-negative")
    size = (2 * B + 1) ** n
    if size > cap:
        raise BoxTooLarge(size, cap)
    return size


def _clause_mask(clause: Clause, env: Mapping[str, np.ndarray], length: int) -> np.ndarray:
    out = np.zeros(length, dtype=bool)
    for lit in clause.literals:
        atom = lit.atom
        lhs = np.zeros(length, dtype=np.int64)
        for v, c in atom.coeffs:
            lhs += c * env[v]
        if isinstance(atom, LinearEquation):
            hit = lhs == atom.constant
        else:
            hit = (lhs - atom.constant) % atom.modulus == 0
        out |= hit if lit.positive else ~hit
    return out


def evaluate_points(phi: Formula, env: Mapping[str, np.ndarray]) -> np.ndarray:
    """Truth value of ``phi`` at many points; ``env`` maps each variable to a column."""
    length = len(next(iter(env.values()))) if env else 1
    out = np.ones(length, dtype=bool)
    for clause in phi.clauses:
        out &= _clause_mask(clause, env, length)
        if not out.any():
            break
    return out


def box_points(n: int, B: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Rows ``start..stop`` of ``[-B, B]^n`` in lexicographic order."""
    side = 2 * B + 1
    total = side**n
    stop = total if stop is None else min(stop, total)
    idx = np.arange(start, stop, dtype=np.int64)
    cols = []
    for _ in range(n):
        idx, r = np.divmod(idx, side)
        cols.append(r - B)
    return np.stack(cols[::-1], axis=1) if n else np.zeros((max(stop - start, 0), 0), dtype=np.int64)


def _chunks(n: int, B: int, cap: int):
    total = _check_size(n, B, cap)
    for start in range(0, total, _CHUNK):
        yield box_points(n, B, start, start + _CHUNK)


def _names(phi: Formula, variables: Sequence[str] | None) -> list[str]:
    return list(variables) if variables is not None else list(phi.variables)


def box_sat(
    phi: Formula,
    B: int,
    variables: Sequence[str] | None = None,
    cap: int = DEFAULT_BOX_CAP,
) -> dict[str, int] | None:
    """First satisfying point of ``[-B, B]^n`` in lexicographic order, or ``None``."""
    names = _names(phi, variables)
    for pts in _chunks(len(names), B, cap):
        mask = evaluate_points(phi, {v: pts[:, i] for i, v in enumerate(names)}) if names else np.ones(len(pts), bool)
        hits = np.flatnonzero(mask)
        if hits.size:
            return {v: int(x) for v, x in zip(names, pts[hits[0]])}
    return None


def box_models(
    phi: Formula,
    B: int,
    variables: Sequence[str] | None = None,
    cap: int = DEFAULT_BOX_CAP,
) -> np.ndarray:
    """All satisfying points of the box, one row per point."""
    names = _names(phi, variables)
    found = []
    for pts in _chunks(len(names), B, cap):
        mask = evaluate_points(phi, {v: pts[:, i] for i, v in enumerate(names)}) if names else np.ones(len(pts), bool)
        found.append(pts[mask])
    return np.concatenate(found) if found else np.zeros((0, len(names)), dtype=np.int64)


def box_equiv(phi: Formula, psi: Formula, B: int, cap: int = DEFAULT_BOX_CAP) -> bool:
    """Whether ``phi`` and ``psi`` agree on every point of the box over their joint variables."""
    names = sorted(set(phi.variables) | set(psi.variables), key=var_key)
    for pts in _chunks(len(names), B, cap):
        env = {v: pts[:, i] for i, v in enumerate(names)}
        if not np.array_equal(_eval_or_const(phi, env, len(pts)), _eval_or_const(psi, env, len(pts))):
            return False
    return True


def _eval_or_const(phi: Formula, env, length: int) -> np.ndarray:
    if not env:
        return np.full(length, evaluate_points(phi, {})[0])
    return evaluate_points(phi, env)


def box_implies(
    premises: Iterable[LinearEquation],
    conclusion: LinearEquation,
    B: int,
    cap: int = DEFAULT_BOX_CAP,
) -> dict[str, int] | None:
    """A box point satisfying all premises but not the conclusion, or ``None``."""
    premises = list(premises)
    names = sorted({v for a in (*premises, conclusion) for v in a.variables}, key=var_key)
    phi = Formula.build([[(a, True)] for a in premises] + [[(conclusion, False)]], names)
    return box_sat(phi, B, names, cap)


def enumerate_modular(k: int, d: int, cap: int = DEFAULT_BOX_CAP) -> list[tuple[int, ...]]:
    """All of ``(Z/dZ)^k`` in lexicographic order."""
    if d < 1 or k < 0:
        raise ValueError("need d >= 1 and k >= 0")
    if d**k > cap:
        raise BoxTooLarge(d**k, cap)
    return list(itertools.product(range(d), repeat=k))


def _plan(constraints: Sequence[Constraint], order: Sequence[str]):
    """Choose enumerated variables; the rest follow from ``+`` constraints."""
    pluses = [args for name, args in constraints if name == PLUS]
    known: set[str] = set()
    enumerated: list[str] = []
    steps: list[tuple[str, str, str, str]] = []  # (target, op, left, right)

    def close():
        changed = True
        while changed:
            changed = False
            for a, b, c in pluses:
                unknown = [v for v in (a, b, c) if v not in known]
                if len(set(unknown)) != 1:
                    continue
                t = unknown[0]
                if t == c and a in known and b in known:
                    steps.append((t, "+", a, b))
                elif t == a and a != b and b in known:
                    steps.append((t, "-", c, b))
                elif t == b and a in known:
                    steps.append((t, "-", c, a))
                else:
                    continue
                known.add(t)
                changed = True

    close()
    for v in order:
        if v not in known:
            enumerated.append(v)
            known.add(v)
            close()
    return enumerated, steps


def box_csp(
    lang: ConstraintLanguage,
    constraints: Sequence[Constraint],
    B: int,
    primary: Sequence[str] = (),
    cap: int = DEFAULT_BOX_CAP,
) -> dict[str, int] | None:
    """Search for a solution of a CSP instance inside a box.

    Variables in ``primary`` (then the rest, in order of appearance) are
    enumerated over ``[-B, B]`` unless a ``+`` constraint determines them
    from earlier ones; determined values may leave the box.
    """
    constraints = list(constraints)
    seen: dict[str, None] = dict.fromkeys(primary)
    for name, args in constraints:
        check_constraint(lang, name, args)
        seen.update(dict.fromkeys(args))
    enumerated, steps = _plan(constraints, list(seen))
    checks = []
    for name, args in constraints:
        rel = lang[name]
        checks.append((rel.formula, dict(zip(params(rel.arity), args))))
    for pts in _chunks(len(enumerated), B, cap):
        env = {v: pts[:, i] for i, v in enumerate(enumerated)}
        for target, op, left, right in steps:
            env[target] = env[left] + env[right] if op == "+" else env[left] - env[right]
        mask = np.ones(len(pts), dtype=bool)
        for phi, binding in checks:
            sub = {p: env[v] for p, v in binding.items()}
            for p in phi.variables:
                sub.setdefault(p, np.zeros(len(pts), dtype=np.int64))
            mask &= _eval_or_const(phi, sub, len(pts))
            if not mask.any():
                break
        hits = np.flatnonzero(mask)
        if hits.size:
            i = hits[0]
            return {v: int(env[v][i]) for v in seen}
    return None
