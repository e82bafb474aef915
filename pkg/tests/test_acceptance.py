"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import itertools
import random
import time

import pytest

from helpers import derived_box, rand_formula, rand_horn, rand_linear
from test_classify import MOD6, SMOKE, one_in_three, random_one_in_three
from test_core import LANG_S, LANG_RK, unary
from zhorn.classify import (
    classify,
    coset_test,
    gadget_one_in_three,
    quotient_relation,
    solve_with_verdict,
    sum_to_parameter_family,
)
from zhorn.core import core_reduce, divide_formula, endomorphism_sample, is_endomorphism, syntactic_core_violations
from zhorn.formula import conjoin, evaluate, make_linear, parse_formula, substitute
from zhorn.horn import horn_solve
from zhorn.language import instantiate
from zhorn.lattice import IntMatrix, determinant, hermite_normal_form, is_hermite_normal_form
from zhorn.oracle import box_csp, box_implies, box_sat
from zhorn.presburger import equivalent, formula_sat, implies

criterion = pytest.mark.criterion


@criterion("horn-solver vs oracle")
def test_horn_solver_vs_oracle(criterion):
    start = time.perf_counter()
    disagreements = bad_witness = unsat = 0
    for seed in range(1000):
        phi = rand_horn(random.Random(seed), n_vars=4, n_clauses=6, coef=5, max_mod=4)
        res = horn_solve(phi)
        if res.sat:
            bad_witness += not evaluate(phi, res.assignment)
        else:
            unsat += 1
            disagreements += box_sat(phi, derived_box(phi, cap_points=50_000)) is not None
    elapsed = time.perf_counter() - start
    criterion.check(
        disagreements == 0 and bad_witness == 0 and elapsed < 60,
        f"1000 instances ({unsat} UNSAT), {disagreements} disagreements, "
        f"{bad_witness} bad witnesses, {elapsed:.1f}s",
    )


@criterion("HNF algebra")
def test_hnf_algebra(criterion):
    rng = random.Random(2024)
    start = time.perf_counter()
    failures = 0
    for _ in range(500):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        M = IntMatrix.from_rows([[rng.randint(-100, 100) for _ in range(n)] for _ in range(m)], n)
        H, U = hermite_normal_form(M)
        failures += not (M @ U == H and abs(determinant(U)) == 1 and is_hermite_normal_form(H))
    elapsed = time.perf_counter() - start
    criterion.check(failures == 0 and elapsed < 10, f"500 matrices, {failures} failures, {elapsed:.1f}s")


def _laplace(rows):
    if not rows:
        return 1
    return sum((-1) ** j * rows[0][j] * _laplace([r[:j] + r[j + 1:] for r in rows[1:]]) for j in range(len(rows)) if rows[0][j])


def _max_minor(rows, n):
    best = 1
    for k in range(1, min(len(rows), n) + 1):
        for ri in itertools.combinations(range(len(rows)), k):
            for ci in itertools.combinations(range(n), k):
                best = max(best, abs(_laplace([[rows[i][j] for j in ci] for i in ri])))
    return best


def _implication_case(rng):
    """Premises with a planted solution x0, or integer-infeasible but rationally consistent ones."""
    n = rng.randint(1, 3)
    names = ("x", "y", "z")[:n]
    x0 = [rng.randint(-2, 2) for _ in range(n)]
    rows = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(rng.randint(0, 3))]
    rows = [r for r in rows if any(r)]
    premises = [make_linear(dict(zip(names, r)), sum(a * b for a, b in zip(r, x0))) for r in rows]
    if rows and rng.random() < 0.1:
        # a.x = c and (a + 2b).x = c + 2e + 1 force 2 b.x to be odd
        b = [rng.randint(-2, 2) for _ in range(n)]
        c = sum(a * v for a, v in zip(rows[0], x0))
        premises.append(make_linear(dict(zip(names, (a + 2 * w for a, w in zip(rows[0], b)))), c + 2 * rng.randint(-2, 2) + 1))
        rows = None
    conclusion = rand_linear(rng, names, 3, 4)
    premises = [p for p in premises if p is not True]
    if any(p is False for p in premises):
        rows = None
    box = 6 if rows is None else max(map(abs, x0), default=0) + _max_minor(rows, n)
    return premises, conclusion, box


@criterion("implication oracle")
def test_implication_oracle(criterion):
    rng = random.Random(7)
    disagreements = refuted = 0
    for _ in range(500):
        premises, conclusion, box = _implication_case(rng)
        if any(p is False for p in premises):
            disagreements += not implies(premises, conclusion)
            continue
        cex = box_implies(premises, conclusion, box)
        refuted += cex is not None
        disagreements += implies(premises, conclusion) != (cex is None)
    criterion.check(disagreements == 0, f"500 pairs, {refuted} refuted in box, {disagreements} disagreements")


@criterion("division semantics")
def test_division_semantics(criterion):
    failures = 0
    points = 0
    for seed in range(200):
        phi = rand_formula(random.Random(seed), n_vars=2, n_clauses=3, width=3, coef=5, max_mod=6, negated_mod=False)
        B = derived_box(phi, cap_points=2_000)
        names = phi.variables
        for lam in (2, -2, 3, -3, 4, -4, 6):
            out = divide_formula(phi, lam)
            for a in itertools.product(range(-B, B + 1), repeat=len(names)):
                env = dict(zip(names, a))
                points += 1
                failures += evaluate(out, env) != evaluate(phi, {v: lam * x for v, x in env.items()})
    criterion.check(failures == 0, f"200 formulas, {points} point checks, {failures} failures")


@criterion("S-relation regression")
def test_s_relation_regression(criterion):
    S = LANG_S["S"].formula
    table_ok = all(
        evaluate(S, {"x1": lam, "x2": t}) == (t == 0 or (t - lam) % 4 == 0)
        for lam in range(-30, 31, 1)
        if lam % 2
        for t in range(-30, 31)
    )
    zero_endo = is_endomorphism(LANG_S, 0)  # computed; S contains (0, 0)
    verdict = classify(LANG_S).kind
    criterion.check(
        table_ok and verdict == "NP-COMPLETE",
        f"membership table {'matches' if table_ok else 'differs'}; "
        f"0 is {'an' if zero_endo else 'not an'} endomorphism (as computed); classify = {verdict}",
    )


@criterion("R,K-language regression")
def test_rk_language_regression(criterion):
    S = parse_formula("(x1 = 1 mod 3) & (x1 - x2 = 0 | !(x1 - x2 = 0 mod 3))")
    K = parse_formula("w = 1 mod 3")
    body = conjoin(
        K,
        substitute(S, {"x1": ({"l": 1}, 0), "x2": ({"t": 1}, 0)}),
        substitute(S, {"x1": ({"l": 1}, 0), "x2": ({"t": 1, "w": 3}, 0)}),
    )
    mismatches = 0
    for lam, t in itertools.product(range(-30, 31), repeat=2):
        got = formula_sat(substitute(body, {"l": ({}, lam), "t": ({}, t)})) is not None
        mismatches += got != (lam % 3 == 1 and t % 3 in (0, 2))
    T = parse_formula("(x1 = 1 mod 3) & (x2 = 0 mod 3 | x2 = 2 mod 3)")
    maltsev = coset_test(quotient_relation(T, 2, 3), 3)
    verdict = classify(LANG_RK).kind
    criterion.check(
        mismatches == 0 and not maltsev.passed and verdict == "NP-COMPLETE",
        f"{mismatches} mismatches on [-30, 30]^2; coset test {maltsev}; classify = {verdict}",
    )


@criterion("core reduction")
def test_core_reduction(criterion):
    res = core_reduce(unary("(x1 = 0 mod 2) & (x1 != 0)"))
    reduced_ok = res.kind == "CORE" and equivalent(res.language["R"].formula, parse_formula("x1 != 0"))
    one = core_reduce(MOD6).one_element
    violations = []
    for lang in (res.language, core_reduce(LANG_RK).language):
        violations += syntactic_core_violations(lang, endomorphism_sample(lang, 64).members)
    criterion.check(
        reduced_ok and one and not violations,
        f"steps {res.steps}; mod 6 one-element core: {one}; {len(violations)} syntactic violations at bound 64",
    )


@criterion("gadget end-to-end")
def test_gadget_end_to_end(criterion):
    rng = random.Random(11)
    mismatches = satisfiable = 0
    for _ in range(20):
        clauses, names = random_one_in_three(rng)
        g = gadget_one_in_three(LANG_S, sum_to_parameter_family("S"), clauses, names)
        sol = box_csp(LANG_S, g.constraints, 1, primary=[g.lam, *g.variables])
        truth = one_in_three(clauses, names)
        satisfiable += truth
        mismatches += (sol is not None) != truth
    criterion.check(mismatches == 0, f"20 formulas ({satisfiable} satisfiable), {mismatches} mismatches")


@criterion("dichotomy smoke suite")
def test_dichotomy_smoke(criterion):
    smoke, mod6 = classify(SMOKE), classify(MOD6)
    certs = (smoke.kind != "HORN-P" or smoke.horn_language is not None) and mod6.core.one_element
    solved = []
    for lang, verdict, cons in (
        (SMOKE, smoke, [("A", ("a", "b", "c")), ("M", ("a",)), ("H", ("a", "b", "c"))]),
        (MOD6, mod6, [("R", ("a",)), ("+", ("a", "a", "b"))]),
    ):
        res = solve_with_verdict(lang, verdict, cons)
        solved.append(res.sat and evaluate(instantiate(lang, cons), res.assignment))
    criterion.check(
        smoke.kind == "HORN-P" and mod6.kind == "TRIVIAL-P" and certs and all(solved),
        f"smoke language = {smoke.kind}; mod 6 language = {mod6.kind}; sample instances solved: {solved}",
    )

