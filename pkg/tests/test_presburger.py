import random

import pytest
from hypothesis import given, settings

from helpers import NAMES, derived_box, formulas, rand_linear, rand_modular, seeds
from test_formula import S_TEXT
from zhorn.formula import Formula, evaluate, make_linear, make_modular, parse_formula, standardize
from zhorn.oracle import box_implies, box_sat
from zhorn.presburger import (
    ConjunctiveSystem,
    ExpansionCapExceeded,
    conjunction_sat,
    equivalent,
    formula_sat,
    implies,
    reduce_formula,
)


def lin(coeffs, b):
    return make_linear(coeffs, b)


def system_formula(system: ConjunctiveSystem) -> Formula:
    parts = [[(a, True)] for a in (*system.equalities, *system.congruences)]
    parts += [[(a, False)] for a in system.disequalities]
    return Formula.build(parts, system.all_variables())


def random_system(rng: random.Random) -> ConjunctiveSystem:
    names = NAMES[: rng.randint(1, 4)]
    return ConjunctiveSystem(
        equalities=tuple(rand_linear(rng, names) for _ in range(rng.randint(0, 2))),
        disequalities=tuple(rand_linear(rng, names) for _ in range(rng.randint(0, 3))),
        congruences=tuple(rand_modular(rng, names, max_mod=6) for _ in range(rng.randint(0, 2))),
        variables=names,
    )


class TestConjunctionSat:
    def test_contradiction(self):
        x0 = lin({"x": 1}, 0)
        assert conjunction_sat(ConjunctiveSystem(equalities=(x0,), disequalities=(x0,))) is None

    def test_parity_conflict(self):
        s = ConjunctiveSystem(congruences=(make_modular({"x": 1}, 1, 2), make_modular({"x": 1}, 0, 4)))
        assert conjunction_sat(s) is None

    def test_mixed(self):
        s = ConjunctiveSystem(
            equalities=(lin({"x": 1, "y": 1}, 0),),
            disequalities=(lin({"x": 1}, 1), lin({"x": 1}, -1)),
            congruences=(make_modular({"x": 1}, 0, 2),),
        )
        w = conjunction_sat(s)
        assert w is not None and evaluate(system_formula(s), w)
        assert box_sat(system_formula(s), 4) is not None

    def test_empty(self):
        # no disequalities: S = 1, so the free parameter is set to 1
        assert conjunction_sat(ConjunctiveSystem(variables=("x",))) == {"x": 1}

    @settings(max_examples=300, deadline=None)
    @given(seeds)
    def test_agrees_with_box(self, seed):
        s = random_system(random.Random(seed))
        phi = system_formula(s)
        w = conjunction_sat(s)
        B = derived_box(phi)
        if w is None:
            assert box_sat(phi, B) is None
        else:
            assert evaluate(phi, w)


class TestImplies:
    def test_examples(self):
        assert implies([lin({"x": 2}, 4)], lin({"x": 1}, 2))
        assert not implies([lin({"x": 1, "y": 1}, 2)], lin({"x": 1}, 1))
        assert box_implies([lin({"x": 1, "y": 1}, 2)], lin({"x": 1}, 1), 2) is not None

    def test_infeasible_premises(self):
        assert implies([lin({"x": 2}, 3)], lin({"x": 1}, 7))
        premises = [lin({"x": 1, "y": 2}, 3), lin({"x": 2, "y": 4}, 8)]
        assert implies(premises, lin({"x": 1}, 7))

    def test_constant_conclusion(self):
        assert not implies([lin({"x": 1}, 0)], False)
        assert implies([lin({"x": 1}, 0)], True)

    def test_empty_premises(self):
        assert not implies([], lin({"x": 1}, 0))

    def test_rejects_modular(self):
        with pytest.raises(TypeError):
            implies([make_modular({"x": 1}, 0, 2)], lin({"x": 1}, 0))

    @settings(max_examples=300, deadline=None)
    @given(seeds)
    def test_agrees_with_box(self, seed):
        rng = random.Random(seed)
        names = NAMES[: rng.randint(1, 3)]
        premises = [rand_linear(rng, names, 3, 4) for _ in range(rng.randint(0, 3))]
        conclusion = rand_linear(rng, names, 3, 4)
        answer = implies(premises, conclusion)
        cex = box_implies(premises, conclusion, 12)
        if cex is not None:
            assert not answer
        if not answer:
            # a non-implication always has an explicit integer counterexample
            phi = Formula.build([[(a, True)] for a in premises] + [[(conclusion, False)]], names)
            w = formula_sat(phi)
            assert w is not None and evaluate(phi, w)


class TestFormulaSat:
    def test_examples(self):
        assert formula_sat(parse_formula("(x = 0 | x = 1)"))["x"] in (0, 1)
        assert formula_sat(parse_formula("FALSE")) is None

    def test_parameter_slice(self):
        phi = parse_formula(S_TEXT + " & (x1 = 3) & (x2 = 7)")
        w = formula_sat(phi)
        assert w == {"x1": 3, "x2": 7}

    def test_cap(self):
        phi = parse_formula(" & ".join(f"(x = {i} | x = {i + 1} | y = 0)" for i in range(6)))
        with pytest.raises(ExpansionCapExceeded) as err:
            formula_sat(phi, cap=100)
        assert err.value.cap == 100 and err.value.size == 3**6
        assert formula_sat(phi, cap=10**4) is not None

    def test_env_cap(self, monkeypatch):
        monkeypatch.setenv("ZHORN_DNF_CAP", "2")
        with pytest.raises(ExpansionCapExceeded):
            formula_sat(parse_formula("(x = 0 | x = 1) & (y = 0 | y = 1)"))

    @settings(max_examples=200, deadline=None)
    @given(formulas(n_vars=3, n_clauses=4, width=3, coef=4, max_mod=4))
    def test_agrees_with_box(self, phi):
        w = formula_sat(phi)
        if w is None:
            assert box_sat(phi, derived_box(phi)) is None
        else:
            assert evaluate(phi, w)


class TestEquivalent:
    def test_examples(self):
        assert equivalent(parse_formula("x = 1 mod 2"), parse_formula("x = 3 mod 2"))
        assert equivalent(parse_formula("2*x + 4*y = 6"), parse_formula("x + 2*y = 3"))
        assert not equivalent(parse_formula("(x = 0 | x = 1)"), parse_formula("x = 0"))

    @settings(max_examples=60, deadline=None)
    @given(formulas(n_vars=2, n_clauses=3, width=2, coef=3, max_mod=4), formulas(n_vars=2, n_clauses=3, width=2, coef=3, max_mod=4))
    def test_reflexive_symmetric(self, phi, psi):
        assert equivalent(phi, phi)
        assert equivalent(phi, psi) == equivalent(psi, phi)


class TestReduce:
    def test_duplicate(self):
        x0 = parse_formula("x = 0")
        assert reduce_formula(Formula(x0.clauses * 2, ("x",))) == x0

    def test_trivial_clause(self):
        assert reduce_formula(parse_formula("(x = 0 | x = 0 mod 1)")).is_true

    def test_implied_clause(self):
        out = reduce_formula(parse_formula("(x = 1 | x = 1 mod 2) & (x = 1 mod 2)"))
        assert out == parse_formula("x = 1 mod 2")

    def test_literal_removal(self):
        out = reduce_formula(parse_formula("(x = 0 | x = 1) & (x != 1)"))
        assert out == parse_formula("(x = 0)")

    @settings(max_examples=60, deadline=None)
    @given(formulas(n_vars=2, n_clauses=4, width=3, coef=3, max_mod=4))
    def test_equivalent_and_stable(self, phi):
        out = reduce_formula(phi)
        assert equivalent(standardize(phi), out)
        assert reduce_formula(out) == out
