"""Exact satisfiability, implication and reduction for quantifier-free formulas."""

from zhorn.formula import format_formula, make_linear, parse_formula
from zhorn.presburger import equivalent, formula_sat, implies, reduce_formula

# A conjunction with congruences and disequalities; the witness comes from
# a lattice parameterization with parameters set to powers of S.
phi = parse_formula("(x + y = 0) & (x != 1) & (x != -1) & (x = 0 mod 2)")
print(format_formula(phi), "->", formula_sat(phi))

# Integer implication: infeasible premises imply everything, otherwise
# it is a rank comparison.
print("2x = 4 implies x = 2:", implies([make_linear({"x": 2}, 4)], make_linear({"x": 1}, 2)))
print("x + y = 2 implies x = 1:", implies([make_linear({"x": 1, "y": 1}, 2)], make_linear({"x": 1}, 1)))

# Equivalence and greedy reduction.
print(equivalent(parse_formula("2*x + 4*y = 6"), parse_formula("x + 2*y = 3")))
messy = parse_formula("(x = 1 | x = 1 mod 2) & (x = 1 mod 2) & (y = 0 | y != 0)")
print(format_formula(messy), "reduces to", format_formula(reduce_formula(messy)))
