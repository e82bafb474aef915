"""Polynomial-time solving of Horn formulas and Horn CSP instances."""

from zhorn.formula import evaluate, parse_formula
from zhorn.horn import horn_solve, solve_csp_instance
from zhorn.language import parse_input

# Unit resolution: x = 1 fires the clause (x != 1 | y = 2).
res = horn_solve(parse_formula("(x = 1) & (x != 1 | y = 2) & (y != 2 | z = 1 mod 5) & (z != 6)"))
print(res.status.value, res.assignment, "units:", [str(u) for u in res.units])

# With no forcing, surviving disequalities are met by powers of S.
phi = parse_formula("(x + y = 0) & (x != 0) & (x - y != 4)")
res = horn_solve(phi)
print(res.status.value, res.assignment, evaluate(phi, res.assignment))

# A CSP instance in the text format.
text = """
relation DOUBLE/2 := 2*x1 - x2 = 0
relation NZ/1 := x1 != 0
relation ODD/1 := x1 = 1 mod 2
constraints
DOUBLE(a, b)
+(a, b, c)
NZ(a)
ODD(c)
"""
parsed = parse_input(text)
print(solve_csp_instance(parsed.language, parsed.constraints).assignment)
