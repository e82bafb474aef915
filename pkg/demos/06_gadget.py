"""Reducing 1-in-3-SAT to a CSP over the integers."""

import itertools

from zhorn.classify import gadget_one_in_three, sum_to_parameter_family
from zhorn.language import ConstraintLanguage, format_instance
from zhorn.oracle import box_csp

S = " & ".join(
    f"({p} | {q} | {r})"
    for p in ("x1 = 1 mod 4", "x2 = 1 mod 4")
    for q in ("x1 = 3 mod 4", "x2 = 3 mod 4")
    for r in ("x2 = 0", "x1 = 1 mod 2")
)
lang = ConstraintLanguage.from_formulas({"S": (2, S)})
theta = sum_to_parameter_family("S")  # exists z: S(x, y) & S(x, z) & y + z = x
print("slices:", {lam: theta.slice(lang, lam, 10) for lam in (0, 1, 3, -5)})

for clauses in ([("p", "q", "r")], [("p", "q", "r"), ("p", "p", "q")], [("p", "q", "r"), ("p", "q", "q"), ("r", "r", "r")]):
    g = gadget_one_in_three(lang, theta, clauses)
    sol = box_csp(lang, g.constraints, 1, primary=[g.lam, *g.variables])
    names = g.variables
    brute = any(
        all(sum(dict(zip(names, bits))[v] for v in c) == 1 for c in clauses)
        for bits in itertools.product((0, 1), repeat=len(names))
    )
    print(clauses, "->", g.decode(sol) if sol else "no solution", "| brute force:", brute)

print(format_instance(lang, gadget_one_in_three(lang, theta, [("p", "q", "r")]).constraints))
