"""Dichotomy verdicts with certificates."""

from zhorn.classify import classify, horn_search, quotient
from zhorn.formula import format_formula, parse_formula
from zhorn.language import ConstraintLanguage

S = " & ".join(
    f"({p} | {q} | {r})"
    for p in ("x1 = 1 mod 4", "x2 = 1 mod 4")
    for q in ("x1 = 3 mod 4", "x2 = 3 mod 4")
    for r in ("x2 = 0", "x1 = 1 mod 2")
)
languages = {
    "a coset relation and a congruence": {"R": (3, "x1 - x2 + x3 = 0"), "M": (1, "x1 = 1 mod 5")},
    "multiples of 6": {"R": (1, "x1 = 0 mod 6")},
    # the t = 0 branch is restricted to odd lam so that (0, 0) is excluded
    "S with odd parameter": {"S": (2, S)},
    "R and K": {"R": (1, "(x1 = 0 | !(x1 = 0 mod 3))"), "K": (1, "x1 = 1 mod 3")},
}
for title, defs in languages.items():
    v = classify(ConstraintLanguage.from_formulas(defs))
    print(f"== {title}: {v.kind}")
    print("  ", v.justification)
    for name, o in v.outcomes.items():
        detail = format_formula(o.formula) if o.formula is not None else f"{o.reason} {o.certificate}"
        print(f"   {name}: {o.kind} via {o.method}: {detail}")

# A fully modular relation that is not a coset modulo its period.
T = parse_formula("(x = 1 mod 3) & (y = 0 mod 3 | y = 2 mod 3)")
print(horn_search(T).certificate)
print(quotient(ConstraintLanguage.from_formulas({"T": (2, "(x1 = 1 mod 3) & (x2 = 0 mod 3 | x2 = 2 mod 3)")}), 3))
