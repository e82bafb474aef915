"""Endomorphisms, division by scalings, cores and unary decompositions."""

from zhorn.core import core_reduce, endomorphism_sample, is_self_embedding, unary_decompose
from zhorn.formula import format_formula, parse_formula
from zhorn.language import ConstraintLanguage, format_language

# Nonzero even numbers: x -> 2x is an endomorphism that is not an
# embedding, so dividing by 2 gives the core x != 0.
lang = ConstraintLanguage.from_formulas({"R": (1, "(x1 = 0 mod 2) & (x1 != 0)")})
print("endomorphisms:", endomorphism_sample(lang, 6))
print("2 is a self-embedding:", is_self_embedding(lang, 2))
res = core_reduce(lang)
print(res.kind, "steps", res.steps)
print(format_language(res.language))

# With K = 1 + 3Z in the language only 1 + 3Z survives, and every such
# scaling is an embedding: the language is already a core.
ex3 = ConstraintLanguage.from_formulas({"R": (1, "(x1 = 0 | !(x1 = 0 mod 3))"), "K": (1, "x1 = 1 mod 3")})
print("endomorphisms:", endomorphism_sample(ex3, 9), "->", core_reduce(ex3).kind)

# Unary sets are eventually periodic.
for text in ["(x = 1 mod 3 | x = 6)", "(x = 0 mod 2) & (x != 0)", "(x = 0 mod 2 | x = 1 mod 3)"]:
    e = unary_decompose(parse_formula(text))
    print(f"{text:32} {e}   as formula: {format_formula(e.to_formula('x'))}")
