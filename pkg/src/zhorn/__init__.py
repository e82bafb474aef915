"""Exact constraint satisfaction over the integers with addition and 1."""

from .classify import Bounds, Verdict, classify, gadget_one_in_three, horn_search, quotient
from .core import EventuallyPeriodicSet, core_reduce, divide_formula, is_endomorphism, unary_decompose
from .formula import Formula, evaluate, parse_formula, standardize
from .horn import Status, horn_solve, solve_csp_instance
from .language import ConstraintLanguage, parse_input
from .lattice import IntMatrix, hermite_normal_form, solve_diophantine
from .presburger import equivalent, formula_sat, implies

__version__ = "0.1.0"

__all__ = [
    "Bounds",
    "ConstraintLanguage",
    "EventuallyPeriodicSet",
    "Formula",
    "IntMatrix",
    "Status",
    "Verdict",
    "classify",
    "core_reduce",
    "divide_formula",
    "equivalent",
    "evaluate",
    "formula_sat",
    "gadget_one_in_three",
    "hermite_normal_form",
    "horn_search",
    "horn_solve",
    "implies",
    "is_endomorphism",
    "parse_formula",
    "parse_input",
    "quotient",
    "solve_csp_instance",
    "solve_diophantine",
    "standardize",
    "unary_decompose",
]
