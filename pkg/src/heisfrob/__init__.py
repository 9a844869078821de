"""Symbolic computation in Frobenius Heisenberg categories.

Exact rational arithmetic throughout; scalars are :class:`fractions.Fraction`.
"""

from .awpa import AwpaElement, awpa_from_diagram, awpa_mul, awpa_to_diagram
from .bubbles import BubbleSymbol, eval_circle, grassmannian_check
from .diagram import DiagramTerm, Letter, MorphismExpr, compose, identity, tensor
from .frobenius import FrobeniusAlgebra, build_algebra, dual_basis, fleet, parse_algebra
from .karoubi import PartialKaroubi, PKObject, color_sort, pk_hom_member, split_morphism
from .presentations import (
    build_functor,
    build_presentation,
    roundtrip_check,
    verify_functor,
    verify_presentation,
)
from .rewrite import BudgetExhausted, Verdict, check_equal, equal_zero, normalize_full

__all__ = [
    "AwpaElement",
    "BubbleSymbol",
    "BudgetExhausted",
    "DiagramTerm",
    "FrobeniusAlgebra",
    "Letter",
    "MorphismExpr",
    "PKObject",
    "PartialKaroubi",
    "Verdict",
    "awpa_from_diagram",
    "awpa_mul",
    "awpa_to_diagram",
    "build_algebra",
    "build_functor",
    "build_presentation",
    "check_equal",
    "color_sort",
    "compose",
    "dual_basis",
    "equal_zero",
    "eval_circle",
    "fleet",
    "grassmannian_check",
    "identity",
    "normalize_full",
    "parse_algebra",
    "pk_hom_member",
    "roundtrip_check",
    "split_morphism",
    "tensor",
    "verify_functor",
    "verify_presentation",
]
