from entropik.kernel.atoms import (
    Atom,
    AtomKind,
    MultiIndex,
    constit,
    dominates,
    indep,
    is_consequence,
    jet,
    partial,
)
from entropik.kernel.calculus import JetSpace, argument_derivative, total_derivative
from entropik.kernel.expr import (
    ONE_EXPR,
    ZERO,
    Expr,
    SubstitutionMap,
    collect_coefficients,
    eval_numeric,
    partial_diff,
    substitute,
)
from entropik.kernel.poly import Monomial, Poly
from entropik.kernel.tree import normalize

__all__ = [
    "Atom",
    "AtomKind",
    "Expr",
    "JetSpace",
    "Monomial",
    "MultiIndex",
    "ONE_EXPR",
    "Poly",
    "SubstitutionMap",
    "ZERO",
    "argument_derivative",
    "collect_coefficients",
    "constit",
    "dominates",
    "eval_numeric",
    "indep",
    "is_consequence",
    "jet",
    "normalize",
    "partial",
    "partial_diff",
    "substitute",
    "total_derivative",
]
