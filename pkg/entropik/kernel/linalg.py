from __future__ import annotations

import logging
from dataclasses import dataclass

from entropik.errors import EliminationInexact, SingularSystem
from entropik.kernel.expr import Expr
from entropik.kernel.poly import Poly

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinearSolution:
    values: tuple[Expr, ...]
    determinant: Poly
    diagonal: tuple[Poly, ...]


def bareiss_solve(matrix: list[list[Poly]], rhs: list[Poly], labels: list[str] | None = None) -> LinearSolution:
    """Fraction-free elimination over the polynomial ring, then back substitution.

    Rows keep declaration order unless a zero pivot forces a swap with the
    first later row that has a nonzero entry in the pivot column.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix) or len(rhs) != n:
        raise ValueError("bareiss_solve needs a square system")
    m = [list(row) + [b] for row, b in zip(matrix, rhs)]
    prev = Poly.const(1)
    sign = 1
    for k in range(n):
        pivot_row = next((i for i in range(k, n) if not m[i][k].is_zero()), None)
        if pivot_row is None:
            name = labels[k] if labels else str(k)
            raise SingularSystem(f"no nonzero pivot for unknown {name}: symbolic determinant is zero", column=name)
        if pivot_row != k:
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        pkk = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            for j in range(k + 1, n + 1):
                value = pkk * m[i][j] - mik * m[k][j]
                if not prev.is_constant():
                    quotient = value.divide_exact(prev)
                    if quotient is None:
                        raise EliminationInexact(
                            f"fraction-free elimination lost exactness in row {i}, column {j}", row=i, column=j
                        )
                    value = quotient
                elif prev.constant_value() != 1:
                    value = value.scale(1 / prev.constant_value())
                m[i][j] = value
            m[i][k] = Poly()
        prev = pkk
        logger.debug("bareiss step %d: pivot with %d terms", k, len(pkk))
    determinant = m[n - 1][n - 1].scale(sign) if n else Poly.const(1)
    values: list[Expr] = [Expr.const(0)] * n
    for i in range(n - 1, -1, -1):
        acc = Expr.poly(m[i][n])
        for j in range(i + 1, n):
            if not m[i][j].is_zero():
                acc = acc - Expr.poly(m[i][j]) * values[j]
        values[i] = acc / Expr.poly(m[i][i])
    return LinearSolution(tuple(values), determinant, tuple(m[k][k] for k in range(n)))


def factor_pivots(determinant: Poly) -> list[Expr]:
    """Split a determinant into its distinct monomial atoms and the remaining cofactor."""
    if determinant.is_constant():
        return []
    content = determinant.content()
    out = [Expr.atom(a) for a, _ in content]
    rest = determinant.div_monomial(content) if content else determinant
    if rest is not None and not rest.is_constant():
        _, lc = rest.leading()
        out.append(Expr.poly(rest.scale(1 / lc)))
    return out
