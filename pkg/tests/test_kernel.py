from __future__ import annotations

import random
from fractions import Fraction

import pytest

from entropik.errors import (
    DenominatorVanishes,
    DivisionByZeroExpr,
    EliminationInexact,
    NotPolynomialInVars,
    UnknownConstitSym,
)
from entropik.kernel.atoms import AtomKind, constit, dominates, indep, is_consequence, jet, partial, unit
from entropik.kernel.calculus import (
    JetSpace,
    argument_derivative,
    argument_derivative_multi,
    total_derivative,
    total_derivative_multi,
)
from entropik.kernel.expr import Expr, SubstitutionMap, collect_coefficients, eval_numeric, partial_diff, reconstruct, substitute
from entropik.kernel.linalg import bareiss_solve
from entropik.kernel.poly import ONE, Poly, mono_key
from entropik.kernel.tree import Add, Deriv, Div, Mul, Neg, Num, Pow, Sym, normalize

rho = jet("rho", (0, 0))
u = jet("u", (0, 0))
eps = jet("eps", (0, 0))
rho_x = jet("rho", (0, 1))
rho_t = jet("rho", (1, 0))
SPACE = JetSpace(("t", "x"), {"p": (rho, eps), "c": ()})


def X(a, k=1) -> Expr:
    return Expr.atom(a, k)


def test_atoms_are_interned() -> None:
    assert jet("rho", (0, 1)) is rho_x
    assert partial("p", (0, 0)) is constit("p")
    assert partial("p", (1, 0)).kind is AtomKind.PARTIAL
    assert indep("t").kind is AtomKind.INDEP
    assert partial("p", (1, 1)).order == 2
    assert constit("p").is_constitutive and not rho.is_constitutive


def test_dominance_and_consequences() -> None:
    assert dominates((1, 1), (1, 0))
    assert not dominates((0, 1), (1, 0))
    assert is_consequence(jet("rho", (1, 1)), rho_t)
    assert not is_consequence(rho_t, rho_t)
    assert not is_consequence(jet("u", (1, 1)), rho_t)
    assert unit(3, 1) == (0, 1, 0)


def test_normalize_cancels_to_canonical_form() -> None:
    tree = Div(Add((Mul((Sym(rho), Sym(u))), Sym(rho))), Sym(rho))
    assert normalize(tree) == X(u) + 1
    assert normalize(Add((Sym(rho), Neg(Sym(rho))))).is_zero()
    assert normalize(Pow(Sym(rho), -2)) == Expr.const(1) / (X(rho) * X(rho))
    assert normalize(Div(Num(3), Num(6))) == Expr.const(Fraction(1, 2))


def test_equal_rational_functions_share_one_form() -> None:
    a = (X(rho) * X(rho) - X(u) * X(u)) / (X(rho) + X(u))
    assert a == X(rho) - X(u)
    b = X(rho) / (2 * X(u))
    c = (3 * X(rho)) / (6 * X(u))
    assert b == c and hash(b) == hash(c)


def test_division_by_zero_expression() -> None:
    with pytest.raises(DivisionByZeroExpr):
        normalize(Div(Sym(rho), Add((Sym(u), Neg(Sym(u))))))


def test_total_derivative_applies_chain_rule_to_constitutive_symbols() -> None:
    dp = total_derivative(X(constit("p")), "x", SPACE)
    expected = X(partial("p", (1, 0))) * X(rho_x) + X(partial("p", (0, 1))) * X(jet("eps", (0, 1)))
    assert dp == expected
    assert total_derivative(X(indep("x")), "x", SPACE) == 1
    assert total_derivative(X(indep("t")), "x", SPACE).is_zero()
    assert total_derivative(X(constit("c")), "t", SPACE).is_zero()


def test_total_derivative_through_the_tree() -> None:
    tree = Deriv("x", Mul((Sym(rho), Sym(u))))
    assert normalize(tree, SPACE) == X(rho_x) * X(u) + X(rho) * X(jet("u", (0, 1)))


def test_unknown_symbol_has_no_arguments() -> None:
    with pytest.raises(UnknownConstitSym):
        total_derivative(X(constit("q")), "t", SPACE)


def test_argument_derivative() -> None:
    e = X(constit("p")) * X(eps)
    assert argument_derivative(e, eps, SPACE) == X(partial("p", (0, 1))) * X(eps) + X(constit("p"))
    assert argument_derivative(X(constit("p")), u, SPACE).is_zero()
    second = argument_derivative_multi(X(constit("p")), (1, 1), (rho, eps), SPACE)
    assert second == X(partial("p", (1, 1)))


def test_partial_diff_of_quotient() -> None:
    e = X(rho) / X(u)
    assert partial_diff(e, u) == -X(rho) / (X(u) * X(u))
    assert partial_diff(e, eps).is_zero()


def test_substitute_triangular_and_simultaneous() -> None:
    m = SubstitutionMap({rho: X(u) + 1})
    assert m.triangular
    assert substitute(X(rho) * X(rho), m) == (X(u) + 1) * (X(u) + 1)
    swap = SubstitutionMap({rho: X(u), u: X(rho)})
    assert not swap.triangular
    assert substitute(X(rho) - 2 * X(u), swap, simultaneous=True) == X(u) - 2 * X(rho)
    assert substitute(X(eps), m) == X(eps)


def test_collect_coefficients_and_reconstruct() -> None:
    p_eps = X(partial("p", (0, 1)))
    e = p_eps * X(rho_x) * X(rho_x) + X(rho) * X(rho_x) + X(u) + 3
    table = collect_coefficients(e, [rho_x])
    assert table[((rho_x, 2),)] == p_eps
    assert table[((rho_x, 1),)] == X(rho)
    assert table[()] == X(u) + 3
    assert reconstruct(table) == e.num


def test_collect_rejects_variable_in_denominator() -> None:
    with pytest.raises(NotPolynomialInVars):
        collect_coefficients(X(rho) / X(rho_x), [rho_x])


def test_eval_numeric_is_exact() -> None:
    e = (X(rho) + 1) / (X(u) - 2)
    assert eval_numeric(e, {rho: Fraction(1, 3), u: Fraction(5)}) == Fraction(4, 9)
    with pytest.raises(DenominatorVanishes):
        eval_numeric(e, {rho: Fraction(1), u: Fraction(2)})


def test_poly_helpers() -> None:
    p = Poly.atom(rho, 2) * Poly.atom(u) + Poly.atom(rho) * Poly.const(3)
    assert p.degree_in(rho) == 2
    assert p.total_degree() == 3
    assert p.content() == ((rho, 1),)
    assert p.diff(u) == Poly.atom(rho, 2)
    assert p.evaluate({rho: Fraction(2), u: Fraction(1)}) == 10
    assert (Poly.atom(rho) * Poly.atom(rho) - Poly.const(1)).divide_exact(Poly.atom(rho) - Poly.const(1)) == Poly.atom(rho) + Poly.const(1)
    assert (Poly.atom(rho) + Poly.const(1)).divide_exact(Poly.atom(u)) is None


def test_monomial_order_handles_prefixes() -> None:
    longer = ((rho, 1), (u, 1))
    assert sorted([ONE, ((rho, 1),), longer], key=mono_key) == [longer, ((rho, 1),), ONE]
    p = Poly.atom(rho) + Poly.const(1)
    assert p.leading() == (((rho, 1),), 1)
    assert p.sorted_terms() == [(((rho, 1),), 1), (ONE, 1)]


def test_reciprocal_of_a_binomial() -> None:
    e = Expr.const(1) / (X(rho) + 1)
    assert e.num == Poly.const(1)
    assert e.den == Poly.atom(rho) + Poly.const(1)
    assert e * (X(rho) + 1) == 1
    assert (X(u) / (2 * X(rho) + 2)).den == Poly.atom(rho) + Poly.const(1)


def test_common_polynomial_factors_cancel() -> None:
    e = (X(rho) * X(u) + X(u)) / (X(rho) * X(rho) + 2 * X(rho) + 1)
    assert e == X(u) / (X(rho) + 1)
    f = (X(rho) ** 3 - X(u) ** 3) / (X(rho) * X(rho) - X(u) * X(u))
    assert f == (X(rho) * X(rho) + X(rho) * X(u) + X(u) * X(u)) / (X(rho) + X(u))


def _random_expr(rng: random.Random, atoms: list, depth: int = 3) -> Expr:
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.3:
            return Expr.const(Fraction(rng.randint(-5, 5), rng.randint(1, 4)))
        return Expr.atom(rng.choice(atoms))
    a = _random_expr(rng, atoms, depth - 1)
    op = rng.choice("+-*/^")
    if op == "^":
        return a ** rng.randint(-2, 3) if not a.is_zero() else a
    b = _random_expr(rng, atoms, depth - 1)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "/":
        return a if b.is_zero() else a / b
    return a * b


POOL = [rho, u, eps, rho_x, constit("p"), partial("p", (1, 0))]


@pytest.mark.parametrize("seed", range(400))
def test_total_derivatives_commute(seed: int) -> None:
    e = _random_expr(random.Random(seed), POOL)
    assert total_derivative_multi(e, (1, 1), SPACE) == total_derivative(total_derivative(e, "x", SPACE), "t", SPACE)


@pytest.mark.parametrize("seed", range(400))
def test_total_derivative_obeys_leibniz(seed: int) -> None:
    rng = random.Random(1000 + seed)
    f = _random_expr(rng, POOL)
    g = _random_expr(rng, POOL)
    lhs = total_derivative(f * g, "t", SPACE)
    rhs = total_derivative(f, "t", SPACE) * g + f * total_derivative(g, "t", SPACE)
    assert lhs == rhs


@pytest.mark.parametrize("seed", range(200))
def test_substitution_commutes_with_evaluation(seed: int) -> None:
    rng = random.Random(2000 + seed)
    e = _random_expr(rng, [rho, u, eps])
    value = _random_expr(rng, [u, eps])
    point = {u: Fraction(rng.randint(1, 9), 7), eps: Fraction(rng.randint(1, 9), 5)}
    try:
        point[rho] = eval_numeric(value, point)
        expected = eval_numeric(e, point)
        replaced = substitute(e, {rho: value})
    except (DenominatorVanishes, DivisionByZeroExpr):
        pytest.skip("the sampled point is a pole")
    assert eval_numeric(replaced, point) == expected


def test_inexact_elimination_is_a_coded_error(monkeypatch: pytest.MonkeyPatch) -> None:
    P = Poly.atom
    matrix = [[P(rho), P(u), Poly.const(1)], [P(u), P(rho), P(eps)], [P(eps), Poly.const(1), P(rho)]]
    monkeypatch.setattr(Poly, "divide_exact", lambda self, d: None)
    with pytest.raises(EliminationInexact) as info:
        bareiss_solve(matrix, [Poly.const(1)] * 3)
    assert info.value.code == "EPK-S005"
    assert info.value.exit_code == 2
    assert info.value.detail == {"row": 2, "column": 2}
