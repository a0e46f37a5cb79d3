from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from entropik.errors import DenominatorVanishes, DivisionByZeroExpr, NotPolynomialInVars
from entropik.kernel.atoms import Atom
from entropik.kernel.poly import Monomial, Poly, mono_gcd, poly_sum


class Expr:
    """Canonical exact rational function over atoms.

    Canonical form: zero numerator has denominator 1, numerator and
    denominator are coprime, and the denominator's leading coefficient is 1.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Poly | None = None, *, canonical: bool = False) -> None:
        if den is None:
            den = _POLY_ONE
        if not canonical:
            num, den = _canonicalize(num, den)
        self.num = num
        self.den = den
        self._hash: int | None = None

    @classmethod
    def const(cls, value: int | Fraction) -> Expr:
        return cls(Poly.const(value), _POLY_ONE, canonical=True)

    @classmethod
    def atom(cls, atom: Atom, exp: int = 1) -> Expr:
        if exp < 0:
            return cls(_POLY_ONE, Poly.atom(atom, -exp), canonical=True)
        if exp == 0:
            return cls.const(1)
        return cls(Poly.atom(atom, exp), _POLY_ONE, canonical=True)

    @classmethod
    def poly(cls, p: Poly) -> Expr:
        return cls(p, _POLY_ONE, canonical=True)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Expr.const(other)
        if not isinstance(other, Expr):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self) -> str:
        return f"Expr(num={len(self.num)} terms, den={len(self.den)} terms)"

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("expression is not constant")
        return self.num.constant_value() / self.den.constant_value()

    def atoms(self) -> set[Atom]:
        return self.num.atoms() | self.den.atoms()

    def __neg__(self) -> Expr:
        return Expr(-self.num, self.den, canonical=True)

    def __add__(self, other: Expr | int | Fraction) -> Expr:
        other = _lift(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            return Expr(self.num + other.num, self.den)
        return Expr(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other: Expr | int | Fraction) -> Expr:
        return self + (-_lift(other))

    def __rsub__(self, other: Expr | int | Fraction) -> Expr:
        return _lift(other) + (-self)

    def __mul__(self, other: Expr | int | Fraction) -> Expr:
        other = _lift(other)
        if self.is_zero() or other.is_zero():
            return ZERO
        if other.is_constant() and other.den.is_constant():
            return Expr(self.num.scale(other.constant_value()), self.den, canonical=True)
        if self.is_constant():
            return Expr(other.num.scale(self.constant_value()), other.den, canonical=True)
        return Expr(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: Expr | int | Fraction) -> Expr:
        other = _lift(other)
        if other.is_zero():
            raise DivisionByZeroExpr("division by an expression that normalizes to zero")
        if self.is_zero():
            return ZERO
        return Expr(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other: Expr | int | Fraction) -> Expr:
        return _lift(other) / self

    def __pow__(self, n: int) -> Expr:
        if n == 0:
            return ONE_EXPR
        if n < 0:
            if self.is_zero():
                raise DivisionByZeroExpr("negative power of zero")
            return Expr(self.den ** (-n), self.num ** (-n))
        return Expr(self.num ** n, self.den ** n, canonical=self.den.is_constant() or n == 1)

    def numerator(self) -> Expr:
        return Expr(self.num, _POLY_ONE, canonical=True)

    def denominator(self) -> Expr:
        return Expr(self.den, _POLY_ONE, canonical=True)


def _lift(value: Expr | int | Fraction) -> Expr:
    if isinstance(value, Expr):
        return value
    return Expr.const(value)


def _canonicalize(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if den.is_zero():
        raise DivisionByZeroExpr("denominator normalizes to the zero polynomial")
    if num.is_zero():
        return num, _POLY_ONE
    if den.is_constant():
        c = den.constant_value()
        return (num if c == 1 else num.scale(1 / c)), _POLY_ONE
    shared = mono_gcd(num.content(), den.content())
    if shared:
        num = num.div_monomial(shared)
        den = den.div_monomial(shared)
    # without a common atom the gcd is a constant
    if not den.is_monomial() and num.atoms() & den.atoms():
        num, den = num.cancel(den)
    _, lc = den.leading()
    if den.is_constant():
        return num.scale(1 / lc), _POLY_ONE
    if lc != 1:
        num = num.scale(1 / lc)
        den = den.scale(1 / lc)
    return num, den


_POLY_ONE = Poly.const(1)
ZERO = Expr(Poly(), _POLY_ONE, canonical=True)
ONE_EXPR = Expr(_POLY_ONE, _POLY_ONE, canonical=True)


def expr_sum(items: Iterable[Expr]) -> Expr:
    total = ZERO
    for item in items:
        total = total + item
    return total


def monomial_expr(m: Monomial) -> Expr:
    return Expr.poly(Poly.monomial(m))


class SubstitutionMap:
    """Finite map Atom -> Expr."""

    __slots__ = ("pairs",)

    def __init__(self, pairs: Mapping[Atom, Expr] | None = None) -> None:
        self.pairs: dict[Atom, Expr] = dict(pairs or {})

    def __contains__(self, atom: Atom) -> bool:
        return atom in self.pairs

    def __getitem__(self, atom: Atom) -> Expr:
        return self.pairs[atom]

    def __len__(self) -> int:
        return len(self.pairs)

    def keys(self) -> list[Atom]:
        return sorted(self.pairs)

    def items(self) -> list[tuple[Atom, Expr]]:
        return [(k, self.pairs[k]) for k in sorted(self.pairs)]

    @property
    def triangular(self) -> bool:
        keys = set(self.pairs)
        return all(not (v.atoms() & keys) for v in self.pairs.values())

    def offending(self) -> list[tuple[Atom, Atom]]:
        keys = set(self.pairs)
        return [(k, a) for k, v in self.items() for a in sorted(v.atoms() & keys)]

    def extended(self, atom: Atom, value: Expr) -> SubstitutionMap:
        pairs = dict(self.pairs)
        pairs[atom] = value
        return SubstitutionMap(pairs)


def _substitute_poly(p: Poly, values: Mapping[Atom, Expr], powers: dict) -> Expr:
    total = ZERO
    for inside, part in p.split(values).items():
        rest = Expr.poly(part)
        factor = ONE_EXPR
        for a, e in inside:
            key = (a, e)
            value = powers.get(key)
            if value is None:
                value = values[a] ** e
                powers[key] = value
            factor = factor * value
            if factor.is_zero():
                break
        total = total + rest * factor
    return total


def substitute(e: Expr, m: SubstitutionMap | Mapping[Atom, Expr], simultaneous: bool = False) -> Expr:
    """Replace every key atom of ``m`` by its value in one pass.

    With a triangular map a single pass is complete; ``simultaneous`` is the
    explicit opt-in for maps whose values still mention keys.
    """
    values = m.pairs if isinstance(m, SubstitutionMap) else dict(m)
    if not values:
        return e
    atoms = e.atoms()
    if not any(a in values for a in atoms):
        return e
    powers: dict = {}
    num = _substitute_poly(e.num, values, powers)
    if e.den.is_constant():
        return num * Expr.const(1 / e.den.constant_value())
    den = _substitute_poly(e.den, values, powers)
    return num / den


def partial_diff(e: Expr, a: Atom) -> Expr:
    dn = e.num.diff(a)
    if e.den.is_constant():
        return Expr(dn, e.den)
    dd = e.den.diff(a)
    if dd.is_zero():
        return Expr(dn, e.den)
    return Expr(dn * e.den - e.num * dd, e.den * e.den)


def collect_coefficients(e: Expr, variables: Iterable[Atom]) -> dict[Monomial, Expr]:
    """Coefficients of the numerator of ``e`` grouped by monomials in ``variables``."""
    variables = set(variables)
    bad = sorted(e.den.atoms() & variables)
    if bad:
        raise NotPolynomialInVars(f"denominator depends on {bad[0]!r}", atom=bad[0])
    return {k: Expr.poly(v) for k, v in e.num.split(variables).items() if not v.is_zero()}


def eval_numeric(e: Expr, assignment: Mapping[Atom, Fraction]) -> Fraction:
    den = e.den.evaluate(assignment)
    if den == 0:
        raise DenominatorVanishes("denominator evaluates to zero at the given point")
    return e.num.evaluate(assignment) / den


def reconstruct(table: Mapping[Monomial, Expr]) -> Poly:
    return poly_sum(coeff.num.mul_term(m, 1) for m, coeff in table.items())


__all__ = [
    "Expr",
    "ZERO",
    "ONE_EXPR",
    "SubstitutionMap",
    "collect_coefficients",
    "eval_numeric",
    "expr_sum",
    "monomial_expr",
    "partial_diff",
    "reconstruct",
    "substitute",
]
