from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from entropik.errors import DivisionByZeroExpr
from entropik.kernel.atoms import Atom
from entropik.kernel.calculus import JetSpace, total_derivative
from entropik.kernel.expr import ONE_EXPR, ZERO, Expr


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Sym:
    atom: Atom


@dataclass(frozen=True)
class Add:
    terms: tuple[Node, ...]


@dataclass(frozen=True)
class Mul:
    factors: tuple[Node, ...]


@dataclass(frozen=True)
class Div:
    num: Node
    den: Node


@dataclass(frozen=True)
class Neg:
    arg: Node


@dataclass(frozen=True)
class Pow:
    base: Node
    exp: int


@dataclass(frozen=True)
class Deriv:
    var: str
    arg: Node


Node = Union[Num, Sym, Add, Mul, Div, Neg, Pow, Deriv]


def normalize(tree: Node, space: JetSpace | None = None) -> Expr:
    if isinstance(tree, Num):
        return Expr.const(tree.value)
    if isinstance(tree, Sym):
        return Expr.atom(tree.atom)
    if isinstance(tree, Add):
        total = ZERO
        for t in tree.terms:
            total = total + normalize(t, space)
        return total
    if isinstance(tree, Mul):
        product = ONE_EXPR
        for f in tree.factors:
            product = product * normalize(f, space)
        return product
    if isinstance(tree, Div):
        den = normalize(tree.den, space)
        if den.is_zero():
            raise DivisionByZeroExpr("division by an expression that normalizes to zero")
        return normalize(tree.num, space) / den
    if isinstance(tree, Neg):
        return -normalize(tree.arg, space)
    if isinstance(tree, Pow):
        return normalize(tree.base, space) ** tree.exp
    if isinstance(tree, Deriv):
        if space is None:
            raise ValueError("derivative operators need a jet space to normalize")
        return total_derivative(normalize(tree.arg, space), tree.var, space)
    raise TypeError(f"not an expression tree node: {tree!r}")


def walk(tree: Node) -> Iterator[Node]:
    yield tree
    if isinstance(tree, Add):
        for t in tree.terms:
            yield from walk(t)
    elif isinstance(tree, Mul):
        for f in tree.factors:
            yield from walk(f)
    elif isinstance(tree, Div):
        yield from walk(tree.num)
        yield from walk(tree.den)
    elif isinstance(tree, (Neg, Deriv)):
        yield from walk(tree.arg)
    elif isinstance(tree, Pow):
        yield from walk(tree.base)


def tree_atoms(tree: Node) -> set[Atom]:
    return {n.atom for n in walk(tree) if isinstance(n, Sym)}


def from_expr(e: Expr) -> Node:
    """Tree whose normalization is ``e`` (used to print derived expressions)."""
    num = _poly_tree(e.num)
    if e.den.is_constant():
        return num
    return Div(num, _poly_tree(e.den))


def _poly_tree(p) -> Node:
    if p.is_zero():
        return Num(0)
    terms: list[Node] = []
    for m, c in p.sorted_terms():
        factors: list[Node] = []
        mag = abs(c)
        if mag != 1 or not m:
            factors.append(Num(mag.numerator) if mag.denominator == 1 else Div(Num(mag.numerator), Num(mag.denominator)))
        for a, e in m:
            factors.append(Sym(a) if e == 1 else Pow(Sym(a), e))
        node: Node = factors[0] if len(factors) == 1 else Mul(tuple(factors))
        if c < 0:
            node = Neg(node)
        terms.append(node)
    return terms[0] if len(terms) == 1 else Add(tuple(terms))
