from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Mapping

from sympy import Symbol
from sympy.polys.domains import QQ
from sympy.polys.monomials import monomial_min
from sympy.polys.orderings import lex
from sympy.polys.polyerrors import ExactQuotientFailed
from sympy.polys.rings import PolyElement, PolyRing

from entropik.kernel.atoms import Atom

Monomial = tuple[tuple[Atom, int], ...]

ONE: Monomial = ()
_END = ((1,),)


def mono_key(m: Monomial) -> tuple:
    """Sort key giving lex order with the smallest atom most significant.

    Ascending keys list monomials from the leading one downwards; every
    element, the terminator included, is a tuple led by an int so a
    monomial that is a prefix of another still compares.
    """
    return tuple((0, a.key, -e) for a, e in m) + _END


def mono_gcd(a: Monomial, b: Monomial) -> Monomial:
    eb = dict(b)
    return tuple((x, min(e, eb[x])) for x, e in a if x in eb)


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


_SYMBOLS: dict[Atom, Symbol] = {}
_UNIT = Symbol("<unit>")


def _symbol(a: Atom) -> Symbol:
    s = _SYMBOLS.get(a)
    if s is None:
        s = _SYMBOLS.setdefault(a, Symbol(f"{int(a.kind)}|{a.name}|{','.join(map(str, a.index))}"))
    return s


@lru_cache(maxsize=8192)
def _ring(gens: tuple[Atom, ...]) -> PolyRing:
    # a constant lives in a one-generator ring; the placeholder never gets a positive exponent
    return PolyRing(tuple(_symbol(a) for a in gens) or (_UNIT,), QQ, lex)


def _qq(value: int | Fraction):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def _fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def _union(*gens: tuple[Atom, ...]) -> tuple[Atom, ...]:
    return tuple(sorted(set().union(*gens)))


class Poly:
    """Sparse multivariate polynomial with exact rational coefficients.

    Backed by a sympy ``PolyElement`` over ``QQ`` in the ring generated by
    exactly the atoms that occur, in atom order under ``lex``.
    """

    __slots__ = ("gens", "el", "_terms", "_hash")

    gens: tuple[Atom, ...]
    el: PolyElement

    def __init__(self, terms: Mapping[Monomial, int | Fraction] | None = None) -> None:
        terms = {m: c for m, c in (terms or {}).items() if c}
        gens = _union(*(tuple(a for a, _ in m) for m in terms)) if terms else ()
        index = {a: i for i, a in enumerate(gens)}
        width = len(gens) or 1
        rep = {}
        for m, c in terms.items():
            exps = [0] * width
            for a, e in m:
                exps[index[a]] += e
            rep[tuple(exps)] = _qq(c)
        self._init(gens, _ring(gens).from_dict(rep))

    def _init(self, gens: tuple[Atom, ...], el: PolyElement) -> None:
        self.gens = gens
        self.el = el
        self._terms: dict[Monomial, Fraction] | None = None
        self._hash: int | None = None

    @classmethod
    def _wrap(cls, gens: tuple[Atom, ...], el: PolyElement, compact: bool = True) -> Poly:
        if compact and gens:
            used = [False] * len(gens)
            for m in el.keys():
                for i, e in enumerate(m):
                    if e:
                        used[i] = True
            if not all(used):
                keep = [i for i, u in enumerate(used) if u]
                gens = tuple(gens[i] for i in keep)
                rep = {(tuple(m[i] for i in keep) or (0,)): c for m, c in el.items()}
                el = _ring(gens).from_dict(rep)
        p = object.__new__(cls)
        p._init(gens, el)
        return p

    def _lift(self, gens: tuple[Atom, ...]) -> PolyElement:
        if gens == self.gens:
            return self.el
        index = {a: i for i, a in enumerate(gens)}
        pos = [index[a] for a in self.gens]
        width = len(gens) or 1
        rep = {}
        for m, c in self.el.items():
            exps = [0] * width
            for i, e in zip(pos, m):
                exps[i] = e
            rep[tuple(exps)] = c
        return _ring(gens).from_dict(rep)

    def _common(self, other: Poly) -> tuple[tuple[Atom, ...], PolyElement, PolyElement]:
        if self.gens == other.gens:
            return self.gens, self.el, other.el
        gens = _union(self.gens, other.gens)
        return gens, self._lift(gens), other._lift(gens)

    def _monom(self, exps: tuple[int, ...]) -> Monomial:
        return tuple((a, e) for a, e in zip(self.gens, exps) if e)

    @classmethod
    def const(cls, value: int | Fraction) -> Poly:
        return cls({ONE: Fraction(value)})

    @classmethod
    def atom(cls, atom: Atom, exp: int = 1) -> Poly:
        return cls({((atom, exp),): 1})

    @classmethod
    def monomial(cls, m: Monomial, coeff: int | Fraction = 1) -> Poly:
        return cls({m: Fraction(coeff)})

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        if self._terms is None:
            self._terms = {self._monom(m): _fraction(c) for m, c in self.el.items()}
        return self._terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.gens == other.gens and self.el == other.el

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.gens, frozenset(self.el.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.el)

    def __len__(self) -> int:
        return len(self.el)

    def __iter__(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self.terms.items())

    def __repr__(self) -> str:
        return f"Poly({len(self.el)} terms)"

    def is_zero(self) -> bool:
        return not self.el

    def is_constant(self) -> bool:
        return self.el.is_ground

    def constant_value(self) -> Fraction:
        return _fraction(self.el.get(self.el.ring.zero_monom, QQ.zero))

    def is_monomial(self) -> bool:
        return len(self.el) == 1

    def atoms(self) -> set[Atom]:
        return set(self.gens)

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return [(self._monom(m), _fraction(c)) for m, c in self.el.terms()]

    def leading(self) -> tuple[Monomial, Fraction]:
        if not self.el:
            raise ValueError("the zero polynomial has no leading term")
        return self._monom(self.el.LM), _fraction(self.el.LC)

    def content(self) -> Monomial:
        """Greatest monomial dividing every term."""
        if not self.el:
            return ONE
        g = monomial_min(*self.el.itermonoms())
        return self._monom(g)

    def degree_in(self, atom: Atom) -> int:
        if atom not in self.gens:
            return 0
        return max(self.el.degree(self.gens.index(atom)), 0)

    def total_degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=0)

    def __neg__(self) -> Poly:
        return Poly._wrap(self.gens, -self.el, compact=False)

    def __add__(self, other: Poly) -> Poly:
        if not other.el:
            return self
        if not self.el:
            return other
        gens, a, b = self._common(other)
        return Poly._wrap(gens, a + b)

    def __sub__(self, other: Poly) -> Poly:
        if not other.el:
            return self
        gens, a, b = self._common(other)
        return Poly._wrap(gens, a - b)

    def __mul__(self, other: Poly) -> Poly:
        if not self.el or not other.el:
            return Poly()
        gens, a, b = self._common(other)
        return Poly._wrap(gens, a * b, compact=False)

    def mul_term(self, m: Monomial, c: int | Fraction) -> Poly:
        return self * Poly.monomial(m, c)

    def scale(self, c: int | Fraction) -> Poly:
        c = Fraction(c)
        if not c:
            return Poly()
        if c == 1:
            return self
        return Poly._wrap(self.gens, self.el.mul_ground(_qq(c)), compact=False)

    def __pow__(self, n: int) -> Poly:
        if n < 0:
            raise ValueError("negative polynomial power")
        return Poly._wrap(self.gens, self.el ** n, compact=n == 0)

    def div_monomial(self, d: Monomial) -> Poly | None:
        return self.divide_exact(Poly.monomial(d))

    def divide_exact(self, d: Poly) -> Poly | None:
        """Exact quotient; None unless d divides self."""
        if not d.el:
            raise ZeroDivisionError("division by the zero polynomial")
        if not self.el:
            return Poly()
        if not set(d.gens) <= set(self.gens):
            return None
        gens, a, b = self._common(d)
        try:
            q = a.exquo(b)
        except ExactQuotientFailed:
            return None
        return Poly._wrap(gens, q)

    def cancel(self, other: Poly) -> tuple[Poly, Poly]:
        """Remove the polynomial gcd of self/other; the second result is monic."""
        gens, a, b = self._common(other)
        p, q = a.cancel(b)
        lc = q.LC
        if lc != QQ.one:
            p = p.quo_ground(lc)
            q = q.quo_ground(lc)
        return Poly._wrap(gens, p), Poly._wrap(gens, q)

    def diff(self, atom: Atom) -> Poly:
        if atom not in self.gens:
            return Poly()
        return Poly._wrap(self.gens, self.el.diff(self.el.ring.gens[self.gens.index(atom)]))

    def derive(self, atom_derivative: Callable[[Atom], Poly]) -> Poly:
        """Derivation extended from atoms by the Leibniz rule."""
        return poly_sum(
            self.diff(a) * da for a in self.gens if (da := atom_derivative(a))
        )

    def split(self, atoms: Iterable[Atom]) -> dict[Monomial, Poly]:
        """Group by the part of each monomial lying in ``atoms``."""
        atoms = set(atoms)
        inside_at = [i for i, a in enumerate(self.gens) if a in atoms]
        inside_set = set(inside_at)
        groups: dict[tuple[int, ...], dict] = {}
        for m, c in self.el.items():
            key = tuple(m[i] for i in inside_at)
            rest = tuple(0 if i in inside_set else e for i, e in enumerate(m))
            groups.setdefault(key, {})[rest] = c
        ring = self.el.ring
        inside_gens = [self.gens[i] for i in inside_at]
        return {
            tuple((a, e) for a, e in zip(inside_gens, key) if e): Poly._wrap(self.gens, ring.from_dict(rep))
            for key, rep in groups.items()
        }

    def evaluate(self, values: Mapping[Atom, Fraction]) -> Fraction:
        point = [Fraction(values[a]) for a in self.gens]
        total = Fraction(0)
        for m, c in self.el.items():
            term = _fraction(c)
            for v, e in zip(point, m):
                if e:
                    term *= v ** e
            total += term
        return total


def poly_sum(items: Iterable[Poly]) -> Poly:
    items = [p for p in items if p.el]
    if not items:
        return Poly()
    gens = _union(*(p.gens for p in items))
    ring = _ring(gens)
    acc = ring.zero
    for p in items:
        acc += p._lift(gens)
    return Poly._wrap(gens, acc)
