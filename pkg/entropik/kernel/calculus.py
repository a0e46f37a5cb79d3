from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

from entropik.errors import UnknownConstitSym
from entropik.kernel.atoms import Atom, AtomKind, add_index, indep, jet, partial, slots_of, unit
from entropik.kernel.expr import Expr
from entropik.kernel.poly import Poly


@dataclass(frozen=True)
class JetSpace:
    """Independent-variable order plus the argument lists of constitutive symbols.

    Symbols declared with an empty argument list (parameters) are constants.
    """

    indeps: tuple[str, ...]
    args: Mapping[str, tuple[Atom, ...]] = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return len(self.indeps)

    def indep_atoms(self) -> tuple[Atom, ...]:
        return tuple(indep(n) for n in self.indeps)

    def position(self, iv: Atom | str) -> int:
        name = iv.name if isinstance(iv, Atom) else iv
        try:
            return self.indeps.index(name)
        except ValueError:
            raise KeyError(f"unknown independent variable {name!r}") from None

    def arguments(self, name: str) -> tuple[Atom, ...]:
        try:
            return self.args[name]
        except KeyError:
            raise UnknownConstitSym(f"constitutive symbol {name!r} has no declaration", symbol=name) from None

    def with_args(self, extra: Mapping[str, tuple[Atom, ...]]) -> JetSpace:
        merged = dict(self.args)
        merged.update(extra)
        return JetSpace(self.indeps, merged)


def derive_expr(e: Expr, atom_derivative: Callable[[Atom], Poly]) -> Expr:
    dn = e.num.derive(atom_derivative)
    if e.den.is_constant():
        return Expr(dn, e.den)
    dd = e.den.derive(atom_derivative)
    if dd.is_zero():
        return Expr(dn, e.den)
    return Expr(dn * e.den - e.num * dd, e.den * e.den)


def _total_atom(space: JetSpace, i: int) -> Callable[[Atom], Poly]:
    def d(a: Atom) -> Poly:
        if a.kind is AtomKind.INDEP:
            return Poly.const(1 if a.name == space.indeps[i] else 0)
        if a.kind is AtomKind.JET:
            return Poly.atom(jet(a.name, add_index(a.index, unit(space.dimension, i))))
        args = space.arguments(a.name)
        if not args:
            return Poly()
        slots = slots_of(a, len(args))
        total = Poly()
        for j, arg in enumerate(args):
            darg = d(arg)
            if darg.is_zero():
                continue
            total = total + Poly.atom(partial(a.name, add_index(slots, unit(len(args), j)))) * darg
        return total

    return d


def total_derivative(e: Expr, iv: Atom | str, space: JetSpace) -> Expr:
    return derive_expr(e, _total_atom(space, space.position(iv)))


def total_derivative_multi(e: Expr, alpha: tuple[int, ...], space: JetSpace) -> Expr:
    for i, count in enumerate(alpha):
        for _ in range(count):
            e = total_derivative(e, space.indeps[i], space)
    return e


def _argument_atom(space: JetSpace, arg: Atom) -> Callable[[Atom], Poly]:
    def d(a: Atom) -> Poly:
        if a.kind in (AtomKind.INDEP, AtomKind.JET):
            return Poly.const(1 if a is arg else 0)
        args = space.arguments(a.name)
        if arg not in args:
            return Poly()
        j = args.index(arg)
        slots = slots_of(a, len(args))
        return Poly.atom(partial(a.name, add_index(slots, unit(len(args), j))))

    return d


def argument_derivative(e: Expr, arg: Atom, space: JetSpace) -> Expr:
    """Derivative in a constitutive argument, jet atoms being state coordinates."""
    return derive_expr(e, _argument_atom(space, arg))


def argument_derivative_multi(e: Expr, slots: tuple[int, ...], args: tuple[Atom, ...], space: JetSpace) -> Expr:
    for j, count in enumerate(slots):
        for _ in range(count):
            e = argument_derivative(e, args[j], space)
    return e
