from __future__ import annotations

import threading
from enum import IntEnum
from typing import Iterable

MultiIndex = tuple[int, ...]


class AtomKind(IntEnum):
    INDEP = 0
    JET = 1
    CONSTIT = 2
    PARTIAL = 3


class Atom:
    """An interned jet-space symbol.

    Two atoms with the same (kind, name, index) are the same object, so
    equality and hashing are identity based. Ordering uses ``key`` and never
    object identity.
    """

    __slots__ = ("kind", "name", "index", "key", "_hash")

    kind: AtomKind
    name: str
    index: MultiIndex
    key: tuple

    def __lt__(self, other: Atom) -> bool:
        return self.key < other.key

    def __le__(self, other: Atom) -> bool:
        return self.key <= other.key

    def __gt__(self, other: Atom) -> bool:
        return self.key > other.key

    def __ge__(self, other: Atom) -> bool:
        return self.key >= other.key

    def __hash__(self) -> int:
        return self._hash

    def __reduce__(self):
        return (_intern, (self.kind, self.name, self.index))

    def __repr__(self) -> str:
        if self.kind is AtomKind.INDEP:
            return f"IndepVar({self.name})"
        if self.kind is AtomKind.JET:
            return f"JetVar({self.name}, {self.index})"
        if self.kind is AtomKind.CONSTIT:
            return f"ConstitSym({self.name})"
        return f"ConstitPartial({self.name}, {self.index})"

    @property
    def order(self) -> int:
        return sum(self.index)

    @property
    def is_jet(self) -> bool:
        return self.kind is AtomKind.JET

    @property
    def is_constitutive(self) -> bool:
        return self.kind in (AtomKind.CONSTIT, AtomKind.PARTIAL)


_TABLE: dict[tuple, Atom] = {}
_LOCK = threading.Lock()


def _intern(kind: AtomKind, name: str, index: MultiIndex) -> Atom:
    ident = (int(kind), name, index)
    atom = _TABLE.get(ident)
    if atom is not None:
        return atom
    with _LOCK:
        atom = _TABLE.get(ident)
        if atom is None:
            atom = object.__new__(Atom)
            atom.kind = AtomKind(kind)
            atom.name = name
            atom.index = index
            atom.key = ident
            atom._hash = hash(ident)
            _TABLE[ident] = atom
        return atom


def indep(name: str) -> Atom:
    return _intern(AtomKind.INDEP, name, ())


def jet(field: str, alpha: Iterable[int]) -> Atom:
    alpha = tuple(alpha)
    if any(a < 0 for a in alpha):
        raise ValueError(f"negative derivative order in {alpha}")
    return _intern(AtomKind.JET, field, alpha)


def constit(name: str) -> Atom:
    return _intern(AtomKind.CONSTIT, name, ())


def partial(name: str, slots: Iterable[int]) -> Atom:
    """ConstitPartial; the all-zero slot index is the symbol itself."""
    slots = tuple(slots)
    if any(s < 0 for s in slots):
        raise ValueError(f"negative slot order in {slots}")
    if not any(slots):
        return constit(name)
    return _intern(AtomKind.PARTIAL, name, slots)


def unit(n: int, i: int) -> MultiIndex:
    return tuple(1 if k == i else 0 for k in range(n))


def add_index(alpha: MultiIndex, beta: MultiIndex) -> MultiIndex:
    return tuple(a + b for a, b in zip(alpha, beta))


def dominates(beta: MultiIndex, alpha: MultiIndex) -> bool:
    """True when beta >= alpha componentwise (equality included)."""
    return len(beta) == len(alpha) and all(b >= a for a, b in zip(alpha, beta))


def is_consequence(beta: Atom, alpha: Atom) -> bool:
    """beta is a proper differential consequence of the jet variable alpha."""
    return (
        beta.kind is AtomKind.JET
        and alpha.kind is AtomKind.JET
        and beta.name == alpha.name
        and beta.index != alpha.index
        and dominates(beta.index, alpha.index)
    )


def slots_of(atom: Atom, arity: int) -> MultiIndex:
    if atom.kind is AtomKind.PARTIAL:
        return atom.index
    return (0,) * arity
