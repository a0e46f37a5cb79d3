from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

from entropik.errors import InvalidModel
from entropik.kernel.atoms import Atom, AtomKind, indep, is_consequence, jet, partial, unit
from entropik.kernel.calculus import JetSpace
from entropik.kernel.expr import Expr
from entropik.kernel.tree import Deriv, Node, normalize, tree_atoms, walk

logger = logging.getLogger(__name__)

DEFAULT_MAX_ORDER = 4


@dataclass(frozen=True)
class ConstitDecl:
    name: str
    args: tuple[Atom, ...]
    symmetric: tuple[tuple[int, int], ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass(frozen=True)
class Equation:
    label: str
    lhs: Node
    rhs: Node


@dataclass(frozen=True)
class Inequality:
    lhs: Node
    rhs: Node


@dataclass(frozen=True)
class ModelDef:
    indeps: tuple[str, ...]
    fields: tuple[str, ...]
    decls: tuple[ConstitDecl, ...]
    equations: tuple[Equation, ...]
    entropy: Inequality
    leading: tuple[Atom, ...]
    assumptions: tuple[Node, ...] = ()
    max_order: int | None = None
    classify: tuple[str, ...] = ()
    name: str = field(default="model", compare=False)

    @cached_property
    def space(self) -> JetSpace:
        return JetSpace(self.indeps, {d.name: d.args for d in self.decls})

    @property
    def order_cap(self) -> int:
        return self.max_order if self.max_order is not None else DEFAULT_MAX_ORDER

    def decl(self, name: str) -> ConstitDecl:
        for d in self.decls:
            if d.name == name:
                return d
        raise KeyError(name)

    def dependency_atoms(self) -> set[Atom]:
        return {a for d in self.decls for a in d.args}

    def with_max_order(self, cap: int | None) -> ModelDef:
        if cap is None:
            return self
        return ModelDef(
            self.indeps, self.fields, self.decls, self.equations, self.entropy,
            self.leading, self.assumptions, cap, self.classify, self.name,
        )


@dataclass(frozen=True)
class ExpandedModel:
    equations: tuple[Expr, ...]
    entropy: Expr
    nonzero: tuple[Expr, ...]


_EXPANSIONS: dict[ModelDef, ExpandedModel] = {}


def expand_model(m: ModelDef) -> ExpandedModel:
    """Evaluate every derivative operator with the chain rule."""
    cached = _EXPANSIONS.get(m)
    if cached is not None:
        return cached
    space = m.space
    equations = tuple(normalize(eq.lhs, space) - normalize(eq.rhs, space) for eq in m.equations)
    entropy = normalize(m.entropy.lhs, space) - normalize(m.entropy.rhs, space)
    nonzero = tuple(normalize(a, space) for a in m.assumptions)
    expanded = ExpandedModel(equations, entropy, nonzero)
    _EXPANSIONS[m] = expanded
    logger.debug("expanded model %s: %d equations", m.name, len(equations))
    return expanded


@dataclass(frozen=True)
class AtomClasses:
    leading: frozenset[Atom]
    dependency: frozenset[Atom]
    free: frozenset[Atom]
    excluded: frozenset[Atom]
    conflicts: frozenset[Atom]
    order: int

    def of(self, atom: Atom) -> str:
        for name in ("leading", "dependency", "free", "excluded"):
            if atom in getattr(self, name):
                return name
        raise KeyError(atom)


def in_leading_class(m: ModelDef, a: Atom) -> bool:
    return a.kind is AtomKind.JET and any(a is lead or is_consequence(a, lead) for lead in m.leading)


def jet_order(exprs) -> int:
    best = 0
    for e in exprs:
        for a in e.atoms():
            if a.kind is AtomKind.JET and a.order > best:
                best = a.order
    return best


def _multi_indices(n: int, order: int):
    if n == 0:
        yield ()
        return
    for first in range(order + 1):
        for rest in _multi_indices(n - 1, order - first):
            yield (first,) + rest


def classify_atoms(m: ModelDef, exprs, order: int | None = None) -> AtomClasses:
    """Partition the jet coordinates up to the occurring order plus every atom of ``exprs``."""
    exprs = list(exprs)
    if order is None:
        order = max(jet_order(exprs), max((a.order for a in m.leading), default=0))
    universe: set[Atom] = {indep(n) for n in m.indeps}
    for f in m.fields:
        for alpha in _multi_indices(len(m.indeps), order):
            universe.add(jet(f, alpha))
    for e in exprs:
        universe |= e.atoms()
    dependency_args = m.dependency_atoms()
    leading, dependency, free, excluded, conflicts = set(), set(), set(), set(), set()
    for a in universe:
        if a.is_constitutive:
            excluded.add(a)
        elif a.kind is AtomKind.JET and in_leading_class(m, a):
            leading.add(a)
            if a in dependency_args:
                conflicts.add(a)
        elif a in dependency_args:
            dependency.add(a)
        else:
            free.add(a)
    return AtomClasses(
        frozenset(leading), frozenset(dependency), frozenset(free),
        frozenset(excluded), frozenset(conflicts), order,
    )


def model_problems(m: ModelDef) -> list[str]:
    """ModelDef invariants that do not need source positions."""
    problems: list[str] = []
    if len(m.leading) != len(m.equations):
        problems.append(
            f"model declares {len(m.equations)} equations but {len(m.leading)} leading derivatives"
        )
    for a in m.leading:
        for b in m.leading:
            if a is not b and is_consequence(b, a):
                problems.append(f"leading derivative {b!r} is a derivative of leading derivative {a!r}")
    names = [d.name for d in m.decls]
    for d in m.decls:
        if len(set(d.args)) != len(d.args):
            problems.append(f"constitutive {d.name} repeats an argument")
        for a in d.args:
            if a.kind is not AtomKind.JET or a.name not in m.fields:
                problems.append(f"constitutive {d.name} argument {a!r} is not a field jet variable")
        for i, j in d.symmetric:
            if not (0 <= i < d.arity and 0 <= j < d.arity) or i == j:
                problems.append(f"constitutive {d.name} has an invalid symmetric pair")
    trees = [t for eq in m.equations for t in (eq.lhs, eq.rhs)]
    trees += [m.entropy.lhs, m.entropy.rhs, *m.assumptions]
    for t in trees:
        for a in tree_atoms(t):
            if a.is_constitutive and a.name not in names:
                problems.append(f"constitutive symbol {a.name} used without a declaration")
        for node in walk(t):
            if isinstance(node, Deriv) and node.var not in m.indeps:
                problems.append(f"derivative operator d{node.var} has no independent variable")
    if problems:
        return problems
    expanded = expand_model(m)
    for a in m.leading:
        if not any(a in eq.atoms() for eq in expanded.equations):
            problems.append(f"leading derivative {a!r} does not occur in any expanded equation")
    return problems


def validate(m: ModelDef) -> ModelDef:
    problems = model_problems(m)
    if problems:
        raise InvalidModel("; ".join(problems), problems=problems)
    return m


def symmetrization_constraints(m: ModelDef) -> list[Expr]:
    """d psi/d a - d psi/d b for every declared symmetric pair (a, b)."""
    out: list[Expr] = []
    for d in m.decls:
        for i, j in d.symmetric:
            a = Expr.atom(partial(d.name, unit(d.arity, i)))
            b = Expr.atom(partial(d.name, unit(d.arity, j)))
            out.append(a - b)
    return out


def suggest_leading(m: ModelDef) -> list[Atom]:
    """Highest pure-time derivative per equation, first independent variable taken as time."""
    expanded = expand_model(m)
    chosen: list[Atom] = []
    used_fields: set[str] = set()
    for eq in expanded.equations:
        candidates = [
            a for a in eq.atoms()
            if a.kind is AtomKind.JET and a.index[0] > 0 and a.order == a.index[0]
            and a.name not in used_fields and eq.num.degree_in(a) == 1
        ]
        if not candidates:
            continue
        best = max(candidates, key=lambda a: (a.order, -m.fields.index(a.name)))
        chosen.append(best)
        used_fields.add(best.name)
    return chosen
