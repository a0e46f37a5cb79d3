from __future__ import annotations

import logging
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter

from entropik.errors import (
    NonlinearInLeading,
    NotPolynomialInVars,
    OrderCapExceeded,
    SingularConsequence,
)
from entropik.kernel.atoms import Atom, MultiIndex, dominates
from entropik.kernel.calculus import total_derivative_multi
from entropik.kernel.expr import Expr, SubstitutionMap, collect_coefficients, substitute
from entropik.kernel.linalg import bareiss_solve, factor_pivots
from entropik.kernel.poly import ONE, Poly
from entropik.model import ModelDef, expand_model, in_leading_class

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConsequenceStep:
    key: Atom
    equation: str
    directions: MultiIndex
    source: Expr

    def describe(self, indeps: tuple[str, ...]) -> str:
        ops = "".join(f"d{v}" * n for v, n in zip(indeps, self.directions))
        return f"{ops} of equation {self.equation}"


@dataclass
class SolvedSystem:
    model: ModelDef
    substitution: SubstitutionMap
    pivots: list[Expr]
    consequences: list[ConsequenceStep] = field(default_factory=list)
    determinant: Poly = field(default_factory=lambda: Poly.const(1))

    @property
    def keys(self) -> list[Atom]:
        return self.substitution.keys()

    def consequence_keys(self) -> list[Atom]:
        return [step.key for step in self.consequences]

    def apply(self, e: Expr) -> Expr:
        return substitute(e, self.substitution)

    def missing(self, exprs) -> list[Atom]:
        """Leading-class jet variables in ``exprs`` that are not yet keys."""
        found: set[Atom] = set()
        for e in exprs:
            for a in e.atoms():
                if a not in self.substitution and in_leading_class(self.model, a):
                    found.add(a)
        return sorted(found, key=lambda a: (a.order, a.key))


def _linear_rows(m: ModelDef) -> tuple[list[list[Poly]], list[Poly], list[Expr]]:
    expanded = expand_model(m)
    leading = list(m.leading)
    lead_set = set(leading)
    matrix: list[list[Poly]] = []
    rhs: list[Poly] = []
    dens: list[Expr] = []
    for eq, e in zip(m.equations, expanded.equations):
        try:
            table = collect_coefficients(e, lead_set)
        except NotPolynomialInVars as err:
            raise NonlinearInLeading(
                f"equation {eq.label} divides by a leading derivative", equation=eq.label
            ) from err
        row = [Poly() for _ in leading]
        constant = Poly()
        for mono, coeff in table.items():
            if mono == ONE:
                constant = coeff.num
                continue
            if len(mono) != 1 or mono[0][1] != 1:
                raise NonlinearInLeading(
                    f"equation {eq.label} is not linear in the leading derivatives", equation=eq.label
                )
            row[leading.index(mono[0][0])] = coeff.num
        matrix.append(row)
        rhs.append(-constant)
        if not e.den.is_constant():
            dens.append(e.denominator())
    return matrix, rhs, dens


def solve_leading(m: ModelDef) -> SolvedSystem:
    """Solve the expanded equations for the leading derivatives by fraction-free elimination."""
    matrix, rhs, dens = _linear_rows(m)
    labels = [repr(a) for a in m.leading]
    solution = bareiss_solve(matrix, rhs, labels)
    pivots: list[Expr] = []
    for divisor in [solution.determinant, *solution.diagonal, *(d.num for d in dens)]:
        for p in factor_pivots(divisor):
            if p not in pivots:
                pivots.append(p)
    pairs = dict(zip(m.leading, solution.values))
    logger.info("solved %s for %d leading derivatives", m.name, len(pairs))
    return SolvedSystem(m, SubstitutionMap(pairs), pivots, [], solution.determinant)


def _source_equation(m: ModelDef, beta: Atom) -> tuple[int, Atom]:
    for i, alpha in enumerate(m.leading):
        if alpha.name == beta.name and dominates(beta.index, alpha.index):
            return i, alpha
    raise SingularConsequence(f"{beta!r} is not a derivative of any leading derivative", atom=beta)


def close_consequences(m: ModelDef, s: SolvedSystem, targets) -> SolvedSystem:
    """Extend ``s`` with every differential consequence that ``targets`` or its values need."""
    targets = [targets] if isinstance(targets, Expr) else list(targets)
    raw: dict[Atom, Expr] = dict(s.substitution.pairs)
    solved = {alpha: raw[alpha] for alpha in m.leading}
    steps = list(s.consequences)
    pivots = list(s.pivots)
    cap = m.order_cap
    while True:
        partial_solution = SolvedSystem(m, SubstitutionMap(raw), pivots, steps)
        needed = partial_solution.missing(targets + list(raw.values()))
        if not needed:
            break
        for beta in needed:
            if beta.order > cap:
                raise OrderCapExceeded(
                    f"consequence {beta!r} has order {beta.order} above the cap {cap}", atom=beta, cap=cap
                )
            i, alpha = _source_equation(m, beta)
            delta = tuple(b - a for a, b in zip(alpha.index, beta.index))
            # the solved equation alpha - s[alpha] carries beta with coefficient 1
            source = total_derivative_multi(Expr.atom(alpha) - solved[alpha], delta, m.space)
            table = collect_coefficients(source.numerator(), [beta])
            coeff = table.get(((beta, 1),))
            if coeff is None or any(len(mono) and mono != ((beta, 1),) for mono in table):
                raise SingularConsequence(
                    f"cannot isolate {beta!r} from the derivative of equation {m.equations[i].label}", atom=beta
                )
            constant = table.get(ONE, Expr.const(0))
            raw[beta] = -constant / coeff
            for p in factor_pivots(coeff.num):
                if p not in pivots:
                    pivots.append(p)
            step = ConsequenceStep(beta, m.equations[i].label, delta, source)
            steps.append(step)
            logger.debug("consequence %r from %s", beta, step.describe(m.indeps))
    substitution = _triangularize(raw)
    if len(steps) > len(s.consequences):
        logger.info("closure added %d consequences to %s", len(steps) - len(s.consequences), m.name)
    return SolvedSystem(m, substitution, pivots, steps, s.determinant)


def _triangularize(raw: dict[Atom, Expr]) -> SubstitutionMap:
    graph = {k: {a for a in v.atoms() if a in raw and a is not k} for k, v in raw.items()}
    for k, v in raw.items():
        if k in v.atoms():
            raise SingularConsequence(f"value of {k!r} refers to itself", atom=k)
    try:
        order = list(TopologicalSorter(graph).static_order())
    except CycleError as err:
        raise SingularConsequence(f"consequences depend on each other cyclically: {err.args[1]!r}") from err
    resolved: dict[Atom, Expr] = {}
    for k in order:
        v = raw[k]
        deps = {a: resolved[a] for a in graph[k]}
        resolved[k] = substitute(v, deps) if deps else v
    return SubstitutionMap(resolved)


def solve_model(m: ModelDef, targets=None) -> SolvedSystem:
    """Solved form closed with respect to the expanded entropy and any extra targets."""
    expanded = expand_model(m)
    wanted = [expanded.entropy] + list(targets or [])
    return close_consequences(m, solve_leading(m), wanted)


@dataclass(frozen=True)
class Residue:
    label: str
    value: Expr

    @property
    def ok(self) -> bool:
        return self.value.is_zero()


def verify_solved(m: ModelDef, s: SolvedSystem) -> list[Residue]:
    """Residue of every equation and generated consequence under ``s``; all should vanish."""
    expanded = expand_model(m)
    out = [Residue(eq.label, s.apply(e)) for eq, e in zip(m.equations, expanded.equations)]
    for step in s.consequences:
        ops = "".join(f"d{v}" * n for v, n in zip(m.indeps, step.directions))
        out.append(Residue(f"{ops}({step.equation})", s.apply(step.source)))
    bad = [r.label for r in out if not r.ok]
    if bad:
        logger.warning("solved system leaves nonzero residues in %s", ", ".join(bad))
    return out
