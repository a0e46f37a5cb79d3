"""Classical extended entropy inequality with Lagrange multipliers, for comparison.

The multipliers are constitutive symbols ``Lambda_<field>``, one per equation,
named after the field of the equation's leading derivative.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from entropik.entropy_split import ConstraintSystem, NonzeroFacts, normalize_constraint
from entropik.errors import MultiplierEliminationIncomplete, NonlinearExtendedInequality, NotPolynomialInVars
from entropik.kernel.atoms import Atom, AtomKind, constit, dominates
from entropik.kernel.expr import Expr, collect_coefficients, substitute
from entropik.kernel.poly import ONE, Monomial, Poly, mono_key
from entropik.model import ModelDef, classify_atoms, expand_model, in_leading_class

logger = logging.getLogger(__name__)

VERDICTS = ("identical", "liu-over-restricts", "incomparable")


def multiplier_name(m: ModelDef, i: int) -> str:
    return f"Lambda_{m.leading[i].name}"


def default_dependency(m: ModelDef) -> tuple[Atom, ...]:
    """Union of the declared constitutive arguments, in first-occurrence order."""
    seen: list[Atom] = []
    for d in m.decls:
        for a in d.args:
            if a not in seen:
                seen.append(a)
    return tuple(seen)


@dataclass
class LiuResult:
    """Raw identities per splitting monomial, plus the reduced working set that
    multiplier elimination starts from (forced zeros and state splits applied)."""

    model: ModelDef
    multipliers: tuple[Atom, ...]
    dependency: tuple[Atom, ...]
    extended: Expr
    identities: list[Expr]
    sources: list[list[Monomial]]
    residual: Expr
    splitting: list[Atom]
    forced_zero: list[Atom] = field(default_factory=list)
    state_splits: list[str] = field(default_factory=list)
    reduced: list[Expr] = field(default_factory=list)
    reduced_sources: list[list[Monomial]] = field(default_factory=list)

    def depends_on(self, a: Atom, c: Atom) -> bool:
        if a is c:
            return True
        if a in self.multipliers:
            return c in self.dependency
        if a.is_constitutive:
            try:
                return c in self.model.decl(a.name).args
            except KeyError:
                return False
        return False


@dataclass
class MultiplierSolution:
    values: dict[Atom, Expr]
    unsolved: list[Atom]
    physical: list[Expr]
    pending: list[Expr]
    residual: Expr
    warnings: list[str] = field(default_factory=list)


@dataclass
class Comparison:
    verdict: str
    common: list[Expr]
    liu_only: list[Expr]
    solution_only: list[Expr]
    multipliers: MultiplierSolution


def liu_extended(m: ModelDef, dependency: tuple[Atom, ...] | None = None) -> tuple[Expr, tuple[Atom, ...], tuple[Atom, ...]]:
    """Expanded entropy production minus the multiplier-weighted equations.

    Returns the extended expression, the multiplier atoms and their dependency.
    """
    dependency = tuple(dependency) if dependency is not None else default_dependency(m)
    expanded = expand_model(m)
    multipliers = tuple(constit(multiplier_name(m, i)) for i in range(len(m.equations)))
    extended = expanded.entropy
    for lam, eq in zip(multipliers, expanded.equations):
        extended = extended - Expr.atom(lam) * eq
    logger.debug("extended inequality for %s with %d multipliers", m.name, len(multipliers))
    return extended, multipliers, dependency


def _splitting_set(m: ModelDef, e: Expr, dependency: tuple[Atom, ...]) -> list[Atom]:
    excluded = m.dependency_atoms() | set(dependency)
    return sorted(a for a in e.atoms() if a.kind is AtomKind.JET and a.order >= 1 and a not in excluded)


def _field_values(m: ModelDef, dependency: tuple[Atom, ...], coefficients) -> set[Atom]:
    excluded = m.dependency_atoms() | set(dependency)
    found: set[Atom] = set()
    for c in coefficients:
        found |= {a for a in c.atoms() if a.kind is AtomKind.JET and a.order == 0 and a not in excluded}
    return found


def liu_split(
    e: Expr,
    m: ModelDef,
    multipliers: tuple[Atom, ...],
    dependency: tuple[Atom, ...],
    facts: NonzeroFacts | None = None,
) -> LiuResult:
    """Coefficients of the extended inequality at the splitting derivatives."""
    splitting = _splitting_set(m, e, dependency)
    try:
        table = collect_coefficients(e, splitting)
    except NotPolynomialInVars as err:
        raise NonlinearExtendedInequality(
            "the extended inequality divides by a splitting derivative", detail=err.message
        ) from err
    for mono in table:
        if sum(k for _, k in mono) > 1:
            text = "*".join(repr(a) + (f"^{k}" if k > 1 else "") for a, k in mono)
            raise NonlinearExtendedInequality(
                f"the extended inequality is nonlinear in the splitting derivatives: {text}", monomial=text
            )
    if facts is None:
        facts = NonzeroFacts.from_exprs(expand_model(m).nonzero)
    values = _field_values(m, dependency, table.values())
    residual = table.get(ONE, Expr.const(0)) / e.denominator()
    pairs: list[tuple[Expr, list[Monomial]]] = []
    for mono in sorted(table, key=mono_key):
        if mono == ONE:
            continue
        parts = collect_coefficients(table[mono], values) if values else {ONE: table[mono]}
        pairs.extend((coeff, [mono]) for coeff in parts.values())
    identities, sources = _dedupe(pairs, facts)
    result = LiuResult(m, multipliers, dependency, e, identities, sources, residual, splitting)
    result.reduced, result.reduced_sources = list(identities), [list(s) for s in sources]
    _force_zero(result, facts)
    _state_split(result, facts)
    logger.info("%s: %d Liu identities over %d splitting derivatives", m.name, len(identities), len(splitting))
    return result


def _dedupe(pairs, facts: NonzeroFacts) -> tuple[list[Expr], list[list[Monomial]]]:
    out: list[Expr] = []
    sources: list[list[Monomial]] = []
    for c, src in pairs:
        n, _ = normalize_constraint(c, facts)
        if n.is_zero():
            continue
        if n in out:
            sources[out.index(n)].extend(src)
            continue
        out.append(n)
        sources.append(list(src))
    return out, sources


def _lone_multiplier(lr: LiuResult, c: Expr) -> Atom | None:
    if not c.num.is_monomial():
        return None
    atoms = c.num.atoms()
    if len(atoms) != 1:
        return None
    a = next(iter(atoms))
    return a if a in lr.multipliers else None


def _force_zero(lr: LiuResult, facts: NonzeroFacts) -> None:
    """A multiplier times certified factors vanishing forces the multiplier to zero."""
    while True:
        hit = next((a for a in map(lambda c: _lone_multiplier(lr, c), lr.reduced) if a is not None), None)
        if hit is None:
            return
        lr.forced_zero.append(hit)
        zero = {hit: Expr.const(0)}
        lr.residual = substitute(lr.residual, zero)
        pairs = [(substitute(c, zero), src) for c, src in zip(lr.reduced, lr.reduced_sources)]
        lr.reduced, lr.reduced_sources = _dedupe(pairs, facts)


def _state_split(lr: LiuResult, facts: NonzeroFacts) -> None:
    """Split A + L*B on a dependency coordinate that is also a leading derivative."""
    m = lr.model
    classes = classify_atoms(m, [lr.extended])
    conflicts = sorted(a for a in classes.conflicts if a in lr.dependency)
    if not conflicts:
        return
    pairs: list[tuple[Expr, list[Monomial]]] = []
    for c, src in zip(lr.reduced, lr.reduced_sources):
        pieces = [c]
        for z in conflicts:
            dependent = {a for a in c.atoms() if lr.depends_on(a, z)}
            if len(dependent) != 1:
                continue
            lam = next(iter(dependent))
            if lam not in lr.multipliers or c.num.degree_in(lam) != 1:
                continue
            b = c.num.diff(lam)
            pieces = [Expr.poly(c.num - b * Poly.atom(lam)), Expr.poly(b)]
            lr.state_splits.append(f"split on {z!r} through {lam.name}")
            break
        pairs.extend((piece, src) for piece in pieces)
    lr.reduced, lr.reduced_sources = _dedupe(pairs, facts)
    for note in lr.state_splits:
        logger.debug("%s: %s", m.name, note)


def _priority(lr: LiuResult, index: int) -> tuple:
    leading = any(
        len(mono) == 1 and in_leading_class(lr.model, mono[0][0]) for mono in lr.reduced_sources[index]
    )
    return (0 if leading else 1, index)


def solve_multipliers(lr: LiuResult, facts: NonzeroFacts) -> MultiplierSolution:
    """Eliminate multipliers by linear solving with certified nonzero coefficients."""
    values: dict[Atom, Expr] = {lam: Expr.const(0) for lam in lr.forced_zero}
    current = list(lr.reduced)
    unsolved = [lam for lam in lr.multipliers if lam not in values]
    warnings: list[str] = []
    while unsolved:
        choice = None
        for single_only in (True, False):
            for i in sorted(range(len(current)), key=lambda i: _priority(lr, i)):
                c = current[i]
                present = [lam for lam in unsolved if lam in c.atoms()]
                if not present or (single_only and len(present) != 1):
                    continue
                for lam in present:
                    if c.num.degree_in(lam) != 1:
                        continue
                    coeff = Expr.poly(c.num.diff(lam))
                    if any(other in coeff.atoms() for other in unsolved) or not facts.proves_nonzero(coeff):
                        continue
                    choice = (lam, -Expr.poly(c.num - c.num.diff(lam) * Poly.atom(lam)) / coeff)
                    break
                if choice:
                    break
            if choice:
                break
        if choice is None:
            break
        lam, value = choice
        values = {k: substitute(v, {lam: value}) for k, v in values.items()}
        values[lam] = value
        unsolved.remove(lam)
        current = [substitute(c, {lam: value}) for c in current]
        logger.debug("%s = %r", lam.name, value)
    if unsolved:
        names = ", ".join(lam.name for lam in unsolved)
        warnings.append(MultiplierEliminationIncomplete(f"multipliers left unsolved: {names}").describe())
        logger.warning("multipliers left unsolved: %s", names)
    physical: list[Expr] = []
    pending: list[Expr] = []
    for c in current:
        n, _ = normalize_constraint(c, facts)
        if n.is_zero() or n in physical or n in pending:
            continue
        (pending if any(lam in n.atoms() for lam in lr.multipliers) else physical).append(n)
    residual = substitute(lr.residual, values)
    return MultiplierSolution(values, unsolved, physical, pending, residual, warnings)


def _zero_atoms(exprs: list[Expr]) -> list[Atom]:
    out: list[Atom] = []
    for c in exprs:
        if c.num.is_monomial() and not c.num.is_constant() and len(c.num.atoms()) == 1:
            a = next(iter(c.num.atoms()))
            if a.is_constitutive:
                out.append(a)
    return out


def _vanishes_with(a: Atom, zeros: list[Atom]) -> bool:
    for z in zeros:
        if z.name != a.name or not a.is_constitutive:
            continue
        if z.kind is AtomKind.CONSTIT or (a.kind is AtomKind.PARTIAL and dominates(a.index, z.index)):
            return True
    return False


def implied(c: Expr, others: list[Expr], facts: NonzeroFacts) -> bool:
    """Whether ``c = 0`` follows from ``others = 0`` by one of three cheap tests."""
    if c in others:
        return True
    for o in others:
        if not o.is_constant() and c.num.divide_exact(o.num) is not None:
            return True
    zeros = _zero_atoms(others)
    killed = {a: Expr.const(0) for a in c.atoms() if _vanishes_with(a, zeros)}
    if not killed:
        return False
    reduced, _ = normalize_constraint(substitute(c, killed), facts)
    return reduced.is_zero() or reduced in others


def compare(lr: LiuResult, cs: ConstraintSystem) -> Comparison:
    """Constraint sets of the two procedures side by side, multipliers eliminated."""
    if lr.model != cs.model:
        raise ValueError("comparison needs results for the same model")
    facts = NonzeroFacts.from_exprs(cs.nonzero)
    solution = solve_multipliers(lr, facts)
    liu = solution.physical
    ss = [c for c in cs.all_constraints() if not c.is_zero()]
    common = [c for c in ss if c in liu]
    liu_only = [c for c in liu if not implied(c, ss, facts)]
    solution_only = [c for c in ss if not implied(c, liu, facts)]
    if solution.unsolved or solution_only:
        verdict = "incomparable"
    elif liu_only:
        verdict = "liu-over-restricts"
    else:
        verdict = "identical"
    logger.info(
        "%s: %s (%d common, %d only Liu, %d only solution set)",
        lr.model.name, verdict, len(common), len(liu_only), len(solution_only),
    )
    return Comparison(verdict, common, liu_only, solution_only, solution)


def run_liu(m: ModelDef, dependency: tuple[Atom, ...] | None = None, nonzero: list[Expr] | None = None) -> tuple[LiuResult, MultiplierSolution]:
    extended, multipliers, dependency = liu_extended(m, dependency)
    facts = NonzeroFacts.from_exprs(list(expand_model(m).nonzero) + list(nonzero or []))
    lr = liu_split(extended, m, multipliers, dependency, facts)
    return lr, solve_multipliers(lr, facts)
