from __future__ import annotations

import asyncio
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction

from entropik.dsl.bindings import Bindings
from entropik.entropy_split import ConstraintSystem
from entropik.kernel.atoms import Atom
from entropik.kernel.expr import Expr
from entropik.kernel.poly import Monomial, Poly

logger = logging.getLogger(__name__)


@dataclass
class TrialResult:
    index: int
    identity_ok: bool = False
    variety_ok: bool | None = None
    entropy: Fraction | None = None
    residual: Fraction | None = None
    skipped: bool = False
    note: str = ""


@dataclass
class Witness:
    constraint: int
    free_element: Atom
    entropy: Fraction


@dataclass
class OracleReport:
    trials: int
    seed: int
    results: list[TrialResult] = field(default_factory=list)
    witnesses: list[Witness] = field(default_factory=list)
    projection: str = ""

    @property
    def identity_passed(self) -> int:
        return sum(1 for r in self.results if r.identity_ok)

    @property
    def variety_passed(self) -> int:
        return sum(1 for r in self.results if r.variety_ok)

    @property
    def skipped(self) -> int:
        return sum(1 for r in self.results if r.skipped)

    @property
    def failures(self) -> list[TrialResult]:
        return [r for r in self.results if not r.skipped and (not r.identity_ok or r.variety_ok is False)]

    @property
    def ok(self) -> bool:
        return not self.failures


def trial_rng(seed: int, index: int) -> random.Random:
    return random.Random(f"entropik-oracle:{seed}:{index}")


def draw(rng: random.Random, bound: int) -> Fraction:
    num = 0
    while num == 0:
        num = rng.randint(-bound, bound)
    return Fraction(num, rng.randint(1, bound))


def _evaluate(p: Poly, point: dict[Atom, Fraction]) -> Fraction:
    return p.evaluate(point)


def _mono_value(m: Monomial, point: dict[Atom, Fraction]) -> Fraction:
    value = Fraction(1)
    for a, k in m:
        value *= point[a] ** k
    return value


def projection_order(constraints: list[Poly], allowed: set[Atom]) -> list[tuple[int, Atom]] | None:
    """Pairs (constraint, atom) to solve in order; each atom is linear in its constraint
    and absent from every constraint solved before it."""
    remaining = list(range(len(constraints)))
    picked: list[tuple[int, Atom]] = []
    while remaining:
        choice = None
        for i in reversed(remaining):
            others = set().union(*(constraints[j].atoms() for j in remaining if j != i))
            linear = [
                a for a in constraints[i].atoms()
                if a in allowed and a not in others and constraints[i].degree_in(a) == 1
            ]
            if linear:
                choice = (i, max(linear))
                break
        if choice is None:
            return None
        picked.append(choice)
        remaining.remove(choice[0])
    picked.reverse()
    return picked


def project(constraints: list[Poly], order: list[tuple[int, Atom]], point: dict[Atom, Fraction]) -> bool:
    """Overwrite the solved atoms in ``point`` so every listed constraint vanishes."""
    for i, atom in order:
        p = constraints[i]
        slope = p.diff(atom).evaluate(point)
        if slope == 0:
            return False
        point[atom] = Fraction(0)
        point[atom] = -p.evaluate(point) / slope
    return True


class Oracle:
    """Exact-rational sampling checks of a constraint system."""

    def __init__(self, system: ConstraintSystem, bound: int = 9, attempts: int = 50) -> None:
        self.system = system
        self.bound = bound
        self.attempts = attempts
        self.entropy = system.entropy
        self.constraint_polys = [c.num for c in system.constraints]
        atoms: set[Atom] = set(self.entropy.atoms())
        for coeff in system.table.values():
            atoms |= coeff.atoms()
        for c in system.constraints + system.nonzero:
            atoms |= c.atoms()
        self.atoms = sorted(atoms)
        self.unknowns = {a for a in self.atoms if a.is_constitutive}
        self.order = projection_order(self.constraint_polys, self.unknowns)

    def _admissible(self, point: dict[Atom, Fraction]) -> bool:
        if _evaluate(self.entropy.den, point) == 0:
            return False
        return all(_evaluate(cond.num, point) != 0 for cond in self.system.nonzero)

    def trial(self, index: int, seed: int) -> TrialResult:
        rng = trial_rng(seed, index)
        result = TrialResult(index)
        for _ in range(self.attempts):
            point = {a: draw(rng, self.bound) for a in self.atoms}
            if not self._admissible(point):
                continue
            numerator = _evaluate(self.entropy.num, point)
            total = sum(
                (_evaluate(coeff.num, point) * _mono_value(mono, point) for mono, coeff in self.system.table.items()),
                Fraction(0),
            )
            result.identity_ok = numerator == total
            if self.order is None:
                return result
            if not project(self.constraint_polys, self.order, point) or not self._admissible(point):
                continue
            den = _evaluate(self.entropy.den, point)
            entropy = _evaluate(self.entropy.num, point) / den
            residual_num = _evaluate(self.system.residual_numerator().num, point)
            result.entropy = entropy
            result.residual = residual_num / den
            result.variety_ok = entropy == result.residual
            return result
        result.skipped = True
        result.note = f"no admissible point in {self.attempts} draws"
        return result

    async def run_async(self, trials: int, seed: int, workers: int = 4) -> OracleReport:
        gate = asyncio.Semaphore(max(1, workers))

        async def one(i: int) -> TrialResult:
            async with gate:
                return await asyncio.to_thread(self.trial, i, seed)

        results = await asyncio.gather(*(one(i) for i in range(trials)))
        report = OracleReport(trials, seed, list(results))
        report.projection = (
            "unavailable: no constraint ordering with exclusive linear unknowns"
            if self.order is None
            else f"{len(self.order)} constraints projected"
        )
        return report

    def run(self, trials: int, seed: int, workers: int = 4) -> OracleReport:
        report = asyncio.run(self.run_async(trials, seed, workers))
        report.witnesses = self.witnesses(seed)
        logger.info(
            "oracle: identity %d/%d, on-variety %d/%d",
            report.identity_passed, trials, report.variety_passed, trials,
        )
        return report

    def witnesses(self, seed: int) -> list[Witness]:
        """For each constraint, a point violating it alone with negative entropy production."""
        out: list[Witness] = []
        free = set(self.system.free)
        for k, monos in enumerate(self.system.sources):
            others = [p for j, p in enumerate(self.constraint_polys) if j != k]
            order = projection_order(others, self.unknowns)
            if order is None:
                continue
            rng = trial_rng(seed, -1 - k)
            found = self._witness(k, monos, others, order, free, rng)
            if found is not None:
                out.append(found)
        return out

    def _witness(self, k, monos, others, order, free, rng) -> Witness | None:
        for _ in range(self.attempts):
            point = {a: draw(rng, self.bound) for a in self.atoms}
            if not project(others, order, point) or not self._admissible(point):
                continue
            if _evaluate(self.constraint_polys[k], point) == 0:
                continue
            for mono in monos:
                linear = [a for a, e in mono if e == 1 and a in free]
                for z in linear:
                    point[z] = Fraction(0)
                    base = _evaluate(self.entropy.num, point)
                    point[z] = Fraction(1)
                    slope = _evaluate(self.entropy.num, point) - base
                    point[z] = Fraction(2)
                    if _evaluate(self.entropy.num, point) != base + 2 * slope or slope == 0:
                        continue
                    den = _evaluate(self.entropy.den, point)
                    target = Fraction(-1) if den > 0 else Fraction(1)
                    point[z] = (target - base) / slope
                    value = _evaluate(self.entropy.num, point) / den
                    if value < 0:
                        return Witness(k, z, value)
        return None


@dataclass
class BindingsReport:
    source: str
    symbolic: Expr
    values: list[Fraction]

    @property
    def vanishes_identically(self) -> bool:
        return self.symbolic.is_zero()

    @property
    def nonnegative(self) -> bool:
        return all(v >= 0 for v in self.values)


def sample_bindings(entropy: Expr, bindings: Bindings, trials: int, seed: int, bound: int = 9, attempts: int = 50) -> BindingsReport:
    """Entropy production of a bound family at random points."""
    bound_entropy = bindings.apply(entropy)
    atoms = sorted(bound_entropy.atoms())
    values: list[Fraction] = []
    for index in range(trials):
        rng = trial_rng(seed, index)
        for _ in range(attempts):
            point = {a: draw(rng, bound) for a in atoms}
            den = bound_entropy.den.evaluate(point)
            if den == 0:
                continue
            values.append(bound_entropy.num.evaluate(point) / den)
            break
    logger.info("bindings %s: %d samples", bindings.source, len(values))
    return BindingsReport(bindings.source, bound_entropy, values)
