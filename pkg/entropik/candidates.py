"""Check a closed-form constitutive family against a constraint system."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from entropik.dsl.bindings import Bindings
from entropik.entropy_split import ConstraintSystem
from entropik.kernel.expr import Expr

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConstraintCheck:
    index: int
    constraint: Expr
    value: Expr

    @property
    def passed(self) -> bool:
        return self.value.is_zero()


@dataclass
class CandidateReport:
    source: str
    checks: list[ConstraintCheck] = field(default_factory=list)
    residual: Expr = field(default_factory=lambda: Expr.const(0))
    entropy: Expr = field(default_factory=lambda: Expr.const(0))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[ConstraintCheck]:
        return [c for c in self.checks if not c.passed]


def check_candidate(cs: ConstraintSystem, bindings: Bindings) -> CandidateReport:
    """Substitute the bound family into every constraint; a constraint passes iff it vanishes.

    The residual and the entropy production on solutions are evaluated too, their
    sign is left to the reader.
    """
    report = CandidateReport(bindings.source)
    for i, c in enumerate(cs.all_constraints(), start=1):
        report.checks.append(ConstraintCheck(i, c, bindings.apply(c)))
    report.residual = bindings.apply(cs.residual)
    report.entropy = bindings.apply(cs.entropy)
    logger.info(
        "%s against %s: %d/%d constraints vanish",
        bindings.source, cs.model.name, len(report.checks) - len(report.failures), len(report.checks),
    )
    return report
