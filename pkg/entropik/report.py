"""Serializable analysis reports.

Everything outside ``run`` is a pure function of the model, the options and
the seed, so two runs of the same command produce byte-identical
``deterministic_json``.
"""

from __future__ import annotations

from pydantic import BaseModel, Field

from entropik import __version__
from entropik.candidates import CandidateReport
from entropik.case_analysis import Assumption, CaseNode, CaseTree
from entropik.dsl.formatter import Printer
from entropik.entropy_split import ConstraintSystem
from entropik.errors import EntropikError, ParseFailed
from entropik.kernel.poly import Monomial
from entropik.mueller_liu import Comparison, LiuResult, MultiplierSolution
from entropik.oracle import BindingsReport, OracleReport
from entropik.solution_set import SolvedSystem

SCHEMA_VERSION = "1"


def _mono(p: Printer, mono: Monomial) -> str:
    return "*".join(p.atom(a) + (f"^{k}" if k > 1 else "") for a, k in mono) or "1"


class SolvedSummary(BaseModel):
    keys: list[str]
    values: dict[str, str]
    pivots: list[str]
    consequences: list[str]

    @classmethod
    def build(cls, s: SolvedSystem, p: Printer) -> SolvedSummary:
        return cls(
            keys=[p.atom(k) for k in s.keys],
            values={p.atom(k): p.expr(v) for k, v in s.substitution.items()},
            pivots=[p.expr(e) for e in s.pivots],
            consequences=[f"{p.atom(step.key)}: {step.describe(s.model.indeps)}" for step in s.consequences],
        )


class ConstraintOut(BaseModel):
    index: int
    expr: str
    sources: list[str]


class SolutionSetSection(BaseModel):
    free: list[str]
    constraints: list[ConstraintOut]
    symmetrization: list[str]
    residual: str
    residual_statement: str
    side_conditions: list[str]
    cancellations: list[str] = Field(default_factory=list)

    @classmethod
    def build(cls, cs: ConstraintSystem, p: Printer) -> SolutionSetSection:
        return cls(
            free=[p.atom(a) for a in cs.free],
            constraints=[
                ConstraintOut(index=i, expr=p.expr(c), sources=[_mono(p, m) for m in srcs])
                for i, (c, srcs) in enumerate(zip(cs.constraints, cs.sources), start=1)
            ],
            symmetrization=[p.expr(c) for c in cs.symmetrization],
            residual=p.expr(cs.residual),
            residual_statement=cs.residual_statement(),
            side_conditions=[f"{p.expr(e)} != 0" for e in cs.nonzero],
            cancellations=list(cs.cancellations),
        )


class LiuSection(BaseModel):
    multipliers: list[str]
    dependency: list[str]
    splitting: list[str]
    identities: list[ConstraintOut]
    residual: str
    forced_zero: list[str]
    state_splits: list[str]
    values: dict[str, str]
    unsolved: list[str]
    physical: list[str]
    pending: list[str]

    @classmethod
    def build(cls, lr: LiuResult, solution: MultiplierSolution, p: Printer) -> LiuSection:
        p = Printer(p.indeps, {**p.decls, **{a.name: lr.dependency for a in lr.multipliers}})
        return cls(
            multipliers=[p.atom(a) for a in lr.multipliers],
            dependency=[p.atom(a) for a in lr.dependency],
            splitting=[p.atom(a) for a in lr.splitting],
            identities=[
                ConstraintOut(index=i, expr=p.expr(c), sources=[_mono(p, m) for m in srcs])
                for i, (c, srcs) in enumerate(zip(lr.identities, lr.sources), start=1)
            ],
            residual=p.expr(lr.residual),
            forced_zero=[p.atom(a) for a in lr.forced_zero],
            state_splits=list(lr.state_splits),
            values={p.atom(k): p.expr(v) for k, v in solution.values.items()},
            unsolved=[p.atom(a) for a in solution.unsolved],
            physical=[p.expr(c) for c in solution.physical],
            pending=[p.expr(c) for c in solution.pending],
        )


class ComparisonSection(BaseModel):
    verdict: str
    common: list[str]
    liu_only: list[str]
    solution_only: list[str]

    @classmethod
    def build(cls, c: Comparison, p: Printer) -> ComparisonSection:
        return cls(
            verdict=c.verdict,
            common=[p.expr(e) for e in c.common],
            liu_only=[p.expr(e) for e in c.liu_only],
            solution_only=[p.expr(e) for e in c.solution_only],
        )


def _assumption(a: Assumption, p: Printer) -> str:
    return f"{p.expr(a.expr)} {'=' if a.is_zero else '!='} 0"


class CaseNodeOut(BaseModel):
    assumptions: list[str]
    status: str
    pivot: str | None = None
    solved: dict[str, str] = Field(default_factory=dict)
    constraints: list[str] = Field(default_factory=list)
    needed: list[str] = Field(default_factory=list)
    facts: list[str] = Field(default_factory=list)
    pruned: list[str] = Field(default_factory=list)
    contradiction: str | None = None
    children: list[CaseNodeOut] = Field(default_factory=list)

    @classmethod
    def build(cls, node: CaseNode, p: Printer) -> CaseNodeOut:
        red = node.reduction
        return cls(
            assumptions=[_assumption(a, p) for a in node.assumptions],
            status=node.status,
            pivot=p.expr(node.pivot) if node.pivot is not None else None,
            solved={p.atom(k): p.expr(v) for k, v in sorted(red.solved.items(), key=lambda kv: kv[0].key)},
            constraints=[p.expr(c) for c in red.constraints],
            needed=[p.expr(c) for c in red.needed],
            facts=list(node.facts),
            pruned=list(node.pruned),
            contradiction=red.contradiction,
            children=[cls.build(child, p) for child in node.children],
        )

    def leaves(self) -> list[CaseNodeOut]:
        if not self.children:
            return [self]
        return [leaf for child in self.children for leaf in child.leaves()]


class CaseTreeSection(BaseModel):
    pivots: list[str]
    depth: int
    leaves: int
    root: CaseNodeOut
    warnings: list[str] = Field(default_factory=list)

    @classmethod
    def build(cls, tree: CaseTree, p: Printer) -> CaseTreeSection:
        return cls(
            pivots=[p.expr(e) for e in tree.pivots],
            depth=tree.depth,
            leaves=len(tree.leaves()),
            root=CaseNodeOut.build(tree.root, p),
            warnings=list(tree.warnings),
        )


class BindingsSample(BaseModel):
    source: str
    entropy: str
    vanishes_identically: bool
    nonnegative: bool
    samples: int

    @classmethod
    def build(cls, b: BindingsReport, p: Printer) -> BindingsSample:
        return cls(
            source=b.source,
            entropy=p.expr(b.symbolic),
            vanishes_identically=b.vanishes_identically,
            nonnegative=b.nonnegative,
            samples=len(b.values),
        )


class OracleSection(BaseModel):
    trials: int
    seed: int
    identity_passed: int
    variety_passed: int
    skipped: int
    projection: str
    failures: list[str]
    witnesses: list[str]
    bindings: BindingsSample | None = None

    @property
    def ok(self) -> bool:
        return not self.failures and (self.bindings is None or self.bindings.nonnegative)

    @classmethod
    def build(cls, r: OracleReport, p: Printer, bindings: BindingsReport | None = None) -> OracleSection:
        failures = []
        for t in r.failures:
            what = "identity" if not t.identity_ok else "on-variety"
            failures.append(f"trial {t.index}: {what} check failed (entropy {t.entropy}, residual {t.residual})")
        return cls(
            trials=r.trials,
            seed=r.seed,
            identity_passed=r.identity_passed,
            variety_passed=r.variety_passed,
            skipped=r.skipped,
            projection=r.projection,
            failures=failures,
            witnesses=[
                f"constraint {w.constraint + 1}: {p.atom(w.free_element)} gives entropy production {w.entropy}"
                for w in r.witnesses
            ],
            bindings=BindingsSample.build(bindings, p) if bindings is not None else None,
        )


class CheckOut(BaseModel):
    index: int
    constraint: str
    value: str
    passed: bool


class CheckSection(BaseModel):
    source: str
    passed: bool
    checks: list[CheckOut]
    residual: str
    entropy: str

    @classmethod
    def build(cls, r: CandidateReport, p: Printer) -> CheckSection:
        return cls(
            source=r.source,
            passed=r.passed,
            checks=[CheckOut(index=c.index, constraint=p.expr(c.constraint), value=p.expr(c.value), passed=c.passed) for c in r.checks],
            residual=p.expr(r.residual),
            entropy=p.expr(r.entropy),
        )


class ErrorOut(BaseModel):
    code: str
    message: str
    diagnostics: list[str] = Field(default_factory=list)

    @classmethod
    def build(cls, e: EntropikError) -> ErrorOut:
        diagnostics = [d.describe() for d in e.diagnostics] if isinstance(e, ParseFailed) else []
        return cls(code=e.code, message=e.message, diagnostics=diagnostics)


class RunInfo(BaseModel):
    timings: dict[str, float] = Field(default_factory=dict)
    session_log: list[str] = Field(default_factory=list)


class AnalysisReport(BaseModel):
    version: str = __version__
    schema_version: str = SCHEMA_VERSION
    command: str
    model: str | None = None
    fingerprint: str | None = None
    method: str | None = None
    options: dict[str, str] = Field(default_factory=dict)
    solved: SolvedSummary | None = None
    solution_set: SolutionSetSection | None = None
    liu: LiuSection | None = None
    comparison: ComparisonSection | None = None
    cases: CaseTreeSection | None = None
    oracle: OracleSection | None = None
    check: CheckSection | None = None
    warnings: list[str] = Field(default_factory=list)
    errors: list[ErrorOut] = Field(default_factory=list)
    run: RunInfo = Field(default_factory=RunInfo)

    @property
    def ok(self) -> bool:
        return not self.errors

    def deterministic_json(self) -> str:
        return self.model_dump_json(indent=2, exclude={"run"})
