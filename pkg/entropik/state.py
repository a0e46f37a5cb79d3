from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from datetime import datetime

from entropik.candidates import CandidateReport, check_candidate
from entropik.case_analysis import CaseTree, build_tree, parse_assumption, parse_pivot
from entropik.config import Config, get_config
from entropik.dsl.bindings import Bindings, resolve_bindings
from entropik.dsl.formatter import Printer, fingerprint, format_model
from entropik.dsl.parser import Scope, resolve_model
from entropik.entropy_split import ConstraintSystem, analyze
from entropik.errors import EntropikError, ParseFailed
from entropik.kernel.atoms import Atom
from entropik.model import ModelDef, suggest_leading
from entropik.mueller_liu import Comparison, LiuResult, MultiplierSolution, compare, run_liu
from entropik.oracle import BindingsReport, Oracle, OracleReport, sample_bindings
from entropik.report import (
    AnalysisReport,
    CaseTreeSection,
    CheckSection,
    ComparisonSection,
    ErrorOut,
    LiuSection,
    OracleSection,
    RunInfo,
    SolutionSetSection,
    SolvedSummary,
)
from entropik.solution_set import SolvedSystem, solve_model, verify_solved

logger = logging.getLogger(__name__)

SOLUTION_SET = "solution-set"
MUELLER_LIU = "mueller-liu"
METHODS = (SOLUTION_SET, MUELLER_LIU)


class AnalysisState:
    """One analysis session: the loaded model, every pipeline result and the session log."""

    def __init__(self, config: Config | None = None) -> None:
        self.config = config or get_config()
        self.command = ""
        self.method: str | None = None
        self.options: dict[str, str] = {}
        self.source: ModelDef | None = None
        self.model: ModelDef | None = None
        self.printer: Printer | None = None
        self.solved: SolvedSystem | None = None
        self.system: ConstraintSystem | None = None
        self.liu: LiuResult | None = None
        self.multipliers: MultiplierSolution | None = None
        self.comparison: Comparison | None = None
        self.tree: CaseTree | None = None
        self.oracle: OracleReport | None = None
        self.bindings_sample: BindingsReport | None = None
        self.candidate: CandidateReport | None = None
        self.warnings: list[str] = []
        self.error: EntropikError | None = None
        self.session_log: list[str] = []
        self.timings: dict[str, float] = {}

    @property
    def is_loaded(self) -> bool:
        return self.model is not None

    @property
    def failed_checks(self) -> bool:
        if self.candidate is not None and not self.candidate.passed:
            return True
        if self.oracle is not None and not self.oracle.ok:
            return True
        return self.bindings_sample is not None and not self.bindings_sample.nonnegative

    @property
    def exit_code(self) -> int:
        if self.error is not None:
            return self.error.exit_code
        return 1 if self.failed_checks else 0

    def _log_message(self, message: str) -> None:
        if not self.config.session_log:
            return
        timestamp = datetime.now().strftime("%H:%M:%S")
        self.session_log.append(f"[{timestamp}] {message}")

    def _fail(self, e: EntropikError) -> bool:
        self.error = e
        self._log_message(f"ERROR: {e.describe()}")
        return False

    @contextmanager
    def _stage(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = round(self.timings.get(name, 0.0) + time.perf_counter() - start, 6)

    def load_model(self, name: str, max_order: int | None = None) -> bool:
        """Parse a model file or a bundled model name.

        An explicit ``max_order`` beats the model's own line, which beats the
        configured default.
        """
        self._log_message(f"Loading model {name}...")
        try:
            with self._stage("parse"):
                m = resolve_model(name)
        except FileNotFoundError as e:
            logger.exception(e)
            return self._fail(ParseFailed(str(e), []))
        except EntropikError as e:
            logger.exception(e)
            return self._fail(e)
        self.source = m
        if max_order is not None:
            m = m.with_max_order(max_order)
        elif m.max_order is None:
            m = m.with_max_order(self.config.max_order)
        self.model = m
        self.printer = Printer.for_model(m)
        self._log_message(
            f"Loaded {m.name}: {len(m.equations)} equations, {len(m.decls)} constitutive symbols, order cap {m.order_cap}"
        )
        return True

    def _scope(self) -> Scope:
        m = self.model
        return Scope(m.indeps, m.fields, {d.name: d.args for d in m.decls})

    def run_solution_set(self) -> bool:
        if self.system is not None:
            return True
        self._log_message("Solving for the leading derivatives...")
        try:
            with self._stage("solve"):
                self.solved = solve_model(self.model)
                residues = verify_solved(self.model, self.solved)
            for step in self.solved.consequences:
                self._log_message(f"Closure: {self.printer.atom(step.key)} from {step.describe(self.model.indeps)}")
            bad = [r.label for r in residues if not r.ok]
            if bad:
                self.warnings.append("solved system leaves nonzero residues in " + ", ".join(bad))
            with self._stage("split"):
                self.system = analyze(self.model, self.solved)
        except EntropikError as e:
            logger.exception(e)
            return self._fail(e)
        for note in self.system.cancellations:
            self._log_message(f"Cancellation: {note}")
        self._log_message(
            f"Split over {len(self.system.free)} free elements: {len(self.system.constraints)} constraints, "
            f"{self.system.residual_statement()}"
        )
        return True

    def parse_dependency(self, names: str | None) -> tuple[Atom, ...] | None:
        """Comma or space separated jet variable names, such as ``rho, eps``."""
        if not names:
            return None
        scope = self._scope()
        out: list[Atom] = []
        for name in names.replace(",", " ").split():
            atom = scope.jet_atom(name)
            if atom is None:
                raise ParseFailed(f"multiplier dependency {name!r} is not a field jet variable", [])
            out.append(atom)
        return tuple(out)

    def run_mueller_liu(self, dependency: str | None = None) -> bool:
        if self.liu is not None:
            return True
        self._log_message("Building the extended entropy inequality...")
        try:
            deps = self.parse_dependency(dependency)
            with self._stage("liu"):
                self.liu, self.multipliers = run_liu(self.model, deps)
        except EntropikError as e:
            logger.exception(e)
            return self._fail(e)
        self.warnings.extend(self.multipliers.warnings)
        for note in self.liu.state_splits:
            self._log_message(f"State split: {note}")
        self._log_message(
            f"Liu identities: {len(self.liu.identities)}, multipliers solved "
            f"{len(self.multipliers.values)}/{len(self.liu.multipliers)}"
        )
        return True

    def run_compare(self, dependency: str | None = None) -> bool:
        if not self.run_solution_set() or not self.run_mueller_liu(dependency):
            return False
        try:
            with self._stage("compare"):
                self.comparison = compare(self.liu, self.system)
        except EntropikError as e:
            logger.exception(e)
            return self._fail(e)
        self.multipliers = self.comparison.multipliers
        self._log_message(f"Verdict: {self.comparison.verdict}")
        return True

    def run_split(
        self,
        assumptions: tuple[str, ...] = (),
        pivots: tuple[str, ...] = (),
        depth: int | None = None,
        force_residual_zero: bool = False,
        classify: str | None = None,
    ) -> bool:
        if not self.run_solution_set():
            return False
        try:
            parsed = tuple(parse_assumption(text, self.model) for text in assumptions)
            chosen = [parse_pivot(text, self.system) for text in pivots] or None
            names = None
            if classify:
                names = tuple(classify.replace(",", " ").split())
                unknown = [n for n in names if n not in {d.name for d in self.model.decls}]
                if unknown:
                    raise ParseFailed(f"--classify names unknown constitutive symbols: {', '.join(unknown)}", [])
            with self._stage("cases"):
                self.tree = build_tree(
                    self.system,
                    chosen,
                    depth or self.config.depth,
                    parsed,
                    names,
                    force_residual_zero,
                    self.config.workers,
                )
        except EntropikError as e:
            logger.exception(e)
            return self._fail(e)
        self.warnings.extend(self.tree.warnings)
        for node in self.tree.root.walk():
            for line in node.reduction.certificates:
                self._log_message(f"Case certificate: {line}")
        self._log_message(f"Case tree: {len(self.tree.leaves())} leaves")
        return True

    def _bindings(self, name: str) -> Bindings | None:
        try:
            return resolve_bindings(name, self.model)
        except FileNotFoundError as e:
            logger.exception(e)
            self._fail(ParseFailed(str(e), []))
        except EntropikError as e:
            logger.exception(e)
            self._fail(e)
        return None

    def run_verify(self, trials: int | None = None, seed: int | None = None, bindings: str | None = None) -> bool:
        if not self.run_solution_set():
            return False
        trials = self.config.trials if trials is None else trials
        seed = self.config.seed if seed is None else seed
        self._log_message(f"Sampling {trials} trials with seed {seed}...")
        oracle = Oracle(self.system, self.config.oracle_range, self.config.oracle_attempts)
        try:
            with self._stage("oracle"):
                self.oracle = oracle.run(trials, seed, self.config.workers)
        except EntropikError as e:
            logger.exception(e)
            return self._fail(e)
        if bindings is not None:
            b = self._bindings(bindings)
            if b is None:
                return False
            try:
                with self._stage("bindings"):
                    self.bindings_sample = sample_bindings(
                        self.system.entropy, b, trials, seed, self.config.oracle_range, self.config.oracle_attempts
                    )
            except EntropikError as e:
                logger.exception(e)
                return self._fail(e)
        self._log_message(
            f"Identity {self.oracle.identity_passed}/{trials}, on-variety {self.oracle.variety_passed}/{trials}"
        )
        return True

    def run_check(self, bindings: str) -> bool:
        if not self.run_solution_set():
            return False
        b = self._bindings(bindings)
        if b is None:
            return False
        try:
            with self._stage("check"):
                self.candidate = check_candidate(self.system, b)
        except EntropikError as e:
            logger.exception(e)
            return self._fail(e)
        self._log_message(
            f"Candidate {b.source}: {'passes' if self.candidate.passed else 'fails'} "
            f"({len(self.candidate.failures)} failing constraints)"
        )
        return True

    def canonical_text(self) -> str:
        return format_model(self.source)

    def leading_suggestion(self) -> list[str]:
        return [self.printer.atom(a) for a in suggest_leading(self.model)]

    def report(self) -> AnalysisReport:
        p = self.printer
        r = AnalysisReport(command=self.command, method=self.method, options=dict(self.options))
        if self.model is not None:
            r.model = self.model.name
            r.fingerprint = fingerprint(self.model)
        if self.solved is not None:
            r.solved = SolvedSummary.build(self.solved, p)
        if self.system is not None:
            r.solution_set = SolutionSetSection.build(self.system, p)
        if self.liu is not None:
            r.liu = LiuSection.build(self.liu, self.multipliers, p)
        if self.comparison is not None:
            r.comparison = ComparisonSection.build(self.comparison, p)
        if self.tree is not None:
            r.cases = CaseTreeSection.build(self.tree, p)
        if self.oracle is not None:
            r.oracle = OracleSection.build(self.oracle, p, self.bindings_sample)
        if self.candidate is not None:
            r.check = CheckSection.build(self.candidate, p)
        r.warnings = list(self.warnings)
        if self.error is not None:
            r.errors = [ErrorOut.build(self.error)]
        r.run = RunInfo(timings=dict(self.timings), session_log=list(self.session_log))
        return r
