from entropik.components.cases import case_tree
from entropik.report import (
    AnalysisReport,
    CheckSection,
    ComparisonSection,
    LiuSection,
    OracleSection,
    SolutionSetSection,
    SolvedSummary,
)


def heading(title: str) -> list[str]:
    return ["", title, "-" * len(title)]


def solved_panel(s: SolvedSummary) -> list[str]:
    lines = heading("Solved form")
    lines.append("solved for: " + ", ".join(s.keys))
    for step in s.consequences:
        lines.append(f"closure {step}")
    if s.pivots:
        lines.append("divided by: " + "; ".join(s.pivots))
    return lines


def solution_set_panel(s: SolutionSetSection) -> list[str]:
    lines = heading(f"Constraints ({len(s.constraints)})")
    for c in s.constraints:
        lines.append(f"({c.index}) {c.expr} = 0    [from {', '.join(c.sources)}]")
    for c in s.symmetrization:
        lines.append(f"(sym) {c} = 0")
    lines.extend(heading("Residual"))
    lines.append(s.residual)
    lines.append(s.residual_statement)
    if s.side_conditions:
        lines.append("where " + ", ".join(s.side_conditions))
    return lines


def liu_panel(s: LiuSection) -> list[str]:
    lines = heading(f"Liu identities ({len(s.identities)})")
    lines.append("multipliers: " + ", ".join(s.multipliers) + " of " + ", ".join(s.dependency))
    for c in s.identities:
        lines.append(f"({c.index}) {c.expr} = 0")
    for note in s.state_splits:
        lines.append(f"state split: {note}")
    lines.extend(heading("Multipliers"))
    for key, value in s.values.items():
        lines.append(f"{key} = {value}")
    if s.unsolved:
        lines.append("unsolved: " + ", ".join(s.unsolved))
    lines.extend(heading("Identities without multipliers"))
    lines.extend(f"{c} = 0" for c in s.physical)
    lines.extend(f"{c} = 0  (still has multipliers)" for c in s.pending)
    return lines


def comparison_panel(s: ComparisonSection) -> list[str]:
    lines = heading(f"Verdict: {s.verdict}")
    lines.append(f"{len(s.common)} constraints in common")
    lines.extend(f"only Liu: {c} = 0" for c in s.liu_only)
    lines.extend(f"only solution set: {c} = 0" for c in s.solution_only)
    return lines


def oracle_panel(s: OracleSection) -> list[str]:
    lines = heading(f"Oracle ({s.trials} trials, seed {s.seed})")
    lines.append(f"identity checks: {s.identity_passed}/{s.trials}")
    lines.append(f"on-variety checks: {s.variety_passed}/{s.trials} ({s.projection})")
    if s.skipped:
        lines.append(f"skipped: {s.skipped}")
    lines.extend(f"FAIL {f}" for f in s.failures)
    lines.extend(f"witness {w}" for w in s.witnesses)
    if s.bindings is not None:
        b = s.bindings
        lines.append(f"bindings {b.source}: entropy production {b.entropy}")
        if b.vanishes_identically:
            lines.append("entropy production vanishes identically")
        else:
            lines.append(f"{b.samples} samples, {'all' if b.nonnegative else 'not all'} nonnegative")
    return lines


def check_panel(s: CheckSection) -> list[str]:
    lines = heading(f"Candidate {s.source}: {'PASS' if s.passed else 'FAIL'}")
    for c in s.checks:
        mark = "ok  " if c.passed else "FAIL"
        lines.append(f"{mark} ({c.index}) {c.constraint}" + ("" if c.passed else f"  ->  {c.value}"))
    lines.append(f"residual: {s.residual}")
    return lines


def render_report(report: AnalysisReport, verbose: bool = False) -> str:
    lines = [f"entropik {report.version}: {report.command} {report.model or ''}".rstrip()]
    if report.fingerprint:
        lines.append(f"model fingerprint {report.fingerprint[:16]}")
    if report.solved is not None:
        lines.extend(solved_panel(report.solved))
    if report.solution_set is not None and report.method != "mueller-liu":
        lines.extend(solution_set_panel(report.solution_set))
    if report.liu is not None:
        lines.extend(liu_panel(report.liu))
    if report.comparison is not None:
        lines.extend(comparison_panel(report.comparison))
    if report.cases is not None:
        lines.append("")
        lines.append(case_tree(report.cases))
    if report.oracle is not None:
        lines.extend(oracle_panel(report.oracle))
    if report.check is not None:
        lines.extend(check_panel(report.check))
    for w in report.warnings:
        lines.append(f"warning: {w}")
    if verbose:
        lines.extend(heading("Session log"))
        lines.extend(report.run.session_log)
        lines.append("timings: " + ", ".join(f"{k} {v:.3f}s" for k, v in report.run.timings.items()))
    return "\n".join(lines) + "\n"
