from __future__ import annotations

import json
import logging

import click

from entropik import __version__
from entropik.components.latex import latex_document
from entropik.components.text import render_report
from entropik.config import get_config
from entropik.errors import ConfigError, EntropikError, ParseFailed
from entropik.report import AnalysisReport
from entropik.state import METHODS, MUELLER_LIU, SOLUTION_SET, AnalysisState

logger = logging.getLogger(__name__)

OUTPUTS = ("text", "json", "latex")


def _report_error(e: EntropikError) -> None:
    click.echo(e.describe(), err=True)
    if isinstance(e, ParseFailed):
        for d in e.diagnostics:
            click.echo(f"  {d.describe()}", err=True)


def _session(ctx: click.Context, command: str, **overrides) -> AnalysisState:
    try:
        config = get_config(overrides)
    except ConfigError as e:
        logger.exception(e)
        _report_error(e)
        ctx.exit(e.exit_code)
    state = AnalysisState(config)
    state.command = command
    state.options = {k: str(v) for k, v in overrides.items() if v is not None}
    return state


def _finish(ctx: click.Context, state: AnalysisState, output: str | None = None) -> None:
    output = output or state.config.output
    verbose = ctx.obj.get("verbose", False)
    if state.error is not None:
        _report_error(state.error)
    if output == "json":
        click.echo(state.report().model_dump_json(indent=2))
    elif state.error is None:
        if output == "latex":
            click.echo(latex_document(state), nl=False)
        else:
            click.echo(render_report(state.report(), verbose), nl=False)
    ctx.exit(state.exit_code)


def _load(ctx: click.Context, state: AnalysisState, model: str, max_order: int | None) -> None:
    if not state.load_model(model, max_order):
        _finish(ctx, state)


output_option = click.option("-o", "--output", type=click.Choice(OUTPUTS), default=None, help="Report format.")
max_order_option = click.option("--max-order", type=int, default=None, help="Highest jet order the closure may reach.")
dependency_option = click.option(
    "--multiplier-dep", default=None, metavar="ARGS", help="Multiplier arguments, e.g. 'rho, eps' (mueller-liu)."
)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Debug logging and the session log in text output.")
@click.option("-q", "--quiet", is_flag=True, help="Only warnings and errors on the log.")
@click.version_option(__version__, prog_name="entropik")
@click.pass_context
def cli(ctx: click.Context, verbose: bool, quiet: bool) -> None:
    """Exploit the entropy principle for a model of balance equations."""
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    if verbose:
        level = "DEBUG"
    elif quiet:
        level = "WARNING"
    else:
        try:
            level = get_config().log_level
        except ConfigError:
            level = "INFO"
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger().setLevel(level)


@cli.command()
@click.argument("model")
@click.option("--method", type=click.Choice(METHODS), default=SOLUTION_SET, show_default=True)
@output_option
@max_order_option
@dependency_option
@click.pass_context
def analyze(ctx, model, method, output, max_order, multiplier_dep):
    """Constraints and residual of MODEL (a .epk file or a bundled model name)."""
    state = _session(ctx, "analyze", output=output)
    state.method = method
    _load(ctx, state, model, max_order)
    if method == MUELLER_LIU:
        state.run_mueller_liu(multiplier_dep)
    else:
        state.run_solution_set()
    _finish(ctx, state, output)


@cli.command()
@click.argument("model")
@output_option
@max_order_option
@dependency_option
@click.pass_context
def compare(ctx, model, output, max_order, multiplier_dep):
    """Run both methods and compare their constraint sets."""
    state = _session(ctx, "compare", output=output)
    _load(ctx, state, model, max_order)
    state.run_compare(multiplier_dep)
    _finish(ctx, state, output)


@cli.command()
@click.argument("model")
@click.option("--assume", "assumptions", multiple=True, metavar="EXPR", help="'EXPR = 0' or 'EXPR != 0', repeatable.")
@click.option("--pivot", "pivots", multiple=True, metavar="EXPR", help="Pivot to branch on, repeatable.")
@click.option("--depth", type=int, default=None, help="Depth cap of the case tree.")
@click.option("--force-residual-zero", is_flag=True, help="Treat the residual as a constraint (locally adiabatic).")
@click.option("--classify", default=None, metavar="SYMS", help="Classifying constitutive symbols, e.g. 'eta, Phi1'.")
@output_option
@max_order_option
@click.pass_context
def split(ctx, model, assumptions, pivots, depth, force_residual_zero, classify, output, max_order):
    """Case tree over vanishing and nonvanishing pivots."""
    state = _session(ctx, "split", output=output, depth=depth)
    _load(ctx, state, model, max_order)
    state.run_split(assumptions, pivots, depth, force_residual_zero, classify)
    _finish(ctx, state, output)


@cli.command()
@click.argument("model")
@click.option("--trials", type=int, default=None, help="Number of random trials.")
@click.option("--seed", type=int, default=None, help="Seed of the trial generator.")
@click.option("--bindings", default=None, metavar="FILE", help="Also sample the entropy production of a bound family.")
@output_option
@max_order_option
@click.pass_context
def verify(ctx, model, trials, seed, bindings, output, max_order):
    """Exact-rational sampling of the split and of the solved variety."""
    state = _session(ctx, "verify", output=output, trials=trials, seed=seed)
    _load(ctx, state, model, max_order)
    state.run_verify(trials, seed, bindings)
    _finish(ctx, state, output)


@cli.command()
@click.argument("model")
@click.argument("bindings")
@output_option
@max_order_option
@click.pass_context
def check(ctx, model, bindings, output, max_order):
    """Substitute the family in BINDINGS into every constraint of MODEL."""
    state = _session(ctx, "check", output=output)
    _load(ctx, state, model, max_order)
    state.run_check(bindings)
    _finish(ctx, state, output)


@cli.command()
def schema():
    """Print the JSON schema of analysis reports."""
    click.echo(json.dumps(AnalysisReport.model_json_schema(), indent=2, sort_keys=True))


@cli.command()
@click.argument("model")
@click.pass_context
def fmt(ctx, model):
    """Print MODEL in canonical form."""
    state = _session(ctx, "fmt")
    _load(ctx, state, model, None)
    click.echo(state.canonical_text(), nl=False)


@cli.command()
@click.argument("model")
@click.pass_context
def leading(ctx, model):
    """Suggest leading derivatives: the highest time derivative per equation."""
    state = _session(ctx, "leading")
    _load(ctx, state, model, None)
    click.echo(", ".join(state.leading_suggestion()))
