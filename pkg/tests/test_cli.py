from __future__ import annotations

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from entropik import __version__
from entropik.cli import cli
from entropik.dsl.formatter import format_model
from entropik.dsl.parser import parse_model, resolve_model


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def _json(runner: CliRunner, *args: str) -> tuple[int, dict]:
    result = runner.invoke(cli, ["-q", *args, "--output", "json"])
    text = result.stdout
    return result.exit_code, json.loads(text[text.index("{\n"):])


def test_version(runner: CliRunner) -> None:
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_analyze_gas(runner: CliRunner) -> None:
    result = runner.invoke(cli, ["-q", "analyze", "gas1d"])
    assert result.exit_code == 0
    assert "Constraints (3)" in result.stdout
    assert "residual vanishes identically" in result.stdout


def test_analyze_json(runner: CliRunner) -> None:
    code, data = _json(runner, "analyze", "gas1d", "--method", "solution-set")
    assert code == 0
    assert data["command"] == "analyze"
    assert data["method"] == "solution-set"
    assert len(data["solution_set"]["constraints"]) == 3
    assert data["errors"] == []


def test_analyze_mueller_liu(runner: CliRunner) -> None:
    code, data = _json(runner, "analyze", "gas1d", "--method", "mueller-liu")
    assert code == 0
    assert len(data["liu"]["identities"]) == 6
    assert data["liu"]["values"]["Lambda_eps"] == "(deta/deps)"


def test_compare(runner: CliRunner) -> None:
    code, data = _json(runner, "compare", "gas1d")
    assert code == 0
    assert data["comparison"]["verdict"] == "identical"


def test_compare_fluid(runner: CliRunner) -> None:
    code, data = _json(runner, "compare", "fluid2d")
    assert code == 0
    assert data["comparison"]["verdict"] == "identical"
    assert len(data["solution_set"]["constraints"]) == 8


def test_check_nonsimple_family(runner: CliRunner) -> None:
    code, data = _json(runner, "check", "nonsimple2d", "nonsimple-family")
    assert code == 0
    assert data["check"]["passed"]


def test_adiabatic_fluid_split(runner: CliRunner) -> None:
    code, data = _json(
        runner,
        "split", "fluid2d", "--force-residual-zero", "--assume", "deta/dtheta != 0",
        "--pivot", "(deps/dtheta)*(deta/drho/dtheta) - (deta/dtheta)*(deps/drho/dtheta)",
        "--pivot", "(deps/dtheta)*(deta/dtheta/dtheta) - (deta/dtheta)*(deps/dtheta/dtheta)",
    )
    assert code == 0
    assert data["cases"]["leaves"] == 4


def test_split(runner: CliRunner) -> None:
    code, data = _json(runner, "split", "gas1d", "--depth", "3")
    assert code == 0
    assert data["cases"]["leaves"] == 4
    assert len(data["cases"]["pivots"]) == 3


def test_split_with_assumption(runner: CliRunner) -> None:
    code, data = _json(runner, "split", "gas1d", "--assume", "deta/deps = 0")
    assert code == 0
    assert data["cases"]["root"]["assumptions"] == ["(deta/deps) = 0"]


def test_split_rejects_unknown_classifier(runner: CliRunner) -> None:
    result = runner.invoke(cli, ["-q", "split", "gas1d", "--classify", "zeta"])
    assert result.exit_code == 1
    assert "EPK-P001" in result.output


def test_verify(runner: CliRunner) -> None:
    code, data = _json(runner, "verify", "gas1d", "--trials", "40", "--seed", "7")
    assert code == 0
    assert data["oracle"]["identity_passed"] == 40
    assert data["oracle"]["variety_passed"] == 40


def test_verify_with_bindings(runner: CliRunner) -> None:
    code, data = _json(runner, "verify", "gas1d", "--trials", "10", "--bindings", "ideal-gas-bindings")
    assert code == 0
    assert data["oracle"]["bindings"]["vanishes_identically"]
    assert data["oracle"]["bindings"]["entropy"] == "0"


def test_check(runner: CliRunner) -> None:
    result = runner.invoke(cli, ["-q", "check", "gas1d", "ideal-gas-bindings"])
    assert result.exit_code == 0
    assert "PASS" in result.stdout


def test_check_failure_exits_one(runner: CliRunner, tmp_path: Path) -> None:
    bind = tmp_path / "bad.bind"
    bind.write_text("arbitrary eta\nbind p = rho\nbind q1 = 0\nbind Phi1 = 0\n", encoding="utf-8")
    result = runner.invoke(cli, ["-q", "check", "gas1d", str(bind)])
    assert result.exit_code == 1
    assert "FAIL" in result.stdout


def test_parse_error_exits_one(runner: CliRunner, tmp_path: Path) -> None:
    model = tmp_path / "broken.epk"
    model.write_text("independent t x\nfield u\nequation e: dt(u) + dx(w) = 0\n", encoding="utf-8")
    result = runner.invoke(cli, ["-q", "analyze", str(model)])
    assert result.exit_code == 1
    assert "error[EPK-P001]" in result.output
    assert "EPK-D002" in result.output


def test_order_cap_exits_two(runner: CliRunner) -> None:
    code, data = _json(runner, "analyze", "nonsimple2d", "--max-order", "1")
    assert code == 2
    assert data["errors"][0]["code"] == "EPK-S003"


def test_bad_config_exits_one(runner: CliRunner, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("ENTROPIK_DEPTH", "0")
    result = runner.invoke(cli, ["-q", "split", "gas1d"])
    assert result.exit_code == 1
    assert "EPK-C001" in result.output


def test_latex_output(runner: CliRunner) -> None:
    result = runner.invoke(cli, ["-q", "analyze", "gas1d", "--output", "latex"])
    assert result.exit_code == 0
    assert result.stdout.startswith(r"\documentclass{article}")


def test_fmt_round_trips(runner: CliRunner) -> None:
    result = runner.invoke(cli, ["-q", "fmt", "fluid2d"])
    assert result.exit_code == 0
    m = resolve_model("fluid2d")
    assert result.stdout == format_model(m)
    assert parse_model(result.stdout, name="fluid2d").model == m


def test_leading(runner: CliRunner) -> None:
    result = runner.invoke(cli, ["-q", "leading", "gas1d"])
    assert result.exit_code == 0
    assert result.stdout.strip() == "rho_t, u_t, eps_t"


def test_schema(runner: CliRunner) -> None:
    result = runner.invoke(cli, ["schema"])
    assert result.exit_code == 0
    schema = json.loads(result.stdout)
    assert schema["title"] == "AnalysisReport"
