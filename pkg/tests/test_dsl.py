from __future__ import annotations

from pathlib import Path

import pytest

from entropik.dsl import diagnostics as dx
from entropik.dsl.bindings import parse_bindings, resolve_bindings
from entropik.dsl.formatter import Printer, fingerprint, format_model
from entropik.dsl.parser import parse_model, resolve_model
from entropik.errors import InvalidBinding, NonRationalBinding, ParseFailed, UnboundSymbol
from entropik.kernel.atoms import constit, jet, partial
from entropik.kernel.expr import Expr
from entropik.model import ModelDef, expand_model

from tests.conftest import expression

HEAT = """\
# heat conduction in one dimension
independent t x
field theta
constitutive q(theta, theta_x)
constitutive eta(theta)
constitutive Phi(theta, theta_x)
equation energy: dt(theta) + dx(q) = 0
entropy: dt(eta) + dx(Phi) >= 0
leading: dt(theta)
"""


def _codes(text: str) -> list[str]:
    return [d.code for d in parse_model(text).errors]


def test_parse_small_model() -> None:
    result = parse_model(HEAT, file="heat.epk")
    assert result.ok and not result.errors
    m = result.model
    assert m.name == "heat"
    assert m.indeps == ("t", "x")
    assert m.fields == ("theta",)
    assert [d.name for d in m.decls] == ["q", "eta", "Phi"]
    assert m.decl("q").args == (jet("theta", (0, 0)), jet("theta", (0, 1)))
    assert m.leading == (jet("theta", (1, 0)),)


def test_expansion_uses_chain_rule(gas: ModelDef) -> None:
    mass = expand_model(gas).equations[0]
    rho_t, rho_x, u_x = jet("rho", (1, 0)), jet("rho", (0, 1)), jet("u", (0, 1))
    rho, u = jet("rho", (0, 0)), jet("u", (0, 0))
    assert mass == Expr.atom(rho_t) + Expr.atom(rho_x) * Expr.atom(u) + Expr.atom(rho) * Expr.atom(u_x)


@pytest.mark.parametrize(
    ("text", "code"),
    [
        (HEAT.replace("dx(q)", "dx(w)"), dx.UNKNOWN_IDENTIFIER),
        (HEAT.replace("entropy: dt(eta) + dx(Phi) >= 0\n", ""), dx.REQUIRED_LINE),
        (HEAT + "entropy: dt(eta) >= 0\n", dx.REQUIRED_LINE),
        (HEAT.replace("constitutive eta(theta)", "constitutive eta(theta)\nconstitutive eta(theta)"), dx.DUPLICATE),
        (HEAT.replace("dx(q)", "dx(q(theta))"), dx.ARITY),
        (HEAT.replace("leading: dt(theta)", "leading: theta"), dx.INVALID_LEADING),
        (HEAT.replace("constitutive q(theta, theta_x)", "constitutive q(theta, w)"), dx.INVALID_DECLARATION),
        (HEAT.replace("dt(theta) + dx(q)", "dt(theta) + 1.5*dx(q)"), dx.SYNTAX),
        (HEAT.replace("equation", "equaton"), dx.SYNTAX),
    ],
)
def test_diagnostics(text: str, code: str) -> None:
    assert code in _codes(text)


def test_diagnostics_are_located() -> None:
    result = parse_model(HEAT.replace("dx(q)", "dx(w)"), file="heat.epk")
    assert result.model is None
    d = result.errors[0]
    assert d.span.file == "heat.epk"
    assert d.span.line == 7
    assert d.describe().startswith("heat.epk:7:")


@pytest.mark.parametrize("entry", ["0", "2*3", "theta, 1"])
def test_constant_nonzero_assumption_is_rejected(entry: str) -> None:
    result = parse_model(HEAT + f"assume nonzero: {entry}\n", file="heat.epk")
    assert result.model is None
    d = next(e for e in result.errors if e.code == dx.INVALID_DECLARATION)
    assert d.span.line == 10
    assert "variable" in d.message


def test_missing_leading_line_hints_at_suggestion() -> None:
    errors = parse_model(HEAT.replace("leading: dt(theta)\n", "")).errors
    assert any(e.code == dx.REQUIRED_LINE and e.hint for e in errors)


def test_leading_derivative_of_another_is_rejected() -> None:
    text = HEAT.replace("leading: dt(theta)", "leading: dt(theta), dt(dx(theta))")
    assert dx.INVALID_LEADING in _codes(text)


def test_unused_symbol_is_a_warning() -> None:
    result = parse_model(HEAT.replace("constitutive Phi(theta, theta_x)", "constitutive Phi(theta, theta_x)\nconstitutive z(theta)"))
    assert result.ok
    assert any("never used" in d.message for d in result.diagnostics)


@pytest.mark.parametrize("name", ["gas1d", "fluid2d", "nonsimple2d", "granular2d"])
def test_canonical_form_round_trips(name: str) -> None:
    m = resolve_model(name)
    text = format_model(m)
    again = parse_model(text, name=m.name).model
    assert again == m
    assert format_model(again) == text
    assert fingerprint(again) == fingerprint(m)


def test_resolve_model_from_path(tmp_path: Path) -> None:
    path = tmp_path / "heat.epk"
    path.write_text(HEAT, encoding="utf-8")
    assert resolve_model(str(path)).name == "heat"
    with pytest.raises(FileNotFoundError):
        resolve_model(str(tmp_path / "missing.epk"))
    path.write_text(HEAT.replace("dx(q)", "dx(w)"), encoding="utf-8")
    with pytest.raises(ParseFailed) as info:
        resolve_model(str(path))
    assert info.value.diagnostics


def test_printer_names(gas: ModelDef) -> None:
    p = Printer.for_model(gas)
    assert p.atom(jet("rho", (1, 1))) == "rho_tx"
    assert p.atom(partial("eta", (0, 1))) == "(deta/deps)"
    assert p.atom(partial("eta", (2, 0))) == "(deta/drho/drho)"
    e = expression(gas, "(deta/deps)*rho - 2*u_x")
    assert expression(gas, p.expr(e)) == e


def test_ideal_gas_bindings(gas: ModelDef) -> None:
    b = resolve_bindings("ideal-gas-bindings", gas)
    assert set(b.parameters) == {"gamma", "Cv"}
    assert b.apply(Expr.atom(constit("q1"))).is_zero()
    gamma = Expr.atom(constit("gamma"))
    rho, eps = Expr.atom(jet("rho", (0, 0))), Expr.atom(jet("eps", (0, 0)))
    assert b.apply(Expr.atom(partial("p", (1, 0)))) == (gamma - 1) * eps
    assert b.apply(Expr.atom(partial("eta", (0, 2)))) == -Expr.atom(constit("Cv")) / (eps * eps)
    assert b.apply(Expr.atom(partial("eta", (1, 1)))).is_zero()
    assert b.apply(rho) == rho


def test_unbound_symbol(gas: ModelDef) -> None:
    b = parse_bindings("bind q1 = 0\n", gas)
    with pytest.raises(UnboundSymbol):
        b.apply(Expr.atom(constit("p")))


def test_nonrational_binding_is_rejected(gas: ModelDef) -> None:
    with pytest.raises(NonRationalBinding):
        parse_bindings("bind eta = log(eps)\n", gas)


@pytest.mark.parametrize(
    "text",
    [
        "bind rho = 1\n",
        "parameter p\n",
        "arbitrary w\n",
        "parameter c = rho\n",
        "let p = 1\n",
    ],
)
def test_invalid_bindings(gas: ModelDef, text: str) -> None:
    with pytest.raises(InvalidBinding):
        parse_bindings(text, gas)
