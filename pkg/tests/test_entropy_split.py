from __future__ import annotations

import pytest

from entropik.entropy_split import ConstraintSystem, NonzeroFacts, normalize_constraint, split
from entropik.errors import NotPolynomialInFreeElements
from entropik.kernel.atoms import jet
from entropik.kernel.expr import Expr
from entropik.model import ModelDef

from tests.conftest import expression


def _normal(cs: ConstraintSystem, e: Expr) -> Expr:
    return normalize_constraint(e, NonzeroFacts.from_exprs(cs.nonzero))[0]


def test_gas_constraints(gas: ModelDef, gas_system: ConstraintSystem) -> None:
    expected = [
        expression(gas, "rho^2*(deta/drho) + p*(deta/deps)"),
        expression(gas, "(dPhi1/drho) - (deta/deps)*(dq1/drho)"),
        expression(gas, "(dPhi1/deps) - (deta/deps)*(dq1/deps)"),
    ]
    assert len(gas_system.constraints) == 3
    assert set(gas_system.constraints) == {_normal(gas_system, e) for e in expected}
    assert gas_system.residual.is_zero()
    assert gas_system.residual_statement() == "residual vanishes identically"


def test_gas_free_elements(gas_system: ConstraintSystem) -> None:
    free = set(gas_system.free)
    for name in ("rho", "u", "eps"):
        assert jet(name, (0, 1)) in free
    assert jet("rho", (0, 0)) not in free
    assert jet("rho", (1, 0)) not in free


def test_sources_point_at_free_monomials(gas_system: ConstraintSystem) -> None:
    assert len(gas_system.sources) == len(gas_system.constraints)
    u_x = jet("u", (0, 1))
    sources = [mono for srcs in gas_system.sources for mono in srcs]
    assert ((u_x, 1),) in sources


BRACKET = "rho^2*((deps/drho)*(deta/dtheta) - (deps/dtheta)*(deta/drho))"


def test_fluid_constraints(fluid: ModelDef, fluid_system: ConstraintSystem) -> None:
    expected = [
        expression(fluid, "(deps/dtheta)*(dPhi1/drho) - (deta/dtheta)*(dq1/drho)"),
        expression(fluid, "(deps/dtheta)*(dPhi2/drho) - (deta/dtheta)*(dq2/drho)"),
        expression(fluid, f"{BRACKET} + (deta/dtheta)*T11"),
        expression(fluid, f"{BRACKET} + (deta/dtheta)*T22"),
        expression(fluid, "(deta/dtheta)*T12"),
        expression(fluid, "(deps/dtheta)*(dPhi1/dtheta_x) - (deta/dtheta)*(dq1/dtheta_x)"),
        expression(fluid, "(deps/dtheta)*(dPhi2/dtheta_y) - (deta/dtheta)*(dq2/dtheta_y)"),
        expression(
            fluid,
            "(deps/dtheta)*((dPhi1/dtheta_y) + (dPhi2/dtheta_x)) - (deta/dtheta)*((dq1/dtheta_y) + (dq2/dtheta_x))",
        ),
    ]
    assert len(fluid_system.constraints) == 8
    assert set(fluid_system.constraints) == {_normal(fluid_system, e) for e in expected}
    assert fluid_system.symmetrization == []


def test_fluid_residual(fluid: ModelDef, fluid_system: ConstraintSystem) -> None:
    residual = expression(
        fluid,
        "(theta_x*((deps/dtheta)*(dPhi1/dtheta) - (deta/dtheta)*(dq1/dtheta))"
        " + theta_y*((deps/dtheta)*(dPhi2/dtheta) - (deta/dtheta)*(dq2/dtheta)))/(deps/dtheta)",
    )
    assert fluid_system.residual == residual


def test_fluid_side_condition_is_only_the_energy_derivative(fluid: ModelDef, fluid_system: ConstraintSystem) -> None:
    assert expression(fluid, "deps/dtheta") in fluid_system.nonzero
    assert expression(fluid, "deta/dtheta") not in fluid_system.nonzero
    # the isotropy constraint keeps its temperature factor
    assert _normal(fluid_system, expression(fluid, "T12")) not in fluid_system.constraints


@pytest.mark.parametrize("system", ["gas_system", "fluid_system", "nonsimple_system"])
def test_reconstruction_identity(system: str, request: pytest.FixtureRequest) -> None:
    cs = request.getfixturevalue(system)
    assert cs.reconstruct() == cs.entropy.num
    assert cs.residual_numerator().num == cs.table.get((), Expr.const(0)).num


def test_constraints_are_normalized(fluid_system: ConstraintSystem) -> None:
    facts = NonzeroFacts.from_exprs(fluid_system.nonzero)
    for c in fluid_system.constraints:
        _, lc = c.num.leading()
        assert lc == 1
        assert normalize_constraint(c, facts)[0] == c
        assert not c.is_constant()


def test_normalize_constraint_drops_certified_factors(gas: ModelDef) -> None:
    facts = NonzeroFacts.from_exprs([expression(gas, "rho")])
    c, notes = normalize_constraint(expression(gas, "-2*rho*(deta/drho)"), facts)
    assert c == expression(gas, "(deta/drho)")
    assert notes
    kept, _ = normalize_constraint(expression(gas, "(dp/drho)*(deta/drho)"), facts)
    assert kept == expression(gas, "(dp/drho)*(deta/drho)")


def test_nonzero_facts(gas: ModelDef) -> None:
    facts = NonzeroFacts.from_exprs([expression(gas, "(deta/deps)"), expression(gas, "(dp/drho) + 1")])
    assert facts.proves_nonzero(expression(gas, "3*rho_x*(deta/deps)"))
    assert facts.proves_nonzero(expression(gas, "2*(dp/drho) + 2"))
    assert not facts.proves_nonzero(expression(gas, "(dp/deps)"))
    assert not facts.proves_nonzero(Expr.const(0))


def test_free_element_in_denominator_is_rejected(gas: ModelDef) -> None:
    u_x = jet("u", (0, 1))
    with pytest.raises(NotPolynomialInFreeElements):
        split(gas, expression(gas, "rho/u_x"), [u_x])
