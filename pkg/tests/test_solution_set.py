from __future__ import annotations

import dataclasses

import pytest

from entropik.dsl.parser import parse_model
from entropik.errors import DenominatorVanishes, OrderCapExceeded
from entropik.kernel.atoms import jet
from entropik.kernel.expr import Expr, SubstitutionMap, eval_numeric
from entropik.model import ModelDef, expand_model
from entropik.solution_set import SolvedSystem, close_consequences, solve_leading, solve_model, verify_solved

from tests.conftest import expression


def test_gas_leading_derivatives_are_solved(gas: ModelDef, gas_solved: SolvedSystem) -> None:
    assert set(gas_solved.keys) == set(gas.leading)
    assert gas_solved.substitution.triangular
    assert gas_solved.substitution[jet("rho", (1, 0))] == expression(gas, "-(rho_x*u + rho*u_x)")
    assert gas_solved.substitution[jet("u", (1, 0))] == expression(
        gas, "-u*u_x - ((dp/drho)*rho_x + (dp/deps)*eps_x)/rho"
    )
    assert Expr.atom(jet("rho", (0, 0))) in gas_solved.pivots
    assert gas_solved.consequence_keys() == []


@pytest.mark.parametrize("name", ["gas", "fluid", "nonsimple"])
def test_every_equation_vanishes_on_the_solved_form(name: str, request: pytest.FixtureRequest) -> None:
    m = request.getfixturevalue(name)
    s = solve_model(m)
    residues = verify_solved(m, s)
    assert len(residues) == len(m.equations) + len(s.consequences)
    assert all(r.ok for r in residues)


def test_nonsimple_closure_adds_consequences(nonsimple_solved: SolvedSystem) -> None:
    assert set(nonsimple_solved.consequence_keys()) == {
        jet("rho", (1, 1, 0)),
        jet("rho", (1, 0, 1)),
        jet("rho", (2, 0, 0)),
        jet("u", (1, 1, 0)),
        jet("v", (1, 0, 1)),
    }
    assert nonsimple_solved.substitution.triangular
    entropy = expand_model(nonsimple_solved.model).entropy
    assert nonsimple_solved.missing([nonsimple_solved.apply(entropy)]) == []


def test_consequence_steps_name_their_equation(nonsimple: ModelDef, nonsimple_solved: SolvedSystem) -> None:
    steps = {step.key: step for step in nonsimple_solved.consequences}
    rho_tt = steps[jet("rho", (2, 0, 0))]
    assert rho_tt.equation == "mass"
    assert rho_tt.describe(nonsimple.indeps) == "dt of equation mass"


def test_order_cap_stops_the_closure(nonsimple: ModelDef) -> None:
    capped = nonsimple.with_max_order(1)
    with pytest.raises(OrderCapExceeded) as info:
        solve_model(capped)
    assert info.value.exit_code == 2


def test_closure_is_idempotent(gas: ModelDef, gas_solved: SolvedSystem) -> None:
    again = close_consequences(gas, gas_solved, [expand_model(gas).entropy])
    assert again.substitution.items() == gas_solved.substitution.items()


def test_solving_is_deterministic(fluid: ModelDef) -> None:
    a = solve_model(fluid)
    b = solve_model(fluid)
    assert a.substitution.items() == b.substitution.items()
    assert a.pivots == b.pivots


def test_pivots_are_the_divisions(gas: ModelDef) -> None:
    s = solve_leading(gas)
    rho = jet("rho", (0, 0))
    u_t = s.substitution[jet("u", (1, 0))]
    assert rho in u_t.den.atoms()
    point = {a: 1 for a in u_t.atoms()}
    point[rho] = 0
    with pytest.raises(DenominatorVanishes):
        eval_numeric(u_t, point)


COUPLED = """\
independent t x
field u v
constitutive eta(u, v)
equation a: dt(u) + dt(v) + dx(u) = 0
equation b: dt(u) - dt(v) + dx(v) = 0
entropy: dx(dt(u)) + dt(eta) >= 0
leading: dt(u), dt(v)
"""


def test_consequence_of_a_coupled_leading_derivative() -> None:
    m = parse_model(COUPLED, file="coupled.epk").model
    s = solve_model(m)
    u_tx = jet("u", (1, 1))
    assert s.consequence_keys() == [u_tx]
    assert s.substitution[jet("u", (1, 0))] == expression(m, "-(u_x + v_x)/2")
    assert s.substitution[u_tx] == expression(m, "-(u_xx + v_xx)/2")
    assert s.substitution.triangular
    assert all(r.ok for r in verify_solved(m, s))


def test_corrupted_solution_leaves_a_residue(gas: ModelDef, gas_solved: SolvedSystem) -> None:
    rho_t = jet("rho", (1, 0))
    pairs = dict(gas_solved.substitution.pairs)
    pairs[rho_t] = pairs[rho_t] + 1
    broken = dataclasses.replace(gas_solved, substitution=SubstitutionMap(pairs))
    residues = {r.label: r for r in verify_solved(gas, broken)}
    assert not residues["mass"].ok
    assert residues["mass"].value == Expr.const(1)
    assert residues["momentum"].ok
