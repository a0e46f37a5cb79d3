from __future__ import annotations

from itertools import combinations

import pytest

from entropik.case_analysis import (
    NONZERO_POLARITY,
    ZERO_POLARITY,
    Assumption,
    CaseTree,
    Reducer,
    apply_assumptions,
    build_tree,
    default_classifier,
    parse_assumption,
    parse_pivot,
    pivot_candidates,
)
from entropik.entropy_split import ConstraintSystem
from entropik.errors import ParseFailed
from entropik.kernel.atoms import partial
from entropik.kernel.expr import Expr
from entropik.model import ModelDef

STATUSES = {"leaf", "open", "branch", "closed-inconsistent"}


def _atom(name: str, slots: tuple[int, ...]) -> Expr:
    return Expr.atom(partial(name, slots))


@pytest.fixture(scope="module")
def gas_tree(gas_system: ConstraintSystem) -> CaseTree:
    return build_tree(gas_system, depth=3)


def _disjoint(tree: CaseTree) -> bool:
    for a, b in combinations(tree.leaves(), 2):
        pa = {x.expr: x.polarity for x in a.assumptions}
        if not any(pa.get(x.expr) not in (None, x.polarity) for x in b.assumptions):
            return False
    return True


def test_default_classifier(gas: ModelDef, fluid: ModelDef) -> None:
    assert default_classifier(gas) == ("eta", "Phi1")
    assert default_classifier(fluid) == ("eta", "eps")


def test_parse_assumption(gas: ModelDef) -> None:
    a = parse_assumption("deta/deps != 0", gas)
    assert a.polarity == NONZERO_POLARITY
    assert a.expr == _atom("eta", (0, 1))
    assert parse_assumption("(dPhi1/drho) = 0", gas).is_zero
    assert a.negated().polarity == ZERO_POLARITY
    for bad in ("deta/deps", "deta/deps = 1", "3 = 0", "nonsense( = 0"):
        with pytest.raises(ParseFailed):
            parse_assumption(bad, gas)


def test_gas_pivot_candidates(gas_system: ConstraintSystem) -> None:
    top = pivot_candidates(gas_system)[:3]
    assert set(top) == {_atom("eta", (0, 1)), _atom("Phi1", (0, 1)), _atom("Phi1", (1, 0))}


def test_gas_tree_has_four_leaves(gas_tree: CaseTree) -> None:
    assert set(gas_tree.pivots) == {_atom("eta", (0, 1)), _atom("Phi1", (0, 1)), _atom("Phi1", (1, 0))}
    assert len(gas_tree.leaves()) == 4
    assert all(n.status in STATUSES for n in gas_tree.root.walk())
    assert gas_tree.root.status == "branch"
    assert _disjoint(gas_tree)


def test_vanishing_temperature_derivative_makes_fluxes_constant(gas_system: ConstraintSystem, gas: ModelDef) -> None:
    reducer = Reducer(gas_system)
    red = reducer.reduce((Assumption(_atom("eta", (0, 1)), ZERO_POLARITY),))
    assert not red.inconsistent
    facts = red.derived_facts(gas, reducer.resolve)
    assert "eta is constant" in facts
    assert "Phi1 is constant" in facts


def test_zero_flux_derivative_forces_heat_flux(gas_system: ConstraintSystem) -> None:
    reducer = Reducer(gas_system)
    red = reducer.reduce((
        Assumption(_atom("Phi1", (0, 1)), ZERO_POLARITY),
        Assumption(_atom("eta", (0, 1)), NONZERO_POLARITY),
    ))
    assert not red.inconsistent
    assert reducer.resolve(_atom("q1", (0, 1)), red.solved).is_zero()


def test_contradictory_assumptions(gas_system: ConstraintSystem) -> None:
    x = _atom("eta", (0, 1))
    red = apply_assumptions(gas_system, [Assumption(x, ZERO_POLARITY), Assumption(x, NONZERO_POLARITY)])
    assert red.inconsistent
    assert red.contradiction


def test_assumptions_restrict_the_root(gas_system: ConstraintSystem) -> None:
    x = _atom("eta", (0, 1))
    tree = build_tree(gas_system, assumptions=(Assumption(x, ZERO_POLARITY),), depth=3)
    for leaf in tree.leaves():
        assert leaf.assumptions[0] == Assumption(x, ZERO_POLARITY)


def test_depth_cap(gas_system: ConstraintSystem) -> None:
    shallow = build_tree(gas_system, depth=1)
    assert len(shallow.leaves()) <= 2
    assert shallow.warnings
    assert any(leaf.status == "open" for leaf in shallow.leaves())
    with pytest.raises(ValueError):
        build_tree(gas_system, depth=0)


def test_trees_are_deterministic(gas_system: ConstraintSystem, gas_tree: CaseTree) -> None:
    again = build_tree(gas_system, depth=3, workers=1)
    assert again.pivots == gas_tree.pivots
    assert [leaf.assumptions for leaf in again.leaves()] == [leaf.assumptions for leaf in gas_tree.leaves()]


def test_adiabatic_fluid_tree(fluid: ModelDef, fluid_system: ConstraintSystem) -> None:
    p1 = parse_pivot("(deps/dtheta)*(deta/drho/dtheta) - (deta/dtheta)*(deps/drho/dtheta)", fluid_system)
    p2 = parse_pivot("(deps/dtheta)*(deta/dtheta/dtheta) - (deta/dtheta)*(deps/dtheta/dtheta)", fluid_system)
    temperature = parse_assumption("deta/dtheta != 0", fluid)
    tree = build_tree(fluid_system, [p1, p2], depth=3, assumptions=(temperature,), force_residual_zero=True)
    assert tree.pivots == [p1, p2]
    assert len(tree.leaves()) == 4
    assert _disjoint(tree)
    for leaf in tree.leaves():
        assert leaf.assumptions[0] == temperature
        assert not leaf.reduction.inconsistent


def test_leaves_decide_every_blocking_pivot(gas_system: ConstraintSystem, gas_tree: CaseTree) -> None:
    candidates = pivot_candidates(gas_system)
    assert all(p in candidates for p in gas_tree.pivots)
    reducer = Reducer(gas_system)
    for leaf in gas_tree.leaves():
        decided = {a.expr for a in leaf.assumptions}
        assert decided <= set(gas_tree.pivots)
        blocking = set(leaf.reduction.needed) | reducer.blocking(leaf.reduction)
        assert not (set(gas_tree.pivots) - decided) & blocking


def test_entropy_temperature_branch_splits_on_the_flux(gas_tree: CaseTree) -> None:
    eta_eps = _atom("eta", (0, 1))
    nonzero = [n for n in gas_tree.root.children if n.assumptions[-1] == Assumption(eta_eps, NONZERO_POLARITY)]
    assert len(nonzero) == 1
    assert nonzero[0].status == "branch"
    assert len(nonzero[0].children) == 2


def test_parse_pivot_rejects_constants(gas_system: ConstraintSystem) -> None:
    with pytest.raises(ParseFailed):
        parse_pivot("2", gas_system)
    with pytest.raises(ParseFailed):
        parse_pivot("rho", gas_system)
