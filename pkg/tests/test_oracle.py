from __future__ import annotations

from fractions import Fraction

import pytest

from entropik.dsl.bindings import resolve_bindings
from entropik.entropy_split import ConstraintSystem
from entropik.model import ModelDef
from entropik.oracle import Oracle, draw, sample_bindings, trial_rng


def test_draws_are_reproducible() -> None:
    a = [draw(trial_rng(7, i), 9) for i in range(20)]
    b = [draw(trial_rng(7, i), 9) for i in range(20)]
    assert a == b
    assert all(isinstance(x, Fraction) for x in a)


def test_gas_passes_every_trial(gas_system: ConstraintSystem) -> None:
    report = Oracle(gas_system).run(200, seed=7)
    assert report.identity_passed == 200
    assert report.variety_passed == 200
    assert report.skipped == 0
    assert report.failures == []
    assert report.ok


def test_fluid_identity_holds(fluid_system: ConstraintSystem) -> None:
    report = Oracle(fluid_system).run(50, seed=7, workers=2)
    assert report.identity_passed == 50
    for t in report.results:
        if t.variety_ok is not None:
            assert t.variety_ok
            assert t.entropy == t.residual


def test_runs_are_deterministic(gas_system: ConstraintSystem) -> None:
    a = Oracle(gas_system).run(20, seed=3, workers=1)
    b = Oracle(gas_system).run(20, seed=3, workers=4)
    assert [(t.identity_ok, t.variety_ok, t.entropy) for t in a.results] == [
        (t.identity_ok, t.variety_ok, t.entropy) for t in b.results
    ]


def test_witnesses_violate_the_inequality(gas_system: ConstraintSystem) -> None:
    witnesses = Oracle(gas_system).witnesses(seed=7)
    assert witnesses
    for w in witnesses:
        assert w.entropy < 0
        assert w.free_element in gas_system.free


def test_ideal_gas_entropy_production_vanishes(gas: ModelDef, gas_system: ConstraintSystem) -> None:
    b = resolve_bindings("ideal-gas-bindings", gas)
    report = sample_bindings(gas_system.entropy, b, trials=30, seed=7)
    assert report.vanishes_identically
    assert report.nonnegative
    assert all(v == 0 for v in report.values)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_bindings_sampling_depends_only_on_seed(gas: ModelDef, gas_system: ConstraintSystem, seed: int) -> None:
    b = resolve_bindings("ideal-gas-bindings", gas)
    assert sample_bindings(gas_system.entropy, b, 5, seed).values == sample_bindings(gas_system.entropy, b, 5, seed).values
