from __future__ import annotations

from collections.abc import Callable

import pytest

from entropik.dsl.parser import Scope, parse_expression, resolve_model
from entropik.entropy_split import ConstraintSystem, analyze
from entropik.kernel.expr import Expr
from entropik.kernel.tree import normalize
from entropik.model import ModelDef
from entropik.solution_set import SolvedSystem, solve_model


def expression(m: ModelDef, text: str) -> Expr:
    """Normalized expression written in the model's own syntax."""
    scope = Scope(m.indeps, m.fields, {d.name: d.args for d in m.decls})
    return normalize(parse_expression(text, scope), m.space)


@pytest.fixture(scope="session")
def gas() -> ModelDef:
    return resolve_model("gas1d")


@pytest.fixture(scope="session")
def fluid() -> ModelDef:
    return resolve_model("fluid2d")


@pytest.fixture(scope="session")
def nonsimple() -> ModelDef:
    return resolve_model("nonsimple2d")


@pytest.fixture(scope="session")
def gas_solved(gas: ModelDef) -> SolvedSystem:
    return solve_model(gas)


@pytest.fixture(scope="session")
def gas_system(gas: ModelDef, gas_solved: SolvedSystem) -> ConstraintSystem:
    return analyze(gas, gas_solved)


@pytest.fixture(scope="session")
def fluid_system(fluid: ModelDef) -> ConstraintSystem:
    return analyze(fluid, solve_model(fluid))


@pytest.fixture(scope="session")
def nonsimple_solved(nonsimple: ModelDef) -> SolvedSystem:
    return solve_model(nonsimple)


@pytest.fixture(scope="session")
def nonsimple_system(nonsimple: ModelDef, nonsimple_solved: SolvedSystem) -> ConstraintSystem:
    return analyze(nonsimple, nonsimple_solved)


@pytest.fixture
def gas_expr(gas: ModelDef) -> Callable[[str], Expr]:
    return lambda text: expression(gas, text)


@pytest.fixture
def fluid_expr(fluid: ModelDef) -> Callable[[str], Expr]:
    return lambda text: expression(fluid, text)
