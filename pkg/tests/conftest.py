"""Shared fixtures. Expensive scenario runs are session-scoped so the
structural tests and the acceptance suite reuse one computation."""

import pytest

from magsq import DispersiveOmmParams, LinearOmmParams
from magsq.scenarios import ScenarioSpec, run_scenario


@pytest.fixture(scope="session")
def linear_params():
    return LinearOmmParams()


@pytest.fixture(scope="session")
def dispersive_params():
    return DispersiveOmmParams()


@pytest.fixture(scope="session")
def fig3_result():
    return run_scenario(ScenarioSpec("fig3"))


@pytest.fixture(scope="session")
def fig6_result():
    return run_scenario(ScenarioSpec("fig6"))
