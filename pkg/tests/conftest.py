from __future__ import annotations

import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cryptoledger import fixtures
from cryptoledger.scenario import RunOptions, run_scenario

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def tables_report():
    return run_scenario(fixtures.builtin("tables-all"), RunOptions(check_invariants=True))


@pytest.fixture(scope="session")
def tables_world():
    return fixtures.tables_world()


def table_world(report, checkpoint: str):
    return report.snapshot(checkpoint).world


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 9):
        terminalreporter.write_line(mod.VERDICTS.get(n, f"FAIL criterion {n}: no verdict (test errored or was not run)"))
