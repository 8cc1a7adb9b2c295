from __future__ import annotations

import pytest

from satqin.cli import pass_samples, run_simulate
from satqin.scenario import build_topology, default_scenario

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def scenario():
    return default_scenario()


@pytest.fixture(scope="session")
def topology(scenario):
    return build_topology(scenario)


@pytest.fixture(scope="session")
def samples(scenario):
    return pass_samples(scenario)


@pytest.fixture(scope="session")
def default_run(scenario):
    return run_simulate(scenario)


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(id, passed, detail)``."""

    def record(cid: str, passed: bool, detail: str) -> bool:
        ACCEPTANCE[cid] = (bool(passed), detail)
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE, key=lambda c: int(c.split()[0])):
        passed, detail = ACCEPTANCE[cid]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {cid}: {detail}")
