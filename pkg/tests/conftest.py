import math

import pytest
from hypothesis import HealthCheck, settings

from thzcov.scenario import Scenario

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DEG = math.pi / 180.0


@pytest.fixture(scope="session")
def table2() -> Scenario:
    """Catalogue defaults with gains computed from the beamwidths."""
    return Scenario()


@pytest.fixture(scope="session")
def exact() -> Scenario:
    """Catalogue defaults with the rounded 25/15/-10 dBi gains."""
    return Scenario().with_exact_db_gains()


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
