from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from antplan.harness import World, task_rosters
from antplan.task_model import bundled_catalog

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def catalog():
    return bundled_catalog()


@pytest.fixture(scope="session")
def world():
    """Canonical household, grounded once for the whole run."""
    return World.create()


@pytest.fixture(scope="session")
def rosters(world, catalog):
    return task_rosters(catalog, world)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
