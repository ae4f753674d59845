import json
from pathlib import Path

import pytest

from finitenet import DiskGeometry, NetworkModel

FROZEN = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())

# Filled by the acceptance module; printed once at the end of the run.
ACCEPTANCE_LINES = {}


def record(criterion, passed, detail):
    ACCEPTANCE_LINES[criterion] = f"criterion {criterion:>2}: {'PASS' if passed else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture
def frozen():
    return FROZEN


@pytest.fixture
def unit_disk():
    return DiskGeometry(1.0)


@pytest.fixture
def fixture_model(unit_disk):
    """N = 3, alpha = 4, no shadowing, interference-limited, P = 1 mW."""
    return NetworkModel(unit_disk, 3, 4.0, tx_power_dbm=0.0)
