import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from finrogue.model import make_params  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def fig1_params():
    return make_params(0.3, 0.03, 2.0, 0.0)


@pytest.fixture
def fig2_params():
    return make_params(0.3, 0.03, 0.8, 0.0)


@pytest.fixture
def unit_params():
    return make_params(2.0, 1.0, 1.0, 0.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
