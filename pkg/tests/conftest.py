import numpy as np
import pytest

from ideaevo.landscape import UtilityLandscape


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_landscape():
    # M=4, hand-placed anchors with the required 1.0 and 0.0 extremes
    return UtilityLandscape(4, (0b0000, 0b1111, 0b0101, 0b1000), (1.0, 0.0, 0.3, 0.7))


def table_utility(values):
    """Utility function backed by a dict, for constructed populations."""
    return lambda v: values[v]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
