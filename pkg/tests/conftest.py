import numpy as np
import pytest

from chemolv.core import Params, build_grid


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def symmetric_params():
    return Params.symmetric(0.2, 5.0, 2.0)


@pytest.fixture
def grid8():
    return build_grid(2.0, 8)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
