import numpy as np
import pytest

from adaptive_pilot.channel import ChannelProfile
from adaptive_pilot.grid import LinkConfig


@pytest.fixture
def config():
    return LinkConfig()


@pytest.fixture
def profile():
    return ChannelProfile()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)



def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
