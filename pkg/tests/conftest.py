import numpy as np
import pytest

from fdsas.channel import DEFAULT_GRID, generate_synthetic, slice_bandwidth


@pytest.fixture(scope="session")
def full_channel():
    return generate_synthetic(grid=DEFAULT_GRID, seed=7)


@pytest.fixture(scope="session")
def channel_20mhz(full_channel):
    return slice_bandwidth(full_channel, 3.5e9, 20e6)


@pytest.fixture(scope="session")
def channel_100mhz(full_channel):
    return slice_bandwidth(full_channel, 3.5e9, 100e6)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
