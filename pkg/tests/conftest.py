import warnings

import numpy as np
import pytest

warnings.filterwarnings("ignore", message=".*TBB.*")

from kinetic_hls.grids import VelocityGrid  # noqa: E402
from kinetic_hls.quadrature import build_hemisphere_quadrature  # noqa: E402


@pytest.fixture
def small_grid():
    return VelocityGrid(6.0, 8)


@pytest.fixture
def coarse_quad():
    return build_hemisphere_quadrature(2, 4)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
