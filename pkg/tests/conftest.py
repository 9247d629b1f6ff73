import numpy as np
import pytest

from hyperflow.grid import PolarGrid
from hyperflow.hyperbolic import BallConfig


@pytest.fixture(scope="session")
def ball() -> BallConfig:
    return BallConfig(2, 1.0)


@pytest.fixture(scope="session")
def grid() -> PolarGrid:
    return PolarGrid(48, 96)


@pytest.fixture(scope="session")
def coarse_grid() -> PolarGrid:
    return PolarGrid(24, 48)


@pytest.fixture(autouse=True)
def _quiet_numpy():
    with np.errstate(all="raise", under="ignore"):
        yield
