import numpy as np
import pytest

from sdwave.grid import make_grid


@pytest.fixture(scope="session")
def grid2d():
    return make_grid(2, 64, 30.0)


@pytest.fixture(scope="session")
def grid1d():
    return make_grid(1, 2048, 100.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
