import numpy as np
import pytest

from quasiflow import Params, make_grid
from quasiflow.acceptance import gaussian_run, ground_state, threshold_bracket


@pytest.fixture(scope="session")
def w1():
    return ground_state(1, 3.0)


@pytest.fixture(scope="session")
def w2():
    return ground_state(2, 3.0)


@pytest.fixture(scope="session")
def w3():
    return ground_state(3, 3.0)


@pytest.fixture(scope="session")
def vanish_run():
    return gaussian_run(2, 3.0, 1.0, 0.05, 4.0)


@pytest.fixture(scope="session")
def blowup_run():
    return gaussian_run(2, 3.0, 1.0, 10.0, 4.0)


@pytest.fixture(scope="session")
def bracket_k1():
    return threshold_bracket(1.0)


@pytest.fixture(scope="session")
def bracket_k0():
    return threshold_bracket(0.0)


@pytest.fixture
def grid2():
    return make_grid(2, 15.0, 1500)


@pytest.fixture
def rng():
    return np.random.default_rng(7)
