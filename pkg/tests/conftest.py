import numpy as np
import pytest

from nlspectral import normalize
from nlspectral.symbols import Orientation, build_table


@pytest.fixture(scope="session")
def const2():
    return normalize("constant", 2, horizon=0.1)


@pytest.fixture(scope="session")
def const3():
    return normalize("constant", 3, horizon=0.1)


@pytest.fixture(scope="session")
def table2(const2):
    return build_table(const2, Orientation.from_angle(0.7), 8)


@pytest.fixture(scope="session")
def table3(const3):
    return build_table(const3, Orientation.from_vector([1.0, -2.0, 0.5]), 6)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
