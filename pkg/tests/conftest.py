import numpy as np
import pytest

from nexpansive import dynamics as D


@pytest.fixture(scope="session")
def cat():
    return D.linear_toral_map()


@pytest.fixture(scope="session")
def genus2():
    return D.genus2_map("quadratic")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
