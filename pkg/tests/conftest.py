import numpy as np
import pytest

from nonhered.construct import construct, rebuild
from nonhered.xform import Space


@pytest.fixture(scope="session")
def space():
    return Space(0.5)


@pytest.fixture(scope="session")
def state256():
    return construct(alpha=0.5, Q=256.0, N_lat=12, R=25.0)


@pytest.fixture(scope="session")
def built256(state256):
    return rebuild(state256)


@pytest.fixture(scope="session")
def state1e5():
    return construct(alpha=0.5, Q=1.0e5, N_lat=12, R=25.0)


@pytest.fixture(scope="session")
def built1e5(state1e5):
    return rebuild(state1e5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
