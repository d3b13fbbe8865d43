import numpy as np
import pytest

from isoq.codes import explicit_params
from isoq.hiding import sample_ensemble
from isoq.nets import build_net_2outcome
from isoq.otm import sample_device


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def coarse_net():
    return build_net_2outcome(1.0)


@pytest.fixture(scope="session")
def fine_net():
    return build_net_2outcome(0.2)


@pytest.fixture
def small_ensemble():
    return sample_ensemble(2, 4, seed=7)


@pytest.fixture
def small_device():
    return sample_device(explicit_params(6, 2), seed=11)
