import numpy as np
import pytest

from starnoma import StarRisState, baseline_config, default_power_allocation


@pytest.fixture(scope="session")
def cfg():
    return baseline_config()


@pytest.fixture(scope="session")
def power(cfg):
    return default_power_allocation(cfg)


@pytest.fixture(scope="session")
def state(cfg):
    return StarRisState.random(cfg.N, np.random.default_rng(1))
