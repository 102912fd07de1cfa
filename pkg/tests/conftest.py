"""
Shared fixtures: a seeded generator and a settings reset around every test.
"""
import numpy as np
import pytest

from euler_haar.utils.settings import settings


@pytest.fixture(autouse=True)
def reset_settings():
    settings.reset()
    yield
    settings.reset()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size statistical and randomized checks")
