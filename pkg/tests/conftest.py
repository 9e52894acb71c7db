import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from combwalk import validate_config
from combwalk.rng import SeedSpec

settings.register_profile(
    "combwalk",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("combwalk")


@pytest.fixture(scope="session")
def comb():
    """Classical comb: one line through the origin, run weight exactly 1."""
    return validate_config([(0, 0.25)])


@pytest.fixture(scope="session")
def two_line():
    return validate_config([(-2, 0.1), (5, 0.4)])


@pytest.fixture(scope="session")
def three_line():
    return validate_config([(-1, 0.25), (0, 0.3), (3, 0.45)])


@pytest.fixture(scope="session")
def config_matrix(comb, two_line, three_line):
    return [comb, two_line, three_line]


def seed(master, stream=0):
    return SeedSpec(master, stream)
