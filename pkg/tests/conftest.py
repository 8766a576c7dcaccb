import numpy as np
import pytest

from coexistsim.model import NetworkSizes, ScenarioParams, SlotLengths


@pytest.fixture
def small_collision():
    """sigma_C = 0.1 sigma_S with beta = 0.01."""
    return SlotLengths(0.01, 1.01, 0.101)


@pytest.fixture
def equal_slots():
    return SlotLengths(0.01, 1.01, 1.01)


@pytest.fixture
def large_collision():
    return SlotLengths(0.01, 1.01, 2.02)


@pytest.fixture
def five_by_five():
    return NetworkSizes(5, 5)


@pytest.fixture
def two_players():
    return NetworkSizes(1, 1)


@pytest.fixture
def scenario(five_by_five, small_collision):
    return ScenarioParams(five_by_five, small_collision, rate=1.0, alpha=0.9, p_r=0.5)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))
