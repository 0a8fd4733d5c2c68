"""Shared fixtures: cached noise-free synthetic flights."""

import numpy as np
import pytest

from nanoquad.simulate import simulate_flight
from nanoquad.trajectories import TrajectorySpec


@pytest.fixture(scope="session")
def melon_log():
    return simulate_flight(TrajectorySpec("melon"))


@pytest.fixture(scope="session")
def chirp_log():
    return simulate_flight(TrajectorySpec("chirp"))


@pytest.fixture(scope="session")
def square_log():
    return simulate_flight(TrajectorySpec("square"))


@pytest.fixture
def rng():
    return np.random.default_rng(0)
