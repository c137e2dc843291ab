import pytest

from brw_obstacles import EnvironmentSpec, ObstacleField, critical_binary, from_masses, make_field
from brw_obstacles.rng import make_stream


@pytest.fixture(scope="session")
def law():
    return critical_binary()


@pytest.fixture(scope="session")
def sub_law():
    return from_masses({0: 0.6, 1: 0.2, 2: 0.2})


@pytest.fixture(scope="session")
def flat1():
    return make_field(EnvironmentSpec(1, 0.0, 7))


@pytest.fixture(scope="session")
def field1():
    """d=1, p=0.5 with the fixed environment seed used across cross-checks."""
    return make_field(EnvironmentSpec(1, 0.5, 1))


@pytest.fixture(scope="session")
def walls1():
    return ObstacleField.all_obstacles(1)


@pytest.fixture
def stream():
    return make_stream(12345, 0)
