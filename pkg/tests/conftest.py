import numpy as np
import pytest

from kickedtop.spin import build_spin_system


@pytest.fixture(scope="session")
def sys50():
    return build_spin_system(50)


@pytest.fixture(scope="session")
def sys100():
    return build_spin_system(100)


@pytest.fixture(scope="session")
def sys500():
    return build_spin_system(500)


def random_state(N, seed):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    return z / np.linalg.norm(z)
