import numpy as np
import pytest

from gaussmax import CorrelationMatrix4
from gaussmax.optimize import random_interior

BATTERY_SEED = 20240501

# §-independent reference constants, frozen from verified evaluations.
F_STAR = 1.1886202974020204          # value at the equicorrelated optimum
F_IID4 = 1.0293753730039641          # expected max of 4 iid standard normals
F_IID3 = 3.0 / (2.0 * np.sqrt(np.pi))  # expected max of 3 iid standard normals


def make_battery(count: int = 20, seed: int = BATTERY_SEED, min_eig: float = 0.05):
    """Fixed battery of seeded random interior correlation matrices."""
    rng = np.random.default_rng(seed)
    return [random_interior(rng, min_eig=min_eig) for _ in range(count)]


def special_cases():
    """The five special matrices used alongside the random battery."""
    return [
        CorrelationMatrix4.identity(),
        CorrelationMatrix4.equicorrelated(-1.0 / 3.0),
        CorrelationMatrix4.equicorrelated(1.0),
        CorrelationMatrix4((0.0, 0.0, 1.0, 0.0, 0.0, 0.0)),  # X4 == X1
        CorrelationMatrix4((0.93, 0.91, 0.90, 0.75, 0.77, 0.75)),  # non-concavity example
    ]


@pytest.fixture(scope="session")
def battery20():
    return make_battery()


@pytest.fixture(scope="session")
def special5():
    return special_cases()


@pytest.fixture()
def rng():
    return np.random.default_rng(7)
