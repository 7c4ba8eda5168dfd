import numpy as np
import pytest

from selberg_signs import coefficients as co
from selberg_signs.ramanujan import tau_qexpansion

MILLION = 10 ** 6


@pytest.fixture(scope="session")
def tau_1m():
    return tau_qexpansion(MILLION)


@pytest.fixture(scope="session")
def zeta_1m():
    return co.sieve(co.zeta_spec(), MILLION)


@pytest.fixture(scope="session")
def chi4_1m():
    return co.sieve(co.dirichlet_char_spec(4), MILLION)


@pytest.fixture(scope="session")
def delta_1m(tau_1m):
    # theta = 1/6 is the subconvexity strength used by the profile and
    # consistency checks; tau is already cached by the tau_1m fixture.
    return co.sieve(co.delta_spec(theta=1 / 6), MILLION)


@pytest.fixture(scope="session")
def zeta_10k(zeta_1m):
    return co.truncate(zeta_1m, 10 ** 4)


@pytest.fixture(scope="session")
def chi4_10k(chi4_1m):
    return co.truncate(chi4_1m, 10 ** 4)


@pytest.fixture(scope="session")
def delta_10k(delta_1m):
    return co.truncate(delta_1m, 10 ** 4)


def make_table(values, name="raw"):
    """Statistics-only table from explicit values (values[0] is padding)."""
    arr = np.asarray(values, dtype=np.float64)
    return co.CoefficientTable(name, len(arr) - 1, arr)
