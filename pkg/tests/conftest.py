import numpy as np
import pytest

from solvlat import Lattice, from_hyperbolic, from_hyperbolic_exact_2d

CAT = [[2, 1], [1, 1]]


@pytest.fixture(scope="session")
def cat_system_pair():
    return from_hyperbolic([CAT])


@pytest.fixture(scope="session")
def cat_sys(cat_system_pair):
    return cat_system_pair[0]


@pytest.fixture(scope="session")
def cat_lattice(cat_system_pair):
    return Lattice(cat_system_pair[1])


@pytest.fixture(scope="session")
def cat_exact():
    """(sigma, E1, sys, pair) for the symmetric SL_2(Z) example over Q(sqrt(5))."""
    return from_hyperbolic_exact_2d(CAT)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
