import numpy as np
import pytest

from app.services.graphs import sp
from app.services.product import named_graph


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def sp3():
    return sp(3)


@pytest.fixture(scope="session")
def g_minus_3():
    return named_graph("g-3")


@pytest.fixture(scope="session")
def g_plus_3():
    return named_graph("g+3")


@pytest.fixture(scope="session")
def g_minus_3_prime():
    return named_graph("g'-3")


@pytest.fixture(scope="session")
def g_plus_3_prime():
    return named_graph("g'+3")
