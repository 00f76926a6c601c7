import numpy as np
import pytest

from emfourier.measurement import synthesize
from emfourier.source_model import catalog
from emfourier.spectral_grid import GridParams


@pytest.fixture(scope="session")
def example1():
    return catalog("example1")


@pytest.fixture(scope="session")
def example2():
    return catalog("example2")


@pytest.fixture(scope="session")
def example3():
    return catalog("example3")


@pytest.fixture(scope="session")
def ex1_data(example1):
    """Clean Example 1 data (E and H) at N = 10."""
    return synthesize(example1, GridParams(N=10), "both")


@pytest.fixture(scope="session")
def ex1_small(example1):
    return synthesize(example1, GridParams(N=3), "both")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
