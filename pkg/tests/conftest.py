import numpy as np
import pytest

from core.config import get_thread_count, set_thread_count
from oracles import poisson2d


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def threads():
    """Set the worker thread cap for a test and restore it afterwards."""
    previous = get_thread_count()
    yield set_thread_count
    set_thread_count(previous)


@pytest.fixture(scope="session")
def poisson_32():
    return poisson2d(32)


@pytest.fixture(scope="session")
def poisson_64():
    return poisson2d(64)


@pytest.fixture(scope="session")
def poisson_128():
    return poisson2d(128)
