import numpy as np
import pytest

from ionlink.datasets import builtin_dataset
from ionlink.measure import pauli_settings
from ionlink.pipeline import run_pipeline


@pytest.fixture(scope="session")
def dataset():
    return builtin_dataset()


@pytest.fixture(scope="session")
def settings():
    return pauli_settings()


@pytest.fixture(scope="session")
def report(dataset):
    return run_pipeline(dataset)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
