import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Add the repository root to the Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from models.mixture import GaussianMixture

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

REFERENCE_WEIGHTS = [0.2, 0.2, 0.1, 0.3, 0.2]
REFERENCE_MEANS = [-2.0, -1.0, 0.0, 1.0, 2.0]
REFERENCE_VARIANCES = [0.2, 0.075, 0.1, 0.1, 0.1]

def build_reference_mixture(spread_is_variance: bool = True) -> GaussianMixture:
    spread = np.asarray(REFERENCE_VARIANCES)
    return GaussianMixture(
        weights=REFERENCE_WEIGHTS,
        means=REFERENCE_MEANS,
        stddevs=np.sqrt(spread) if spread_is_variance else spread,
    )

def build_random_mixture(rng: np.random.Generator, components: int = None, dim: int = 1) -> GaussianMixture:
    """2-4 well-separated-enough components with stddev in [0.2, 1.5]"""
    k = components or int(rng.integers(2, 5))
    return GaussianMixture(
        weights=rng.dirichlet(np.ones(k)),
        means=rng.uniform(-3.0, 3.0, size=(k, dim)),
        stddevs=rng.uniform(0.2, 1.5, size=(k, dim)),
    )

@pytest.fixture
def reference_mixture() -> GaussianMixture:
    return build_reference_mixture()

@pytest.fixture
def standard_normal() -> GaussianMixture:
    return GaussianMixture.standard_normal(1)

@pytest.fixture
def random_mixture():
    """Factory: random_mixture(rng, components=None, dim=1)"""
    return build_random_mixture

@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR
