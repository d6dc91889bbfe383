import numpy as np
import pytest

from qillum.fock import DensityOperator, FockDims


def random_density(rng: np.random.Generator, dims: FockDims) -> DensityOperator:
    """Random full-rank density operator for property checks."""
    d = dims.total_dim
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    m /= np.trace(m).real
    return DensityOperator(dims, m)


def random_pure(rng: np.random.Generator, dims: FockDims) -> np.ndarray:
    v = rng.standard_normal(dims.total_dim) + 1j * rng.standard_normal(dims.total_dim)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
