"""Shared fixtures"""

import math

import numpy as np
import pytest

from localizable import OptimizerOptions
from qlinalg import DensityMatrix, PureState


def random_pure(rng: np.random.Generator, n: int) -> PureState:
    draws = rng.standard_normal((2, 2**n))
    return PureState.from_unnormalized(draws[0] + 1j * draws[1])


def random_density(rng: np.random.Generator, n: int, rank: int = 3) -> DensityMatrix:
    weights = rng.dirichlet(np.ones(rank))
    matrix = sum(
        w * random_pure(rng, n).density_matrix().matrix for w in weights
    )
    return DensityMatrix(matrix)


def bell() -> DensityMatrix:
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1 / math.sqrt(2)
    return PureState(psi).density_matrix()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def fast_opts():
    return OptimizerOptions(grid_theta=5, grid_phi=8, grid_theta_4q=4, grid_phi_4q=6, starts=2, max_evals=400)
