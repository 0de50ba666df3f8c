"""Shared fixtures: one moderately expensive geodesic reused across tests."""

import numpy as np
import pytest

from sqglab import euler_arnold, jacobi
from sqglab.presets import initial_stream
from sqglab.spectral import grid

SHEAR_BETA = 0.5


@pytest.fixture(scope="session")
def shear_record():
    """Non-steady geodesic from psi0 = -cos y + 0.1 cos x, beta = 0.5, t in [0, 1]."""
    g = grid(64)
    psi0 = initial_stream("shear", g)
    cfg = euler_arnold.SolverConfig(beta=SHEAR_BETA, dt=2e-3, t_final=1.0, n=64,
                                    snapshot_stride=25)
    return euler_arnold.simulate(psi0, cfg)


@pytest.fixture(scope="session")
def shear_basis(shear_record):
    return jacobi.make_basis(grid(64), 6, SHEAR_BETA)


@pytest.fixture(scope="session")
def shear_lambdas(shear_record, shear_basis):
    return jacobi.lambda_samples(shear_record, shear_basis, SHEAR_BETA)


@pytest.fixture(scope="session")
def shear_phi(shear_record, shear_basis, shear_lambdas):
    return jacobi.evolve_phi(shear_record, shear_basis, SHEAR_BETA,
                             lambdas=shear_lambdas)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
