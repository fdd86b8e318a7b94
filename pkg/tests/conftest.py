import numpy as np
import pytest

from qrtomo.qcore import haar_random_pure, make_rng


@pytest.fixture
def rng():
    return make_rng(2024)


def random_hermitian(rng, dim, scale=1.0):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * 0.5 * (a + a.conj().T)


def random_density(rng, dim, rank=None):
    """Random full(ish)-rank state: Dirichlet-weighted mixture of Haar pures."""
    rank = dim if rank is None else rank
    weights = rng.dirichlet(np.ones(rank))
    rho = np.zeros((dim, dim), dtype=complex)
    for w in weights:
        rho += w * haar_random_pure(dim, rng)
    return rho


def random_unitary(rng, dim):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
