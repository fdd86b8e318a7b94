"""Core linear algebra for finite-dimensional quantum states.

Conventions used across the package:

* States are dense complex numpy arrays, Hermitian, unit trace, positive
  semidefinite within tolerance.
* Composite spaces keep the system of interest in the left tensor factor,
  so a joint system/environment state is stored as ``rho_S (x) rho_E``.
* Qubit indexing is 1-based with qubit 1 the leftmost tensor factor.
* Every random draw flows through a numpy ``Generator`` backed by PCG64
  (see :func:`make_rng`), so a seed fully determines all downstream draws
  on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
ID2 = np.eye(2, dtype=complex)

_PAULI = {"x": SX, "y": SY, "z": SZ}

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-8

RNG_ALGORITHM = "pcg64"


def make_rng(seed) -> np.random.Generator:
    """Deterministic random stream for the whole package.

    Parameters
    ----------
    seed : int or sequence of int
        Entropy fed to ``numpy.random.SeedSequence``.  The same seed yields
        a bit-identical draw sequence across runs and platforms.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


@dataclass(frozen=True)
class Observable:
    """Labelled Hermitian operator."""

    label: str
    data: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.data, dtype=complex)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError(f"observable {self.label!r} is not square")
        if np.max(np.abs(d - d.conj().T)) > 1e-12:
            raise ValueError(f"observable {self.label!r} is not Hermitian")
        object.__setattr__(self, "data", d)

    @property
    def dim(self) -> int:
        return self.data.shape[0]


def is_density_matrix(rho: np.ndarray, psd_tol: float = PSD_TOL) -> bool:
    try:
        check_density_matrix(rho, psd_tol=psd_tol)
    except ValueError:
        return False
    return True


def check_density_matrix(rho: np.ndarray, psd_tol: float = PSD_TOL) -> None:
    """Raise ValueError naming the first violated state invariant."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"state must be square, got shape {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > HERMITIAN_TOL:
        raise ValueError(f"state not Hermitian: max |rho - rho^dag| = {herm:.3e}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"state trace {tr} differs from 1 beyond {TRACE_TOL}")
    w = np.linalg.eigvalsh(rho)
    if w[0] < -psd_tol:
        raise ValueError(f"state has eigenvalue {w[0]:.3e} below -{psd_tol}")


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product, left factor first."""
    return np.kron(a, b)


def partial_trace_env(rho_se: np.ndarray, dim_s: int, dim_e: int) -> np.ndarray:
    """Trace out the right (environment) factor of a joint state.

    ``rho_se`` lives on ``dim_s * dim_e`` dimensions with the system as the
    left tensor factor; the result is the reduced system state.
    """
    rho_se = np.asarray(rho_se)
    d = dim_s * dim_e
    if rho_se.shape != (d, d):
        raise ValueError(
            f"joint state shape {rho_se.shape} incompatible with dims ({dim_s}, {dim_e})"
        )
    r = rho_se.reshape(dim_s, dim_e, dim_s, dim_e)
    return np.trace(r, axis1=1, axis2=3)


def _sqrtm_psd(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(rho)
    w = np.where(w < 0.0, 0.0, w)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity tr sqrt(sqrt(sigma) rho sqrt(sigma)), clipped to [0, 1].

    Eigenvalues of the inner product matrix below -1e-12 are clamped to zero
    before the square root; inputs that are non-PSD beyond tolerance raise.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError(f"shape mismatch {rho.shape} vs {sigma.shape}")
    if np.linalg.eigvalsh(rho)[0] < -PSD_TOL:
        raise ValueError("first argument is not PSD within tolerance")
    ws, vs = np.linalg.eigh(sigma)
    if ws[0] < -PSD_TOL:
        raise ValueError("second argument is not PSD within tolerance")
    sqrt_sigma = (vs * np.sqrt(np.where(ws < 0.0, 0.0, ws))) @ vs.conj().T
    m = sqrt_sigma @ rho @ sqrt_sigma
    ev = np.linalg.eigvalsh(m)
    ev = np.where(ev < 0.0, 0.0, ev)
    return float(np.clip(np.sum(np.sqrt(ev)), 0.0, 1.0))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Trace norm of rho - sigma (no 1/2 factor)."""
    diff = np.asarray(rho, dtype=complex) - np.asarray(sigma, dtype=complex)
    w = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    return float(np.sum(np.abs(w)))


def project_simplex(values: np.ndarray) -> np.ndarray:
    """Euclidean projection of a real vector onto the probability simplex."""
    v = np.asarray(values, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, v.size + 1)
    cond = u + (1.0 - css) / k > 0.0
    rho = k[cond][-1]
    theta = (1.0 - css[rho - 1]) / rho
    return np.maximum(v + theta, 0.0)


def project_spectrahedron(a: np.ndarray) -> np.ndarray:
    """Nearest density matrix to ``a`` in Frobenius norm.

    Hermitizes, diagonalizes, projects the eigenvalue vector onto the
    probability simplex and reassembles.  Idempotent; valid states are
    fixed points.
    """
    a = np.asarray(a, dtype=complex)
    h = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(h)
    p = project_simplex(w)
    return (v * p) @ v.conj().T


def partial_transpose(rho: np.ndarray, dim_a: int) -> np.ndarray:
    """Transpose the left ``dim_a``-dimensional factor of a bipartite state."""
    rho = np.asarray(rho)
    d = rho.shape[0]
    if d % dim_a != 0:
        raise ValueError(f"dim {d} not divisible by dim_a {dim_a}")
    dim_b = d // dim_a
    r = rho.reshape(dim_a, dim_b, dim_a, dim_b)
    return r.transpose(2, 1, 0, 3).reshape(d, d)


def negativity(rho: np.ndarray, dim_a: int) -> float:
    """Entanglement negativity (trace norm of the partial transpose - 1) / 2."""
    w = np.linalg.eigvalsh(partial_transpose(rho, dim_a))
    return max(float(0.5 * (np.sum(np.abs(w)) - 1.0)), 0.0)


def haar_random_pure(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state as a rank-one density matrix."""
    if dim < 1:
        raise ValueError("dim must be positive")
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    z /= np.linalg.norm(z)
    return np.outer(z, z.conj())


def pauli_on_site(axis: str, site: int, n_qubits: int) -> Observable:
    """Spin-1/2 operator ``s^axis/1`` acting on one site of a qubit register.

    ``site`` is 1-based with site 1 the leftmost tensor factor.  Returns the
    bare Pauli matrix embedded in the ``2**n_qubits`` space.
    """
    if axis not in _PAULI:
        raise ValueError(f"axis must be one of x, y, z, got {axis!r}")
    if not 1 <= site <= n_qubits:
        raise ValueError(f"site {site} outside register of {n_qubits} qubits")
    op = np.eye(1, dtype=complex)
    for j in range(1, n_qubits + 1):
        op = np.kron(op, _PAULI[axis] if j == site else ID2)
    return Observable(label=f"s{axis}_{site}", data=op)
