"""Superoperator spectra of the reduced reservoir dynamics.

For a fixed input state beta the one-step reservoir map
L_beta(rho) = tr_E[U (rho (x) beta) U^dag] is linear, so under
column-stacking vectorization vc(rho) = sum_ij rho_ij |j>|i> it becomes a
D_S^2 x D_S^2 matrix.  Its eigenvalues (1 = |l_1| >= |l_2| >= ...) control
input forgetting: 1/|l_2| measures the echo-state convergence rate, the
moduli ratios <|l_{k+1}|/|l_k|> distinguish unitary-like from ergodic
dynamics, and a real isolated l_2 yields a two-state metastable
decomposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import qcore
from .reservoir import ReservoirConfig, build_unitary

_MAX_NM = 6
_GAP_TOL = 1e-6
_REAL_TOL = 1e-8


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"vec needs a square matrix, got {rho.shape}")
    return rho.ravel(order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    v = np.asarray(v)
    if v.size != dim * dim:
        raise ValueError(f"length {v.size} does not match dim {dim}**2")
    return v.reshape(dim, dim, order="F")


@dataclass
class Superoperator:
    dim_s: int
    data: np.ndarray
    source: str = ""


def reduced_channel_kraus(config: ReservoirConfig, beta: np.ndarray) -> np.ndarray:
    """Kraus operators of L_beta: K_{e,j} = sqrt(m_j) (I (x) <e|) U (I (x) |phi_j>).

    beta = sum_j m_j |phi_j><phi_j| is spectrally decomposed; the stack has
    one operator per (environment basis state, beta eigenvector) pair.
    """
    beta = np.asarray(beta, dtype=complex)
    if beta.shape != (config.dim_e, config.dim_e):
        raise ValueError(f"beta dim {beta.shape} does not match environment {config.dim_e}")
    u = build_unitary(config)
    w, v = np.linalg.eigh(beta)
    w = np.where(w < 0.0, 0.0, w)
    keep = w > 1e-14
    total = w.sum()
    w = w[keep] * (total / w[keep].sum())
    phi = v[:, keep] * np.sqrt(w)
    u4 = u.reshape(config.dim_s, config.dim_e, config.dim_s, config.dim_e)
    kraus = np.einsum("aebf,fj->jeab", u4, phi)
    return kraus.reshape(-1, config.dim_s, config.dim_s)


def apply_kraus(kraus: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.einsum("kab,bc,kdc->ad", kraus, x, kraus.conj())


def superoperator_from_kraus(kraus: np.ndarray, dim_s: int, source: str = "") -> Superoperator:
    data = np.zeros((dim_s * dim_s, dim_s * dim_s), dtype=complex)
    for k in kraus:
        data += np.kron(k.conj(), k)  # vec(K X K^dag) = (conj(K) (x) K) vec(X)
    return Superoperator(dim_s=dim_s, data=data, source=source)


def superoperator_from_map(apply_fn, dim: int, source: str = "") -> Superoperator:
    """Matrix of an arbitrary linear map by acting on matrix units."""
    cols = []
    for j in range(dim * dim):
        e = np.zeros(dim * dim, dtype=complex)
        e[j] = 1.0
        cols.append(vec(apply_fn(unvec(e, dim))))
    return Superoperator(dim_s=dim, data=np.stack(cols, axis=1), source=source)


def build_superoperator(config: ReservoirConfig, beta: np.ndarray) -> Superoperator:
    """Matrix form of the one-step reservoir map at fixed input beta."""
    if config.n_m > _MAX_NM:
        raise ValueError(
            f"n_m = {config.n_m} gives a {4**config.n_m}x{4**config.n_m} superoperator; "
            f"refusing beyond n_m = {_MAX_NM}"
        )
    kraus = reduced_channel_kraus(config, beta)
    source = (
        f"reservoir n_m={config.n_m} n_e={config.n_e} tau_b={config.tau_b} "
        f"alpha={config.alpha} j={config.j_strength} b={config.b_field}; fixed beta"
    )
    return superoperator_from_kraus(kraus, config.dim_s, source=source)


def esp_timescale(lambda2_abs: float, eps: float) -> float:
    """T(eps) = ln(1/eps) / ln(1/|l_2|); infinite when |l_2| >= 1 - 1e-12."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if lambda2_abs >= 1.0 - 1e-12:
        return math.inf
    return math.log(1.0 / eps) / math.log(1.0 / lambda2_abs)


@dataclass
class SpectralReport:
    """Eigenvalues sorted by descending modulus plus derived diagnostics."""

    eigenvalues: np.ndarray
    inv_lambda2: float
    ratio_mean: float

    def esp_timescale(self, eps: float) -> float:
        return esp_timescale(abs(self.eigenvalues[1]), eps)


def spectral_report(superop: Superoperator) -> SpectralReport:
    w = np.linalg.eigvals(superop.data)
    w = w[np.argsort(-np.abs(w), kind="stable")]
    mods = np.abs(w)
    denom_ok = mods[:-1] > 1e-14
    ratios = mods[1:][denom_ok] / mods[:-1][denom_ok]
    lam2 = mods[1] if w.size > 1 else 0.0
    return SpectralReport(
        eigenvalues=w,
        inv_lambda2=float(1.0 / lam2) if lam2 > 0.0 else math.inf,
        ratio_mean=float(ratios.mean()) if ratios.size else math.nan,
    )


def convergence_ratio(
    config: ReservoirConfig,
    n_steps: int,
    n_pairs: int,
    rng: np.random.Generator,
    min_separation: float = 0.5,
) -> float:
    """Mean trace-distance ratio after n_steps of a shared random input stream.

    Pairs of Haar-random initial reservoir states are resampled until their
    trace distance exceeds ``min_separation``; both states then see the same
    i.i.d. Haar input sequence.  By linearity the difference operator is
    evolved directly.  The mean ratio is floored at 1e-10 for reporting.
    """
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    ratios = []
    for _ in range(n_pairs):
        while True:
            rho1 = qcore.haar_random_pure(config.dim_s, rng)
            rho2 = qcore.haar_random_pure(config.dim_s, rng)
            d0 = qcore.trace_distance(rho1, rho2)
            if d0 > min_separation:
                break
        delta = rho1 - rho2
        for _ in range(n_steps):
            beta = qcore.haar_random_pure(config.dim_e, rng)
            kraus = reduced_channel_kraus(config, beta)
            delta = apply_kraus(kraus, delta)
        dn = float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (delta + delta.conj().T)))))
        ratios.append(dn / d0)
    return max(float(np.mean(ratios)), 1e-10)


def effective_generator(lambda2: float, v2_max: float, v2_min: float) -> np.ndarray:
    """Classical 2x2 generator of the metastable-manifold dynamics."""
    dv = v2_max - v2_min
    return ((1.0 - lambda2) / dv) * np.array(
        [[-v2_max, -v2_min], [v2_max, v2_min]]
    )


@dataclass
class MetastableDecomposition:
    lambda2: float
    v2_max: float
    v2_min: float
    rho_ss: np.ndarray
    ems_1: np.ndarray
    ems_2: np.ndarray
    povm_p1: np.ndarray
    povm_p2: np.ndarray
    a_eff: np.ndarray


def _dominant_hermitian(m: np.ndarray) -> np.ndarray:
    # eigenmatrices of a real eigenvalue carry an arbitrary phase; both the
    # Hermitian and anti-Hermitian parts are eigenmatrices, keep the larger
    h = 0.5 * (m + m.conj().T)
    a = 0.5 * (m - m.conj().T) / 1j
    return h if np.linalg.norm(h) >= np.linalg.norm(a) else a


def metastable_decomposition(superop: Superoperator) -> MetastableDecomposition:
    """Two-state metastable decomposition from a real isolated l_2.

    Normalization convention: R2 is Hermitian with unit Frobenius norm and
    L2 is scaled so tr(L2 R2) = 1 (the only constraint used downstream; all
    returned quantities are invariant to the residual joint scale).
    """
    dim = superop.dim_s
    w, vl, vr = scipy.linalg.eig(superop.data, left=True, right=True)
    order = np.argsort(-np.abs(w), kind="stable")
    w, vl, vr = w[order], vl[:, order], vr[:, order]
    if abs(abs(w[0]) - 1.0) > 1e-8:
        raise ValueError(f"leading eigenvalue modulus {abs(w[0])} is not 1")
    lam2 = w[1]
    if abs(lam2.imag) > _REAL_TOL * abs(lam2):
        raise ValueError(f"lambda_2 = {lam2} is not real; m=2 decomposition undefined")
    if abs(lam2) >= 1.0 - 1e-12:
        raise ValueError("lambda_2 modulus is 1; no relaxation towards a manifold")
    if abs(w[1]) - abs(w[2]) <= _GAP_TOL:
        raise ValueError(
            f"spectral gap |l2|-|l3| = {abs(w[1]) - abs(w[2]):.3e} too small; "
            "two-state manifold is not isolated"
        )
    rho_ss = _dominant_hermitian(unvec(vr[:, 0], dim))
    rho_ss = rho_ss / np.trace(rho_ss).real
    r2 = _dominant_hermitian(unvec(vr[:, 1], dim))
    r2 = r2 / np.linalg.norm(r2)
    l2 = _dominant_hermitian(unvec(vl[:, 1], dim))
    scale = np.trace(l2 @ r2).real
    if abs(scale) < 1e-12:
        raise ValueError("left/right eigenmatrices of lambda_2 are numerically orthogonal")
    l2 = l2 / scale
    v2 = np.linalg.eigvalsh(l2)
    v2_min, v2_max = float(v2[0]), float(v2[-1])
    dv = v2_max - v2_min
    eye = np.eye(dim)
    return MetastableDecomposition(
        lambda2=float(lam2.real),
        v2_max=v2_max,
        v2_min=v2_min,
        rho_ss=rho_ss,
        ems_1=rho_ss + v2_max * r2,
        ems_2=rho_ss + v2_min * r2,
        povm_p1=(l2 - v2_min * eye) / dv,
        povm_p2=(-l2 + v2_max * eye) / dv,
        a_eff=effective_generator(float(lam2.real), v2_max, v2_min),
    )


def ensemble_reports(
    config: ReservoirConfig, n_samples: int, rng: np.random.Generator
) -> list[SpectralReport]:
    """Spectral reports of the one-step map over Haar-random input states."""
    return [
        spectral_report(build_superoperator(config, qcore.haar_random_pure(config.dim_e, rng)))
        for _ in range(n_samples)
    ]
