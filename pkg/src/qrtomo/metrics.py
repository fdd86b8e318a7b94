"""Scoring: fidelity aggregates, distance-correlation memory curves, QMC.

The memory function R^2(d) is the squared distance correlation between the
readout's reconstructions and the d-step-delayed inputs, computed from
pairwise state angles A = arccos F.  Quantum memory capacity is the sum of
R^2(d) up to a cutoff delay.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qcore
from .readout import fit_ridge, predict_states, vectorize_density

_PURITY_TOL = 1e-10
_DEGENERATE_TOL = 1e-14


def fidelity_batch(rhos: np.ndarray, sigmas: np.ndarray) -> np.ndarray:
    """Elementwise fidelities of two stacks of states via nuclear norms.

    Uses F(rho, sigma) = || sqrt(rho) sqrt(sigma) ||_1 with batched
    eigendecompositions; matches qcore.fidelity pair by pair.
    """
    rhos = np.asarray(rhos, dtype=complex)
    sigmas = np.asarray(sigmas, dtype=complex)
    sa = _sqrt_psd_batch(rhos)
    sb = _sqrt_psd_batch(sigmas)
    sv = np.linalg.svd(sa @ sb, compute_uv=False)
    return np.clip(sv.sum(axis=-1), 0.0, 1.0)


def _sqrt_psd_batch(states: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(states)
    w = np.where(w < 0.0, 0.0, w)
    return (v * np.sqrt(w)[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def rmsf(targets, predictions) -> float:
    """Root mean square fidelity over paired state sequences."""
    targets = np.asarray(targets, dtype=complex)
    predictions = np.asarray(predictions, dtype=complex)
    if len(targets) == 0 or len(targets) != len(predictions):
        raise ValueError("rmsf needs equal-length non-empty sequences")
    f = fidelity_batch(targets, predictions)
    return float(np.sqrt(np.mean(f ** 2)))


def state_angle(rho: np.ndarray, sigma: np.ndarray) -> float:
    """A(rho, sigma) = arccos F(rho, sigma), in [0, pi/2]."""
    return float(np.arccos(np.clip(qcore.fidelity(rho, sigma), 0.0, 1.0)))


def pairwise_angles(states: np.ndarray, chunk: int = 65536) -> np.ndarray:
    """Symmetric matrix of state angles within one sequence.

    Pure sequences take an overlap-matrix shortcut; mixed sequences compute
    F = tr sqrt(sqrt(rho) sigma sqrt(rho)) over the upper triangle in
    chunked batched eigenvalue sweeps.
    """
    states = np.asarray(states, dtype=complex)
    n = states.shape[0]
    purities = np.einsum("nij,nji->n", states, states).real
    if np.all(purities > 1.0 - _PURITY_TOL):
        w, v = np.linalg.eigh(states)
        vecs = v[..., -1]
        overlap = np.abs(vecs.conj() @ vecs.T)
        return np.arccos(np.clip(overlap, 0.0, 1.0))
    sq = _sqrt_psd_batch(states)
    iu, ju = np.triu_indices(n, k=1)
    vals = np.empty(iu.size)
    for lo in range(0, iu.size, chunk):
        hi = min(lo + chunk, iu.size)
        a = sq[iu[lo:hi]]
        m = a @ states[ju[lo:hi]] @ a
        w = np.linalg.eigvalsh(m)
        vals[lo:hi] = np.sqrt(np.clip(w, 0.0, None)).sum(axis=-1)
    fid = np.ones((n, n))
    fid[iu, ju] = vals
    fid[ju, iu] = vals
    return np.arccos(np.clip(fid, 0.0, 1.0))


def _double_center(m: np.ndarray) -> np.ndarray:
    return m - m.mean(axis=0)[None, :] - m.mean(axis=1)[:, None] + m.mean()


def distance_covariance_parts(seq_a, seq_b) -> tuple[float, float, float]:
    """(V2_ab, V2_aa, V2_bb) from double-centered angle matrices."""
    a = pairwise_angles(np.asarray(seq_a, dtype=complex))
    b = pairwise_angles(np.asarray(seq_b, dtype=complex))
    if a.shape != b.shape:
        raise ValueError("sequences must have equal length")
    ca = _double_center(a)
    cb = _double_center(b)
    n2 = a.shape[0] ** 2
    return (
        float(np.vdot(ca, cb).real / n2),
        float(np.vdot(ca, ca).real / n2),
        float(np.vdot(cb, cb).real / n2),
    )


def distance_correlation_sq(seq_a, seq_b) -> float:
    """Squared distance correlation of two state sequences, in [0, 1].

    Returns 0 when either self-covariance is degenerate (constant
    sequence).
    """
    v_ab, v_aa, v_bb = distance_covariance_parts(seq_a, seq_b)
    if v_aa <= _DEGENERATE_TOL or v_bb <= _DEGENERATE_TOL:
        return 0.0
    return float(np.clip(v_ab / np.sqrt(v_aa * v_bb), 0.0, 1.0))


@dataclass
class MemoryProfile:
    """Per-delay memory scores R^2(d) and their sum (QMC)."""

    r2_by_delay: np.ndarray
    qmc: float
    d_max: int


def memory_profile(
    features: np.ndarray,
    inputs: np.ndarray,
    d_max: int,
    washout: int,
    train_len: int,
    ridge: float = 1e-10,
) -> MemoryProfile:
    """Train one delay-reconstruction readout per delay and score R^2(d).

    ``features`` and ``inputs`` are aligned step by step over the full run
    (washout included); rows [washout, washout + train_len) train each
    readout and the remaining rows are scored.  The feature pass is shared
    across delays, only the readout differs.
    """
    features = np.asarray(features, dtype=float)
    inputs = np.asarray(inputs, dtype=complex)
    t = features.shape[0]
    if inputs.shape[0] != t:
        raise ValueError("features and inputs must align step by step")
    n_eval = t - washout - train_len
    if d_max < 0 or washout < d_max:
        raise ValueError(f"washout {washout} must cover d_max {d_max}")
    if train_len < 1 or n_eval < 2:
        raise ValueError(f"unusable split: train {train_len}, eval {n_eval}")
    train_idx = np.arange(washout, washout + train_len)
    eval_idx = np.arange(washout + train_len, t)
    r2 = np.zeros(d_max + 1)
    for d in range(d_max + 1):
        y_train = np.stack([vectorize_density(inputs[i - d]) for i in train_idx])
        model = fit_ridge(features[train_idx], y_train, ridge)
        preds = predict_states(model, features[eval_idx])
        targets = inputs[eval_idx - d]
        r2[d] = distance_correlation_sq(preds, targets)
    return MemoryProfile(r2_by_delay=r2, qmc=float(r2.sum()), d_max=d_max)


def negativity_rmse(targets, predictions, dim_a: int) -> float:
    """Root mean square error of per-step negativities."""
    targets = np.asarray(targets, dtype=complex)
    predictions = np.asarray(predictions, dtype=complex)
    if len(targets) != len(predictions):
        raise ValueError("sequences must have equal length")
    nt = np.array([qcore.negativity(r, dim_a) for r in targets])
    np_ = np.array([qcore.negativity(r, dim_a) for r in predictions])
    return float(np.sqrt(np.mean((nt - np_) ** 2)))
