"""Linear readout: ridge regression from feature rows to vectorized states.

Density matrices are flattened to real vectors (all real parts row-major,
then all imaginary parts).  Predicted vectors are folded back to matrices,
Hermitized and projected onto the spectrahedron so every prediction is a
valid state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .qcore import project_spectrahedron


def vectorize_density(rho: np.ndarray) -> np.ndarray:
    """Real vector of length 2 D**2: Re(rho) row-major, then Im(rho)."""
    rho = np.asarray(rho, dtype=complex)
    return np.concatenate([rho.real.ravel(), rho.imag.ravel()])


def devectorize_density(v: np.ndarray, d_out: int) -> np.ndarray:
    """Fold a target vector back to a valid density matrix.

    Rebuilds the complex matrix, Hermitizes it and projects onto the
    spectrahedron, so the output satisfies the state invariants even for
    raw regression outputs.
    """
    v = np.asarray(v, dtype=float)
    n = d_out * d_out
    if v.size != 2 * n:
        raise ValueError(f"vector length {v.size} does not match 2*{d_out}**2")
    a = v[:n].reshape(d_out, d_out) + 1j * v[n:].reshape(d_out, d_out)
    return project_spectrahedron(0.5 * (a + a.conj().T))


@dataclass
class ReadoutModel:
    """Trained linear map from feature rows to target vectors."""

    weights: np.ndarray  # (feature_dim, 2 * d_out**2)
    d_out: int
    ridge: float


def fit_ridge(features: np.ndarray, targets: np.ndarray, ridge: float = 1e-10,
              d_out: int | None = None) -> ReadoutModel:
    """Solve W = (X^T X + ridge I)^-1 X^T Y via a Cholesky factorization.

    One factorization is shared across all target columns.  A singular
    normal matrix (possible only at ridge = 0) raises with advice to use a
    positive ridge.
    """
    x = np.asarray(features, dtype=float)
    y = np.asarray(targets, dtype=float)
    if x.ndim != 2 or y.ndim != 2 or x.shape[0] != y.shape[0]:
        raise ValueError(f"row mismatch: features {x.shape}, targets {y.shape}")
    if ridge < 0.0:
        raise ValueError("ridge must be >= 0")
    if d_out is None:
        d_out = int(round(np.sqrt(y.shape[1] / 2)))
    if 2 * d_out * d_out != y.shape[1]:
        raise ValueError(f"target width {y.shape[1]} is not 2*d**2 for any integer d")
    gram = x.T @ x + ridge * np.eye(x.shape[1])
    try:
        factor = scipy.linalg.cho_factor(gram)
    except scipy.linalg.LinAlgError as exc:
        raise ValueError(
            "normal matrix is singular; use ridge > 0 to regularize"
        ) from exc
    weights = scipy.linalg.cho_solve(factor, x.T @ y)
    return ReadoutModel(weights=weights, d_out=d_out, ridge=float(ridge))


def predict_vectors(model: ReadoutModel, features: np.ndarray) -> np.ndarray:
    x = np.asarray(features, dtype=float)
    if x.shape[1] != model.weights.shape[0]:
        raise ValueError(
            f"feature dim {x.shape[1]} does not match model dim {model.weights.shape[0]}"
        )
    return x @ model.weights


def predict_states(model: ReadoutModel, features: np.ndarray) -> np.ndarray:
    """Predicted density matrices, one per feature row."""
    raw = predict_vectors(model, features)
    return np.stack([devectorize_density(row, model.d_out) for row in raw])


def baseline_features(inputs) -> np.ndarray:
    """Memoryless features: vectorized beta_n plus the bias column."""
    rows = np.stack([vectorize_density(b) for b in inputs]) if len(inputs) else \
        np.zeros((0, 0))
    if len(inputs) == 0:
        raise ValueError("baseline_features needs at least one input")
    return np.hstack([rows, np.ones((rows.shape[0], 1))])


def save_model(model: ReadoutModel, path) -> None:
    """Serialize to JSON: dims header plus row-major flat weights."""
    payload = {
        "format": "qrtomo-readout-v1",
        "d_out": model.d_out,
        "ridge": model.ridge,
        "shape": list(model.weights.shape),
        "weights": [float(w) for w in model.weights.ravel()],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)


def load_model(path) -> ReadoutModel:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != "qrtomo-readout-v1":
        raise ValueError(f"unrecognized readout file format in {path}")
    weights = np.array(payload["weights"], dtype=float).reshape(payload["shape"])
    return ReadoutModel(weights=weights, d_out=int(payload["d_out"]),
                        ridge=float(payload["ridge"]))
