"""Transverse-field Ising reservoir driven by repeated interactions.

The register holds N = n_m + n_e qubits.  The coupling network is defined on
a 1D chain of sites where the environment (input port) E occupies sites
1..n_e and the reservoir S the remaining sites; the joint state is stored as
rho_S (x) beta_E with S the left tensor factor, so the Hamiltonian is
assembled directly in storage order through a fixed slot -> site relabeling
instead of a permutation matrix.

One input step applies U_sub = exp(-i (tau/M) H) to rho (x) beta M times,
reading out all K diagonal observables (z projections and optionally zz
correlations on S) after each sub-cycle; the environment is traced out once
the full interaction time tau has elapsed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qcore
from .qcore import Observable, pauli_on_site

_WEIGHT_CUTOFF = 1e-14


@dataclass(frozen=True)
class ReservoirConfig:
    n_m: int
    n_e: int
    tau_b: float
    alpha: float = 1.0
    j_strength: float = 1.0
    b_field: float = 1.0
    multiplexity: int = 1
    observable_set: str = "zz"

    def __post_init__(self):
        if self.n_m < 1 or self.n_e < 1:
            raise ValueError("n_m and n_e must be >= 1")
        if self.multiplexity < 1:
            raise ValueError("multiplexity must be >= 1")
        if self.observable_set not in ("z", "zz"):
            raise ValueError(f"observable_set must be 'z' or 'zz', got {self.observable_set!r}")
        if self.b_field <= 0.0:
            raise ValueError("b_field must be positive")

    @property
    def n_qubits(self) -> int:
        return self.n_m + self.n_e

    @property
    def dim_s(self) -> int:
        return 2 ** self.n_m

    @property
    def dim_e(self) -> int:
        return 2 ** self.n_e

    @property
    def tau(self) -> float:
        return self.tau_b / self.b_field

    @property
    def n_observables(self) -> int:
        if self.observable_set == "z":
            return self.n_m
        return self.n_m * (self.n_m + 1) // 2

    @property
    def feature_dim(self) -> int:
        return self.multiplexity * self.n_observables + 1


@dataclass
class ReservoirState:
    rho: np.ndarray
    step_index: int = 0


def ground_state(dim: int) -> np.ndarray:
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def initial_state(config: ReservoirConfig, kind: str = "ground",
                  rng: np.random.Generator | None = None) -> ReservoirState:
    if kind == "ground":
        return ReservoirState(ground_state(config.dim_s), 0)
    if kind == "haar":
        if rng is None:
            raise ValueError("haar initial state needs an rng")
        return ReservoirState(qcore.haar_random_pure(config.dim_s, rng), 0)
    raise ValueError(f"unknown initial state kind {kind!r}")


def _slot_sites(config: ReservoirConfig) -> list[int]:
    # storage slot k (1-based, S first) -> chain site index (E first)
    n, n_e = config.n_qubits, config.n_e
    return list(range(n_e + 1, n + 1)) + list(range(1, n_e + 1))


def build_hamiltonian(config: ReservoirConfig) -> np.ndarray:
    """Ising Hamiltonian H = sum_{i>j} J_ij sx_i sx_j + B sum_j sz_j.

    Couplings decay as J |i-j|^-alpha / N(alpha) over the site distance,
    with N(alpha) = sum_{i>j} |i-j|^-alpha / (N-1).  All pairs couple,
    environment and reservoir sites alike.  Returned in storage order
    (S slots first).
    """
    n = config.n_qubits
    sites = _slot_sites(config)
    norm = sum(
        abs(i - j) ** -config.alpha for i in range(1, n + 1) for j in range(1, i)
    ) / (n - 1)
    dim = 2 ** n
    h = np.zeros((dim, dim), dtype=complex)
    sx = [pauli_on_site("x", k, n).data for k in range(1, n + 1)]
    sz = [pauli_on_site("z", k, n).data for k in range(1, n + 1)]
    for a in range(n):
        for b in range(a + 1, n):
            dist = abs(sites[a] - sites[b])
            h += (config.j_strength * dist ** -config.alpha / norm) * (sx[a] @ sx[b])
        h += config.b_field * sz[a]
    return h


def build_unitary(config: ReservoirConfig, fraction: float = 1.0) -> np.ndarray:
    """U = exp(-i tau H) via eigendecomposition; ``fraction`` scales tau."""
    w, v = np.linalg.eigh(build_hamiltonian(config))
    return (v * np.exp(-1j * config.tau * fraction * w)) @ v.conj().T


def _z_diagonal(site: int, n_m: int) -> np.ndarray:
    idx = np.arange(2 ** n_m)
    bits = (idx >> (n_m - site)) & 1
    return 1.0 - 2.0 * bits


def reservoir_observables(config: ReservoirConfig) -> list[Observable]:
    """K diagonal observables on S: sz by site, then szsz pairs (i < j)."""
    n_m = config.n_m
    obs = [pauli_on_site("z", j, n_m) for j in range(1, n_m + 1)]
    if config.observable_set == "zz":
        for i in range(1, n_m + 1):
            for j in range(i + 1, n_m + 1):
                obs.append(Observable(
                    label=f"szsz_{i}_{j}",
                    data=np.diag(_z_diagonal(i, n_m) * _z_diagonal(j, n_m)).astype(complex),
                ))
    return obs


class ReservoirOps:
    """Precomputed sub-cycle unitary and observable diagonals for one config."""

    def __init__(self, config: ReservoirConfig):
        self.config = config
        self.u_sub = build_unitary(config, fraction=1.0 / config.multiplexity)
        diags = [_z_diagonal(j, config.n_m) for j in range(1, config.n_m + 1)]
        if config.observable_set == "zz":
            for i in range(config.n_m):
                for j in range(i + 1, config.n_m):
                    diags.append(diags[i] * diags[j])
        self.obs_diags = np.stack(diags)
        self.labels = [o.label for o in reservoir_observables(config)]


def _pure_components(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # spectral split with tiny negative weights clamped; total weight kept at tr(rho)
    w, v = np.linalg.eigh(rho)
    w = np.where(w < 0.0, 0.0, w)
    keep = w > _WEIGHT_CUTOFF
    if not np.any(keep):
        raise ValueError("state has no positive spectral weight")
    total = w.sum()
    w = w[keep]
    w *= total / w.sum()
    return w, v[:, keep]


def evolve_step(
    state: ReservoirState,
    beta: np.ndarray,
    config: ReservoirConfig,
    ops: ReservoirOps | None = None,
) -> tuple[ReservoirState, np.ndarray]:
    """One repeated-interaction step with multiplexed measurements.

    Evolves rho (x) beta through M sub-cycles of exp(-i (tau/M) H),
    measuring the K observables on the reduced reservoir state after each
    sub-cycle, and returns the new reservoir state together with the
    feature row of M*K expectation values.

    The joint state is propagated as a weighted bundle of pure vectors
    (spectral factors of rho and beta), which keeps the cost at one
    matrix-vector block product per sub-cycle instead of a dense
    conjugation of the joint density matrix.
    """
    if ops is None:
        ops = ReservoirOps(config)
    beta = np.asarray(beta, dtype=complex)
    if beta.shape != (config.dim_e, config.dim_e):
        raise ValueError(
            f"input dim {beta.shape} does not match environment dim {config.dim_e}"
        )
    if state.rho.shape != (config.dim_s, config.dim_s):
        raise ValueError(
            f"state dim {state.rho.shape} does not match reservoir dim {config.dim_s}"
        )
    ws, vs = _pure_components(state.rho)
    we, ve = _pure_components(beta)
    weights = np.outer(ws, we).ravel()
    psi = np.einsum("si,ej->seij", vs, ve).reshape(config.dim_s * config.dim_e, -1)

    m = config.multiplexity
    features = np.empty((m, ops.obs_diags.shape[0]))
    for cycle in range(m):
        psi = ops.u_sub @ psi
        pops = (np.abs(psi) ** 2).reshape(config.dim_s, config.dim_e, -1)
        diag_s = pops.sum(axis=1) @ weights
        features[cycle] = ops.obs_diags @ diag_s
    psi_r = psi.reshape(config.dim_s, config.dim_e, -1)
    rho_new = np.einsum("aek,bek,k->ab", psi_r, psi_r.conj(), weights)
    rho_new = 0.5 * (rho_new + rho_new.conj().T)
    return ReservoirState(rho_new, state.step_index + 1), features.ravel()


def run_sequence(
    inputs,
    config: ReservoirConfig,
    initial: ReservoirState | None = None,
    ops: ReservoirOps | None = None,
) -> tuple[np.ndarray, ReservoirState]:
    """Drive the reservoir over an input sequence; returns (features, final state).

    The feature matrix has one row per input, M*K observable columns and a
    trailing bias column of ones.  Deterministic given inputs and initial
    state.
    """
    if ops is None:
        ops = ReservoirOps(config)
    state = initial if initial is not None else ReservoirState(ground_state(config.dim_s), 0)
    rows = np.ones((len(inputs), config.feature_dim))
    for n, beta in enumerate(inputs):
        state, row = evolve_step(state, beta, config, ops)
        rows[n, :-1] = row
    return rows, state


def average_magnetization(state: ReservoirState, gamma: str) -> float:
    """(1/N_m) sum_j <s^gamma_j> on the reservoir state."""
    n_m = int(round(np.log2(state.rho.shape[0])))
    total = 0.0
    for j in range(1, n_m + 1):
        op = pauli_on_site(gamma, j, n_m).data
        total += float(np.real(np.trace(op @ state.rho)))
    return total / n_m
