"""Input streams and the temporal quantum maps used as tomography targets.

A temporal map sends the current input state ``beta_n`` to an output that
depends on the input history through delayed depolarizing channels
``Omega_n(beta) = p_n I/D + (1 - p_n) beta``, where the noise strength
``p_n`` follows a NARMA-type nonlinear recurrence driven by the scalar
sequence ``u_n``.  Supported map kinds: delayed channel, (weighted) moving
averages, arbitrary convex mixtures, the coherent-order quantum switch, a
fixed two-qubit entangling unitary, and a Bell-state creator driven by
classical bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qcore import ID2, SX, SZ

MAP_KINDS = (
    "delayed",
    "moving_average",
    "weighted_average",
    "convex_mixture",
    "quantum_switch",
    "entangler",
    "bell_creator",
)


@dataclass(frozen=True)
class NarmaParams:
    """Coefficients of the noise-strength recurrence."""

    order: int = 10
    kappa: float = 0.3
    eta: float = 0.04
    gamma: float = 1.5
    delta: float = 0.1
    input_scale: float = 0.2


DEFAULT_NARMA = NarmaParams()


def narma_p(u_seq: np.ndarray, params: NarmaParams = DEFAULT_NARMA) -> np.ndarray:
    """Noise-strength sequence p_n from the scalar input sequence.

    The raw inputs in [0, 1] are rescaled by ``params.input_scale`` before
    entering the recurrence

        p_n = kappa p_{n-1} + eta p_{n-1} (sum_{j=0}^{r-1} p_{n-j-1})
              + gamma v_{n-r+1} v_n + delta

    with the first ``r`` values fixed to zero.  Raises if any p_n leaves
    [0, 1], which signals invalid parameters.
    """
    u = np.asarray(u_seq, dtype=float)
    v = params.input_scale * u
    r = params.order
    p = np.zeros(u.size, dtype=float)
    for n in range(r, u.size):
        window = p[n - r:n].sum()
        p[n] = (
            params.kappa * p[n - 1]
            + params.eta * p[n - 1] * window
            + params.gamma * v[n - r + 1] * v[n]
            + params.delta
        )
        if not 0.0 <= p[n] <= 1.0:
            raise ValueError(f"p_{n} = {p[n]} left [0, 1]; recurrence parameters invalid")
    return p


def encode_scalar_input(u: float) -> np.ndarray:
    """Single-qubit input state |psi><psi| with psi = sqrt(u)|0> + sqrt(1-u)|1>."""
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"u = {u} outside [0, 1]")
    psi = np.array([math.sqrt(u), math.sqrt(1.0 - u)], dtype=complex)
    return np.outer(psi, psi.conj())


@dataclass
class InputStream:
    """Coupled scalar / quantum input sequences fed to the reservoir.

    ``u``, ``betas`` and ``p`` all share one length; ``p`` is generated from
    the rescaled ``u`` via :func:`narma_p`.  ``bits`` is populated only for
    the Bell-creator task.
    """

    u: np.ndarray
    betas: np.ndarray
    p: np.ndarray
    hold_steps: int = 1
    bits: np.ndarray | None = None

    def __post_init__(self):
        if not (len(self.u) == len(self.betas) == len(self.p)):
            raise ValueError("u, betas and p must have equal lengths")
        if self.hold_steps < 1:
            raise ValueError("hold_steps must be >= 1")

    def __len__(self) -> int:
        return len(self.u)


def generate_input_stream(
    length: int,
    n_e: int,
    hold_steps: int = 1,
    rng: np.random.Generator | None = None,
    params: NarmaParams = DEFAULT_NARMA,
) -> InputStream:
    """Random input stream of ``length`` steps for an ``n_e``-qubit input port.

    One scalar u and one input state are drawn per hold block and repeated
    ``hold_steps`` times.  For n_e = 1 the state is the sqrt-amplitude
    encoding of u.  Larger ports generalize that encoding: amplitude
    sqrt(u) on |0...0> and the remaining weight 1 - u spread over the other
    basis states as a uniformly random probability vector, so u stays
    recoverable from the state (u = <0...0|beta|0...0>) and the noise
    recurrence keeps the same drive statistics at every port width.  The
    NARMA recurrence runs over the held per-step u sequence.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    if rng is None:
        raise ValueError("an explicit rng is required for reproducibility")
    n_blocks = -(-length // hold_steps)
    u_blocks = rng.random(n_blocks)
    u = np.repeat(u_blocks, hold_steps)[:length]
    dim = 2 ** n_e
    if n_e == 1:
        beta_blocks = np.stack([encode_scalar_input(ub) for ub in u_blocks])
    else:
        amps = np.zeros((n_blocks, dim))
        amps[:, 0] = np.sqrt(u_blocks)
        rest = rng.dirichlet(np.ones(dim - 1), size=n_blocks)
        amps[:, 1:] = np.sqrt((1.0 - u_blocks)[:, None] * rest)
        beta_blocks = np.einsum("na,nb->nab", amps, amps).astype(complex)
    betas = np.repeat(beta_blocks, hold_steps, axis=0)[:length]
    return InputStream(u=u, betas=betas, p=narma_p(u, params), hold_steps=hold_steps)


def generate_bit_stream(
    length: int,
    rng: np.random.Generator,
    params: NarmaParams = DEFAULT_NARMA,
) -> InputStream:
    """Fair-coin bit stream for the Bell-creator task; beta_n = |b_n><b_n|."""
    if length < 1:
        raise ValueError("length must be >= 1")
    bits = rng.integers(0, 2, size=length)
    u = bits.astype(float)
    basis = np.stack([np.diag([1.0 + 0j, 0.0]), np.diag([0.0, 1.0 + 0j])])
    betas = basis[bits]
    return InputStream(u=u, betas=betas, p=narma_p(u, params), hold_steps=1, bits=bits)


def depolarize(beta: np.ndarray, p: float) -> np.ndarray:
    """Depolarizing channel p I/D + (1 - p) beta."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing strength p = {p} outside [0, 1]")
    beta = np.asarray(beta, dtype=complex)
    d = beta.shape[0]
    return p * np.eye(d, dtype=complex) / d + (1.0 - p) * beta


@dataclass(frozen=True)
class EntanglerParams:
    """Parameters of the fixed two-qubit entangling unitary exp(-iHt)."""

    h12: float
    g1: float
    g2: float
    t: float = 10.0


def random_entangler_params(rng: np.random.Generator, t: float = 10.0) -> EntanglerParams:
    h12, g1, g2 = rng.uniform(-0.5, 0.5, size=3)
    return EntanglerParams(h12=float(h12), g1=float(g1), g2=float(g2), t=t)


def entangler_unitary(params: EntanglerParams) -> np.ndarray:
    """U = exp(-iHt), H = h12 sx sx + (2 + g1) sz(1) + (2 + g2) sz(2)."""
    h = (
        params.h12 * np.kron(SX, SX)
        + (2.0 + params.g1) * np.kron(SZ, ID2)
        + (2.0 + params.g2) * np.kron(ID2, SZ)
    )
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * params.t * w)) @ v.conj().T


@dataclass
class TemporalMapSpec:
    """Which temporal map to reconstruct, and its delay structure.

    ``delays`` holds (d,) for the delayed/averaging kinds, (d_c, d_t) for
    the switch, and (d_1, d_2) for entangler/bell.  ``weights`` (eta_i for
    i = 0..d) applies to convex_mixture only.  ``entangler`` may be left
    None, in which case experiment runners draw the unitary parameters from
    the seed stream.
    """

    kind: str
    delays: tuple = ()
    weights: np.ndarray | None = None
    entangler: EntanglerParams | None = None

    def __post_init__(self):
        if self.kind not in MAP_KINDS:
            raise ValueError(f"unknown map kind {self.kind!r}; expected one of {MAP_KINDS}")
        self.delays = tuple(int(d) for d in self.delays)
        if any(d < 0 for d in self.delays):
            raise ValueError("delays must be >= 0")
        if self.kind == "convex_mixture":
            if self.weights is None:
                raise ValueError("convex_mixture requires weights")
            w = np.asarray(self.weights, dtype=float)
            if w.size == 0 or np.any(w < 0.0) or not np.any(w > 0.0):
                raise ValueError("weights must be non-negative and not all zero")
            self.weights = w
            self.delays = (w.size - 1,)
        elif self.kind in ("quantum_switch", "entangler", "bell_creator"):
            if len(self.delays) != 2:
                raise ValueError(f"{self.kind} needs two delays, got {self.delays}")
        else:
            if len(self.delays) != 1:
                raise ValueError(f"{self.kind} needs one delay, got {self.delays}")

    @property
    def max_delay(self) -> int:
        return max(self.delays)

    def output_dim(self, n_e: int) -> int:
        """Hilbert dimension of the map's output states."""
        if self.kind == "quantum_switch":
            return 2 ** (n_e + 1)
        if self.kind in ("entangler", "bell_creator"):
            return 4
        return 2 ** n_e


def _mixture(stream: InputStream, n: int, weights: np.ndarray) -> np.ndarray:
    z = weights.sum()
    out = np.zeros_like(np.asarray(stream.betas[n], dtype=complex))
    for i, w in enumerate(weights):
        if w != 0.0:
            out += w * depolarize(stream.betas[n - i], stream.p[n - i])
    return out / z


def quantum_switch_output(rho: np.ndarray, u_c: float, q1: float, q2: float) -> np.ndarray:
    """Closed-form output of the quantum switch of two depolarizing channels.

    The control qubit starts in sqrt(u_c)|0> + sqrt(1-u_c)|1>; the output
    lives on target (x) control with the control as the right factor.
    """
    for name, val in (("u_c", u_c), ("q1", q1), ("q2", q2)):
        if not 0.0 <= val <= 1.0:
            raise ValueError(f"{name} = {val} outside [0, 1]")
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    eye = np.eye(d, dtype=complex)
    alpha = u_c
    a00 = alpha * depolarize(depolarize(rho, q2), q1)
    a11 = (1.0 - alpha) * depolarize(depolarize(rho, q1), q2)
    # closed form of the interference block; identical for the 01 and 10 slots
    coeff_rho = q1 * q2 / d ** 2 + (1.0 - q1) * (1.0 - q2)
    coeff_eye = (q1 + q2 - 2.0 * q1 * q2) / d
    a01 = math.sqrt(alpha * (1.0 - alpha)) * (coeff_rho * rho + coeff_eye * eye)
    p00 = np.array([[1, 0], [0, 0]], dtype=complex)
    p01 = np.array([[0, 1], [0, 0]], dtype=complex)
    p10 = np.array([[0, 0], [1, 0]], dtype=complex)
    p11 = np.array([[0, 0], [0, 1]], dtype=complex)
    return (
        np.kron(a00, p00)
        + np.kron(a01, p01)
        + np.kron(a01, p10)
        + np.kron(a11, p11)
    )


def temporal_switch_target(stream: InputStream, d_c: int, d_t: int, n: int) -> np.ndarray:
    """Switch target: channels and control drawn from the delayed history."""
    _check_index(n, max(d_c, d_t), len(stream))
    return quantum_switch_output(
        stream.betas[n - d_t], stream.u[n - d_c], stream.p[n - d_c], stream.p[n - d_t]
    )


def entangler_target(
    stream: InputStream, d_1: int, d_2: int, params: EntanglerParams, n: int
) -> np.ndarray:
    """Entangler target: U (Omega_{n-d1} x Omega_{n-d2}) U^dag on delayed inputs."""
    _check_index(n, max(d_1, d_2), len(stream))
    u = entangler_unitary(params)
    prod = np.kron(
        depolarize(stream.betas[n - d_1], stream.p[n - d_1]),
        depolarize(stream.betas[n - d_2], stream.p[n - d_2]),
    )
    return u @ prod @ u.conj().T


def bell_state(b1: int, b2: int) -> np.ndarray:
    """State vector (|0, b2> + (-1)^b1 |1, 1-b2>)/sqrt(2)."""
    psi = np.zeros(4, dtype=complex)
    psi[b2] = 1.0
    psi[2 + (1 - b2)] = -1.0 if b1 else 1.0
    return psi / math.sqrt(2.0)


def bell_target(stream: InputStream, d_1: int, d_2: int, n: int) -> np.ndarray:
    """Bell-creator target selected by two delayed bits."""
    if stream.bits is None:
        raise ValueError("bell_creator needs a bit stream (see generate_bit_stream)")
    _check_index(n, max(d_1, d_2), len(stream))
    psi = bell_state(int(stream.bits[n - d_1]), int(stream.bits[n - d_2]))
    return np.outer(psi, psi.conj())


def _check_index(n: int, max_delay: int, length: int) -> None:
    if n < max_delay:
        raise ValueError(f"time index {n} lies in the undefined prefix (max delay {max_delay})")
    if n >= length:
        raise ValueError(f"time index {n} beyond stream length {length}")


def apply_temporal_map(spec: TemporalMapSpec, stream: InputStream, n: int) -> np.ndarray:
    """Target output state of the temporal map at time index ``n`` (0-based)."""
    _check_index(n, spec.max_delay, len(stream))
    if spec.kind == "delayed":
        d = spec.delays[0]
        return depolarize(stream.betas[n - d], stream.p[n - d])
    if spec.kind == "moving_average":
        return _mixture(stream, n, np.ones(spec.delays[0] + 1))
    if spec.kind == "weighted_average":
        d = spec.delays[0]
        return _mixture(stream, n, np.array([d + 1 - i for i in range(d + 1)], dtype=float))
    if spec.kind == "convex_mixture":
        return _mixture(stream, n, spec.weights)
    if spec.kind == "quantum_switch":
        return temporal_switch_target(stream, spec.delays[0], spec.delays[1], n)
    if spec.kind == "entangler":
        if spec.entangler is None:
            raise ValueError("entangler map applied without unitary parameters")
        return entangler_target(stream, spec.delays[0], spec.delays[1], spec.entangler, n)
    if spec.kind == "bell_creator":
        return bell_target(stream, spec.delays[0], spec.delays[1], n)
    raise ValueError(f"unknown map kind {spec.kind!r}")
