import numpy as np
import pytest
import scipy.linalg

from conftest import random_density, random_hermitian, random_unitary
from qrtomo import qcore
from qrtomo.qcore import (
    ID2,
    SX,
    SY,
    SZ,
    Observable,
    check_density_matrix,
    fidelity,
    haar_random_pure,
    is_density_matrix,
    kron,
    make_rng,
    negativity,
    partial_trace_env,
    partial_transpose,
    pauli_on_site,
    project_simplex,
    project_spectrahedron,
    trace_distance,
)


def test_pauli_constants():
    for p in (SX, SY, SZ):
        assert np.allclose(p @ p, ID2)
        assert np.allclose(p, p.conj().T)
    assert np.allclose(SX @ SY - SY @ SX, 2j * SZ)


def test_make_rng_deterministic():
    a = make_rng(7).random(5)
    b = make_rng(7).random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, make_rng(8).random(5))
    # composite seeds give independent but reproducible streams
    c = make_rng((7, 1)).random(5)
    assert np.array_equal(c, make_rng((7, 1)).random(5))
    assert not np.array_equal(c, a)


def test_observable_validation():
    obs = Observable("sx", SX)
    assert obs.dim == 2
    with pytest.raises(ValueError, match="not Hermitian"):
        Observable("bad", np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError, match="not square"):
        Observable("bad", np.zeros((2, 3)))


def test_density_matrix_checks(rng):
    rho = random_density(rng, 4)
    check_density_matrix(rho)
    assert is_density_matrix(rho)
    pert = np.zeros((4, 4), dtype=complex)
    pert[0, 1] = 1e-6
    with pytest.raises(ValueError, match="Hermitian"):
        check_density_matrix(rho + pert)
    with pytest.raises(ValueError, match="trace"):
        check_density_matrix(2.0 * rho)
    with pytest.raises(ValueError, match="eigenvalue"):
        check_density_matrix(np.diag([1.5, -0.5, 0.0, 0.0]).astype(complex))
    assert not is_density_matrix(np.diag([1.5, -0.5]))


def test_kron_matches_index_formula(rng):
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    out = kron(a, b)
    # (a (x) b)[i*3+k, j*3+l] = a[i,j] b[k,l], left factor first
    expect = np.empty((6, 6), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(3):
                for l in range(3):
                    expect[i * 3 + k, j * 3 + l] = a[i, j] * b[k, l]
    assert np.allclose(out, expect)


def test_partial_trace_env_basis_sum_oracle(rng):
    dim_s, dim_e = 4, 3
    rho = random_density(rng, dim_s * dim_e)
    reduced = partial_trace_env(rho, dim_s, dim_e)
    expect = np.zeros((dim_s, dim_s), dtype=complex)
    for e in range(dim_e):
        proj = np.kron(np.eye(dim_s), np.eye(dim_e)[:, e:e + 1])  # I (x) |e>
        expect += proj.conj().T @ rho @ proj
    assert np.allclose(reduced, expect, atol=1e-12)
    assert abs(np.trace(reduced) - 1.0) < 1e-12


def test_partial_trace_env_product_state(rng):
    rho_s = random_density(rng, 4)
    beta = random_density(rng, 2)
    assert np.allclose(partial_trace_env(kron(rho_s, beta), 4, 2), rho_s, atol=1e-12)
    with pytest.raises(ValueError, match="incompatible"):
        partial_trace_env(np.eye(6) / 6, 4, 2)


def test_fidelity_known_cases(rng):
    rho = random_density(rng, 3)
    assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-10)
    # orthogonal pure states
    assert fidelity(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == pytest.approx(0.0, abs=1e-12)
    # pure vs pure: |<psi|phi>| (sqrt of tiny eigenvalues costs ~1e-8 accuracy)
    psi = haar_random_pure(4, rng)
    phi = haar_random_pure(4, rng)
    assert fidelity(psi, phi) == pytest.approx(
        np.sqrt(abs(np.trace(psi @ phi))), abs=1e-7)
    # pure vs mixed: sqrt(<psi|sigma|psi>)
    sigma = random_density(rng, 4)
    assert fidelity(psi, sigma) == pytest.approx(
        np.sqrt(np.trace(psi @ sigma).real), abs=1e-7)


def test_fidelity_scipy_sqrtm_oracle(rng):
    for _ in range(10):
        rho = random_density(rng, 4)
        sigma = random_density(rng, 4)
        sq = scipy.linalg.sqrtm(sigma)
        expect = np.trace(scipy.linalg.sqrtm(sq @ rho @ sq)).real
        f = fidelity(rho, sigma)
        assert f == pytest.approx(expect, abs=1e-9)
        assert f == pytest.approx(fidelity(sigma, rho), abs=1e-10)  # symmetry
        assert 0.0 <= f <= 1.0


def test_fidelity_rejects_non_psd():
    bad = np.diag([1.5, -0.5])
    good = np.eye(2) / 2
    with pytest.raises(ValueError, match="first argument"):
        fidelity(bad, good)
    with pytest.raises(ValueError, match="second argument"):
        fidelity(good, bad)
    with pytest.raises(ValueError, match="shape mismatch"):
        fidelity(np.eye(2) / 2, np.eye(3) / 3)


def test_trace_distance_eigenvalue_oracle(rng):
    rho = random_density(rng, 4)
    sigma = random_density(rng, 4)
    w = np.linalg.eigvalsh(rho - sigma)
    assert trace_distance(rho, sigma) == pytest.approx(np.sum(np.abs(w)), abs=1e-12)
    assert trace_distance(rho, rho) == pytest.approx(0.0, abs=1e-12)
    # full trace norm: orthogonal pure states sit at distance 2
    assert trace_distance(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == pytest.approx(2.0)


def _simplex_bisection_oracle(v, tol=1e-14):
    # projection is max(v - theta, 0) with theta solving sum = 1; bisect theta
    lo, hi = v.min() - 1.0, v.max()
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        s = np.maximum(v - mid, 0.0).sum()
        if s > 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return np.maximum(v - 0.5 * (lo + hi), 0.0)


def test_project_simplex_frozen_and_oracle(rng):
    assert np.allclose(project_simplex(np.array([2.0, -1.0])), [1.0, 0.0])
    assert np.allclose(project_simplex(np.array([0.25, 0.75])), [0.25, 0.75])
    for _ in range(50):
        v = rng.standard_normal(rng.integers(1, 9)) * 3.0
        p = project_simplex(v)
        assert np.all(p >= 0.0) and p.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(p, _simplex_bisection_oracle(v), atol=1e-10)


def _dykstra_spectrahedron(a, iters=5000):
    """Alternating-projection oracle onto {PSD, trace 1}: Dykstra's method.

    Converged only once the PSD-cone iterate and the hyperplane iterate
    agree; the x-change alone can stall early for far-infeasible inputs.
    """
    x = a.copy()
    p = np.zeros_like(a)
    q = np.zeros_like(a)
    d = a.shape[0]
    for _ in range(iters):
        w, v = np.linalg.eigh(x + p)
        y = (v * np.maximum(w, 0.0)) @ v.conj().T
        p = x + p - y
        x = y + q - (np.trace(y + q).real - 1.0) / d * np.eye(d)
        q = y + q - x
        if np.linalg.norm(y - x) < 1e-13:
            break
    return x


def test_project_spectrahedron_frozen_cases():
    assert np.allclose(project_spectrahedron(np.diag([2.0, -1.0])), np.diag([1.0, 0.0]))
    rho = np.diag([0.7, 0.3]).astype(complex)
    assert np.allclose(project_spectrahedron(rho), rho, atol=1e-14)  # fixed point


def test_project_spectrahedron_vs_dykstra_oracle(rng):
    for i in range(50):
        dim = 2 if i % 2 == 0 else 4
        a = random_hermitian(rng, dim, scale=2.0)
        p = project_spectrahedron(a)
        check_density_matrix(p)
        assert np.linalg.norm(p - _dykstra_spectrahedron(a)) < 1e-6
        # idempotence
        assert np.linalg.norm(project_spectrahedron(p) - p) < 1e-12


def test_project_spectrahedron_optimality(rng):
    # no random feasible point may be closer in Frobenius norm
    a = random_hermitian(rng, 4, scale=2.0)
    p = project_spectrahedron(a)
    base = np.linalg.norm(a - p)
    for _ in range(25):
        x = random_density(rng, 4)
        assert np.linalg.norm(a - x) >= base - 1e-12


def test_partial_transpose_structure(rng):
    rho_a = random_density(rng, 2)
    rho_b = random_density(rng, 3)
    prod = kron(rho_a, rho_b)
    assert np.allclose(partial_transpose(prod, 2), kron(rho_a.T, rho_b), atol=1e-12)
    rho = random_density(rng, 6)
    assert np.allclose(partial_transpose(partial_transpose(rho, 2), 2), rho)
    with pytest.raises(ValueError, match="not divisible"):
        partial_transpose(np.eye(6) / 6, 4)


def _bell_density():
    psi = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)
    return np.outer(psi, psi)


def test_negativity_known_states(rng):
    assert negativity(_bell_density(), 2) == pytest.approx(0.5, abs=1e-12)
    prod = kron(random_density(rng, 2), random_density(rng, 2))
    assert negativity(prod, 2) == pytest.approx(0.0, abs=1e-10)
    # Werner state p|Bell><Bell| + (1-p) I/4 has negativity max(0, (3p-1)/4)
    for p, expect in ((0.6, 0.2), (0.2, 0.0)):
        werner = p * _bell_density() + (1.0 - p) * np.eye(4) / 4.0
        assert negativity(werner, 2) == pytest.approx(expect, abs=1e-12)


def test_negativity_local_unitary_invariance(rng):
    rho = 0.8 * _bell_density() + 0.2 * np.eye(4) / 4.0
    u = kron(random_unitary(rng, 2), random_unitary(rng, 2))
    assert negativity(u @ rho @ u.conj().T, 2) == pytest.approx(
        negativity(rho, 2), abs=1e-12)


def test_haar_random_pure_properties(rng):
    states = [haar_random_pure(4, rng) for _ in range(1000)]
    for rho in states[:20]:
        check_density_matrix(rho)
        assert np.trace(rho @ rho).real == pytest.approx(1.0, abs=1e-12)  # purity
    # ensemble mean approaches the maximally mixed state
    assert np.linalg.norm(np.mean(states, axis=0) - np.eye(4) / 4.0) < 0.05
    with pytest.raises(ValueError):
        haar_random_pure(0, rng)


def test_pauli_on_site_embedding():
    obs = pauli_on_site("x", 2, 3)
    assert obs.label == "sx_2"
    assert np.allclose(obs.data, np.kron(np.kron(ID2, SX), ID2))
    assert np.allclose(pauli_on_site("z", 1, 2).data, np.kron(SZ, ID2))
    with pytest.raises(ValueError, match="axis"):
        pauli_on_site("w", 1, 2)
    with pytest.raises(ValueError, match="site"):
        pauli_on_site("x", 3, 2)


def test_rng_algorithm_constant():
    assert qcore.RNG_ALGORITHM == "pcg64"
    assert isinstance(make_rng(0).bit_generator, np.random.PCG64)
