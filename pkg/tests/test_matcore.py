import numpy as np
import pytest

from ppt_volume import matcore
from ppt_volume.matcore import (
    DimensionMismatch,
    NoConvergence,
    NonHermitianInput,
    NotInRange,
    conjugate_transpose,
    eigh,
    eigvalsh,
    frobenius_inner,
    range_solve,
    svd,
)

from conftest import random_hermitian


def test_identity_spectrum():
    w, v = eigh(np.eye(4))
    np.testing.assert_allclose(w, np.ones(4))
    np.testing.assert_allclose(v.conj().T @ v, np.eye(4), atol=1e-14)


def test_diagonal_sorted_ascending():
    np.testing.assert_allclose(eigh(np.diag([3.0, -1.0])).eigenvalues, [-1.0, 3.0])


def test_pauli_x():
    np.testing.assert_allclose(eigvalsh(np.array([[0, 1], [1, 0]])), [-1.0, 1.0], atol=1e-15)


def test_rejects_non_hermitian():
    with pytest.raises(NonHermitianInput):
        eigh(np.array([[0, 1], [0, 0]]))


def test_rejects_non_square():
    with pytest.raises(DimensionMismatch):
        eigh(np.ones((2, 3)))


def test_sweep_cap_raises():
    a = random_hermitian(np.random.default_rng(0), 8)
    with pytest.raises(NoConvergence):
        eigh(a, max_sweeps=1)


@pytest.mark.parametrize("n", [2, 3, 4, 6, 9, 16])
def test_random_hermitian_residuals(rng, n):
    # 1000 matrices across the parametrisation, batched
    a = random_hermitian(rng, n, size=1000 // 6 + 1)
    w, v = eigh(a)
    scale = np.linalg.norm(a, axis=(1, 2))
    recon = np.linalg.norm(a - (v * w[:, None, :]) @ conjugate_transpose(v), axis=(1, 2))
    ortho = np.linalg.norm(conjugate_transpose(v) @ v - np.eye(n), axis=(1, 2))
    assert np.all(recon <= 1e-10 * scale)
    assert np.all(ortho <= 1e-10 * n)
    assert np.all(np.diff(w, axis=1) >= 0)
    trace = np.trace(a, axis1=1, axis2=2).real
    assert np.all(np.abs(w.sum(axis=1) - trace) <= 1e-10 * scale)


def test_jacobi_matches_lapack(rng):
    a = random_hermitian(rng, 12, size=50)
    np.testing.assert_allclose(eigvalsh(a), eigvalsh(a, backend="lapack"), atol=1e-11)


def test_unknown_backend():
    with pytest.raises(ValueError):
        eigh(np.eye(2), backend="magic")


def test_svd_scaled_identity():
    s = svd(np.eye(2) / np.sqrt(2)).singular_values
    np.testing.assert_allclose(s, [1 / np.sqrt(2)] * 2)


def test_svd_diagonal():
    np.testing.assert_allclose(svd(np.diag([0.8, 0.6])).singular_values, [0.8, 0.6])


def test_svd_nilpotent_against_gram_eigenvalues():
    c = np.array([[0, 1], [0, 0]], dtype=complex)
    u, s, v = svd(c)
    oracle = np.sqrt(np.clip(eigvalsh(c.conj().T @ c), 0, None))[::-1]
    np.testing.assert_allclose(s, oracle, atol=1e-15)
    np.testing.assert_allclose(s, [1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(u @ np.diag(s) @ v.conj().T, c, atol=1e-14)


@pytest.mark.parametrize("k", [1, 2, 3, 5, 8])
def test_svd_random(rng, k):
    c = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    u, s, v = svd(c)
    assert np.all(np.diff(s) <= 0) and np.all(s >= 0)
    assert np.linalg.norm(u @ np.diag(s) @ v.conj().T - c) <= 1e-10 * np.linalg.norm(c)
    assert np.linalg.norm(u.conj().T @ u - np.eye(k)) <= 1e-10 * k
    assert np.linalg.norm(v.conj().T @ v - np.eye(k)) <= 1e-10 * k


def test_svd_rank_deficient(rng):
    c = np.zeros((4, 4), dtype=complex)
    c[:2] = rng.standard_normal((2, 4))
    u, s, v = svd(c)
    np.testing.assert_allclose(s[2:], 0, atol=1e-12)
    assert np.linalg.norm(u @ np.diag(s) @ v.conj().T - c) <= 1e-10 * np.linalg.norm(c)
    assert np.linalg.norm(u.conj().T @ u - np.eye(4)) <= 1e-10


def test_svd_of_psd_matches_eigh(rng):
    z = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    a = z @ z.conj().T
    np.testing.assert_allclose(svd(a).singular_values, eigvalsh(a)[::-1], rtol=0, atol=1e-10 * np.linalg.norm(a))


def test_range_solve_identity(rng):
    v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    v /= np.linalg.norm(v)
    np.testing.assert_allclose(range_solve(np.eye(4), v), v, atol=1e-14)


def test_range_solve_diagonal():
    w = range_solve(np.diag([0.5, 0.5, 0, 0]), np.array([1, 0, 0, 0]))
    np.testing.assert_allclose(w, [2, 0, 0, 0], atol=1e-14)


def test_range_solve_low_rank_residual(rng):
    q, _ = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
    basis = q[:, :2]
    a = 0.7 * np.outer(basis[:, 0], basis[:, 0].conj()) + 0.3 * np.outer(basis[:, 1], basis[:, 1].conj())
    v = basis @ np.array([0.6, 0.8j])
    w = range_solve(a, v)
    assert np.linalg.norm(a @ w - v) <= 1e-8


def test_range_solve_outside_range():
    with pytest.raises(NotInRange):
        range_solve(np.diag([1.0, 0.0]), np.array([0.0, 1.0]))


def test_frobenius_examples(rng):
    assert frobenius_inner(np.eye(2), np.eye(2)) == 2
    e12 = np.array([[0, 1], [0, 0]])
    assert frobenius_inner(e12, e12) == 1
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    norm = frobenius_inner(a, a)
    assert abs(norm.imag) < 1e-14 and norm.real > 0
    assert frobenius_inner(a, b) == pytest.approx(np.conj(frobenius_inner(b, a)))
    assert frobenius_inner(a, b) == pytest.approx(np.trace(b.conj().T @ a))


def test_frobenius_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        frobenius_inner(np.eye(2), np.eye(3))


def test_conjugate_transpose_involution(rng):
    a = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
    assert np.array_equal(conjugate_transpose(conjugate_transpose(a)), a)


def test_module_constants():
    assert matcore.MAX_SWEEPS == 100
    assert matcore.RANK_TOL == 1e-10
