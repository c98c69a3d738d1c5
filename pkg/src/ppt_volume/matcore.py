"""Small dense complex linear algebra.

Matrices are plain ``numpy`` arrays. Every routine accepts either a single
``(n, n)`` matrix or a stack ``(..., n, n)`` and works on the whole stack at
once, which is what the Monte Carlo loops need: millions of 4x4 to 32x32
decompositions, one vectorised rotation at a time.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

HERMITIAN_TOL = 1e-10
RANK_TOL = 1e-10
RANGE_TOL = 1e-8
MAX_SWEEPS = 100


class LinAlgError(ValueError):
    """Base class for errors raised by this module."""


class NonHermitianInput(LinAlgError):
    pass


class NoConvergence(LinAlgError):
    pass


class DimensionMismatch(LinAlgError):
    pass


class NotInRange(LinAlgError):
    pass


class HermitianEigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


class SingularValueDecomposition(NamedTuple):
    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray


def conjugate_transpose(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def frobenius_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt product ``Tr(B^dagger A)``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return complex(np.sum(np.conj(b) * a))


def _as_square_stack(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise DimensionMismatch(f"expected square matrices, got shape {a.shape}")
    return a


def check_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    a = _as_square_stack(a)
    skew = np.linalg.norm(a - conjugate_transpose(a), axis=(-2, -1))
    scale = np.linalg.norm(a, axis=(-2, -1))
    if np.any(skew > tol * np.maximum(scale, np.finfo(float).tiny)):
        raise NonHermitianInput(
            f"||A - A^dagger||_F exceeds {tol:g} * ||A||_F (worst skew {np.max(skew):.3e})"
        )


def _rotation(app, aqq, apq):
    """Unitary 2x2 Jacobi rotation annihilating the Hermitian entry ``apq``.

    Returns ``(c, s, phase)`` such that with ``J = [[c, s], [-s*conj(phase),
    c*conj(phase)]]`` the product ``J^dagger [[app, apq], [conj(apq), aqq]] J``
    is diagonal. All arguments are arrays over the batch.
    """
    mag = np.abs(apq)
    active = mag > 0.0
    safe = np.where(active, mag, 1.0)
    phase = np.where(active, apq / safe, 1.0)
    tau = (aqq - app) / (2.0 * safe)
    # smaller of the two roots keeps the rotation angle below pi/4
    t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
    t = np.where(active, t, 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    return c, t * c, phase


def _apply_columns(m, p, q, c, s, phase):
    # m <- m @ J on columns p, q
    mp = m[..., :, p].copy()
    mq = m[..., :, q]
    cp = np.conj(phase)[..., None]
    c = c[..., None]
    s = s[..., None]
    m[..., :, p] = c * mp - s * cp * mq
    m[..., :, q] = s * mp + c * cp * mq


def _apply_rows(m, p, q, c, s, phase):
    # m <- J^dagger @ m on rows p, q
    mp = m[..., p, :].copy()
    mq = m[..., q, :]
    ph = phase[..., None]
    c = c[..., None]
    s = s[..., None]
    m[..., p, :] = c * mp - s * ph * mq
    m[..., q, :] = s * mp + c * ph * mq


def _off_norm(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    mask = ~np.eye(n, dtype=bool)
    return np.sqrt(np.sum(np.abs(a[..., mask]) ** 2, axis=-1))


def _jacobi_eigh(a: np.ndarray, want_vectors: bool, max_sweeps: int):
    a = a.copy()
    n = a.shape[-1]
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy() if want_vectors else None
    scale = np.linalg.norm(a, axis=(-2, -1))
    target = np.finfo(float).eps * np.maximum(scale, np.finfo(float).tiny)

    for _ in range(max_sweeps + 1):
        if np.all(_off_norm(a) <= target):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                c, s, ph = _rotation(a[..., p, p].real, a[..., q, q].real, a[..., p, q])
                _apply_columns(a, p, q, c, s, ph)
                _apply_rows(a, p, q, c, s, ph)
                a[..., p, q] = 0.0
                a[..., q, p] = 0.0
                if want_vectors:
                    _apply_columns(v, p, q, c, s, ph)
    else:
        raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps")

    w = np.diagonal(a, axis1=-2, axis2=-1).real.copy()
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    if want_vectors:
        v = np.take_along_axis(v, np.broadcast_to(order[..., None, :], v.shape), axis=-1)
    return w, v


def eigh(a, backend: str = "jacobi", max_sweeps: int = MAX_SWEEPS) -> HermitianEigenDecomposition:
    """Eigen-decomposition of a Hermitian matrix or stack of them.

    Parameters
    ----------
    a : array_like, shape (..., n, n)
        Hermitian input. Checked to ``||A - A^dagger||_F <= 1e-10 ||A||_F``.
    backend : {"jacobi", "lapack"}
        ``"jacobi"`` runs the cyclic complex Jacobi method implemented here.
        ``"lapack"`` defers to ``numpy.linalg.eigh``.
    max_sweeps : int
        Sweep cap for the Jacobi backend.

    Returns
    -------
    HermitianEigenDecomposition
        Ascending eigenvalues and the matching eigenvectors as columns.

    Raises
    ------
    NonHermitianInput, NoConvergence, DimensionMismatch
    """
    a = _as_square_stack(a)
    check_hermitian(a)
    a = 0.5 * (a + conjugate_transpose(a))
    if backend == "lapack":
        w, v = np.linalg.eigh(a)
        return HermitianEigenDecomposition(w, v)
    if backend != "jacobi":
        raise ValueError(f"unknown backend {backend!r}")
    w, v = _jacobi_eigh(a, True, max_sweeps)
    return HermitianEigenDecomposition(w, v)


def eigvalsh(a, backend: str = "jacobi", max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """Ascending eigenvalues only; same contract as :func:`eigh`."""
    a = _as_square_stack(a)
    check_hermitian(a)
    a = 0.5 * (a + conjugate_transpose(a))
    if backend == "lapack":
        return np.linalg.eigvalsh(a)
    if backend != "jacobi":
        raise ValueError(f"unknown backend {backend!r}")
    return _jacobi_eigh(a, False, max_sweeps)[0]


def _complete_basis(u: np.ndarray, keep: np.ndarray) -> np.ndarray:
    """Replace the columns of ``u`` not flagged in ``keep`` by an orthonormal
    complement of the kept ones (single matrix)."""
    n = u.shape[0]
    basis = [u[:, j] for j in range(n) if keep[j]]
    out = u.copy()
    candidates = iter(np.eye(n, dtype=complex))
    for j in range(n):
        if keep[j]:
            continue
        for e in candidates:
            w = e.copy()
            for b in basis:
                w -= np.vdot(b, w) * b
            for b in basis:
                w -= np.vdot(b, w) * b
            nw = np.linalg.norm(w)
            if nw > 0.5:
                w /= nw
                basis.append(w)
                out[:, j] = w
                break
    return out


def svd(c, max_sweeps: int = MAX_SWEEPS) -> SingularValueDecomposition:
    """Singular value decomposition ``C = U diag(s) V^dagger`` of a square matrix.

    One-sided (Hestenes) Jacobi: columns of ``C`` are rotated pairwise until
    mutually orthogonal; the column norms are the singular values. Singular
    values come back nonincreasing.
    """
    c = np.asarray(c, dtype=complex)
    if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] < 1:
        raise DimensionMismatch(f"svd expects a square K x K matrix, got {c.shape}")
    k = c.shape[0]
    w = c.copy()
    v = np.eye(k, dtype=complex)
    eps = np.finfo(float).eps
    # columns below this squared norm are rounding noise of a rank deficiency
    negligible = (eps * np.linalg.norm(c)) ** 2

    for _ in range(max_sweeps + 1):
        rotated = False
        for p in range(k - 1):
            for q in range(p + 1, k):
                alpha = np.vdot(w[:, p], w[:, p]).real
                beta = np.vdot(w[:, q], w[:, q]).real
                gamma = np.vdot(w[:, p], w[:, q])
                if min(alpha, beta) <= negligible or abs(gamma) <= eps * np.sqrt(alpha * beta):
                    continue
                rotated = True
                cc, ss, ph = _rotation(np.array(alpha), np.array(beta), np.array(gamma))
                _apply_columns(w, p, q, cc, ss, ph)
                _apply_columns(v, p, q, cc, ss, ph)
        if not rotated:
            break
    else:
        raise NoConvergence(f"one-sided Jacobi SVD did not converge in {max_sweeps} sweeps")

    s = np.linalg.norm(w, axis=0)
    order = np.argsort(-s, kind="stable")
    s = s[order]
    w = w[:, order]
    v = v[:, order]
    keep = s > eps * max(s[0], np.finfo(float).tiny) * k
    u = np.zeros_like(w)
    u[:, keep] = w[:, keep] / s[keep]
    if not np.all(keep):
        u = _complete_basis(u, keep)
    return SingularValueDecomposition(u, s, v)


def range_solve(a, v, rank_tol: float = RANK_TOL, range_tol: float = RANGE_TOL) -> np.ndarray:
    """Apply the Moore-Penrose pseudo-inverse of a PSD matrix to ``v``.

    Only eigenvalues above ``rank_tol * lambda_max`` are inverted. ``v`` must
    lie in their span: a component orthogonal to it larger than
    ``range_tol * ||v||`` raises :class:`NotInRange`.
    """
    a = _as_square_stack(a)
    v = np.asarray(v, dtype=complex)
    if a.ndim != 2 or v.shape != (a.shape[0],):
        raise DimensionMismatch(f"matrix {a.shape} and vector {v.shape} do not match")
    w, vecs = eigh(a)
    cut = rank_tol * max(w[-1], 0.0)
    support = w > cut
    coeff = conjugate_transpose(vecs) @ v
    outside = np.linalg.norm(coeff[~support])
    if outside > range_tol * np.linalg.norm(v):
        raise NotInRange(f"vector has a component of norm {outside:.3e} outside the range")
    return vecs[:, support] @ (coeff[support] / w[support])
