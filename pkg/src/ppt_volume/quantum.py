"""Bipartite density matrices and the quantities computed from them.

Composite indices are first-factor major: basis state ``|m>|m'>`` sits at
row ``m * N2 + m'``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import matcore
from .matcore import DimensionMismatch, NotInRange

POS_TOL = 1e-10
STATE_TOL = 1e-10
NORM_TOL = 1e-8


class InvalidState(ValueError):
    pass


class NotNormalized(ValueError):
    pass


@dataclass(frozen=True)
class DensityMatrix:
    """A validated state on ``C^N1 (x) C^N2``.

    The constructor checks hermiticity, unit trace and positivity to
    ``1e-10`` and stores a hermitised, read-only copy of the matrix.
    """

    matrix: np.ndarray
    dims: tuple[int, int]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 2 or min(dims) < 2:
            raise InvalidState(f"dims must be two integers >= 2, got {self.dims}")
        m = np.array(self.matrix, dtype=complex)
        n = dims[0] * dims[1]
        if m.shape != (n, n):
            raise DimensionMismatch(f"matrix shape {m.shape} does not match dims {dims}")
        scale = max(np.linalg.norm(m), np.finfo(float).tiny)
        if np.linalg.norm(m - m.conj().T) > STATE_TOL * scale:
            raise InvalidState("matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        if abs(np.trace(m).real - 1.0) > STATE_TOL:
            raise InvalidState(f"trace is {np.trace(m).real!r}, expected 1")
        if matcore.eigvalsh(m)[0] < -POS_TOL:
            raise InvalidState("matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def size(self) -> int:
        return self.dims[0] * self.dims[1]

    @property
    def spectrum(self) -> np.ndarray:
        return matcore.eigvalsh(self.matrix)

    @classmethod
    def from_pure(cls, psi, dims) -> "DensityMatrix":
        psi = _unit_vector(psi)
        return cls(np.outer(psi, psi.conj()), dims)

    @classmethod
    def maximally_mixed(cls, dims) -> "DensityMatrix":
        n = dims[0] * dims[1]
        return cls(np.eye(n) / n, dims)


@dataclass(frozen=True)
class PptVerdict:
    is_ppt: bool
    min_pt_eigenvalue: float
    pt_spectrum: np.ndarray


@dataclass(frozen=True)
class WitnessResult:
    """Outcome of an inseparability test; truthy when the witness fires."""

    fired: bool
    value: float
    threshold: float

    def __bool__(self):
        return self.fired


def _unit_vector(psi, tol: float = NORM_TOL) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise NotNormalized(f"state has norm {norm!r}")
    return psi


def partial_transpose_array(mats: np.ndarray, dims) -> np.ndarray:
    """Transpose the second factor of one matrix or a stack of them.

    Entry ``(m m', n n')`` of the result is entry ``(m n', n m')`` of the input.
    """
    n1, n2 = dims
    mats = np.asarray(mats)
    n = n1 * n2
    if mats.shape[-2:] != (n, n):
        raise DimensionMismatch(f"matrix shape {mats.shape[-2:]} does not match dims {dims}")
    lead = mats.shape[:-2]
    t = mats.reshape(lead + (n1, n2, n1, n2))
    t = np.swapaxes(t, -1, -3)
    return t.reshape(lead + (n, n))


def partial_transpose(rho: DensityMatrix) -> np.ndarray:
    return partial_transpose_array(rho.matrix, rho.dims)


def pt_eigenvalues(mats: np.ndarray, dims, backend: str = "lapack") -> np.ndarray:
    """Ascending spectra of the partial transposes of a stack of matrices."""
    return matcore.eigvalsh(partial_transpose_array(mats, dims), backend=backend)


def ppt_check(rho: DensityMatrix, tol: float = POS_TOL, backend: str = "jacobi") -> PptVerdict:
    """Positivity of the partial transpose, with eigenvalues ``>= -tol`` counted
    as nonnegative. For 2x2 and 2x3 systems a PPT verdict means separable."""
    ev = matcore.eigvalsh(partial_transpose(rho), backend=backend)
    lo = float(ev[0])
    return PptVerdict(lo >= -tol, lo, ev)


def purity_from_spectrum(spectra: np.ndarray) -> np.ndarray:
    return np.sum(np.asarray(spectra) ** 2, axis=-1)


def participation_ratio(rho: DensityMatrix) -> float:
    """``1 / Tr(rho^2)``: 1 for pure states, N for the maximally mixed one."""
    return float(1.0 / np.real(matcore.frobenius_inner(rho.matrix, rho.matrix)))


def renyi_from_spectrum(spectra: np.ndarray, q: float, tol: float = POS_TOL) -> np.ndarray:
    """Renyi entropy of order ``q`` from eigenvalues (last axis).

    Eigenvalues at or below ``tol`` are dropped; ``q == 1`` gives the von
    Neumann entropy.
    """
    if q <= 0:
        raise ValueError(f"Renyi order must be positive, got {q}")
    lam = np.asarray(spectra, dtype=float)
    keep = lam > tol
    safe = np.where(keep, lam, 1.0)
    if q == 1:
        return -np.sum(np.where(keep, safe * np.log(safe), 0.0), axis=-1)
    power = np.sum(np.where(keep, safe**q, 0.0), axis=-1)
    return np.log(power) / (1.0 - q)


def renyi_entropy(rho: DensityMatrix, q: float) -> float:
    return float(renyi_from_spectrum(rho.spectrum, q))


def negativity_from_pt_spectrum(pt_spectra: np.ndarray, tol: float = POS_TOL) -> np.ndarray:
    """``sum |lambda'| - 1``, exactly zero when no eigenvalue is below ``-tol``."""
    ev = np.asarray(pt_spectra, dtype=float)
    ev = np.where((ev < 0) & (ev >= -tol), 0.0, ev)
    neg = np.sum(np.where(ev < 0, -ev, 0.0), axis=-1)
    # sum|l| - 1 == 2 * sum(negative parts) for unit trace; avoids rounding on PPT states
    return 2.0 * neg


def t_statistic(rho: DensityMatrix) -> float:
    """Entanglement degree ``t = sum_i |lambda'_i| - 1`` over the PT spectrum.

    Zero on every PPT state and 1 on a maximally entangled two-qubit state.
    """
    return float(negativity_from_pt_spectrum(ppt_check(rho).pt_spectrum))


def schmidt_coefficients(psi, dims) -> np.ndarray:
    """Schmidt coefficients of a (not necessarily normalized) vector, sorted
    nonincreasing and of length ``min(N1, N2)``."""
    n1, n2 = dims
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.size != n1 * n2:
        raise DimensionMismatch(f"vector of length {psi.size} does not match dims {dims}")
    c = psi.reshape(n1, n2)
    big = max(n1, n2)
    padded = np.zeros((big, big), dtype=complex)
    padded[:n1, :n2] = c
    return matcore.svd(padded).singular_values[: min(n1, n2)]


def schmidt_decompose(psi, dims) -> np.ndarray:
    """Schmidt coefficients of a unit vector; raises :class:`NotNormalized`."""
    return schmidt_coefficients(_unit_vector(psi), dims)


def _max_cross(a: np.ndarray) -> float:
    # a is sorted nonincreasing, so the largest a_i a_j with i != j is a_0 a_1
    return float(a[0] * a[1]) if a.size > 1 else 0.0


def inverse_overlap_witness(rho: DensityMatrix, psi) -> WitnessResult:
    """Fires when ``1/<psi|rho^+|psi> > 1/(1 + max_{i!=j} a_i a_j)``.

    ``psi`` must be a unit vector in the range of ``rho``; otherwise
    :class:`~ppt_volume.matcore.NotInRange` is raised. A firing witness
    proves ``rho`` entangled.
    """
    psi = _unit_vector(psi)
    if psi.size != rho.size:
        raise DimensionMismatch("state and density matrix dimensions differ")
    w = matcore.range_solve(rho.matrix, psi)
    inv = float(np.vdot(psi, w).real)
    weight = 1.0 / inv
    threshold = 1.0 / (1.0 + _max_cross(schmidt_coefficients(psi, rho.dims)))
    return WitnessResult(weight > threshold, weight, threshold)


def overlap_witness(rho: DensityMatrix, psi) -> WitnessResult:
    """Fires when ``<psi|rho|psi>`` exceeds the largest squared Schmidt
    coefficient of ``psi``, which no separable state allows."""
    psi = _unit_vector(psi)
    if psi.size != rho.size:
        raise DimensionMismatch("state and density matrix dimensions differ")
    value = float(np.vdot(psi, rho.matrix @ psi).real)
    threshold = float(schmidt_coefficients(psi, rho.dims)[0] ** 2)
    return WitnessResult(value > threshold, value, threshold)


def eigenvector_witness_scan(rho: DensityMatrix) -> bool:
    """Apply both witnesses to every eigenvector of ``rho``.

    For an eigenpair ``(L, v)`` the inverse-overlap weight and the overlap
    are both ``L``, so each test reduces to comparing ``L`` with a function
    of the Schmidt coefficients of ``v``.
    """
    values, vectors = matcore.eigh(rho.matrix)
    for lam, v in zip(values, vectors.T):
        if lam <= POS_TOL:
            continue
        a = schmidt_coefficients(v, rho.dims)
        if lam > 1.0 / (1.0 + _max_cross(a)) or lam > a[0] ** 2:
            return True
    return False


def eigenvector_witness_scan_batch(mats: np.ndarray, dims, backend: str = "lapack") -> np.ndarray:
    """Vectorised :func:`eigenvector_witness_scan` over a stack of states."""
    n1, n2 = dims
    values, vectors = matcore.eigh(mats, backend=backend)
    # column j of vectors[b] reshaped to n1 x n2 gives its coefficient matrix
    coef = np.swapaxes(vectors, -1, -2).reshape(vectors.shape[:-2] + (n1 * n2, n1, n2))
    a = np.linalg.svd(coef, compute_uv=False)
    cross = a[..., 0] * a[..., 1]
    fires = (values > 1.0 / (1.0 + cross)) | (values > a[..., 0] ** 2)
    return np.any(fires & (values > POS_TOL), axis=-1)


def mix_with_identity(sigma: DensityMatrix, p: float) -> DensityMatrix:
    """``(1 - p) I/N + p sigma``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing weight must lie in [0, 1], got {p}")
    n = sigma.size
    return DensityMatrix((1.0 - p) * np.eye(n) / n + p * sigma.matrix, sigma.dims)


def singlet_vector() -> np.ndarray:
    return np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / np.sqrt(2.0)


def singlet() -> DensityMatrix:
    return DensityMatrix.from_pure(singlet_vector(), (2, 2))


def werner_state(q: float) -> DensityMatrix:
    """``q |psi-><psi-| + (1 - q) I/4``.

    The PT spectrum is ``(1+q)/4`` (three times) and ``(1-3q)/4``, so the state
    is entangled exactly for ``q > 1/3`` with ``t = (3q - 1)/2`` there.
    """
    return mix_with_identity(singlet(), q)


def werner_weight_from_x(x: float) -> float:
    """Singlet weight ``q`` whose ``t`` equals ``(3x - 2)/(4 - 3x)``.

    This is the correspondence ``q = x / (4 - 3x)``; it matches the ``t``
    values of the ``x``-parametrised family, nothing more is assumed about it.
    """
    return x / (4.0 - 3.0 * x)


# ---------------------------------------------------------------- file I/O


def _pairs_to_complex(entries, expected: int, what: str) -> np.ndarray:
    arr = np.asarray(entries, dtype=float)
    if arr.shape != (expected, 2):
        raise InvalidState(f"{what} must hold {expected} [re, im] pairs, got shape {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


def _complex_to_pairs(values) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.ravel(values)]


def state_to_dict(rho: DensityMatrix) -> dict:
    return {"dims": list(rho.dims), "matrix": _complex_to_pairs(rho.matrix)}


def state_from_dict(doc: dict) -> DensityMatrix:
    try:
        n1, n2 = (int(d) for d in doc["dims"])
        entries = doc["matrix"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidState(f"malformed state document: {exc}") from exc
    n = n1 * n2
    flat = _pairs_to_complex(entries, n * n, "matrix")
    return DensityMatrix(flat.reshape(n, n), (n1, n2))


def load_state(path) -> DensityMatrix:
    return state_from_dict(json.loads(Path(path).read_text()))


def save_state(rho: DensityMatrix, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(rho)))


def pure_state_from_dict(doc: dict) -> tuple[np.ndarray, tuple[int, int]]:
    try:
        n1, n2 = (int(d) for d in doc["dims"])
        entries = doc["vector"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidState(f"malformed pure-state document: {exc}") from exc
    psi = _pairs_to_complex(entries, n1 * n2, "vector")
    return _unit_vector(psi), (n1, n2)


def load_pure_state(path) -> tuple[np.ndarray, tuple[int, int]]:
    return pure_state_from_dict(json.loads(Path(path).read_text()))


def pure_state_to_dict(psi, dims) -> dict:
    return {"dims": list(dims), "vector": _complex_to_pairs(psi)}


__all__ = [
    "DensityMatrix",
    "InvalidState",
    "NotInRange",
    "NotNormalized",
    "PptVerdict",
    "WitnessResult",
    "eigenvector_witness_scan",
    "eigenvector_witness_scan_batch",
    "inverse_overlap_witness",
    "load_pure_state",
    "load_state",
    "mix_with_identity",
    "negativity_from_pt_spectrum",
    "overlap_witness",
    "participation_ratio",
    "partial_transpose",
    "partial_transpose_array",
    "ppt_check",
    "pt_eigenvalues",
    "renyi_entropy",
    "renyi_from_spectrum",
    "save_state",
    "schmidt_decompose",
    "singlet",
    "t_statistic",
    "werner_state",
]
