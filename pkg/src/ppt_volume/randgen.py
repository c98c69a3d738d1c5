"""Seeded, splittable sampling of random states and their ingredients.

All samplers take a :class:`SeededStream` and an optional ``size``. Without
``size`` they return one sample; with it they return a leading batch axis,
which is how the Monte Carlo drivers call them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matcore import conjugate_transpose

SEED_MAX = 2**64 - 1


@dataclass
class SeededStream:
    """A deterministic random stream identified by ``(seed, stream_index)``.

    Backed by the counter-based Philox generator keyed through
    :class:`numpy.random.SeedSequence`; distinct stream indices map to
    distinct spawn keys and hence independent sequences.

    A stream is stateful and meant to have a single owner. Use :meth:`split`
    before handing work to other processes.
    """

    seed: int
    stream_index: int = 0
    _gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= int(self.seed) <= SEED_MAX:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.stream_index < 0:
            raise ValueError("stream_index must be nonnegative")
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_index),))
        self._gen = np.random.Generator(np.random.Philox(ss))

    def substream(self, index: int) -> "SeededStream":
        """The stream sharing this seed with a different index."""
        return SeededStream(self.seed, index)

    def split(self, count: int) -> list["SeededStream"]:
        """Fresh streams ``0 .. count-1`` of this seed, one per worker or chunk."""
        return [self.substream(i) for i in range(count)]

    def uniform(self, size=None) -> np.ndarray:
        """Doubles on [0, 1) with 53 random bits."""
        return self._gen.random(size)

    def normal(self, size=None) -> np.ndarray:
        """Standard normal deviates by the Box-Muller transform."""
        shape = () if size is None else (size,) if np.isscalar(size) else tuple(size)
        count = int(np.prod(shape, dtype=np.int64))
        pairs = (count + 1) // 2
        u1 = 1.0 - self._gen.random(pairs)  # (0, 1], keeps the log finite
        u2 = self._gen.random(pairs)
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = 2.0 * np.pi * u2
        z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])[:count]
        return z.reshape(shape) if shape else z[0]

    def complex_normal(self, size=None) -> np.ndarray:
        """Circular complex Gaussians with ``E|z|^2 = 1``."""
        z = self.normal(size if size is None else _pair_shape(size))
        if size is None:
            return complex(z, self.normal()) / np.sqrt(2.0)
        return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)


def _pair_shape(size):
    shape = (size,) if np.isscalar(size) else tuple(size)
    return shape + (2,)


def parse_seed(text: str | int) -> int:
    """Accept a decimal or ``0x``-prefixed hexadecimal seed."""
    if isinstance(text, int):
        value = text
    else:
        text = text.strip().lower()
        value = int(text, 16) if text.startswith("0x") else int(text, 10)
    if not 0 <= value <= SEED_MAX:
        raise ValueError(f"seed {value} is outside the 64-bit unsigned range")
    return value


def _batch_shape(size):
    return () if size is None else (size,) if np.isscalar(size) else tuple(size)


def simplex_from_uniforms(xi: np.ndarray) -> np.ndarray:
    """Map ``N-1`` uniforms on (0, 1) to a point of the probability simplex.

    Sequential stick breaking:
    ``L_k = (1 - xi_k ** (1/(N-k))) * (1 - sum_{i<k} L_i)``, with the last
    weight taking the remainder. Works on the last axis of ``xi``.
    """
    xi = np.asarray(xi, dtype=float)
    n = xi.shape[-1] + 1
    lam = np.empty(xi.shape[:-1] + (n,))
    remaining = np.ones(xi.shape[:-1])
    for k in range(n - 1):
        part = (1.0 - xi[..., k] ** (1.0 / (n - 1 - k))) * remaining
        lam[..., k] = part
        remaining = remaining - part
    lam[..., -1] = np.maximum(remaining, 0.0)
    return lam


def sample_simplex(n: int, stream: SeededStream, size=None) -> np.ndarray:
    """Uniform (Lebesgue) point on the ``n-1`` dimensional probability simplex."""
    if n < 2:
        raise ValueError(f"simplex dimension must be >= 2, got {n}")
    shape = _batch_shape(size)
    return simplex_from_uniforms(stream.uniform(shape + (n - 1,)))


def sample_haar_unitary(n: int, stream: SeededStream, size=None) -> np.ndarray:
    """Haar-distributed unitary matrix (or stack of them).

    QR of a complex Ginibre matrix with the diagonal phases of ``R`` folded
    back into ``Q``, which removes the bias of the QR sign convention.
    """
    if n < 1:
        raise ValueError(f"unitary dimension must be >= 1, got {n}")
    shape = _batch_shape(size)
    z = stream.complex_normal(shape + (n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    mag = np.abs(d)
    phase = np.where(mag > 0, d / np.where(mag > 0, mag, 1.0), 1.0)
    return q * phase[..., None, :]


def density_from_spectrum(spectrum: np.ndarray, unitary: np.ndarray) -> np.ndarray:
    """``U diag(spectrum) U^dagger`` over matching batch axes."""
    rho = (unitary * spectrum[..., None, :]) @ conjugate_transpose(unitary)
    return 0.5 * (rho + conjugate_transpose(rho))


def sample_density_matrices(n1: int, n2: int, stream: SeededStream, size: int):
    """Batch of random states ``U D U^dagger``.

    Returns ``(spectra, matrices)``: the simplex spectra (shape ``(size, N)``)
    and the density matrices (shape ``(size, N, N)``). Spectra are drawn
    first, then the unitaries, so the spectrum sequence of a stream does not
    depend on whether the matrices are used.
    """
    if n1 < 2 or n2 < 2:
        raise ValueError(f"factor dimensions must be >= 2, got {n1}x{n2}")
    n = n1 * n2
    spectra = sample_simplex(n, stream, size)
    unitaries = sample_haar_unitary(n, stream, size)
    return spectra, density_from_spectrum(spectra, unitaries)


def sample_density_matrix(n1: int, n2: int, stream: SeededStream):
    """One random state, wrapped as a :class:`~ppt_volume.quantum.DensityMatrix`."""
    from .quantum import DensityMatrix

    _, rho = sample_density_matrices(n1, n2, stream, 1)
    return DensityMatrix(rho[0], (n1, n2))


def sample_octant(k: int, stream: SeededStream, size=None) -> np.ndarray:
    """Uniform point on the positive part of the unit sphere in ``R^k``."""
    if k < 1:
        raise ValueError(f"octant dimension must be >= 1, got {k}")
    shape = _batch_shape(size)
    g = np.abs(stream.normal(shape + (k,)))
    norm = np.linalg.norm(g, axis=-1, keepdims=True)
    # a zero vector has probability zero; guard anyway
    g = np.where(norm > 0, g, 1.0)
    norm = np.linalg.norm(g, axis=-1, keepdims=True)
    return g / norm


def schmidt_state(coeffs: np.ndarray, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """``sum_i a_i |e_i> (x) |f_i>`` from the columns of ``left`` and ``right``."""
    mat = (left * coeffs[..., None, :]) @ np.swapaxes(right, -1, -2)
    return mat.reshape(mat.shape[:-2] + (-1,))


def sample_schmidt_pure_state(k: int, stream: SeededStream, size=None) -> np.ndarray:
    """Pure state on ``C^k (x) C^k`` with Haar-random Schmidt bases and
    octant-uniform Schmidt coefficients."""
    if k < 2:
        raise ValueError(f"local dimension must be >= 2, got {k}")
    a = sample_octant(k, stream, size)
    left = sample_haar_unitary(k, stream, size)
    right = sample_haar_unitary(k, stream, size)
    psi = schmidt_state(a, left, right)
    return psi / np.linalg.norm(psi, axis=-1, keepdims=True)


def sample_purity_ball(n: int, stream: SeededStream, size=None) -> np.ndarray:
    """Uniform spectra inside the largest ball around ``(1/n, ..., 1/n)``
    that fits in the simplex, i.e. spectra with ``1/sum(L^2) >= n - 1``."""
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    shape = _batch_shape(size)
    g = stream.normal(shape + (n,))
    g = g - g.mean(axis=-1, keepdims=True)
    g /= np.linalg.norm(g, axis=-1, keepdims=True)
    radius = np.sqrt(1.0 / (n * (n - 1))) * stream.uniform(shape + (1,)) ** (1.0 / (n - 1))
    lam = 1.0 / n + radius * g
    return np.clip(lam, 0.0, None)
