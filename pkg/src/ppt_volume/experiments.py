"""Monte Carlo campaigns over random bipartite states.

Work is cut into fixed chunks of ``CHUNK_SIZE`` samples; chunk ``k`` always
draws from stream ``k`` of the run seed. Workers only decide who computes a
chunk, so every total is identical for any worker count. Each chunk returns
sufficient statistics (counts, sums, per-bin tallies) and the reducer adds
them in chunk order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .quantum import POS_TOL, negativity_from_pt_spectrum, pt_eigenvalues, renyi_from_spectrum
from .randgen import (
    SeededStream,
    density_from_spectrum,
    sample_haar_unitary,
    sample_purity_ball,
    sample_simplex,
)

CHUNK_SIZE = 10_000
MAX_DIM = 32
R_BIN_WIDTH = 0.05
H_BINS = 60
SENSITIVITY_TOLS = (1e-12, 1e-10, 1e-8)


class DegenerateFit(ValueError):
    pass


def _check_dims(dims) -> tuple[int, int]:
    n1, n2 = (int(d) for d in dims)
    if n1 < 2 or n2 < 2:
        raise ValueError(f"factor dimensions must be >= 2, got {n1}x{n2}")
    if n1 * n2 > MAX_DIM:
        raise ValueError(f"total dimension {n1 * n2} exceeds {MAX_DIM}")
    return n1, n2


def separability_label(dims) -> str:
    n = dims[0] * dims[1]
    return "separable_volume" if n in (4, 6) else "upper_bound_on_separable_volume"


# ---------------------------------------------------------------- chunking


def chunk_layout(n: int, chunk_size: int = CHUNK_SIZE) -> list[tuple[int, int]]:
    """``(stream_index, count)`` for each chunk of an ``n``-sample run."""
    return [(k, min(chunk_size, n - start)) for k, start in enumerate(range(0, n, chunk_size))]


def _map_chunks(fn, n: int, seed: int, workers: int):
    layout = chunk_layout(n)
    jobs = [(seed, k, count) for k, count in layout]
    if workers <= 1 or len(jobs) == 1:
        return [fn(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*jobs)))


def _draw_states(dims, seed, index, count, mixture, spectra_only=False):
    """Spectra (and optionally partial-transpose spectra) for one chunk."""
    n = dims[0] * dims[1]
    stream = SeededStream(seed, index)
    lam = sample_simplex(n, stream, count)
    if mixture is not None:
        lam = (1.0 - mixture) / n + mixture * lam
    if spectra_only:
        return lam, None
    u = sample_haar_unitary(n, stream, count)
    return lam, pt_eigenvalues(density_from_spectrum(lam, u), dims)


# ---------------------------------------------------------------- volume


@dataclass(frozen=True)
class VolumeEstimate:
    dims: tuple[int, int]
    n: int
    hits: int
    mean_t: float = float("nan")
    mean_t_stderr: float = float("nan")
    tolerance_hits: dict = field(default_factory=dict, compare=False)

    @property
    def p_hat(self) -> float:
        return self.hits / self.n

    @property
    def stderr(self) -> float:
        p = self.p_hat
        return math.sqrt(p * (1.0 - p) / self.n)

    @property
    def size(self) -> int:
        return self.dims[0] * self.dims[1]

    @property
    def label(self) -> str:
        return separability_label(self.dims)


def _volume_chunk(dims, mixture, seed, index, count):
    _, ev = _draw_states(dims, seed, index, count, mixture)
    lo = ev[:, 0]
    t = negativity_from_pt_spectrum(ev)
    tol_hits = tuple(int(np.count_nonzero(lo >= -tol)) for tol in SENSITIVITY_TOLS)
    return count, int(np.count_nonzero(lo >= -POS_TOL)), float(t.sum()), float((t * t).sum()), tol_hits


def estimate_ppt_volume(dims, n: int, seed: int, workers: int = 1, mixture: float | None = None) -> VolumeEstimate:
    """Fraction of random states whose partial transpose is positive.

    Parameters
    ----------
    dims : (int, int)
        Factor dimensions ``(N1, N2)``.
    n : int
        Number of sampled states, at least 1000.
    seed : int
        64-bit run seed.
    workers : int
        Process count. Does not affect the result.
    mixture : float, optional
        If given, every sampled state is replaced by its mixture
        ``(1 - mixture) I/N + mixture * rho`` before testing.
    """
    dims = _check_dims(dims)
    if n < 1000:
        raise ValueError(f"need at least 1000 samples, got {n}")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    parts = _map_chunks(partial(_volume_chunk, dims, mixture), n, seed, workers)
    total = sum(p[0] for p in parts)
    hits = sum(p[1] for p in parts)
    s1 = math.fsum(p[2] for p in parts)
    s2 = math.fsum(p[3] for p in parts)
    mean = s1 / total
    var = max(s2 / total - mean * mean, 0.0) * total / max(total - 1, 1)
    tol_hits = {tol: sum(p[4][i] for p in parts) for i, tol in enumerate(SENSITIVITY_TOLS)}
    return VolumeEstimate(dims, total, hits, mean, math.sqrt(var / total), tol_hits)


def mean_t(dims, n: int, seed: int, workers: int = 1) -> tuple[float, float]:
    """Average entanglement degree ``<t>`` and its standard error."""
    if n < 10_000:
        raise ValueError(f"need at least 1e4 samples, got {n}")
    est = estimate_ppt_volume(dims, n, seed, workers)
    return est.mean_t, est.mean_t_stderr


def scan_dimensions(dim_pairs, n: int, seed: int, workers: int = 1) -> list[VolumeEstimate]:
    """One PPT-volume estimate per factor pair, all drawn from the same seed."""
    return [estimate_ppt_volume(pair, n, seed, workers) for pair in dim_pairs]


@dataclass(frozen=True)
class ExponentialFit:
    """``P_N ~ prefactor * exp(-rate * N)``."""

    prefactor: float
    rate: float
    rss: float

    def predict(self, n) -> np.ndarray:
        return self.prefactor * np.exp(-self.rate * np.asarray(n, dtype=float))


def fit_exponential(estimates) -> ExponentialFit:
    """Weighted least squares of ``ln p_hat`` against ``N``.

    Log-scale errors are ``stderr / p_hat``; an estimate with zero stderr
    gets the floor ``1/n`` instead. ``rss`` is the unweighted residual sum of
    squares on the log scale.
    """
    estimates = list(estimates)
    if len({e.size for e in estimates}) < 2:
        raise DegenerateFit("need at least two distinct total dimensions")
    if any(e.p_hat <= 0 for e in estimates):
        raise ValueError("every estimate must have p_hat > 0 for a log fit")
    x = np.array([e.size for e in estimates], dtype=float)
    y = np.log([e.p_hat for e in estimates])
    sigma = np.array([max(e.stderr, 1.0 / e.n) / e.p_hat for e in estimates])
    slope, intercept = np.polyfit(x, y, 1, w=1.0 / sigma)
    resid = y - (intercept + slope * x)
    return ExponentialFit(float(np.exp(intercept)), float(-slope), float(np.sum(resid**2)))


# ---------------------------------------------------------------- conditionals


@dataclass(frozen=True)
class BinnedConditional:
    """Per-bin PPT frequency and mean ``t`` against a mixedness statistic."""

    statistic: str
    bin_edges: np.ndarray
    counts: np.ndarray
    ppt_counts: np.ndarray
    t_sums: np.ndarray

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def ppt_fraction(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.counts > 0, self.ppt_counts / np.maximum(self.counts, 1), np.nan)

    @property
    def mean_t(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.counts > 0, self.t_sums / np.maximum(self.counts, 1), np.nan)

    def cumulative(self) -> np.ndarray:
        """Fraction of samples at or below each upper bin edge."""
        return np.cumsum(self.counts) / self.n

    def all_ppt_threshold(self) -> tuple[float, float]:
        """Lowest edge above which every sample was PPT, and the cumulative
        fraction of samples below it."""
        entangled = np.nonzero(self.counts - self.ppt_counts)[0]
        if entangled.size == 0:
            return float(self.bin_edges[0]), 0.0
        last = entangled[-1]
        return float(self.bin_edges[last + 1]), float(self.cumulative()[last])


def _bin_index(values, edges):
    idx = np.searchsorted(edges, values, side="right") - 1
    # the top edge belongs to the last bin
    return np.clip(idx, 0, len(edges) - 2)


def _tally(values, ppt, t, edges):
    idx = _bin_index(values, edges)
    nb = len(edges) - 1
    return (
        np.bincount(idx, minlength=nb),
        np.bincount(idx, weights=ppt.astype(float), minlength=nb).astype(np.int64),
        np.bincount(idx, weights=t, minlength=nb),
    )


def participation_edges(n: int, bins: int | None = None) -> np.ndarray:
    if bins is None:
        bins = int(round((n - 1) / R_BIN_WIDTH))
    if bins < 4:
        raise ValueError("need at least 4 bins")
    return np.linspace(1.0, float(n), bins + 1)


def entropy_edges(n: int, bins: int | None = None) -> np.ndarray:
    bins = H_BINS if bins is None else bins
    if bins < 4:
        raise ValueError("need at least 4 bins")
    return np.linspace(0.0, math.log(n), bins + 1)


def _conditional_r_chunk(dims, edges, seed, index, count):
    lam, ev = _draw_states(dims, seed, index, count, None)
    r = 1.0 / np.sum(lam * lam, axis=1)
    ppt = ev[:, 0] >= -POS_TOL
    return _tally(r, ppt, negativity_from_pt_spectrum(ev), edges)


def _merge_tallies(parts):
    counts = np.sum([p[0] for p in parts], axis=0).astype(np.int64)
    ppt = np.sum([p[1] for p in parts], axis=0).astype(np.int64)
    # sequential float sums keep the reduction order fixed
    t = np.zeros_like(parts[0][2])
    for p in parts:
        t = t + p[2]
    return counts, ppt, t


def conditional_by_participation(dims, n: int, seed: int, bins: int | None = None, workers: int = 1) -> BinnedConditional:
    """PPT frequency and ``<t>`` binned by participation ratio on ``[1, N]``."""
    dims = _check_dims(dims)
    edges = participation_edges(dims[0] * dims[1], bins)
    parts = _map_chunks(partial(_conditional_r_chunk, dims, edges), n, seed, workers)
    return BinnedConditional("R", edges, *_merge_tallies(parts))


def _dist_r_chunk(n_dim, edges, seed, index, count):
    stream = SeededStream(seed, index)
    lam = sample_simplex(n_dim, stream, count)
    r = 1.0 / np.sum(lam * lam, axis=1)
    return np.bincount(_bin_index(r, edges), minlength=len(edges) - 1)


@dataclass(frozen=True)
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def density(self) -> np.ndarray:
        return self.counts / (self.n * np.diff(self.bin_edges))

    @property
    def mass(self) -> np.ndarray:
        return self.counts / self.n

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])


def distribution_of_participation(dims, n: int, seed: int, bins: int | None = None, workers: int = 1) -> Histogram:
    """Histogram of the participation ratio of uniform spectra.

    The unitary part of a state does not change ``R``, so only spectra are
    drawn; they are the same spectra the other campaigns see for this seed.
    """
    dims = _check_dims(dims)
    size = dims[0] * dims[1]
    edges = participation_edges(size, bins)
    parts = _map_chunks(partial(_dist_r_chunk, size, edges), n, seed, workers)
    return Histogram(edges, np.sum(parts, axis=0).astype(np.int64))


def _conditional_h_chunk(dims, q_list, edges, seed, index, count):
    lam, ev = _draw_states(dims, seed, index, count, None)
    ppt = ev[:, 0] >= -POS_TOL
    t = negativity_from_pt_spectrum(ev)
    return [_tally(renyi_from_spectrum(lam, q), ppt, t, edges) for q in q_list]


@dataclass(frozen=True)
class EntropyConditional:
    q: float
    binned: BinnedConditional
    threshold: float
    cumulative_at_threshold: float


def conditional_by_entropy(dims, q_list, n: int, seed: int, bins: int | None = None, workers: int = 1) -> list[EntropyConditional]:
    """PPT frequency against Renyi entropies, with the cumulative distribution.

    For each ``q`` the report includes the entropy above which all sampled
    states were PPT and the cumulative fraction of states below it.
    """
    dims = _check_dims(dims)
    q_list = [float(q) for q in q_list]
    if any(q <= 0 for q in q_list):
        raise ValueError("Renyi orders must be positive")
    edges = entropy_edges(dims[0] * dims[1], bins)
    parts = _map_chunks(partial(_conditional_h_chunk, dims, q_list, edges), n, seed, workers)
    out = []
    for i, q in enumerate(q_list):
        binned = BinnedConditional(f"H_{q:g}", edges, *_merge_tallies([p[i] for p in parts]))
        h_star, d_star = binned.all_ppt_threshold()
        out.append(EntropyConditional(q, binned, h_star, d_star))
    return out


# ---------------------------------------------------------------- property sweeps


def _ball_chunk(dims, source, seed, index, count):
    """Count states with ``R >= N - 1`` and how many of them fail the PPT test."""
    n = dims[0] * dims[1]
    stream = SeededStream(seed, index)
    if source == "ball":
        lam = sample_purity_ball(n, stream, count)
    else:
        lam = sample_simplex(n, stream, count)
    u = sample_haar_unitary(n, stream, count)
    r = 1.0 / np.sum(lam * lam, axis=1)
    inside = r >= (n - 1) * (1.0 - 1e-12)
    if not np.any(inside):
        return 0, 0
    ev = pt_eigenvalues(density_from_spectrum(lam[inside], u[inside]), dims)
    return int(inside.sum()), int(np.count_nonzero(ev[:, 0] < -POS_TOL))


def high_purity_violations(dims, n: int, seed: int, source: str = "simplex", workers: int = 1) -> tuple[int, int]:
    """Check that states with participation ratio ``>= N - 1`` are PPT.

    ``source="simplex"`` samples the natural measure and keeps the states in
    the high-R region; ``source="ball"`` samples that region directly.
    Returns ``(states_checked, violations)``.
    """
    dims = _check_dims(dims)
    if source not in ("simplex", "ball"):
        raise ValueError(f"unknown source {source!r}")
    parts = _map_chunks(partial(_ball_chunk, dims, source), n, seed, workers)
    return sum(p[0] for p in parts), sum(p[1] for p in parts)
