"""Analytic and semi-analytic bounds on the volume of PPT / separable states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .randgen import SeededStream, sample_simplex

LOWER_ON_SEP = "lower_on_sep_volume"
LOWER_ON_PPT = "lower_on_ppt_volume"
UPPER_ON_SEP = "upper_on_sep_volume"
UPPER_ON_B = "upper_on_b"
BALL_MIXTURE = "ppt_mixture_weight"

# For these total dimensions PPT and separable coincide.
PPT_IS_SEPARABLE = frozenset({4, 6})


class InsufficientSamples(ValueError):
    pass


class OutOfDomain(ValueError):
    pass


@dataclass(frozen=True)
class BoundReport:
    name: str
    value: float
    kind: str
    dims: tuple[int, int] | None = None
    stderr: float = 0.0


def tau_lower_bound_value(n: int) -> float:
    """Relative volume of the ball of spectra with participation ratio >= N-1.

    ``(N-1)! pi^((N-1)/2) / (N^(N/2) (N-1)^((N-1)/2) Gamma((N+1)/2))``,
    evaluated in log space so large ``N`` does not overflow.
    """
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    log_tau = (
        math.lgamma(n)
        + 0.5 * (n - 1) * math.log(math.pi)
        - 0.5 * n * math.log(n)
        - 0.5 * (n - 1) * math.log(n - 1)
        - math.lgamma(0.5 * (n + 1))
    )
    return math.exp(log_tau)


def tau_lower_bound(n: int, dims: tuple[int, int] | None = None) -> BoundReport:
    kind = LOWER_ON_SEP if n in PPT_IS_SEPARABLE else LOWER_ON_PPT
    return BoundReport("tau", tau_lower_bound_value(n), kind, dims)


def epsilon_ball(n: int) -> float:
    """Largest weight ``p`` with ``(1-p) I/N + p sigma`` PPT for every ``sigma``.

    Follows from every PT eigenvalue of a state lying in ``[-1/2, 1]``.
    """
    if n < 4:
        raise ValueError(f"need a composite dimension >= 4, got {n}")
    return 2.0 / (2.0 + n)


def corner_bound(n1: int, n2: int) -> BoundReport:
    """Ceiling ``(1 - 1/K)^(N-1)`` on the witness-based inseparability bound.

    It bounds the bound ``b``, not the separable volume itself.
    """
    if n1 < 2 or n2 < 2:
        raise ValueError(f"factor dimensions must be >= 2, got {n1}x{n2}")
    k = min(n1, n2)
    n = n1 * n2
    return BoundReport("corner_b_ceiling", (1.0 - 1.0 / k) ** (n - 1), UPPER_ON_B, (n1, n2))


def _witness_thresholds(theta: np.ndarray) -> np.ndarray:
    """Largest-eigenvalue threshold above which both eigenvector witnesses
    fire, for Schmidt coefficients ``(cos theta, sin theta)``."""
    a1 = np.cos(theta)
    a2 = np.sin(theta)
    return np.maximum(1.0 / (1.0 + a1 * a2), np.maximum(a1, a2) ** 2)


def upper_bound_indicator(lam1: np.ndarray, theta: np.ndarray) -> np.ndarray:
    return lam1 > _witness_thresholds(theta)


def upper_bound_mc_2x2(samples: int, stream: SeededStream, chunk: int = 1_000_000) -> BoundReport:
    """Monte Carlo upper bound on the separable volume of two qubits.

    Draws a uniform spectrum on the 3-simplex and an arc-uniform pair of
    Schmidt coefficients, averages ``4 * [L1 > 1/(1 + a1 a2)] * [L1 > max a_i^2]``
    and reports one minus that mean. The factor 4 counts which eigenvalue is
    the large one. Consumers should add 3 standard errors before quoting the
    value as a ceiling.
    """
    if samples < 10_000:
        raise InsufficientSamples(f"need at least 1e4 samples, got {samples}")
    hits = 0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        lam = sample_simplex(4, stream, m)
        theta = 0.5 * np.pi * stream.uniform(m)
        hits += int(np.count_nonzero(upper_bound_indicator(lam[:, 0], theta)))
        done += m
    frac = hits / samples
    stderr = 4.0 * math.sqrt(frac * (1.0 - frac) / samples)
    return BoundReport("upper_bound_mc", 1.0 - 4.0 * frac, UPPER_ON_SEP, (2, 2), stderr)


def upper_bound_quadrature_2x2(simplex_grid: int = 200, angle_grid: int = 2000) -> float:
    """Deterministic tensor-grid evaluation of the same bound.

    Midpoint rules: ``simplex_grid`` nodes for the largest eigenvalue, as many
    for the second coordinate of the simplex (the third is integrated exactly,
    the integrand not depending on it), and ``angle_grid`` nodes on the
    quarter circle.
    """
    h = 1.0 / simplex_grid
    x = (np.arange(simplex_grid) + 0.5) * h
    lam1 = x[:, None]
    # second coordinate in [0, 1 - lam1]; third has length 1 - lam1 - lam2
    lam2 = (1.0 - lam1) * x[None, :]
    cell = (1.0 - lam1) * h * h * (1.0 - lam1 - lam2)
    weight_per_lam1 = 6.0 * cell.sum(axis=1)  # simplex volume in these coordinates is 1/6

    theta = (np.arange(angle_grid) + 0.5) * (0.5 * np.pi / angle_grid)
    thresholds = _witness_thresholds(theta)
    mass = np.mean(weight_per_lam1[:, None] * (lam1 > thresholds[None, :]), axis=1).sum()
    return 1.0 - 4.0 * float(mass)


def participation_density_n4(r: float) -> float:
    """Density of the participation ratio of a uniform 4-level spectrum, R in (3, 4]."""
    if not 3.0 < r <= 4.0:
        raise OutOfDomain(f"closed form holds only for 3 < R <= 4, got {r}")
    return 6.0 * math.pi * r**-2 * math.sqrt(max(1.0 / r - 0.25, 0.0))
