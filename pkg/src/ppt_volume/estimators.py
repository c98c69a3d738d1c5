"""scikit-learn compatible wrappers.

Density matrices are passed as stacks of shape ``(n_samples, N, N)``. Fitting
only validates and records the input shape, except for
:class:`PPTVolumeEstimator`, whose ``fit`` runs the Monte Carlo campaign.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_is_fitted

from . import experiments
from .matcore import conjugate_transpose
from .quantum import POS_TOL, negativity_from_pt_spectrum, pt_eigenvalues, renyi_from_spectrum


def check_density_matrices(X, dims, tol: float = 1e-8) -> np.ndarray:
    """Validate a stack of density matrices and return it as complex128.

    A single ``(N, N)`` matrix is promoted to a stack of one.
    """
    X = np.asarray(X, dtype=complex)
    if X.ndim == 2:
        X = X[None]
    n = int(dims[0]) * int(dims[1])
    if X.ndim != 3 or X.shape[1:] != (n, n):
        raise ValueError(f"expected shape (n_samples, {n}, {n}) for dims {tuple(dims)}, got {X.shape}")
    if X.shape[0] == 0:
        raise ValueError("no samples given")
    if not np.all(np.isfinite(X)):
        raise ValueError("input contains NaN or infinity")
    if np.max(np.abs(X - conjugate_transpose(X))) > tol:
        raise ValueError("input matrices are not Hermitian")
    traces = np.trace(X, axis1=1, axis2=2).real
    if np.max(np.abs(traces - 1.0)) > tol:
        raise ValueError("input matrices do not have unit trace")
    return 0.5 * (X + conjugate_transpose(X))


class PPTClassifier(ClassifierMixin, BaseEstimator):
    """Label states by positivity of the partial transpose (1 = PPT).

    For 2x2 and 2x3 systems the label is exactly separability. Nothing is
    learned: ``fit`` validates ``X`` and records the classes.
    """

    def __init__(self, dims=(2, 2), tol=POS_TOL, backend="lapack"):
        self.dims = dims
        self.tol = tol
        self.backend = backend

    def fit(self, X, y=None):
        check_density_matrices(X, self.dims)
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = int(self.dims[0] * self.dims[1]) ** 2
        return self

    def decision_function(self, X):
        """Smallest eigenvalue of the partial transpose, shifted by ``tol``."""
        check_is_fitted(self, "classes_")
        X = check_density_matrices(X, self.dims)
        return pt_eigenvalues(X, self.dims, backend=self.backend)[:, 0] + self.tol

    def predict(self, X):
        return (self.decision_function(X) >= 0).astype(int)


class EntanglementFeatures(TransformerMixin, BaseEstimator):
    """Map states to ``[R, H_q for q in q_list..., min PT eigenvalue, t]``."""

    def __init__(self, dims=(2, 2), q_list=(1.0, 2.0), backend="lapack"):
        self.dims = dims
        self.q_list = q_list
        self.backend = backend

    def fit(self, X, y=None):
        check_density_matrices(X, self.dims)
        if any(q <= 0 for q in self.q_list):
            raise ValueError("Renyi orders must be positive")
        self.n_features_in_ = int(self.dims[0] * self.dims[1]) ** 2
        self.n_features_out_ = len(self.q_list) + 3
        return self

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "n_features_out_")
        return np.array(["R", *[f"H_{q:g}" for q in self.q_list], "min_pt_eig", "t"], dtype=object)

    def transform(self, X):
        check_is_fitted(self, "n_features_out_")
        X = check_density_matrices(X, self.dims)
        lam = np.clip(np.linalg.eigvalsh(X), 0.0, None)
        ev = pt_eigenvalues(X, self.dims, backend=self.backend)
        cols = [1.0 / np.sum(lam * lam, axis=1)]
        cols += [renyi_from_spectrum(lam, q) for q in self.q_list]
        cols += [ev[:, 0], negativity_from_pt_spectrum(ev)]
        return np.column_stack(cols)


class PPTVolumeEstimator(BaseEstimator):
    """Monte Carlo estimate of the PPT volume, sklearn style.

    ``fit`` takes no data; it draws ``n_samples`` random states and stores
    ``estimate_`` (a :class:`~ppt_volume.experiments.VolumeEstimate`),
    ``p_hat_`` and ``stderr_``.
    """

    def __init__(self, dims=(2, 2), n_samples=100_000, seed=0, workers=1):
        self.dims = dims
        self.n_samples = n_samples
        self.seed = seed
        self.workers = workers

    def fit(self, X=None, y=None):
        self.estimate_ = experiments.estimate_ppt_volume(self.dims, self.n_samples, self.seed, self.workers)
        self.p_hat_ = self.estimate_.p_hat
        self.stderr_ = self.estimate_.stderr
        return self

    def score(self, X=None, y=None):
        if not hasattr(self, "p_hat_"):
            raise NotFittedError("call fit before score")
        return self.p_hat_
