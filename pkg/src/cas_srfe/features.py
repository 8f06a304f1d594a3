"""Random Fourier features and assembly of the (optionally reweighted) system.

Features are phi(x; w) = exp(i<x, w>) with frequencies drawn once per run.
The assembled matrix and right-hand side both carry the 1/sqrt(m) scaling so
that unweighted columns have unit Euclidean norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measures import Measure


@dataclass(frozen=True)
class FeatureSet:
    """Fixed dictionary of N frequency vectors (rows of `frequencies`)."""

    frequencies: np.ndarray  # (N, d)

    def __post_init__(self):
        W = np.asarray(self.frequencies, dtype=float)
        if W.ndim != 2 or W.shape[0] < 1:
            raise ValueError("frequencies must be a nonempty (N, d) array")
        object.__setattr__(self, "frequencies", W)

    @property
    def n_features(self):
        return self.frequencies.shape[0]

    @property
    def dim(self):
        return self.frequencies.shape[1]


@dataclass(frozen=True)
class FeatureSystem:
    matrix: np.ndarray  # (m, N) complex
    rhs: np.ndarray  # (m,) complex


def gaussian_frequency_measure(sigma_w, dim):
    """The frequency law N(0, diag(sigma_w^2)); sigma_w scalar or d-vector."""
    return Measure.gaussian(dim, sigma=sigma_w)


def generate_features(gamma: Measure, n_features, rng) -> FeatureSet:
    if n_features < 1:
        raise ValueError("n_features must be >= 1")
    return FeatureSet(gamma.sample(n_features, rng))


def eval_feature(w, x):
    """phi(x; w) = exp(i<x, w>)."""
    w = np.asarray(w, dtype=float)
    x = np.asarray(x, dtype=float)
    if w.shape != x.shape:
        raise ValueError("w and x must have the same shape")
    return np.exp(1j * float(np.dot(x, w)))


def feature_matrix(features: FeatureSet, points):
    """Unnormalized feature evaluations, shape (m, N)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != features.dim:
        raise ValueError(f"points must have dimension {features.dim}")
    return np.exp(1j * pts @ features.frequencies.T)


def build_system(features: FeatureSet, samples, values) -> FeatureSystem:
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    values = np.asarray(values)
    m = samples.shape[0]
    if values.shape != (m,):
        raise ValueError("values must be a vector matching the number of samples")
    scale = 1.0 / np.sqrt(m)
    return FeatureSystem(scale * feature_matrix(features, samples), scale * values.astype(complex))


def build_reweighted_system(features: FeatureSet, samples, values, weight_fn) -> FeatureSystem:
    """Row-reweighted system: row s scaled by sqrt(weight_fn(x_s))."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    weights = np.asarray([weight_fn(x) for x in samples], dtype=float)
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise ValueError("weight_fn must be finite and nonnegative at all sample points")
    base = build_system(features, samples, values)
    root = np.sqrt(weights)
    return FeatureSystem(root[:, None] * base.matrix, root * base.rhs)


def eval_expansion(features: FeatureSet, coeffs, x):
    """Real part of sum_j c_j phi(x; w_j); x may be (d,) or (k, d).

    Zero coefficients are skipped, so the cost scales with the support size.
    """
    coeffs = np.asarray(coeffs)
    if coeffs.shape != (features.n_features,):
        raise ValueError("coeffs must have length N")
    support = np.flatnonzero(coeffs)
    x = np.asarray(x, dtype=float)
    squeeze = x.ndim == 1
    pts = np.atleast_2d(x)
    if support.size == 0:
        out = np.zeros(pts.shape[0])
    else:
        phi = np.exp(1j * pts @ features.frequencies[support].T)
        out = (phi @ coeffs[support]).real
    return float(out[0]) if squeeze else out
