"""Orthonormal basis from the feature Gram matrix, and the induced sampling
density.

Given a support set of frequencies, the Gram matrix G of the features under
the underlying measure is assembled in closed form, eigendecomposed, and
truncated: eigenpairs with eigenvalue above `trunc_tol` define the basis

    psi_j(x) = lambda_j^{-1/2} sum_k (q_j)_k exp(i <x, w_k>).

The pointwise squared mass K(x) = sum_j |psi_j(x)|^2 drives both the sampling
density K(x) h(x) / r and the least-squares row weight r / K(x).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .features import FeatureSet
from .measures import Measure

logger = logging.getLogger(__name__)

# Guard against division by a vanishing K(x): points this small only arise
# from retained prior samples, never from fresh draws of the density itself.
WEIGHT_FLOOR = 1e-30
WEIGHT_CAP = 1e30


@dataclass(frozen=True)
class OrthonormalBasis:
    """Truncated eigenbasis of the support Gram matrix."""

    frequencies: np.ndarray  # (s, d) support frequencies
    eigvecs: np.ndarray  # (s, r), columns ordered by descending eigenvalue
    eigvals: np.ndarray  # (r,) retained eigenvalues, descending
    measure: Measure

    @property
    def r(self):
        """Effective subspace dimension after truncation."""
        return self.eigvals.shape[0]

    @property
    def dim(self):
        return self.frequencies.shape[1]

    def basis_values(self, x):
        """psi_j(x) for all j, shape (k, r) (or (r,) for a single point)."""
        x = np.asarray(x, dtype=float)
        squeeze = x.ndim == 1
        pts = np.atleast_2d(x)
        if pts.shape[1] != self.dim:
            raise ValueError(f"points must have dimension {self.dim}")
        phi = np.exp(1j * pts @ self.frequencies.T)
        psi = phi @ (self.eigvecs / np.sqrt(self.eigvals)[None, :])
        return psi[0] if squeeze else psi

    def christoffel(self, x):
        """K(x) = sum_j |psi_j(x)|^2."""
        psi = self.basis_values(np.atleast_2d(np.asarray(x, dtype=float)))
        k = np.sum(np.abs(psi) ** 2, axis=1)
        return float(k[0]) if np.asarray(x).ndim == 1 else k

    def cs_density(self, x):
        """Sampling density K(x) h(x) / r; integrates to one over the domain."""
        k = self.christoffel(x)
        return k * self.measure.density(x) / self.r

    def weight(self, x):
        """Least-squares row weight r / K(x), capped where K underflows."""
        k = np.atleast_1d(self.christoffel(x))
        tiny = k < WEIGHT_FLOOR
        if np.any(tiny):
            logger.warning("weight capped at %d point(s) with vanishing K", int(tiny.sum()))
        w = np.where(tiny, WEIGHT_CAP, self.r / np.where(tiny, 1.0, k))
        return float(w[0]) if np.asarray(x).ndim == 1 else w


def build_basis(measure: Measure, features: FeatureSet, support, trunc_tol=1e-10,
                relative=False) -> OrthonormalBasis:
    """Assemble and eigendecompose the support Gram matrix.

    Retains eigenpairs with eigenvalue > trunc_tol (or > trunc_tol * lambda_max
    when `relative` is set). At least one eigenpair always survives: the Gram
    matrix has unit diagonal, so its largest eigenvalue is >= 1.
    """
    support = np.asarray(support, dtype=int)
    if support.size == 0:
        raise ValueError("support must be nonempty")
    if trunc_tol <= 0:
        raise ValueError("trunc_tol must be positive")
    W = features.frequencies[support]
    G = measure.gram_matrix(W)
    vals, vecs = np.linalg.eigh(G)
    vals = np.clip(vals, 0.0, None)  # tiny negatives from roundoff
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    vecs = vecs[:, order]
    cutoff = trunc_tol * vals[0] if relative else trunc_tol
    keep = vals > cutoff
    keep[0] = True
    return OrthonormalBasis(W, vecs[:, keep], vals[keep], measure)
