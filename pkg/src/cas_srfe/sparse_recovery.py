"""Greedy sparse solvers: OMP, HTP, and the column-normalization wrapper."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Singular values below this fraction of the largest are treated as zero in
# the restricted least-squares solves (minimum-norm fallback).
_LSTSQ_RCOND = 1e-12


@dataclass(frozen=True)
class SparseSolution:
    coeffs: np.ndarray  # (N,) complex
    support: np.ndarray  # sorted indices of the nonzero pattern
    residual_norm: float


def _restricted_lstsq(A, b, support):
    """Min ||b - A z||_2 over supp(z) in `support`, minimum-norm on rank loss."""
    c = np.zeros(A.shape[1], dtype=complex)
    z, *_ = np.linalg.lstsq(A[:, support], b, rcond=_LSTSQ_RCOND)
    c[support] = z
    return c


def _check_system(A, b, s):
    m, N = A.shape
    if b.shape != (m,):
        raise ValueError("b must match the row count of A")
    if not 1 <= s <= min(m, N):
        raise ValueError(f"sparsity s={s} must satisfy 1 <= s <= min(m, N) = {min(m, N)}")


def omp(A, b, s) -> SparseSolution:
    """Orthogonal Matching Pursuit: s greedy correlation-driven iterations.

    Ties in the correlation argmax break toward the lowest index.
    """
    A = np.asarray(A, dtype=complex)
    b = np.asarray(b, dtype=complex)
    _check_system(A, b, s)
    support = []
    c = np.zeros(A.shape[1], dtype=complex)
    for _ in range(s):
        corr = np.abs(A.conj().T @ (b - A @ c))
        j = int(np.argmax(corr))
        if j not in support:
            support.append(j)
        c = _restricted_lstsq(A, b, support)
    support = np.array(sorted(support))
    return SparseSolution(c, support, float(np.linalg.norm(b - A @ c)))


def _top_s(v, s):
    """Indices of the s largest |v| entries; ties favor lower indices."""
    order = np.argsort(-np.abs(v), kind="stable")
    return np.sort(order[:s])


def htp(A, b, s, max_iter=100, tol=1e-12) -> SparseSolution:
    """Hard Thresholding Pursuit with support-selection + restricted LS."""
    A = np.asarray(A, dtype=complex)
    b = np.asarray(b, dtype=complex)
    _check_system(A, b, s)
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    c = np.zeros(A.shape[1], dtype=complex)
    for _ in range(max_iter):
        support = _top_s(c + A.conj().T @ (b - A @ c), s)
        c_next = _restricted_lstsq(A, b, support)
        done = np.linalg.norm(c_next - c) < tol
        c = c_next
        if done:
            break
    support = np.sort(np.flatnonzero(c)) if np.any(c) else support
    return SparseSolution(c, support, float(np.linalg.norm(b - A @ c)))


def solve_normalized(A, b, s, solver="omp", htp_max_iter=100, htp_tol=1e-12) -> SparseSolution:
    """Run the chosen solver on the column-normalized matrix and rescale back.

    The returned residual is for the original system A c ~ b.
    """
    A = np.asarray(A, dtype=complex)
    b = np.asarray(b, dtype=complex)
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms == 0):
        raise ValueError("A has a zero column; column normalization is undefined")
    A_norm = A / norms[None, :]
    if solver == "omp":
        sol = omp(A_norm, b, s)
    elif solver == "htp":
        sol = htp(A_norm, b, s, max_iter=htp_max_iter, tol=htp_tol)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    coeffs = sol.coeffs / norms
    return SparseSolution(coeffs, sol.support, float(np.linalg.norm(b - A @ coeffs)))
