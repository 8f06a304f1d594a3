"""Metropolis sampling from the adaptive target density.

A Gaussian random-walk proposal keeps the acceptance ratio at p(x')/p(x).
Burn-in discards the initial transient; thinning keeps every T-th state.
The proposal scale is tuned once per run in acceptance-rate batches and then
frozen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ChainError(RuntimeError):
    """The chain hit its step cap or the proposal scale collapsed."""


@dataclass(frozen=True)
class MHConfig:
    sigma1: float
    x0: np.ndarray
    burn_in: int = 5000
    thinning: int = 15
    max_steps_cap: int = 50_000_000
    # Zero entries freeze the corresponding coordinate (point-mass components).
    proposal_mask: np.ndarray | None = None

    def __post_init__(self):
        if self.sigma1 <= 0:
            raise ValueError("sigma1 must be positive")
        if self.thinning < 1:
            raise ValueError("thinning must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be nonnegative")
        object.__setattr__(self, "x0", np.atleast_1d(np.asarray(self.x0, dtype=float)))


@dataclass(frozen=True)
class MHResult:
    samples: np.ndarray  # (total, d)
    acceptance_rate: float  # accepted proposals / total proposals
    keep_rate: float  # kept samples / total proposals
    steps_taken: int
    trace: np.ndarray | None = None


_CHUNK = 4096


def _run_chain(density, x, p_x, sigma1, mask, n_keep, burn_in, thinning, rng, cap,
               record_trace=False):
    """Advance one chain until n_keep states are kept; returns chain state too."""
    d = x.shape[0]
    kept = np.empty((n_keep, d))
    trace = [] if record_trace else None
    t = 0
    accepted = 0
    k = 0
    while k < n_keep:
        noise = rng.standard_normal((_CHUNK, d)) * sigma1
        if mask is not None:
            noise *= mask
        us = rng.random(_CHUNK)
        for step in range(_CHUNK):
            t += 1
            if t > cap:
                raise ChainError(
                    f"chain exceeded {cap} steps with only {k}/{n_keep} kept samples "
                    f"(sigma1={sigma1:g})")
            xp = x + noise[step]
            pp = density(xp)
            if pp > 0 and us[step] * p_x <= pp:
                x = xp
                p_x = pp
                accepted += 1
            if record_trace:
                trace.append(x)
            if t > burn_in and (t - burn_in) % thinning == 0:
                kept[k] = x
                k += 1
                if k == n_keep:
                    break
    trace_arr = np.array(trace) if record_trace else None
    return kept, accepted, t, x, p_x, trace_arr


def mh_sample(target_density, config: MHConfig, total, rng, record_trace=False) -> MHResult:
    """Draw `total` kept samples from `target_density` (unnormalized is fine)."""
    if total < 1:
        raise ValueError("total must be >= 1")
    x0 = config.x0
    p0 = target_density(x0)
    if not p0 > 0:
        raise ValueError(f"target density must be positive at the initial point, got {p0}")
    kept, accepted, steps, _, _, trace = _run_chain(
        target_density, x0, p0, config.sigma1, config.proposal_mask,
        total, config.burn_in, config.thinning, rng, config.max_steps_cap,
        record_trace=record_trace)
    return MHResult(kept, accepted / steps, total / steps, steps, trace)


# Roberts-Rosenthal acceptance bands used by the tuner.
def acceptance_bounds(dim):
    return (0.35, 0.45) if dim == 1 else (0.20, 0.26)


@dataclass
class TuningRecord:
    batch: int
    sigma1: float
    acceptance_rate: float


def tune_sigma1(target_density, initial_sigma1, x0, burn_in, thinning, rng,
                bounds=None, batch_size=200, eta_base=0.05, eta_aggr=0.08,
                max_steps_cap=50_000_000, proposal_mask=None, history=None):
    """Tune the proposal scale in batches of kept samples, then freeze it.

    Runs ceil(burn_in / batch_size) batches; each draws `batch_size` kept
    samples (the chain continues across batches) and nudges sigma1 by the
    batch acceptance rate: +/-(eta_base + eta_aggr) outside the band,
    +/-0.5*eta_base toward the band center inside it.
    """
    if initial_sigma1 <= 0:
        raise ValueError("initial_sigma1 must be positive")
    x = np.atleast_1d(np.asarray(x0, dtype=float))
    p_x = target_density(x)
    if not p_x > 0:
        raise ValueError("target density must be positive at the initial point")
    alpha_min, alpha_max = bounds if bounds is not None else acceptance_bounds(x.shape[0])
    alpha_center = 0.5 * (alpha_min + alpha_max)
    n_batches = math.ceil(burn_in / batch_size)
    sigma1 = float(initial_sigma1)
    for batch in range(n_batches):
        _, accepted, steps, x, p_x, _ = _run_chain(
            target_density, x, p_x, sigma1, proposal_mask,
            batch_size, 0, thinning, rng, max_steps_cap)
        acc_rate = accepted / steps
        if acc_rate > alpha_max:
            sigma1 *= 1.0 + eta_base + eta_aggr
        elif acc_rate < alpha_min:
            sigma1 *= 1.0 - eta_base - eta_aggr
        elif acc_rate > alpha_center:
            sigma1 *= 1.0 + 0.5 * eta_base
        elif acc_rate < alpha_center:
            sigma1 *= 1.0 - 0.5 * eta_base
        if history is not None:
            history.append(TuningRecord(batch, sigma1, acc_rate))
        if sigma1 < 1e-12:
            raise ChainError(f"proposal scale underflowed during tuning (sigma1={sigma1:g})")
    return sigma1
