"""The adaptive sampling loop, boosting, and the non-adaptive baseline.

One trial fixes a feature dictionary and a test set, then runs the adaptive
arm (sparse fit -> eigenbasis -> boosted chain draws, with nested samples)
and the baseline arm (nested i.i.d. draws, plain sparse fits) on them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .christoffel import OrthonormalBasis, build_basis
from .features import FeatureSet, build_reweighted_system, build_system, eval_expansion
from .measures import Measure
from .mh_sampler import MHConfig, mh_sample, tune_sigma1
from .sparse_recovery import solve_normalized


def default_sparsity(m):
    return m // 4


@dataclass(frozen=True)
class CasConfig:
    schedule: tuple  # strictly increasing sample counts m_1 < m_2 < ...
    solver: str = "htp"
    boosting_count: int = 5
    eig_tol: float = 1e-10
    sparsity_rule: callable = default_sparsity
    htp_max_iter: int = 100
    htp_tol: float = 1e-12
    sigma1_init: float = 5.0
    burn_in: int = 5000
    thinning: int = 15
    x0: tuple = (0.0,)
    reweight: bool = True
    n_test: int = 10000
    # Test hook: sample from the underlying measure with unit weights, keeping
    # the boosting machinery. Reduces the adaptive arm to baseline-with-boost.
    uniform_sampling: bool = False

    def __post_init__(self):
        sched = tuple(int(m) for m in self.schedule)
        if len(sched) == 0 or any(b <= a for a, b in zip(sched, sched[1:])) or sched[0] < 1:
            raise ValueError("schedule must be nonempty and strictly increasing")
        for m in sched:
            if not 0 < self.sparsity_rule(m) < m:
                raise ValueError(f"sparsity rule must give 0 < s < m at m={m}")
        if self.solver not in ("omp", "htp"):
            raise ValueError(f"unknown solver {self.solver!r}")
        object.__setattr__(self, "schedule", sched)


@dataclass
class IterationRecord:
    index: int
    sample_count: int
    support: np.ndarray
    effective_dim: int | None
    coeffs: np.ndarray
    relative_error: float
    best_stability: float | None = None
    candidate_stabilities: list = field(default_factory=list)
    mh_acceptance: float | None = None
    samples: np.ndarray | None = None  # points the fit was computed on


def relative_error(target, features: FeatureSet, coeffs, measure: Measure,
                   n_test=10000, rng=None, test_points=None, test_values=None):
    """Relative L2 error over i.i.d. test points from the underlying measure."""
    if test_points is None:
        if rng is None:
            raise ValueError("need either test_points or an rng to draw them")
        if n_test < 1:
            raise ValueError("n_test must be >= 1")
        test_points = measure.sample(n_test, rng)
    if test_values is None:
        test_values = np.array([target(x) for x in test_points])
    norm = np.sum(test_values ** 2)
    if norm == 0:
        raise ValueError("target vanishes on the whole test set")
    fhat = eval_expansion(features, coeffs, test_points)
    return float(np.sqrt(np.sum((test_values - fhat) ** 2) / norm))


def boost_draw(prior_samples, basis: OrthonormalBasis, weight_fn, density,
               mh_config: MHConfig, new_count, boosting_count, rng):
    """Draw `boosting_count` candidate extensions and keep the most stable one.

    Stability is the smallest singular value of the weighted design matrix of
    the basis over the full (prior + new) point set.
    """
    if boosting_count < 1:
        raise ValueError("boosting_count must be >= 1")
    prior_samples = np.atleast_2d(prior_samples)
    m_next = prior_samples.shape[0] + new_count
    best = None
    best_stability = -np.inf
    stabilities = []
    acceptance = []
    for _ in range(boosting_count):
        result = mh_sample(density, mh_config, new_count, rng)
        candidate = np.vstack([prior_samples, result.samples])
        weights = np.asarray([weight_fn(x) for x in candidate], dtype=float)
        design = np.sqrt(weights)[:, None] * basis.basis_values(candidate) / np.sqrt(m_next)
        stability = float(np.linalg.svd(design, compute_uv=False)[-1])
        stabilities.append(stability)
        acceptance.append(result.acceptance_rate)
        if stability > best_stability:
            best_stability = stability
            best = candidate
    return best, best_stability, stabilities, float(np.mean(acceptance))


def run_cas(target, measure: Measure, features: FeatureSet, config: CasConfig,
            rng, test_points=None, test_values=None):
    """Adaptive arm: returns one IterationRecord per schedule entry."""
    if test_points is None:
        test_points = measure.sample(config.n_test, rng)
    if test_values is None:
        test_values = np.array([target(x) for x in test_points])

    mask = measure.proposal_mask()
    mask = mask if np.any(mask == 0.0) else None
    x0 = np.asarray(config.x0, dtype=float)

    # Tune the proposal scale once, against the density induced by the first
    # floor(m_1/4) dictionary features, then freeze it.
    s_init = config.sparsity_rule(config.schedule[0])
    init_basis = build_basis(measure, features, np.arange(s_init), config.eig_tol)
    tuning_density = measure.density if config.uniform_sampling else init_basis.cs_density
    sigma1 = tune_sigma1(tuning_density, config.sigma1_init, x0, config.burn_in,
                         config.thinning, rng, proposal_mask=mask)

    samples = measure.sample(config.schedule[0], rng)
    records = []
    prev_basis = None
    for i, m in enumerate(config.schedule, start=1):
        points = samples[:m]
        values = np.array([target(x) for x in points])
        if config.reweight and prev_basis is not None and not config.uniform_sampling:
            system = build_reweighted_system(features, points, values, prev_basis.weight)
        else:
            system = build_system(features, points, values)
        sol = solve_normalized(system.matrix, system.rhs, config.sparsity_rule(m),
                               solver=config.solver, htp_max_iter=config.htp_max_iter,
                               htp_tol=config.htp_tol)
        basis = build_basis(measure, features, sol.support, config.eig_tol)
        err = relative_error(target, features, sol.coeffs, measure,
                             test_points=test_points, test_values=test_values)
        record = IterationRecord(i, m, sol.support, basis.r, sol.coeffs, err,
                                 samples=points)
        if i < len(config.schedule):
            if config.uniform_sampling:
                density, weight_fn = measure.density, lambda x: 1.0
            else:
                density, weight_fn = basis.cs_density, basis.weight
            mh_config = MHConfig(sigma1=sigma1, x0=x0, burn_in=config.burn_in,
                                 thinning=config.thinning, proposal_mask=mask)
            samples, record.best_stability, record.candidate_stabilities, record.mh_acceptance = \
                boost_draw(points, basis, weight_fn, density, mh_config,
                           config.schedule[i] - m, config.boosting_count, rng)
            prev_basis = basis
        records.append(record)
    return records


def run_nas(target, measure: Measure, features: FeatureSet, schedule, solver,
            rng, htp_max_iter=100, htp_tol=1e-12, sparsity_rule=default_sparsity,
            n_test=10000, test_points=None, test_values=None):
    """Baseline arm: nested i.i.d. draws, plain sparse fits, no reweighting."""
    schedule = tuple(int(m) for m in schedule)
    if test_points is None:
        test_points = measure.sample(n_test, rng)
    if test_values is None:
        test_values = np.array([target(x) for x in test_points])
    samples = measure.sample(schedule[-1], rng)
    records = []
    for i, m in enumerate(schedule, start=1):
        points = samples[:m]
        values = np.array([target(x) for x in points])
        system = build_system(features, points, values)
        sol = solve_normalized(system.matrix, system.rhs, sparsity_rule(m),
                               solver=solver, htp_max_iter=htp_max_iter, htp_tol=htp_tol)
        err = relative_error(target, features, sol.coeffs, measure,
                             test_points=test_points, test_values=test_values)
        records.append(IterationRecord(i, m, sol.support, None, sol.coeffs, err,
                                       samples=points))
    return records


def geometric_stats(errors, floor=1e-16):
    """Geometric mean and geometric std; zero errors are floored before log."""
    logs = np.log(np.maximum(np.asarray(errors, dtype=float), floor))
    return float(np.exp(np.mean(logs))), float(np.exp(np.std(logs)))
