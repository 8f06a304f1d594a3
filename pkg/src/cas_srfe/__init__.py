"""Christoffel-guided adaptive sampling for sparse random feature expansions."""

from .cas import CasConfig, IterationRecord, boost_draw, geometric_stats, relative_error, run_cas, run_nas
from .christoffel import OrthonormalBasis, build_basis
from .features import (FeatureSet, FeatureSystem, build_reweighted_system, build_system,
                       eval_expansion, eval_feature, gaussian_frequency_measure,
                       generate_features)
from .measures import Gaussian, Measure, PointMass, ShiftedExponential
from .mh_sampler import ChainError, MHConfig, MHResult, mh_sample, tune_sigma1
from .ode import IntegrationError, dopri45
from .sparse_recovery import SparseSolution, htp, omp, solve_normalized
from .targets import OdeProblem, eval_synthetic, get_target, list_targets, qoi_duffing, qoi_harmonic, qoi_surface

__all__ = [
    "CasConfig", "IterationRecord", "boost_draw", "geometric_stats", "relative_error",
    "run_cas", "run_nas", "OrthonormalBasis", "build_basis", "FeatureSet",
    "FeatureSystem", "build_reweighted_system", "build_system", "eval_expansion",
    "eval_feature", "gaussian_frequency_measure", "generate_features", "Gaussian",
    "Measure", "PointMass", "ShiftedExponential", "ChainError", "MHConfig", "MHResult",
    "mh_sample", "tune_sigma1", "IntegrationError", "dopri45", "SparseSolution", "htp",
    "omp", "solve_normalized", "OdeProblem", "eval_synthetic", "get_target",
    "list_targets", "qoi_duffing", "qoi_harmonic", "qoi_surface",
]

__version__ = "0.1.0"
