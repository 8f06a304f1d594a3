"""Benchmark target functions and their associated measures.

Synthetic targets f1-f8 plus three parametric-ODE quantities of interest
(surface adsorption, Duffing oscillator, damped harmonic oscillator). Each
registered target carries its input dimension, underlying measure, frequency
scale, suggested dictionary size, and chain starting point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .measures import Gaussian, Measure, PointMass, ShiftedExponential
from .ode import IntegrationError, dopri45


# ---------------------------------------------------------------------------
# synthetic functions

def f1(x):
    return math.exp(x[0])


def f2(x):
    return math.sin(x[0]) + 7.0 * math.sin(x[1]) ** 2 + 0.1 * x[2] ** 4 * x[0]


def f3(x, cyclic=True):
    """Sum of exp(-x_j^2)/(1 + x_{j+1}^2)/10.

    The successor index wraps around by default; `cyclic=False` drops the
    last term instead.
    """
    d = len(x)
    last = d if cyclic else d - 1
    return 0.1 * sum(
        math.exp(-x[j] ** 2) / (1.0 + x[(j + 1) % d] ** 2) for j in range(last))


def f4(x):
    return sum(0.3 + math.sin(16.0 * xi / 15.0 - 0.7)
               + math.sin(16.0 * xi / 15.0 - 0.7) ** 2 for xi in x)


def f5(x):
    return sum(math.exp(-abs(xi)) for xi in x)


def f6(x):
    return float(np.sum(x)) ** 2


def f7(x):
    return math.sin(x[0])


def f8(x):
    return math.sin(x[0] + x[1])


def f8_literal(x):
    """The two-dimensional sine as printed, with both arguments x_2."""
    return math.sin(x[1] + x[1])


_SYNTHETIC = {"f1": f1, "f2": f2, "f3": f3, "f4": f4, "f5": f5, "f6": f6,
              "f7": f7, "f8": f8, "f8_literal": f8_literal}


def eval_synthetic(name, x):
    try:
        fn = _SYNTHETIC[name]
    except KeyError:
        raise ValueError(f"unknown synthetic target {name!r}") from None
    return fn(np.asarray(x, dtype=float))


# ---------------------------------------------------------------------------
# parametric ODE quantities of interest

@dataclass(frozen=True)
class OdeProblem:
    rhs: callable  # (t, state, params) -> state derivative
    y0: np.ndarray
    t_end: float
    qoi: callable = lambda y: float(y[0])

    def solve(self, params, rel_tol=1e-6, abs_tol=1e-9):
        return self.qoi(dopri45(self.rhs, self.y0, self.t_end,
                                rel_tol=rel_tol, abs_tol=abs_tol, params=params))


def _surface_rhs(t, y, params):
    alpha, gamma, kappa = params
    rho = y[0]
    return np.array([alpha * (1.0 - rho) - gamma * rho - kappa * (1.0 - rho) ** 2 * rho])


def qoi_surface(xi, kappa=10.0, rel_tol=1e-6, abs_tol=1e-9):
    """Surface coverage rho(t=4) with log-scaled adsorption/desorption rates."""
    alpha = 0.1 + math.exp(0.05 * xi[0])
    gamma = 0.001 + 0.01 * math.exp(0.05 * xi[1])
    problem = OdeProblem(_surface_rhs, np.array([0.9]), 4.0)
    return problem.solve((alpha, gamma, kappa), rel_tol=rel_tol, abs_tol=abs_tol)


def _duffing_rhs(t, y, params):
    eps, omega, chi = params
    rho, v = y
    return np.array([v, -2.0 * chi * v - omega * (rho - eps * rho ** 3)])


def qoi_duffing(xi, epsilon=None, rel_tol=1e-6, abs_tol=1e-9):
    """Duffing displacement rho(t=4) under free vibration from rho(0)=1."""
    eps = math.exp(-0.1 * xi[0] ** 2) if epsilon is None else epsilon
    omega = math.exp(-0.1 * xi[1] ** 2)
    chi = math.exp(-0.1 * xi[2] ** 2)
    problem = OdeProblem(_duffing_rhs, np.array([1.0, 0.0]), 4.0)
    return problem.solve((eps, omega, chi), rel_tol=rel_tol, abs_tol=abs_tol)


def _harmonic_rhs(t, y, params):
    gamma, k, g, omega = params
    u, v = y
    return np.array([v, g * math.cos(omega * t) - gamma * v - k * u])


def qoi_harmonic(xi, rel_tol=1e-6, abs_tol=1e-9):
    """Forced damped oscillator u(t=20); xi = (gamma, k, g, omega, u0, u1)."""
    gamma, k, g, omega, u0, u1 = (float(v) for v in xi)
    problem = OdeProblem(_harmonic_rhs, np.array([u0, u1]), 20.0)
    return problem.solve((gamma, k, g, omega), rel_tol=rel_tol, abs_tol=abs_tol)


# ---------------------------------------------------------------------------
# registry

@dataclass(frozen=True)
class TargetSpec:
    name: str
    dim: int
    fn: callable
    measure: Measure
    sigma_w: tuple  # per-coordinate frequency scale
    default_n_features: int
    x0: tuple  # chain starting point
    dim_flexible: bool = False

    def evaluate(self, x):
        return self.fn(np.asarray(x, dtype=float))


def _gauss_target(name, dim, fn, n_features, flexible=False):
    return TargetSpec(name, dim, fn, Measure.gaussian(dim), (1.0,) * dim,
                      n_features, (0.0,) * dim, dim_flexible=flexible)


_HARMONIC_MEASURE = Measure((
    PointMass(0.1),
    PointMass(0.04),
    ShiftedExponential(0.08, 1.0),
    ShiftedExponential(0.8, 1.0),
    ShiftedExponential(0.45, 1.0),
    Gaussian(0.0, math.sqrt(0.5)),
))

TARGETS = {
    "f1": _gauss_target("f1", 1, f1, 1000),
    "f2": _gauss_target("f2", 3, f2, 4000),
    "f3": _gauss_target("f3", 3, f3, 5000),
    "f4": _gauss_target("f4", 4, f4, 5000),
    "f5": _gauss_target("f5", 4, f5, 5000, flexible=True),
    "f6": _gauss_target("f6", 5, f6, 6000),
    "f7": TargetSpec("f7", 1, f7, Measure.exponential(1, rate=1.0), (1.0,),
                     1000, (1.0,)),
    "f8": TargetSpec("f8", 2, f8, Measure.exponential(2, rate=1e-3), (1e-3, 1e-3),
                     3000, (1.0, 1.0)),
    "surface": _gauss_target("surface", 2, qoi_surface, 2000),
    "duffing": _gauss_target("duffing", 3, qoi_duffing, 4000),
    "harmonic": TargetSpec("harmonic", 6, qoi_harmonic, _HARMONIC_MEASURE,
                           (1.0, 1.0, 1e-3, 1e-3, 1e-3, 1.0), 8000,
                           (0.1, 0.04, 1.0, 1.0, 1.0, 1.0)),
}


def get_target(name, dim=None) -> TargetSpec:
    try:
        spec = TARGETS[name]
    except KeyError:
        raise ValueError(f"unknown target {name!r}; see list_targets()") from None
    if dim is not None and dim != spec.dim:
        if not spec.dim_flexible:
            raise ValueError(f"target {name!r} has fixed dimension {spec.dim}")
        return TargetSpec(spec.name, dim, spec.fn, Measure.gaussian(dim),
                          (1.0,) * dim, spec.default_n_features, (0.0,) * dim,
                          dim_flexible=True)
    return spec


def list_targets():
    return sorted(TARGETS)
