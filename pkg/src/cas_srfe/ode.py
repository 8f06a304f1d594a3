"""Embedded Dormand-Prince 4(5) integrator for the parametric ODE targets."""

from __future__ import annotations

import numpy as np


class IntegrationError(RuntimeError):
    """Step underflow or step-count cap exceeded; carries the parameter point."""


# Dormand-Prince coefficients. The fifth-order weights B5 propagate the
# solution; B4 gives the embedded fourth-order estimate for error control.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])

_MAX_STEPS = 1_000_000


def dopri45(rhs, y0, t_end, rel_tol=1e-6, abs_tol=1e-9, params=None):
    """Integrate y' = rhs(t, y, params) from t=0 to t_end; returns y(t_end).

    Rejected steps halve the step size; accepted steps grow it by the usual
    fifth-root error controller.
    """
    if rel_tol <= 0 or abs_tol <= 0:
        raise ValueError("tolerances must be positive")
    y = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    t = 0.0
    h = t_end / 100.0
    h_min = 1e-14 * max(t_end, 1.0)
    k = np.empty((7, y.shape[0]))
    for _ in range(_MAX_STEPS):
        if t >= t_end:
            return y
        h = min(h, t_end - t)
        if h < h_min:
            raise IntegrationError(f"step underflow at t={t:g} (params={params})")
        k[0] = rhs(t, y, params)
        for i in range(1, 7):
            yi = y + h * (np.asarray(_A[i]) @ k[:i])
            k[i] = rhs(t + _C[i] * h, yi, params)
        y5 = y + h * (_B5 @ k)
        err_vec = h * ((_B5 - _B4) @ k)
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y5))
        err = np.sqrt(np.mean((err_vec / scale) ** 2))
        if err <= 1.0:
            t += h
            y = y5
            factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            h *= factor
        else:
            h *= 0.5
    raise IntegrationError(f"step cap {_MAX_STEPS} exceeded (params={params})")
