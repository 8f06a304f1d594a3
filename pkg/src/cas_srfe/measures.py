"""Product probability measures on R^d with closed-form feature Gram entries.

Each measure is a product of independent per-coordinate laws. For the
complex-exponential features exp(i<x, w>), the Gram entry between two
frequencies only depends on delta = w_j - w_i and factorizes into the
per-coordinate characteristic functions evaluated at delta_k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Gaussian:
    """Normal law N(mean, sigma^2) on one coordinate."""

    mean: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    def density(self, x):
        z = (np.asarray(x, dtype=float) - self.mean) / self.sigma
        return np.exp(-0.5 * z * z) / (self.sigma * np.sqrt(2.0 * np.pi))

    def sample(self, count, rng):
        return rng.normal(self.mean, self.sigma, size=count)

    def char_factor(self, delta):
        return np.exp(1j * delta * self.mean - 0.5 * self.sigma**2 * delta**2)


@dataclass(frozen=True)
class ShiftedExponential:
    """Exponential law with rate `rate`, supported on [shift, inf)."""

    shift: float = 0.0
    rate: float = 1.0

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError(f"rate must be positive, got {self.rate}")

    def density(self, x):
        x = np.asarray(x, dtype=float)
        inside = x >= self.shift
        return np.where(inside, self.rate * np.exp(-self.rate * np.where(inside, x - self.shift, 0.0)), 0.0)

    def sample(self, count, rng):
        return self.shift + rng.exponential(1.0 / self.rate, size=count)

    def char_factor(self, delta):
        return np.exp(1j * delta * self.shift) * self.rate / (self.rate - 1j * delta)


@dataclass(frozen=True)
class PointMass:
    """Degenerate coordinate pinned at a constant value.

    Used for parameters that are held fixed while the measure formally keeps
    the full input dimension. The density factor is 1 by convention and the
    Gram factor is a pure phase.
    """

    value: float = 0.0

    def density(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def sample(self, count, rng):
        return np.full(count, self.value)

    def char_factor(self, delta):
        return np.exp(1j * delta * self.value)


@dataclass(frozen=True)
class Measure:
    """Product measure over R^d. Immutable and safe to share."""

    components: tuple

    def __post_init__(self):
        if len(self.components) < 1:
            raise ValueError("measure needs at least one component")
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def dim(self):
        return len(self.components)

    @classmethod
    def gaussian(cls, dim, sigma=1.0, mean=0.0):
        """Isotropic N(mean, sigma^2 I); sigma may be a scalar or a d-vector."""
        sigmas = np.broadcast_to(np.asarray(sigma, dtype=float), (dim,))
        means = np.broadcast_to(np.asarray(mean, dtype=float), (dim,))
        return cls(tuple(Gaussian(m, s) for m, s in zip(means, sigmas)))

    @classmethod
    def exponential(cls, dim, rate=1.0, shift=0.0):
        rates = np.broadcast_to(np.asarray(rate, dtype=float), (dim,))
        shifts = np.broadcast_to(np.asarray(shift, dtype=float), (dim,))
        return cls(tuple(ShiftedExponential(k, r) for k, r in zip(shifts, rates)))

    @classmethod
    def from_spec(cls, spec):
        """Build from a JSON-style list of per-coordinate dicts.

        Supported entries:
          {"type": "gaussian", "mean": 0, "sigma": 1}
          {"type": "exponential", "shift": 0.08, "rate": 1}
          {"type": "fixed", "value": 0.1}
        """
        comps = []
        for entry in spec:
            kind = entry.get("type")
            if kind == "gaussian":
                comps.append(Gaussian(entry.get("mean", 0.0), entry.get("sigma", 1.0)))
            elif kind == "exponential":
                comps.append(ShiftedExponential(entry.get("shift", 0.0), entry.get("rate", 1.0)))
            elif kind == "fixed":
                comps.append(PointMass(entry.get("value", 0.0)))
            else:
                raise ValueError(f"unknown measure component type: {kind!r}")
        return cls(tuple(comps))

    def to_spec(self):
        out = []
        for c in self.components:
            if isinstance(c, Gaussian):
                out.append({"type": "gaussian", "mean": c.mean, "sigma": c.sigma})
            elif isinstance(c, ShiftedExponential):
                out.append({"type": "exponential", "shift": c.shift, "rate": c.rate})
            else:
                out.append({"type": "fixed", "value": c.value})
        return out

    def density(self, x):
        """Joint density at x, shape (d,) or (k, d); returns scalar or (k,)."""
        x = np.asarray(x, dtype=float)
        squeeze = x.ndim == 1
        pts = np.atleast_2d(x)
        if pts.shape[1] != self.dim:
            raise ValueError(f"expected points of dimension {self.dim}, got {pts.shape[1]}")
        out = np.ones(pts.shape[0])
        for k, comp in enumerate(self.components):
            out *= comp.density(pts[:, k])
        return float(out[0]) if squeeze else out

    def sample(self, count, rng):
        """Draw `count` i.i.d. points, returned as a (count, d) array."""
        if count < 1:
            raise ValueError("count must be >= 1")
        cols = [comp.sample(count, rng) for comp in self.components]
        return np.column_stack(cols)

    def gram_entry(self, wi, wj):
        """Closed-form E[conj(phi(x; wi)) phi(x; wj)] = E[exp(i<x, wj - wi>)]."""
        wi = np.asarray(wi, dtype=float)
        wj = np.asarray(wj, dtype=float)
        if wi.shape != (self.dim,) or wj.shape != (self.dim,):
            raise ValueError(f"frequency vectors must have length {self.dim}")
        delta = wj - wi
        out = 1.0 + 0.0j
        for k, comp in enumerate(self.components):
            out *= comp.char_factor(delta[k])
        return complex(out)

    def gram_matrix(self, frequencies):
        """Gram matrix of exp(i<., w>) features for rows of `frequencies`."""
        W = np.asarray(frequencies, dtype=float)
        delta = W[None, :, :] - W[:, None, :]  # delta[i, j] = w_j - w_i
        G = np.ones(delta.shape[:2], dtype=complex)
        for k, comp in enumerate(self.components):
            G *= comp.char_factor(delta[:, :, k])
        return G

    def proposal_mask(self):
        """1.0 for free coordinates, 0.0 for point-mass coordinates."""
        return np.array([0.0 if isinstance(c, PointMass) else 1.0 for c in self.components])
