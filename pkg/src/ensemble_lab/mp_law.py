"""Marchenko-Pastur law for ratio gamma in (0, 1], with optional rescaling.

With ``scale_c = c`` the law is that of ``X / c`` for ``X`` Marchenko-
Pastur, i.e. density ``c f(c x)``.  The CDF is computed by quadrature in
the angle ``theta`` of ``x = mid + radius sin(theta)``, which turns the
square-root edges (and the ``x^{-1/2}`` pole at gamma = 1) into a smooth
integrand.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import ParameterError

__all__ = ["MPLaw", "moment"]

_QUAD_ABS = 1e-13
_QUAD_REL = 1e-12


@dataclass(frozen=True)
class MPLaw:
    gamma: float
    scale_c: float = 1.0

    def __post_init__(self):
        if not 0 < self.gamma <= 1:
            raise ParameterError(f"gamma must lie in (0, 1], got {self.gamma}", key="gamma")
        if not self.scale_c > 0:
            raise ParameterError("scale_c must be positive", key="scale_c")

    @property
    def gamma_min(self):
        return (1.0 - math.sqrt(self.gamma)) ** 2

    @property
    def gamma_max(self):
        return (1.0 + math.sqrt(self.gamma)) ** 2

    @property
    def support(self):
        return self.gamma_min / self.scale_c, self.gamma_max / self.scale_c

    def _unscaled_density(self, x):
        g = self.gamma
        lo, hi = self.gamma_min, self.gamma_max
        x = np.asarray(x, dtype=float)
        inside = (x > lo) & (x < hi) & (x > 0)
        xs = np.where(inside, x, 1.0)
        val = np.sqrt(np.maximum((xs - lo) * (hi - xs), 0.0)) / (2.0 * math.pi * g * xs)
        return np.where(inside, val, 0.0)

    def density(self, x):
        """``scale_c * f(scale_c * x)``; zero off the support."""
        out = self.scale_c * self._unscaled_density(self.scale_c * np.asarray(x, dtype=float))
        return float(out) if out.ndim == 0 else out

    def _theta_integrand(self, theta):
        # f(x) dx with x = mid + r sin(theta)
        g = self.gamma
        lo, hi = self.gamma_min, self.gamma_max
        mid, r = 0.5 * (lo + hi), 0.5 * (hi - lo)
        s = math.sin(theta)
        if lo == 0.0:
            # cos^2 / (1 + sin) = 1 - sin removes the pole at theta = -pi/2
            return r * (1.0 - s) / (2.0 * math.pi * g)
        c = math.cos(theta)
        return r * r * c * c / (2.0 * math.pi * g * (mid + r * s))

    def _theta_integrand_vec(self, theta):
        g = self.gamma
        lo, hi = self.gamma_min, self.gamma_max
        mid, r = 0.5 * (lo + hi), 0.5 * (hi - lo)
        s = np.sin(theta)
        if lo == 0.0:
            return r * (1.0 - s) / (2.0 * math.pi * g)
        return r * r * np.cos(theta) ** 2 / (2.0 * math.pi * g * (mid + r * s))

    def _theta_of(self, x):
        lo, hi = self.gamma_min, self.gamma_max
        mid, r = 0.5 * (lo + hi), 0.5 * (hi - lo)
        return math.asin(min(1.0, max(-1.0, (x - mid) / r)))

    def _cdf_scalar(self, x):
        x = x * self.scale_c
        if x <= self.gamma_min:
            return 0.0
        if x >= self.gamma_max:
            return 1.0
        theta = self._theta_of(x)
        # tolerances sit near machine precision, so quad may report roundoff
        # on tiny pieces near an edge; the clamped value is still accurate
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            if theta <= 0.0:
                val, _ = quad(self._theta_integrand, -0.5 * math.pi, theta,
                              epsabs=_QUAD_ABS, epsrel=_QUAD_REL, limit=200)
                return min(1.0, max(0.0, val))
            # integrate the shorter upper piece for accuracy near the top edge
            val, _ = quad(self._theta_integrand, theta, 0.5 * math.pi,
                          epsabs=_QUAD_ABS, epsrel=_QUAD_REL, limit=200)
        return min(1.0, max(0.0, 1.0 - val))

    def cdf(self, x):
        """Distribution function by adaptive quadrature."""
        if np.ndim(x) == 0:
            return self._cdf_scalar(float(x))
        x = np.asarray(x, dtype=float)
        return np.array([self._cdf_scalar(v) for v in x.ravel()]).reshape(x.shape)

    def mass(self):
        """Total mass from full-support quadrature (should be 1)."""
        val, _ = quad(self._theta_integrand, -0.5 * math.pi, 0.5 * math.pi,
                      epsabs=_QUAD_ABS, epsrel=_QUAD_REL, limit=200)
        return val

    def mean(self):
        return moment(self.gamma, 1) / self.scale_c

    def sample(self, size, stream):
        """I.i.d. draws by rejection in the angle variable."""
        lo, hi = self.gamma_min, self.gamma_max
        mid, r = 0.5 * (lo + hi), 0.5 * (hi - lo)
        grid = np.linspace(-0.5 * math.pi, 0.5 * math.pi, 4097)
        bound = 1.05 * float(self._theta_integrand_vec(grid).max())
        gen = stream.generator
        out = np.empty(0)
        while out.size < size:
            want = 2 * (size - out.size) + 16
            theta = gen.uniform(-0.5 * math.pi, 0.5 * math.pi, want)
            u = gen.random(want) * bound
            keep = u < self._theta_integrand_vec(theta)
            out = np.concatenate([out, mid + r * np.sin(theta[keep])])
        return out[:size] / self.scale_c


def moment(gamma, i):
    """``i``-th moment of the unscaled Marchenko-Pastur law (Narayana polynomial)."""
    if int(i) != i or i < 1:
        raise ParameterError(f"moment order must be a positive integer, got {i}", key="i")
    i = int(i)
    return sum(comb(i, r) * comb(i - 1, r) * gamma**r / (r + 1) for r in range(i))
