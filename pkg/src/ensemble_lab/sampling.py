"""Reproducible random streams and the few variates the samplers need.

Streams are keyed by ``(seed, path)``.  The path is a tuple of
``(index, role)`` pairs, hashed into the 128-bit key of a Philox
counter-based generator, so sibling streams never share a counter
sequence and the draws depend on nothing but the key.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ParameterError

__all__ = [
    "RngStream",
    "ChiSpec",
    "sample_gamma",
    "sample_chi",
    "sample_chisquare",
    "sample_gaussian",
    "sample_uniform",
    "gamma_tail",
    "gamma_cdf",
]

_SEED_LIMIT = 2**64


def _philox_key(seed, path):
    h = hashlib.blake2b(digest_size=16, person=b"ensemble-lab")
    h.update(int(seed).to_bytes(8, "little"))
    for index, role in path:
        h.update(b"|")
        h.update(int(index).to_bytes(8, "little", signed=True))
        h.update(str(role).encode("utf-8"))
    return np.frombuffer(h.digest(), dtype=np.uint64).copy()


class RngStream:
    """A named, splittable random stream.

    Parameters
    ----------
    seed : int
        64-bit unsigned seed.
    path : sequence of (int, str)
        Substream address, e.g. ``((17, "laguerre"),)``.

    Two streams with the same ``(seed, path)`` produce the same draws;
    different paths give independent Philox keys.
    """

    __slots__ = ("seed", "path", "_gen")

    def __init__(self, seed, path=()):
        seed = int(seed)
        if not 0 <= seed < _SEED_LIMIT:
            raise ParameterError(f"seed must be in [0, 2**64), got {seed}", key="seed")
        self.seed = seed
        self.path = tuple((int(i), str(r)) for i, r in path)
        self._gen = None

    def __repr__(self):
        return f"RngStream(seed={self.seed}, path={self.path!r})"

    def __eq__(self, other):
        return (
            isinstance(other, RngStream)
            and self.seed == other.seed
            and self.path == other.path
        )

    def __hash__(self):
        return hash((self.seed, self.path))

    @property
    def generator(self):
        """The underlying numpy Generator, created on first use."""
        if self._gen is None:
            bitgen = np.random.Philox(key=_philox_key(self.seed, self.path))
            self._gen = np.random.Generator(bitgen)
        return self._gen

    def spawn(self, index, role):
        """Child stream at ``path + ((index, role),)``, positioned at its start."""
        return RngStream(self.seed, self.path + ((index, role),))

    def clone(self):
        """Independent copy that continues from the current position."""
        twin = RngStream(self.seed, self.path)
        if self._gen is not None:
            twin.generator.bit_generator.state = self._gen.bit_generator.state
        return twin

    def restart(self):
        """Fresh copy positioned at the start of the stream."""
        return RngStream(self.seed, self.path)


def sample_uniform(stream, size=None):
    """Uniform draws on the open-closed interval (0, 1]."""
    return 1.0 - stream.generator.random(size)


def sample_gaussian(stream, size=None):
    """Standard normal draws."""
    return stream.generator.standard_normal(size)


def sample_gamma(shape, stream, size=None, scale=1.0):
    """Gamma(shape, scale) draws by Marsaglia-Tsang squeeze rejection.

    Works for every ``shape > 0``: shapes below one are sampled at
    ``shape + 1`` and multiplied by ``U ** (1 / shape)``.
    """
    shape = np.asarray(shape, dtype=float)
    if np.any(~(shape > 0)):
        raise ParameterError("gamma shape must be positive", key="shape")
    if not scale > 0:
        raise ParameterError("gamma scale must be positive", key="scale")
    out_shape = np.shape(shape) if size is None else tuple(np.atleast_1d(size))
    alpha = np.broadcast_to(shape, out_shape).ravel()
    gen = stream.generator

    boost = alpha < 1.0
    a = np.where(boost, alpha + 1.0, alpha)
    d = a - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)

    result = np.empty(alpha.size)
    pending = np.arange(alpha.size)
    while pending.size:
        x = gen.standard_normal(pending.size)
        u = 1.0 - gen.random(pending.size)
        dp, cp = d[pending], c[pending]
        v = (1.0 + cp * x) ** 3
        positive = v > 0
        logv = np.log(np.where(positive, v, 1.0))
        accept = positive & (np.log(u) < 0.5 * x * x + dp - dp * v + dp * logv)
        result[pending[accept]] = dp[accept] * v[accept]
        pending = pending[~accept]

    if boost.any():
        u = 1.0 - gen.random(int(boost.sum()))
        result[boost] *= u ** (1.0 / alpha[boost])

    result *= scale
    if size is None and np.ndim(shape) == 0:
        return float(result[0])
    return result.reshape(out_shape)


@dataclass(frozen=True)
class ChiSpec:
    """Degrees of freedom of a chi law; need not be an integer."""

    dof: float

    def __post_init__(self):
        if not self.dof > 0:
            raise ParameterError(f"degrees of freedom must be positive, got {self.dof}", key="dof")


def sample_chisquare(dof, stream, size=None):
    """Chi-square draws with possibly non-integer degrees of freedom."""
    if isinstance(dof, ChiSpec):
        dof = dof.dof
    dof = np.asarray(dof, dtype=float)
    if np.any(~(dof > 0)):
        raise ParameterError("degrees of freedom must be positive", key="dof")
    return sample_gamma(dof / 2.0, stream, size=size, scale=2.0)


def sample_chi(dof, stream, size=None):
    """Draws of chi(s), the positive square root of a chi-square(s) variate.

    ``dof`` is a ChiSpec, a number, or an array of degrees of freedom.
    """
    return np.sqrt(sample_chisquare(dof, stream, size=size))


# Regularized incomplete gamma.  Series below the shape + 1 crossover,
# modified-Lentz continued fraction above it.

_EPS = 1e-16
_FPMIN = 1e-300
_MAX_ITER = 100_000


def _lower_series(a, x):
    total = np.ones_like(a)
    term = np.ones_like(a)
    ap = a.copy()
    active = np.ones(a.shape, dtype=bool)
    for _ in range(_MAX_ITER):
        if not active.any():
            break
        ap[active] += 1.0
        term[active] *= x[active] / ap[active]
        total[active] += term[active]
        active &= np.abs(term) > np.abs(total) * _EPS
    log_prefactor = -x + a * np.log(x) - gammaln(a + 1.0)
    return np.exp(log_prefactor) * total


def _upper_fraction(a, x):
    b = x + 1.0 - a
    c = np.full_like(a, 1.0 / _FPMIN)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(a.shape, dtype=bool)
    for i in range(1, _MAX_ITER):
        if not active.any():
            break
        idx = active
        an = -i * (i - a[idx])
        b[idx] += 2.0
        dd = an * d[idx] + b[idx]
        dd = np.where(np.abs(dd) < _FPMIN, _FPMIN, dd)
        cc = b[idx] + an / c[idx]
        cc = np.where(np.abs(cc) < _FPMIN, _FPMIN, cc)
        dd = 1.0 / dd
        delta = dd * cc
        d[idx] = dd
        c[idx] = cc
        h[idx] *= delta
        done = np.abs(delta - 1.0) <= _EPS
        active[np.flatnonzero(idx)[done]] = False
    log_prefactor = -x + a * np.log(x) - gammaln(a)
    return np.exp(log_prefactor) * h


def _regularized_upper(a, x):
    a, x = np.broadcast_arrays(np.asarray(a, float), np.asarray(x, float))
    a = a.astype(float).ravel()
    x = x.astype(float).ravel()
    q = np.ones_like(x)
    pos = x > 0
    series = pos & (x < a + 1.0)
    frac = pos & ~series
    if series.any():
        q[series] = 1.0 - _lower_series(a[series], x[series])
    if frac.any():
        q[frac] = _upper_fraction(a[frac], x[frac])
    return np.clip(q, 0.0, 1.0)


def gamma_tail(shape, scale, b):
    """P(X >= b) for X ~ Gamma(shape, scale).

    Vectorized over all arguments; returns a float for scalar input.
    """
    shape_arr = np.asarray(shape, dtype=float)
    scale_arr = np.asarray(scale, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    if np.any(~(shape_arr > 0)):
        raise ParameterError("gamma shape must be positive", key="shape")
    if np.any(~(scale_arr > 0)):
        raise ParameterError("gamma scale must be positive", key="scale")
    if np.any(~(b_arr >= 0)):
        raise ParameterError("tail threshold must be non-negative", key="b")
    out = np.broadcast(shape_arr, scale_arr, b_arr).shape
    q = _regularized_upper(shape_arr, b_arr / scale_arr).reshape(out)
    return float(q) if q.ndim == 0 else q


def gamma_cdf(shape, scale, x):
    """P(X <= x) for X ~ Gamma(shape, scale); zero for x <= 0."""
    x = np.asarray(x, dtype=float)
    p = 1.0 - np.asarray(gamma_tail(shape, scale, np.maximum(x, 0.0)))
    p = np.where(x > 0, p, 0.0)
    return float(p) if p.ndim == 0 else p
