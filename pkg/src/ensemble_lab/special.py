"""Cancellation-free pieces of log-gamma arithmetic.

The coupling constants compare ``log Gamma(x + d)`` with ``d * log s`` for
``x`` and ``s`` near 1e9 while the interesting remainder is of order
1e-4.  Plain ``lgamma`` differences lose all of it, so the ratio is
rebuilt from Stirling's series with every large term cancelled
analytically.
"""
import math

import numpy as np

__all__ = ["log1p_minus", "log_gamma_ratio_scaled"]

# Stirling correction coefficients B_{2k} / (2k (2k - 1)).
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
)
_STIRLING_MIN = 20.0


def log1p_minus(t):
    """``log(1 + t) - t`` without cancellation for small ``|t|``.

    Accepts scalars or arrays, ``t > -1``.
    """
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < 0.05
    ts = np.where(small, t, 0.0)
    # -t^2/2 + t^3/3 - ... ; 20 terms reach 1e-28 relative at |t| = 0.05
    series = np.zeros_like(ts)
    power = ts * ts
    for k in range(2, 22):
        series += (-1) ** (k + 1) * power / k
        power = power * ts
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.log1p(np.where(small, 0.0, t)) - np.where(small, 0.0, t)
    out = np.where(small, series, direct)
    return float(out) if out.ndim == 0 else out


def _stirling_tail(z):
    inv = 1.0 / z
    inv2 = inv * inv
    acc = 0.0
    power = inv
    for coef in _STIRLING:
        acc += coef * power
        power *= inv2
    return acc


def log_gamma_ratio_scaled(x, d, s):
    """``log Gamma(x + d) - log Gamma(x) - d * log(s)`` for ``x, x + d > 0``.

    Accurate in the relative sense even when ``x`` and ``s`` are huge and
    the result is tiny.  Falls back to ``math.lgamma`` when ``x`` is small
    enough that no catastrophic cancellation occurs.
    """
    x = float(x)
    d = float(d)
    s = float(s)
    lo = min(x, x + d)
    if lo < _STIRLING_MIN:
        return math.lgamma(x + d) - math.lgamma(x) - d * math.log(s)
    t = d / x
    # (x + d - 1/2) log(x + d) - (x - 1/2) log x - d, regrouped:
    #   x (log1p(t) - t) + (d - 1/2) log1p(t) + d log(x)
    # then d log(x) - d log(s) = d log1p((x - s) / s).
    value = x * float(log1p_minus(t)) - 0.5 * math.log1p(t)
    value += d * (math.log1p(t) + math.log1p((x - s) / s))
    value += _stirling_tail(x + d) - _stirling_tail(x)
    return value
