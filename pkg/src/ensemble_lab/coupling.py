"""Coupling between the scaled Jacobi and the Laguerre eigenvalue laws.

For ``mu`` from the Laguerre ensemble with ``a = a1`` the density ratio of
``2 a2 lambda`` (Jacobi) to ``mu`` is ``K_n L_n(mu)``, so the variation
distance between the two laws is ``E|K_n L_n(mu) - 1|``.  Both factors
are handled in log space and their large terms are cancelled
analytically, because at the regimes of interest each one is far from 1
on its own while the product stays close to it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensembles import EnsembleParams, sample_laguerre_batch
from .errors import NumericalRangeError, ParameterError
from .parallel import map_blocks
from .special import log1p_minus, log_gamma_ratio_scaled

__all__ = [
    "TvEstimate",
    "TvRows",
    "RegimeReport",
    "log_kn_exact",
    "log_kn_asymptotic",
    "log_ln",
    "tv_rows",
    "estimate_tv",
    "check_regime",
    "JACKKNIFE_GROUPS",
]

JACKKNIFE_GROUPS = 100
# exp() overflows past this; a product this large means the estimate is useless
_LOG_PRODUCT_MAX = 700.0


@dataclass(frozen=True)
class TvEstimate:
    tv_hat: float
    unit_mean_hat: float
    stderr_tv: float
    stderr_mean: float
    reps: int


@dataclass(frozen=True)
class RegimeReport:
    ratio_a1: float
    ratio_n: float
    gamma_hat: float
    gamma_gap: float


def log_kn_exact(params):
    """``log K_n`` with ``K_n = a2^{-n a1} prod_i Gamma(a1 + a2 - beta i/2) / Gamma(a2 - beta i/2)``."""
    params.require_jacobi()
    beta, n, a1, a2 = params.beta, params.n, params.a1, params.a2
    total = 0.0
    for i in range(n):
        x = a2 - 0.5 * beta * i
        if x <= 0 or x + a1 <= 0:
            raise ParameterError(f"gamma argument {x} is not positive", key="a2")
        total += log_gamma_ratio_scaled(x, a1, a2)
    return total


def log_kn_asymptotic(beta, n, gamma, a2):
    """Leading term ``(1 - gamma) beta^2 n^3 / (8 a2 gamma^2)`` of ``log K_n``."""
    return (1.0 - gamma) * beta**2 * n**3 / (8.0 * a2 * gamma**2)


def _log_ln_rows(mu, a2, p):
    # (1/2) sum mu + (a2 - p) sum log(1 - u), u = mu / (2 a2), regrouped so the
    # O(a2 u) pieces cancel: a2 sum(log1p(-u) + u) - p sum log1p(-u)
    u = mu / (2.0 * a2)
    outside = np.any(u > 1.0, axis=-1)
    u = np.where(outside[..., None], 0.0, u)
    with np.errstate(divide="ignore"):
        l1 = np.log1p(-u)
    out = a2 * np.sum(log1p_minus(-u), axis=-1) - p * np.sum(l1, axis=-1)
    # u == 1 exactly: (a2 - p) log 0
    out = np.where(np.isnan(out), -np.inf, out)
    return np.where(outside, -np.inf, out)


def log_ln(mu, params):
    """``log L_n(mu)``; ``-inf`` when ``max mu > 2 a2`` (the indicator vanishes).

    ``mu`` may be a single spectrum or an array of spectra along the last axis.
    """
    params.require_jacobi()
    mu = np.asarray(mu, dtype=float)
    if mu.shape[-1] != params.n:
        raise ParameterError(f"expected {params.n} eigenvalues, got {mu.shape[-1]}", key="mu")
    if np.any(mu < 0):
        raise ParameterError("mu must be non-negative", key="mu")
    out = _log_ln_rows(mu, params.a2, params.p)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TvRows:
    """Per-replica terms of the variation estimator, in replica order."""

    log_kn: float
    log_ln: np.ndarray
    kl_product: np.ndarray
    abs_dev: np.ndarray


def _check_tv_params(params):
    params.require_jacobi()
    if not isinstance(params, EnsembleParams):
        raise ParameterError("params must be EnsembleParams", key="params")


def tv_rows(params, reps, stream, threads=1):
    """Draw ``reps`` Laguerre spectra and evaluate ``K_n L_n`` for each."""
    _check_tv_params(params)
    lkn = log_kn_exact(params)

    def block(size, sub, start):
        mu = sample_laguerre_batch(params, size, sub)
        return _log_ln_rows(np.maximum(mu, 0.0), params.a2, params.p)

    lln = np.concatenate(map_blocks(block, reps, stream, "tv", threads))
    hit = np.isneginf(lln)
    total = np.where(hit, 0.0, lkn + lln)
    if not np.all(np.isfinite(total)) or np.any(total > _LOG_PRODUCT_MAX):
        raise NumericalRangeError("K_n L_n left the floating-point range")
    # draws outside the indicator have K_n L_n = 0 exactly
    product = np.where(hit, 0.0, np.exp(total))
    abs_dev = np.where(hit, 1.0, np.abs(np.expm1(total)))
    return TvRows(lkn, lln, product, abs_dev)


def _grouped_jackknife(values, groups):
    """Mean and delete-one-group jackknife standard error."""
    n = values.size
    g = min(groups, n)
    idx = np.arange(n) * g // n
    sums = np.bincount(idx, weights=values, minlength=g)
    counts = np.bincount(idx, minlength=g)
    total = sums.sum()
    leave_out = (total - sums) / (n - counts)
    mean = total / n
    var = (g - 1) / g * np.sum((leave_out - leave_out.mean()) ** 2)
    return float(mean), float(math.sqrt(var))


def summarize_rows(rows, groups=JACKKNIFE_GROUPS):
    tv, se_tv = _grouped_jackknife(rows.abs_dev, groups)
    m, se_m = _grouped_jackknife(rows.kl_product, groups)
    return TvEstimate(tv, m, se_tv, se_m, int(rows.abs_dev.size))


def estimate_tv(params, reps, stream, threads=1):
    """Monte Carlo estimate of ``E|K_n L_n(mu) - 1|`` and ``E[K_n L_n(mu)]``.

    Standard errors come from a grouped jackknife over replicas.
    """
    if reps < 100:
        raise ParameterError(f"reps must be >= 100, got {reps}", key="reps")
    return summarize_rows(tv_rows(params, reps, stream, threads))


def check_regime(params_sequence, gamma_target):
    """Ratios ``a1/sqrt(a2)``, ``n/sqrt(a2)`` and ``gamma_hat`` along a sequence."""
    seq = list(params_sequence)
    if not seq:
        raise ParameterError("params_sequence is empty", key="params_sequence")
    out = []
    for p in seq:
        p.require_jacobi()
        root = math.sqrt(p.a2)
        out.append(
            RegimeReport(
                ratio_a1=p.a1 / root,
                ratio_n=p.n / root,
                gamma_hat=p.gamma_hat,
                gamma_gap=abs(p.gamma_hat - gamma_target),
            )
        )
    return out
