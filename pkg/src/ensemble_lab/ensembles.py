"""Samplers for the beta-Laguerre and beta-Jacobi eigenvalue densities.

Laguerre spectra come from the chi-bidiagonal model ``B B^T``.  Jacobi
spectra come from the real/complex MANOVA matrix model when beta is 1 or
2, and from a random-walk Metropolis chain on the density itself for
general beta.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, solve_triangular
from scipy.special import expit, gammaln

from .errors import ParameterError
from .sampling import sample_chi, sample_gaussian, sample_uniform
from .tridiag import (
    Bidiagonal,
    Spectrum,
    eigenvalues,
    eigenvalues_batch,
    eigenvalues_dense,
    gram_tridiagonal,
)

__all__ = [
    "EnsembleParams",
    "McmcConfig",
    "ChainSpectrum",
    "laguerre_bidiagonal",
    "sample_laguerre",
    "sample_laguerre_batch",
    "log_jacobi_normalizer",
    "log_density_jacobi",
    "logit_log_target",
    "sample_jacobi_matrix",
    "sample_jacobi_mcmc",
    "run_jacobi_chains",
]

# Direct Gaussian matrices up to this many entries, Bartlett factors beyond.
DIRECT_ENTRY_LIMIT = 200_000


@dataclass(frozen=True)
class EnsembleParams:
    """Parameters ``(beta, n, a1, a2)`` of the two densities.

    ``a2`` is only needed by the Jacobi ensemble.  For the Laguerre
    ensemble ``a1`` plays the role of its single parameter ``a``.
    """

    beta: float
    n: int
    a1: float
    a2: float | None = None

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ParameterError(f"beta must be positive, got {self.beta}", key="beta")
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"n must be a positive integer, got {self.n}", key="n")
        object.__setattr__(self, "n", int(self.n))
        floor = 0.5 * self.beta * (self.n - 1)
        if not (self.a1 > floor and self.a1 > 0):
            raise ParameterError(
                f"a1 must exceed beta*(n-1)/2 = {floor}, got {self.a1}", key="a1"
            )
        if self.a2 is not None and not (self.a2 > floor and self.a2 > 0):
            raise ParameterError(
                f"a2 must exceed beta*(n-1)/2 = {floor}, got {self.a2}", key="a2"
            )

    @property
    def p(self):
        return 1.0 + 0.5 * self.beta * (self.n - 1)

    @property
    def gamma_hat(self):
        return self.n * self.beta / (2.0 * self.a1)

    @property
    def c(self):
        return 2.0 * self.gamma_hat / self.beta

    def require_jacobi(self):
        if self.a2 is None:
            raise ParameterError("Jacobi ensemble needs a2", key="a2")
        return self


@dataclass(frozen=True)
class McmcConfig:
    proposal_scale: float = 0.5
    burn_in: int = 4000
    thinning: int = 10
    target_accept: float = 0.3

    def __post_init__(self):
        if not self.proposal_scale > 0:
            raise ParameterError("proposal_scale must be positive", key="proposal_scale")
        if self.burn_in < 0:
            raise ParameterError("burn_in must be >= 0", key="burn_in")
        if self.thinning < 1:
            raise ParameterError("thinning must be >= 1", key="thinning")
        if not 0 < self.target_accept < 1:
            raise ParameterError("target_accept must lie in (0, 1)", key="target_accept")


class ChainSpectrum(Spectrum):
    """A Spectrum carrying the diagnostics of the chain that produced it."""

    __slots__ = ("diagnostics",)

    def __init__(self, values, diagnostics):
        super().__init__(values)
        self.diagnostics = dict(diagnostics)


# Laguerre


def laguerre_bidiagonal(params, stream):
    """Random lower-bidiagonal ``B`` whose ``B B^T`` has the Laguerre spectrum."""
    beta, n, a = params.beta, params.n, params.a1
    x = sample_chi(2.0 * a - beta * np.arange(n), stream)
    y = sample_chi(beta * np.arange(n - 1, 0, -1), stream) if n > 1 else np.empty(0)
    return Bidiagonal(np.atleast_1d(x), np.atleast_1d(y))


def sample_laguerre(params, stream):
    """One spectrum from the beta-Laguerre density with ``a = params.a1``."""
    return eigenvalues(gram_tridiagonal(laguerre_bidiagonal(params, stream)))


def _laguerre_tridiagonals(params, reps, stream):
    beta, n, a = params.beta, params.n, params.a1
    x = sample_chi(np.broadcast_to(2.0 * a - beta * np.arange(n), (reps, n)), stream)
    if n > 1:
        y = sample_chi(np.broadcast_to(beta * np.arange(n - 1, 0, -1.0), (reps, n - 1)), stream)
    else:
        y = np.empty((reps, 0))
    diag = x * x
    diag[:, 1:] += y * y
    return diag, x[:, :-1] * y


def sample_laguerre_batch(params, reps, stream, select=None):
    """``reps`` independent Laguerre spectra as an ascending ``(reps, m)`` array.

    ``select`` restricts to an inclusive range of ascending indices, which
    is much cheaper when only edge eigenvalues are needed.
    """
    diag, off = _laguerre_tridiagonals(params, reps, stream)
    return eigenvalues_batch(diag, off, select=select)


# Jacobi density


def log_jacobi_normalizer(params):
    """Log of the normalizing constant of the Jacobi density."""
    params.require_jacobi()
    beta, n, a1, a2 = params.beta, params.n, params.a1, params.a2
    j = np.arange(1, n + 1)
    shift = 0.5 * beta * (n - j)
    terms = (
        gammaln(1.0 + 0.5 * beta)
        + gammaln(a1 + a2 - shift)
        - gammaln(1.0 + 0.5 * beta * j)
        - gammaln(a1 - shift)
        - gammaln(a2 - shift)
    )
    return float(terms.sum())


def _log_density_from_logs(lam, log_lam, log_1m, params, log_norm):
    beta, n = params.beta, params.n
    p = params.p
    out = log_norm + (params.a1 - p) * log_lam.sum(-1) + (params.a2 - p) * log_1m.sum(-1)
    if n > 1:
        iu, ju = np.triu_indices(n, 1)
        gaps = np.abs(lam[..., iu] - lam[..., ju])
        with np.errstate(divide="ignore"):
            out = out + beta * np.log(gaps).sum(-1)
    return out


def log_density_jacobi(lam, params):
    """Log of the Jacobi eigenvalue density, or ``-inf`` off its support.

    ``lam`` may carry leading batch dimensions; the last axis has length n.
    Points with a coordinate outside (0, 1) or with repeated coordinates
    get ``-inf``.
    """
    params.require_jacobi()
    lam = np.asarray(lam, dtype=float)
    if lam.shape[-1] != params.n:
        raise ParameterError(f"expected {params.n} coordinates, got {lam.shape[-1]}")
    inside = np.all((lam > 0) & (lam < 1), axis=-1)
    safe = np.where(inside[..., None], lam, 0.5)
    out = _log_density_from_logs(
        safe, np.log(safe), np.log1p(-safe), params, log_jacobi_normalizer(params)
    )
    out = np.where(inside & np.isfinite(out), out, -np.inf)
    return float(out) if out.ndim == 0 else out


def logit_log_target(x, params, log_norm=None):
    """Jacobi log-density pulled back to logit coordinates ``x = log(l / (1 - l))``.

    Includes the change-of-variables term ``sum log(l_i (1 - l_i))``.
    """
    x = np.asarray(x, dtype=float)
    if log_norm is None:
        log_norm = log_jacobi_normalizer(params)
    log_lam = -np.logaddexp(0.0, -x)
    log_1m = -np.logaddexp(0.0, x)
    out = _log_density_from_logs(expit(x), log_lam, log_1m, params, log_norm)
    out = out + (log_lam + log_1m).sum(-1)
    out = np.where(np.isnan(out), -np.inf, out)
    return float(out) if out.ndim == 0 else out


def _initial_logits(params, chains, stream):
    # scaled Laguerre draws sit close to the Jacobi law when a2 is large
    lag = np.asarray(sample_laguerre_batch(params, chains, stream))
    lam = np.clip(lag / (2.0 * params.a2), 1e-12, 1.0 - 1e-6)
    lam = lam * (1.0 + 1e-6 * np.arange(params.n))
    lam = np.clip(lam, 1e-12, 1.0 - 1e-6)
    return np.log(lam) - np.log1p(-lam)


def run_jacobi_chains(params, cfg, chains, stream, keep=1):
    """Independent Metropolis chains targeting the Jacobi density.

    Each chain proposes a Gaussian step of its own scale in logit space.
    During burn-in the log-scale follows a Robbins-Monro recursion toward
    ``cfg.target_accept``; afterwards it is frozen.  ``keep`` states are
    recorded per chain, ``cfg.thinning`` steps apart.

    Returns
    -------
    states : ndarray, shape (chains, keep, n), each state sorted ascending
    diagnostics : dict
    """
    params.require_jacobi()
    n = params.n
    log_norm = log_jacobi_normalizer(params)
    x = _initial_logits(params, chains, stream)
    logp = logit_log_target(x, params, log_norm)
    log_scale = np.full(chains, math.log(cfg.proposal_scale / math.sqrt(n)))

    for t in range(cfg.burn_in):
        prop = x + np.exp(log_scale)[:, None] * sample_gaussian(stream, (chains, n))
        logq = logit_log_target(prop, params, log_norm)
        log_ratio = np.minimum(logq - logp, 0.0)
        accept = np.log(sample_uniform(stream, chains)) < log_ratio
        x = np.where(accept[:, None], prop, x)
        logp = np.where(accept, logq, logp)
        gain = 1.0 / (1.0 + t) ** 0.6
        log_scale += gain * (np.exp(log_ratio) - cfg.target_accept)

    steps = keep * cfg.thinning
    states = np.empty((chains, keep, n))
    trace = np.empty((steps, chains))
    accepted = np.zeros(chains)
    scale = np.exp(log_scale)[:, None]
    for s in range(steps):
        prop = x + scale * sample_gaussian(stream, (chains, n))
        logq = logit_log_target(prop, params, log_norm)
        accept = np.log(sample_uniform(stream, chains)) < logq - logp
        x = np.where(accept[:, None], prop, x)
        logp = np.where(accept, logq, logp)
        accepted += accept
        trace[s] = expit(x).sum(-1)
        if (s + 1) % cfg.thinning == 0:
            states[:, (s + 1) // cfg.thinning - 1] = np.sort(expit(x), axis=-1)

    diagnostics = {
        "acceptance_rate": float(accepted.sum() / (chains * steps)),
        "proposal_scale": float(np.median(np.exp(log_scale))),
        "ess_proxy": _ess_proxy(trace),
    }
    return states, diagnostics


def _ess_proxy(trace):
    # lag-one autocorrelation of the eigenvalue-sum trace, pooled over chains
    steps, chains = trace.shape
    if steps < 3:
        return float(steps * chains)
    centred = trace - trace.mean(0)
    var = float((centred**2).sum())
    if var == 0.0:
        return float(steps * chains)
    rho = float((centred[1:] * centred[:-1]).sum()) / var
    rho = min(max(rho, -0.99), 0.99)
    return float(steps * chains * (1.0 - rho) / (1.0 + rho))


def sample_jacobi_mcmc(params, cfg, stream):
    """One post-burn-in, thinned state of a Jacobi Metropolis chain."""
    states, diag = run_jacobi_chains(params, cfg, 1, stream, keep=1)
    return ChainSpectrum(states[0, 0], diag)


# Jacobi matrix model (beta in {1, 2})


def _integer_dof(a, beta, key):
    m = 2.0 * a / beta
    mi = int(round(m))
    if abs(m - mi) > 1e-9 * max(1.0, m):
        raise ParameterError(f"2*{key}/beta = {m} is not an integer", key=key)
    return mi


def _gaussian_block(shape, beta, stream):
    if beta == 1:
        return sample_gaussian(stream, shape)
    re = sample_gaussian(stream, shape)
    im = sample_gaussian(stream, shape)
    return (re + 1j * im) / math.sqrt(2.0)


def _wishart_factor(m, n, beta, stream):
    """``F`` (n x k) with ``F F^*`` distributed as ``Z^* Z`` for Gaussian ``Z`` (m x n)."""
    if m * n <= DIRECT_ENTRY_LIMIT:
        Z = _gaussian_block((m, n), beta, stream)
        return Z.conj().T
    # Bartlett: lower-triangular factor with chi diagonal
    T = np.tril(_gaussian_block((n, n), beta, stream), -1)
    diag = sample_chi(beta * (m - np.arange(n)), stream) / math.sqrt(beta)
    T[np.diag_indices(n)] = diag
    return T


def sample_jacobi_matrix(params, stream):
    """Jacobi spectrum from ``Y^*Y (Y^*Y + Z^*Z)^{-1}`` with Gaussian ``Y``, ``Z``.

    Needs beta in {1, 2} and integer ``m_i = 2 a_i / beta >= n``.  The
    generalized problem ``W1 v = l (W1 + W2) v`` is reduced with the
    Cholesky factor ``L`` of ``W1 + W2`` to the PSD matrix ``G G^*``,
    ``G = L^{-1} F1`` with ``W1 = F1 F1^*``.
    """
    params.require_jacobi()
    beta, n = params.beta, params.n
    if beta not in (1, 2):
        raise ParameterError("matrix model needs beta in {1, 2}", key="beta")
    m1 = _integer_dof(params.a1, beta, "a1")
    m2 = _integer_dof(params.a2, beta, "a2")
    if m1 < n or m2 < n:
        raise ParameterError("matrix model needs 2*a_i/beta >= n", key="a1" if m1 < n else "a2")
    F1 = _wishart_factor(m1, n, beta, stream)
    F2 = _wishart_factor(m2, n, beta, stream)
    W1 = F1 @ F1.conj().T
    W2 = F2 @ F2.conj().T
    L = cholesky(W1 + W2, lower=True)
    G = solve_triangular(L, F1, lower=True)
    C = G @ G.conj().T
    C = 0.5 * (C + C.conj().T)
    return eigenvalues_dense(C)
