"""Statistics for checking the limit theorems by simulation.

Empirical measures and two distances between them (Kolmogorov-Smirnov
and the sorted-coupling Wasserstein-1), linear eigenvalue statistics,
soft and hard edge rescalings, and a finite-difference stochastic Airy
operator as reference law for the soft edge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensembles import EnsembleParams, sample_laguerre_batch
from .errors import ParameterError
from .mp_law import moment
from .sampling import sample_gaussian
from .tridiag import Spectrum, SymTridiagonal, eigenvalues

__all__ = [
    "EmpiricalMeasure",
    "EdgeScalings",
    "AiryGrid",
    "scale_measure",
    "ks_distance",
    "ks_two_sample",
    "wasserstein1",
    "clt_stat",
    "edge_scalings",
    "soft_edge_statistic",
    "hard_edge_statistic",
    "hard_edge_oracle",
    "hard_edge_oracle_batch",
    "sample_airy_spectrum",
    "airy_operator",
]


class EmpiricalMeasure:
    """Equal-weight atoms, kept sorted."""

    __slots__ = ("atoms",)

    def __init__(self, atoms):
        a = np.sort(np.asarray(atoms, dtype=float).reshape(-1))
        if a.size == 0:
            raise ParameterError("empirical measure needs at least one atom", key="atoms")
        a.setflags(write=False)
        self.atoms = a

    def __len__(self):
        return self.atoms.size

    def __repr__(self):
        return f"EmpiricalMeasure({self.atoms!r})"

    def cdf(self, x):
        return np.searchsorted(self.atoms, x, side="right") / self.atoms.size


def scale_measure(spec, factor):
    if not factor > 0:
        raise ParameterError("scale factor must be positive", key="factor")
    values = spec.values if isinstance(spec, Spectrum) else np.asarray(spec, dtype=float)
    return EmpiricalMeasure(factor * values)


def ks_distance(emp, law):
    """Exact ``sup_x |F_emp(x) - F(x)|``.

    ``law`` is either a continuous law with a ``cdf`` method (one-sample
    sweep over the atoms) or another EmpiricalMeasure (step law).
    """
    if isinstance(law, EmpiricalMeasure):
        return ks_two_sample(emp, law)
    x = emp.atoms
    n = x.size
    uniq = np.unique(x)
    F = np.asarray(law.cdf(uniq), dtype=float)
    above = np.searchsorted(x, uniq, side="right") / n
    below = np.searchsorted(x, uniq, side="left") / n
    return float(max(np.max(np.abs(above - F)), np.max(np.abs(F - below))))


def ks_two_sample(a, b):
    """Two-sample KS statistic: sup over the pooled atoms of the CDF gap."""
    pooled = np.concatenate([a.atoms, b.atoms])
    return float(np.max(np.abs(a.cdf(pooled) - b.cdf(pooled))))


def wasserstein1(a, b):
    """W1 between equal-size empirical measures via the sorted coupling."""
    if len(a) != len(b):
        raise ParameterError(
            f"wasserstein1 needs equal atom counts, got {len(a)} and {len(b)}", key="atoms"
        )
    return float(np.mean(np.abs(a.atoms - b.atoms)))


def _values(spec):
    return spec.values if isinstance(spec, Spectrum) else np.asarray(spec, dtype=float)


def clt_stat(spec, params, i, scaling):
    """Centred linear statistic ``sum_j (s lambda_j)^i - n moment(gamma, i)``.

    ``s = gamma / (n beta)`` for Laguerre spectra and ``s = c a2 / n`` for
    Jacobi spectra, with ``gamma`` the finite-n ratio ``n beta / (2 a1)``.
    """
    if int(i) != i or i < 1:
        raise ParameterError(f"i must be a positive integer, got {i}", key="i")
    g = params.gamma_hat
    n = params.n
    if scaling == "laguerre":
        s = g / (n * params.beta)
    elif scaling == "jacobi":
        params.require_jacobi()
        s = params.c * params.a2 / n
    else:
        raise ParameterError(f"unknown scaling {scaling!r}", key="scaling")
    lam = _values(spec)
    return float(np.sum((s * lam) ** int(i)) - n * moment(g, int(i)))


@dataclass(frozen=True)
class EdgeScalings:
    m_n: float
    sigma_n: float


def edge_scalings(params):
    root = math.sqrt(params.n) + math.sqrt(2.0 * params.a1 / params.beta)
    sigma = (2.0 * params.n * params.a1 / params.beta) ** (1.0 / 6.0) / root ** (4.0 / 3.0)
    return EdgeScalings(root * root, sigma)


def soft_edge_statistic(spec, params, l):
    """``sigma_n ((2 a2 / beta) lambda^(l) - m_n)`` for the l-th largest eigenvalue."""
    params.require_jacobi()
    sc = edge_scalings(params)
    return sc.sigma_n * (2.0 * params.a2 / params.beta * spec.order(l) - sc.m_n)


def hard_edge_statistic(spec, params, k):
    """``(2/beta) n a2`` times the k-th smallest eigenvalue."""
    params.require_jacobi()
    n = spec.n
    if not 1 <= k <= n:
        raise ParameterError(f"k must lie in 1..{n}, got {k}", key="k")
    return 2.0 / params.beta * params.n * params.a2 * spec.order(n - k + 1)


def hard_edge_oracle(beta, c, k, n_large, stream):
    """``(n/beta)`` times the k smallest eigenvalues of one Laguerre draw with ``a = beta (n + c) / 2``.

    Returns them ascending.
    """
    if n_large < 100:
        raise ParameterError(f"n_large must be >= 100, got {n_large}", key="n_large")
    if not 1 <= k <= n_large:
        raise ParameterError(f"k must lie in 1..{n_large}", key="k")
    params = EnsembleParams(beta, n_large, 0.5 * beta * (n_large + c))
    low = sample_laguerre_batch(params, 1, stream, select=(0, k - 1))[0]
    return n_large / beta * low


def hard_edge_oracle_batch(beta, c, k, n_large, reps, stream):
    """``reps`` oracle draws at once, shape ``(reps, k)``."""
    if n_large < 100:
        raise ParameterError(f"n_large must be >= 100, got {n_large}", key="n_large")
    params = EnsembleParams(beta, n_large, 0.5 * beta * (n_large + c))
    return n_large / beta * sample_laguerre_batch(params, reps, stream, select=(0, k - 1))


@dataclass(frozen=True)
class AiryGrid:
    """Uniform grid of step ``step_h`` on ``[0, cutoff_L]``, Dirichlet at both ends."""

    step_h: float
    cutoff_L: float

    def __post_init__(self):
        if not (self.step_h > 0 and self.cutoff_L > 0):
            raise ParameterError("grid step and cutoff must be positive", key="step_h")
        if self.intervals < 10 or abs(self.cutoff_L / self.step_h - self.intervals) > 1e-9 * self.intervals:
            raise ParameterError(
                f"cutoff_L / step_h must be an integer >= 10, got {self.cutoff_L / self.step_h}",
                key="cutoff_L",
            )

    @property
    def intervals(self):
        return int(round(self.cutoff_L / self.step_h))

    @property
    def nodes(self):
        """Interior node positions ``x_j = j h``, ``j = 1..N-1``."""
        return self.step_h * np.arange(1, self.intervals)

    @classmethod
    def for_levels(cls, step_h, k):
        # default truncation L = 10 + 2k
        return cls(step_h, 10.0 + 2.0 * k)


def airy_operator(beta, grid, stream=None):
    """Discretized ``d^2/dx^2 - x - (2/sqrt(beta)) b'`` as a SymTridiagonal.

    With ``stream=None`` the noise term is dropped.
    """
    h = grid.step_h
    x = grid.nodes
    diag = -2.0 / h**2 - x
    if stream is not None:
        diag = diag - 2.0 / math.sqrt(beta) / math.sqrt(h) * sample_gaussian(stream, x.size)
    off = np.full(x.size - 1, 1.0 / h**2)
    return SymTridiagonal(diag, off)


def sample_airy_spectrum(beta, k, grid, stream, noise=True):
    """The ``k`` largest eigenvalues of the discretized operator, descending."""
    m = grid.intervals - 1
    if not 1 <= k <= m:
        raise ParameterError(f"k must lie in 1..{m}", key="k")
    if noise and not beta > 0:
        raise ParameterError("beta must be positive", key="beta")
    T = airy_operator(beta, grid, stream if noise else None)
    top = eigenvalues(T, select=(m - k, m - 1))
    return top[::-1].copy()
