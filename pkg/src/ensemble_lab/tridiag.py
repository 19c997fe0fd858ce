"""Symmetric tridiagonal matrices, their spectra, and Gershgorin bounds.

The production eigensolver is Sturm-sequence bisection (values only).
An implicit-shift QL path is kept as an independent cross-check, and a
cyclic Jacobi solver handles the small dense matrices of the Jacobi
matrix model.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InputError

__all__ = [
    "SymTridiagonal",
    "Bidiagonal",
    "Spectrum",
    "gram_tridiagonal",
    "eigenvalues",
    "eigenvalues_batch",
    "eigenvalues_ql",
    "eigenvalues_dense",
    "gershgorin_interval",
    "sturm_count",
    "SPLIT_TOL",
    "DENSE_MAX",
]

SPLIT_TOL = 1e-14
DENSE_MAX = 256
_SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class SymTridiagonal:
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.ascontiguousarray(self.diag, dtype=float).reshape(-1)
        e = np.ascontiguousarray(self.offdiag, dtype=float).reshape(-1)
        if d.size < 1:
            raise InputError("tridiagonal matrix needs at least one row")
        if e.size != d.size - 1:
            raise InputError(
                f"offdiag has length {e.size}, expected {d.size - 1}"
            )
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise InputError("tridiagonal entries must be finite")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self):
        return self.diag.size

    def to_dense(self):
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


@dataclass(frozen=True)
class Bidiagonal:
    """Lower bidiagonal matrix with ``diag`` on the diagonal, ``subdiag`` below."""

    diag: np.ndarray
    subdiag: np.ndarray

    def __post_init__(self):
        x = np.ascontiguousarray(self.diag, dtype=float).reshape(-1)
        y = np.ascontiguousarray(self.subdiag, dtype=float).reshape(-1)
        if y.size != x.size - 1:
            raise InputError(f"subdiag has length {y.size}, expected {x.size - 1}")
        if np.any(x < 0) or np.any(y < 0):
            raise InputError("bidiagonal entries must be non-negative")
        object.__setattr__(self, "diag", x)
        object.__setattr__(self, "subdiag", y)

    def to_dense(self):
        return np.diag(self.diag) + np.diag(self.subdiag, -1)


class Spectrum:
    """Eigenvalues sorted ascending, with descending order statistics.

    ``order(k)`` is the k-th largest value, so ``order(1)`` is the top of
    the spectrum and ``order(n)`` the bottom.
    """

    __slots__ = ("values",)

    def __init__(self, values):
        v = np.sort(np.asarray(values, dtype=float).reshape(-1))
        v.setflags(write=False)
        self.values = v

    def __len__(self):
        return self.values.size

    def __repr__(self):
        return f"Spectrum({self.values!r})"

    @property
    def n(self):
        return self.values.size

    def order(self, k):
        n = self.values.size
        if not 1 <= k <= n:
            raise IndexError(f"order statistic {k} outside 1..{n}")
        return float(self.values[n - k])

    @property
    def max(self):
        return float(self.values[-1])

    @property
    def min(self):
        return float(self.values[0])


def gram_tridiagonal(B):
    """The tridiagonal product ``B @ B.T`` of a lower bidiagonal ``B``."""
    x, y = B.diag, B.subdiag
    diag = x * x
    diag[1:] += y * y
    return SymTridiagonal(diag, x[:-1] * y)


def gershgorin_interval(T):
    """Real interval ``(lo, hi)`` covering every Gershgorin disk of ``T``."""
    lo, hi = _kernels.gershgorin(T.diag, T.offdiag)
    return float(lo), float(hi)


def sturm_count(T, x):
    """Number of eigenvalues of ``T`` strictly less than ``x``."""
    e2 = T.offdiag**2
    pivmin = np.finfo(float).tiny * max(1.0, float(e2.max(initial=0.0)))
    return int(_kernels.sturm_count(T.diag, e2, float(x), pivmin))


def _index_range(n, select):
    if select is None:
        return 0, n - 1
    lo, hi = select
    if not 0 <= lo <= hi < n:
        raise IndexError(f"eigenvalue index range {select} outside 0..{n - 1}")
    return int(lo), int(hi)


def eigenvalues(T, select=None):
    """Eigenvalues of a symmetric tridiagonal by Sturm bisection.

    Parameters
    ----------
    T : SymTridiagonal
    select : (int, int), optional
        Inclusive range of ascending eigenvalue indices to compute.  The
        whole spectrum when omitted.

    Returns
    -------
    Spectrum when ``select`` is None, otherwise an ascending ndarray.
    """
    lo, hi = _index_range(T.n, select)
    vals = _kernels.tridiag_eigvals(T.diag, T.offdiag, lo, hi, SPLIT_TOL)
    return Spectrum(vals) if select is None else vals


def eigenvalues_batch(diag, offdiag, select=None):
    """Row-wise bisection for stacked tridiagonals; returns an ascending 2-D array."""
    D = np.ascontiguousarray(diag, dtype=float)
    E = np.ascontiguousarray(offdiag, dtype=float)
    if D.ndim != 2 or E.shape != (D.shape[0], D.shape[1] - 1):
        raise InputError("batch shapes must be (b, n) and (b, n - 1)")
    lo, hi = _index_range(D.shape[1], select)
    return _kernels.tridiag_eigvals_batch(D, E, lo, hi, SPLIT_TOL)


def eigenvalues_ql(T):
    """Full spectrum by implicit-shift QL; an independent route to ``eigenvalues``."""
    return Spectrum(_kernels.ql_implicit(T.diag, T.offdiag, SPLIT_TOL))


def _hermitian_to_real(M):
    # [[A, -B], [B, A]] has the spectrum of A + iB, each value twice.
    A, B = M.real, M.imag
    return np.block([[A, -B], [B, A]])


def eigenvalues_dense(M, tol=1e-15, max_sweeps=60):
    """Spectrum of a small dense symmetric (or Hermitian) matrix by cyclic Jacobi.

    Complex Hermitian input is embedded in a real symmetric matrix of twice
    the size and the doubled eigenvalues are de-duplicated.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError("dense eigensolver needs a square matrix")
    n = M.shape[0]
    if n > DENSE_MAX:
        raise InputError(f"dense eigensolver is limited to n <= {DENSE_MAX}")
    scale = max(1.0, float(np.abs(M).max(initial=0.0)))
    if np.abs(M - M.conj().T).max(initial=0.0) > _SYMMETRY_TOL * scale:
        raise InputError("matrix is not symmetric within tolerance")
    if np.iscomplexobj(M):
        vals = _kernels.jacobi_eigvals(
            np.ascontiguousarray(_hermitian_to_real(M), dtype=float), tol, max_sweeps
        )
        return Spectrum(0.5 * (vals[0::2] + vals[1::2]))
    return Spectrum(_kernels.jacobi_eigvals(np.ascontiguousarray(M, dtype=float), tol, max_sweeps))
