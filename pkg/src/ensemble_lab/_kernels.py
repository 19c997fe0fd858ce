"""Compiled inner loops for the eigenvalue solvers."""
import numpy as np
from numba import njit

_EPS = np.finfo(np.float64).eps
_SAFMIN = np.finfo(np.float64).tiny
# bisection stops at this fraction of the spectral radius (contract: 1e-10)
_ABSTOL = 1e-13


@njit(cache=True, nogil=True)
def sturm_count(d, e2, x, pivmin):
    """Number of eigenvalues strictly below ``x`` (LDL^T inertia)."""
    n = d.shape[0]
    count = 0
    q = d[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        count += 1
    for i in range(1, n):
        q = d[i] - x - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


@njit(cache=True, nogil=True)
def bisect_range(d, e2, lo_idx, hi_idx, glo, ghi, pivmin, abstol):
    """Eigenvalues with ascending indices ``lo_idx..hi_idx`` by lockstep bisection.

    Every requested bracket is refined in the same sweep over the rows, so
    the inner loop runs across independent recurrences.
    """
    n = d.shape[0]
    m = hi_idx - lo_idx + 1
    lower = np.full(m, glo)
    upper = np.full(m, ghi)
    q = np.empty(m)
    count = np.empty(m, dtype=np.int64)
    mid = np.empty(m)
    for _ in range(256):
        for k in range(m):
            mid[k] = 0.5 * (lower[k] + upper[k])
            count[k] = 0
        for k in range(m):
            q[k] = d[0] - mid[k]
        for k in range(m):
            if abs(q[k]) < pivmin:
                q[k] = -pivmin
            if q[k] < 0.0:
                count[k] += 1
        for i in range(1, n):
            di = d[i]
            ei = e2[i - 1]
            for k in range(m):
                qk = di - mid[k] - ei / q[k]
                qk = qk if abs(qk) >= pivmin else -pivmin
                q[k] = qk
                count[k] += qk < 0.0
        converged = True
        for k in range(m):
            if count[k] > lo_idx + k:
                upper[k] = mid[k]
            else:
                lower[k] = mid[k]
            width = upper[k] - lower[k]
            tol = max(2.0 * _EPS * max(abs(lower[k]), abs(upper[k])) + pivmin, abstol)
            if width > tol:
                converged = False
        if converged:
            break
    out = np.empty(m)
    for k in range(m):
        out[k] = 0.5 * (lower[k] + upper[k])
    return out


@njit(cache=True, nogil=True)
def gershgorin(d, e):
    n = d.shape[0]
    lo = np.inf
    hi = -np.inf
    for i in range(n):
        r = 0.0
        if i > 0:
            r += abs(e[i - 1])
        if i < n - 1:
            r += abs(e[i])
        lo = min(lo, d[i] - r)
        hi = max(hi, d[i] + r)
    return lo, hi


@njit(cache=True, nogil=True)
def tridiag_eigvals(d, e, lo_idx, hi_idx, split_tol):
    n = d.shape[0]
    if n == 1:
        return d.copy()
    scale = 0.0
    for i in range(n):
        scale = max(scale, abs(d[i]))
    for i in range(n - 1):
        scale = max(scale, abs(e[i]))
    e2 = np.empty(n - 1)
    emax2 = 0.0
    for i in range(n - 1):
        ei = e[i]
        if abs(ei) <= split_tol * scale:
            ei = 0.0
        e2[i] = ei * ei
        emax2 = max(emax2, e2[i])
    pivmin = _SAFMIN * max(1.0, emax2)
    glo, ghi = gershgorin(d, e)
    radius = max(1.0, abs(glo), abs(ghi))
    pad = 2.0 * _EPS * radius + 2.0 * pivmin
    abstol = _ABSTOL * radius
    return bisect_range(d, e2, lo_idx, hi_idx, glo - pad, ghi + pad, pivmin, abstol)


@njit(cache=True, nogil=True)
def tridiag_eigvals_batch(D, E, lo_idx, hi_idx, split_tol):
    b = D.shape[0]
    out = np.empty((b, hi_idx - lo_idx + 1))
    for r in range(b):
        out[r] = tridiag_eigvals(D[r], E[r], lo_idx, hi_idx, split_tol)
    return out


@njit(cache=True, nogil=True)
def ql_implicit(d_in, e_in, split_tol):
    """Implicit-shift QL iteration (values only) on a symmetric tridiagonal."""
    n = d_in.shape[0]
    d = d_in.copy()
    e = np.zeros(n)
    scale = 0.0
    for i in range(n):
        scale = max(scale, abs(d[i]))
    for i in range(n - 1):
        scale = max(scale, abs(e_in[i]))
    if scale == 0.0:
        return np.sort(d)
    # work on the unit-scaled matrix so tiny inputs do not underflow
    for i in range(n):
        d[i] /= scale
    for i in range(n - 1):
        e[i] = e_in[i] / scale if abs(e_in[i]) > split_tol * scale else 0.0
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > 60:
                raise RuntimeError("QL iteration did not converge")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if underflow and i >= l:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return np.sort(d) * scale


@njit(cache=True, nogil=True)
def jacobi_eigvals(a_in, tol, max_sweeps):
    """Cyclic two-sided Jacobi rotations on a real symmetric matrix."""
    a = a_in.copy()
    n = a.shape[0]
    for sweep in range(max_sweeps):
        off = 0.0
        total = 0.0
        for i in range(n):
            total += a[i, i] * a[i, i]
            for j in range(i + 1, n):
                off += 2.0 * a[i, j] * a[i, j]
        total += off
        if off <= tol * tol * total:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
    out = np.empty(n)
    for i in range(n):
        out[i] = a[i, i]
    return np.sort(out)
