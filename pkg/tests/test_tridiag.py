import math

import mpmath

mpmath.mp.dps = 60

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from ensemble_lab import InputError
from ensemble_lab.tridiag import (
    Bidiagonal,
    Spectrum,
    SymTridiagonal,
    eigenvalues,
    eigenvalues_batch,
    eigenvalues_dense,
    eigenvalues_ql,
    gershgorin_interval,
    gram_tridiagonal,
    sturm_count,
)

entries = st.floats(-50, 50, allow_nan=False)


@st.composite
def tridiagonals(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    d = draw(hnp.arrays(float, n, elements=entries))
    e = draw(hnp.arrays(float, n - 1, elements=entries))
    return SymTridiagonal(d, e)


def bisect_by_sturm(T, k, lo, hi):
    # k-th smallest eigenvalue (0-based) by bisection on the sign changes of
    # the leading principal minors det(T_i - x), in 60-digit arithmetic
    d = [mpmath.mpf(v) for v in T.diag]
    e2 = [mpmath.mpf(v) ** 2 for v in T.offdiag]

    def below(x):
        x = mpmath.mpf(x) + mpmath.mpf(10) ** -40  # step off exact roots
        seq = [mpmath.mpf(1), d[0] - x]
        for i in range(1, T.n):
            seq.append((d[i] - x) * seq[-1] - e2[i - 1] * seq[-2])
        return sum(1 for a, b in zip(seq, seq[1:]) if (a < 0) != (b < 0))

    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if below(mid) > k:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def test_gram_examples():
    T = gram_tridiagonal(Bidiagonal([1.0], []))
    assert T.diag.tolist() == [1.0] and T.offdiag.size == 0
    T = gram_tridiagonal(Bidiagonal([1.0, 1.0], [1.0]))
    assert T.diag.tolist() == [1.0, 2.0] and T.offdiag.tolist() == [1.0]
    T = gram_tridiagonal(Bidiagonal([2.0, 3.0], [4.0]))
    assert T.diag.tolist() == [4.0, 25.0] and T.offdiag.tolist() == [8.0]


@given(hnp.arrays(float, 6, elements=st.floats(0, 10)), hnp.arrays(float, 5, elements=st.floats(0, 10)))
def test_gram_matches_dense_product(x, y):
    B = Bidiagonal(x, y)
    T = gram_tridiagonal(B)
    dense = B.to_dense() @ B.to_dense().T
    assert np.allclose(T.to_dense(), dense, atol=1e-12)
    assert eigenvalues(T).min >= -1e-10 * max(1.0, eigenvalues(T).max)


def test_eigenvalue_examples():
    assert eigenvalues(SymTridiagonal([5.0, 1.0, 9.0], [0.0, 0.0])).values.tolist() == pytest.approx([1, 5, 9], abs=1e-12)
    assert eigenvalues(SymTridiagonal([2.0, 2.0], [1.0])).values.tolist() == pytest.approx([1, 3], abs=1e-12)
    r2 = math.sqrt(2)
    assert eigenvalues(SymTridiagonal([0.0] * 3, [1.0, 1.0])).values.tolist() == pytest.approx([-r2, 0, r2], abs=1e-12)


def test_gershgorin_examples():
    assert gershgorin_interval(SymTridiagonal([2.0, 2.0], [1.0])) == (1.0, 3.0)
    assert gershgorin_interval(SymTridiagonal([5.0], [])) == (5.0, 5.0)
    assert gershgorin_interval(SymTridiagonal([0.0] * 3, [1.0, 1.0])) == (-2.0, 2.0)


@settings(max_examples=40)
@given(tridiagonals(max_n=8))
def test_matches_sturm_brute_force(T):
    lo, hi = gershgorin_interval(T)
    vals = eigenvalues(T).values
    radius = max(1.0, abs(lo), abs(hi))
    for k in range(T.n):
        ref = bisect_by_sturm(T, k, lo - 1, hi + 1)
        assert abs(vals[k] - ref) <= 1e-10 * radius


@given(tridiagonals(max_n=30))
def test_matches_ql_and_lapack(T):
    vals = eigenvalues(T).values
    radius = max(1.0, np.abs(vals).max())
    assert np.allclose(vals, eigenvalues_ql(T).values, atol=1e-10 * radius, rtol=0)
    assert np.allclose(vals, np.linalg.eigvalsh(T.to_dense()), atol=1e-10 * radius, rtol=0)


def test_gershgorin_containment_random():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        n = rng.integers(1, 40)
        scale = 10.0 ** rng.uniform(-3, 3)
        T = SymTridiagonal(scale * rng.standard_normal(n), scale * rng.standard_normal(n - 1))
        lo, hi = gershgorin_interval(T)
        v = eigenvalues(T).values
        assert lo <= v[0] and v[-1] <= hi


@given(tridiagonals(max_n=20))
def test_trace_preserved(T):
    vals = eigenvalues(T).values
    scale = max(1.0, np.abs(T.diag).sum() + 2 * np.abs(T.offdiag).sum())
    assert abs(vals.sum() - T.diag.sum()) <= 1e-8 * scale


@given(tridiagonals(max_n=15), st.floats(-60, 60))
def test_sturm_count_agrees_with_spectrum(T, x):
    vals = eigenvalues(T).values
    if np.min(np.abs(vals - x)) > 1e-6:
        assert sturm_count(T, x) == int(np.sum(vals < x))


def test_select_range_matches_full():
    rng = np.random.default_rng(1)
    T = SymTridiagonal(rng.standard_normal(50), rng.standard_normal(49))
    full = eigenvalues(T).values
    assert np.array_equal(eigenvalues(T, select=(45, 49)), full[45:])
    with pytest.raises(IndexError):
        eigenvalues(T, select=(3, 50))


def test_batch_matches_single():
    rng = np.random.default_rng(2)
    D, E = rng.standard_normal((5, 9)), rng.standard_normal((5, 8))
    batch = eigenvalues_batch(D, E)
    for r in range(5):
        assert np.array_equal(batch[r], eigenvalues(SymTridiagonal(D[r], E[r])).values)


def test_tiny_offdiagonal_splits():
    T = SymTridiagonal([1.0, 2.0, 3.0], [1e-20, 1e-20])
    assert eigenvalues(T).values.tolist() == pytest.approx([1, 2, 3], abs=1e-12)


def test_invalid_inputs():
    with pytest.raises(InputError):
        SymTridiagonal([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(InputError):
        SymTridiagonal([np.nan], [])
    with pytest.raises(InputError):
        Bidiagonal([1.0, -1.0], [1.0])


def test_spectrum_order_statistics():
    s = Spectrum([3.0, 1.0, 2.0])
    assert s.values.tolist() == [1, 2, 3]
    assert s.order(1) == 3 and s.order(3) == 1 and s.max == 3 and s.min == 1
    with pytest.raises(IndexError):
        s.order(4)
    with pytest.raises(ValueError):
        s.values[0] = 5


def test_dense_examples():
    assert eigenvalues_dense(np.eye(3)).values.tolist() == pytest.approx([1, 1, 1])
    assert eigenvalues_dense(np.array([[0.0, 1], [1, 0]])).values.tolist() == pytest.approx([-1, 1])
    M = np.array([[2.0, 1, 0], [1, 2, 1], [0, 1, 2]])
    r2 = math.sqrt(2)
    d = eigenvalues_dense(M).values
    assert d.tolist() == pytest.approx([2 - r2, 2, 2 + r2], abs=1e-12)
    assert np.allclose(d, eigenvalues(SymTridiagonal([2.0] * 3, [1.0, 1.0])).values, atol=1e-12)


@given(st.integers(1, 12), st.integers(0, 2**32 - 1), st.booleans())
def test_dense_matches_lapack(n, seed, complex_):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    if complex_:
        A = A + 1j * rng.standard_normal((n, n))
    M = A + A.conj().T
    ref = np.linalg.eigvalsh(M)
    got = eigenvalues_dense(M).values
    assert np.allclose(got, ref, atol=1e-9 * max(1.0, np.abs(ref).max()), rtol=0)


def test_dense_rejects_asymmetric_and_large():
    with pytest.raises(InputError):
        eigenvalues_dense(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(InputError):
        eigenvalues_dense(np.eye(257))
