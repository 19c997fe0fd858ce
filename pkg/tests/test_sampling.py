import math
import threading

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from ensemble_lab import ChiSpec, ParameterError, RngStream
from ensemble_lab.limit_stats import EmpiricalMeasure, ks_distance
from ensemble_lab.sampling import (
    gamma_cdf,
    gamma_tail,
    sample_chi,
    sample_chisquare,
    sample_gamma,
    sample_gaussian,
)

from conftest import mc_mean


def test_same_key_same_draws():
    a = sample_gaussian(RngStream(7, [(3, "x")]), 50)
    b = sample_gaussian(RngStream(7, [(3, "x")]), 50)
    assert np.array_equal(a, b)


def test_sibling_paths_differ():
    root = RngStream(7)
    a = sample_gaussian(root.spawn(0, "x"), 1000)
    b = sample_gaussian(root.spawn(1, "x"), 1000)
    c = sample_gaussian(root.spawn(0, "y"), 1000)
    assert not np.array_equal(a, b) and not np.array_equal(a, c)
    # independent streams: sample correlation near zero
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.15


def test_draws_do_not_depend_on_thread():
    results = {}

    def work(k):
        results[k] = sample_gaussian(RngStream(11, [(k, "t")]), 100)

    threads = [threading.Thread(target=work, args=(k,)) for k in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for k in range(4):
        assert np.array_equal(results[k], sample_gaussian(RngStream(11, [(k, "t")]), 100))


def test_clone_continues_and_restart_rewinds():
    s = RngStream(5)
    first = sample_gaussian(s, 3)
    twin = s.clone()
    assert np.array_equal(sample_gaussian(s, 3), sample_gaussian(twin, 3))
    assert np.array_equal(sample_gaussian(s.restart(), 3), first)


@given(st.integers(min_value=0, max_value=2**64 - 1), st.integers(-5, 5), st.text(max_size=5))
def test_stream_is_pure_function_of_key(seed, idx, role):
    a = RngStream(seed).spawn(idx, role)
    b = RngStream(seed).spawn(idx, role)
    assert a == b and hash(a) == hash(b)
    assert sample_gaussian(a, 4).tolist() == sample_gaussian(b, 4).tolist()


def test_seed_out_of_range():
    with pytest.raises(ParameterError):
        RngStream(-1)
    with pytest.raises(ParameterError):
        RngStream(2**64)


def test_gaussian_moments():
    x = sample_gaussian(RngStream(1), 10**6)
    m, se = mc_mean(x)
    assert abs(m) < 3 * se
    v, se_v = mc_mean((x - x.mean()) ** 2)
    assert abs(v - 1) < 3 * se_v


def test_chi_square_mean_three():
    x = sample_chi(ChiSpec(3.0), RngStream(2), 10**6) ** 2
    m, se = mc_mean(x)
    assert abs(m - 3) < 3 * se


def test_chi_mean_two():
    # E chi(s) = sqrt(2) Gamma((s+1)/2) / Gamma(s/2), evaluated in high precision
    target = float(mpmath.sqrt(2) * mpmath.gamma(1.5) / mpmath.gamma(1))
    x = sample_chi(2.0, RngStream(3), 10**6)
    m, se = mc_mean(x)
    assert abs(target - math.sqrt(math.pi / 2)) < 1e-15
    assert abs(m - target) < 3 * se
    assert np.all(x >= 0)


@pytest.mark.parametrize("shape", [0.05, 0.3, 1.0, 2.5, 40.0])
def test_gamma_mean_variance(shape):
    x = sample_gamma(shape, RngStream(4), 200_000, scale=1.5)
    m, se = mc_mean(x)
    assert abs(m - 1.5 * shape) < 4 * se
    assert abs(x.var() / (2.25 * shape) - 1) < 0.05


def test_non_positive_dof_rejected():
    with pytest.raises(ParameterError):
        ChiSpec(0.0)
    with pytest.raises(ParameterError):
        sample_chisquare(-1.0, RngStream(0), 3)
    with pytest.raises(ParameterError):
        sample_gamma(0.0, RngStream(0))


@pytest.mark.parametrize("s", [1.0, 2.0, 7.5])
def test_chi_square_against_tail_cdf(s):
    draws = sample_chisquare(s, RngStream(9), 10**5)

    class Law:
        def cdf(self, x):
            return gamma_cdf(s / 2, 2.0, x)

    assert ks_distance(EmpiricalMeasure(draws), Law()) < 0.01


def test_gamma_tail_closed_forms():
    assert gamma_tail(1.0, 2.0, 2.0) == pytest.approx(math.exp(-1), abs=1e-12)
    assert gamma_tail(0.5, 2.0, 2.0) == pytest.approx(math.erfc(1.0), abs=1e-12)
    assert gamma_tail(3.7, 0.2, 0.0) == 1.0


@given(
    st.floats(0.01, 300.0),
    st.floats(0.1, 10.0),
    st.floats(0.0, 600.0),
)
def test_gamma_tail_matches_incomplete_gamma(shape, scale, b):
    ref = float(mpmath.gammainc(shape, b / scale, mpmath.inf, regularized=True))
    assert abs(gamma_tail(shape, scale, b) - ref) < 1e-10


def test_gamma_tail_vectorized_matches_scalar():
    shapes = np.array([0.5, 1.0, 5.0, 50.0])
    bs = np.array([0.1, 3.0, 5.0, 80.0])
    vec = gamma_tail(shapes, 1.0, bs)
    assert np.allclose(vec, [gamma_tail(a, 1.0, b) for a, b in zip(shapes, bs)], atol=0, rtol=0)
    assert np.allclose(vec, special.gammaincc(shapes, bs), atol=1e-12)


@pytest.mark.parametrize("b", [0.5, 2.0, 7.0, 30.0])
def test_gamma_tail_increases_with_shape(b):
    grid = np.arange(0.5, 10.01, 0.5)
    tails = gamma_tail(grid, 2.0, b)
    assert np.all(np.diff(tails) > 0)


def test_gamma_tail_rejects_bad_arguments():
    for args in [(0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, -0.5)]:
        with pytest.raises(ParameterError):
            gamma_tail(*args)
