import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from ensemble_lab.special import log1p_minus, log_gamma_ratio_scaled

mpmath.mp.dps = 50


@given(st.floats(-0.9, 5.0))
def test_log1p_minus(t):
    ref = mpmath.log1p(t) - t
    got = log1p_minus(t)
    assert abs(got - float(ref)) <= 1e-15 * max(abs(float(ref)), 1e-300) + 1e-300 or abs(got - float(ref)) < 4e-17


def test_log1p_minus_array():
    t = np.array([-0.5, 1e-8, 0.03, 2.0])
    assert np.allclose(log1p_minus(t), [float(mpmath.log1p(v) - v) for v in t], rtol=1e-14, atol=0)


@given(
    st.floats(1.0, 1e10),
    st.floats(-30.0, 300.0),
    st.floats(0.5, 2.0),
)
def test_ratio_against_mpmath(x, d, rel_s):
    if x + d <= 0.5:
        return
    s = x * rel_s
    ref = mpmath.loggamma(mpmath.mpf(x) + d) - mpmath.loggamma(x) - d * mpmath.log(s)
    got = log_gamma_ratio_scaled(x, d, s)
    # absolute accuracy relative to the size of the cancelling terms
    bound = 1e-13 * (1.0 + abs(d) * abs(math.log(s)) / max(x, 1.0) + abs(float(ref)))
    assert abs(got - float(ref)) <= bound


@pytest.mark.parametrize("x,d", [(1e9, 2.0), (3.3e7, 128.0), (1e5, -3.0)])
def test_ratio_relative_accuracy_when_tiny(x, d):
    ref = mpmath.loggamma(mpmath.mpf(x) + d) - mpmath.loggamma(x) - d * mpmath.log(x)
    assert abs(log_gamma_ratio_scaled(x, d, x) / float(ref) - 1) < 1e-12
