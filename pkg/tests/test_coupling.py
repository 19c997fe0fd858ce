import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from ensemble_lab import (
    EnsembleParams,
    NumericalRangeError,
    ParameterError,
    RngStream,
    check_regime,
    estimate_tv,
    log_kn_asymptotic,
    log_kn_exact,
    log_ln,
)
from ensemble_lab.coupling import tv_rows

mpmath.mp.dps = 50


def kn_mpmath(p):
    total = -mpmath.mpf(p.n) * mpmath.mpf(p.a1) * mpmath.log(mpmath.mpf(p.a2))
    for i in range(p.n):
        x = mpmath.mpf(p.a2) - mpmath.mpf(p.beta) * i / 2
        total += mpmath.loggamma(x + mpmath.mpf(p.a1)) - mpmath.loggamma(x)
    return total


def test_log_kn_examples():
    assert log_kn_exact(EnsembleParams(1.0, 1, 1.0, 5.0)) == pytest.approx(0.0, abs=1e-14)
    assert log_kn_exact(EnsembleParams(1.0, 1, 2.0, 10.0)) == pytest.approx(math.log(1.1), abs=1e-14)
    assert log_kn_exact(EnsembleParams(2.0, 2, 2.0, 10.0)) == pytest.approx(math.log(0.99), abs=1e-14)


@settings(max_examples=40)
@given(
    st.sampled_from([1.0, 2.0, 4.0, 0.7]),
    st.integers(1, 40),
    st.floats(0.2, 3.0),
    st.floats(1.0, 6.0),
)
def test_log_kn_against_mpmath(beta, n, gamma, a2_exp):
    a1 = max(n * beta / (2 * gamma), beta * (n - 1) / 2 + 0.5)
    a2 = max(10**a2_exp, beta * (n - 1) / 2 + 0.5)
    p = EnsembleParams(beta, n, a1, a2)
    ref = float(kn_mpmath(p))
    assert abs(log_kn_exact(p) - ref) <= 1e-9 * max(abs(ref), 1e-6)


def test_log_kn_asymptotic_examples():
    assert log_kn_asymptotic(2.0, 10, 1.0, 1e4) == 0.0
    assert log_kn_asymptotic(2.0, 10, 0.5, 1e4) == pytest.approx(0.1)
    assert log_kn_asymptotic(1.0, 8, 0.25, 1e5) == pytest.approx(0.00768)


def test_stirling_gap_shrinks():
    gaps = []
    for n in (8, 16, 32, 64):
        a1 = math.ceil(n * 2 / (2 * 0.5))
        p = EnsembleParams(2.0, n, a1, float(n) ** 5)
        gaps.append(abs(log_kn_exact(p) - log_kn_asymptotic(2.0, n, 0.5, p.a2)))
    assert all(b <= a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.1


def test_log_ln_examples():
    p = EnsembleParams(1.0, 1, 1.0, 4.0)
    assert log_ln(np.zeros(1), p) == 0.0
    assert log_ln(np.array([8.5]), p) == -math.inf
    # e * 0.75^3
    assert log_ln(np.array([2.0]), p) == pytest.approx(1 + 3 * math.log(0.75), abs=1e-14)
    assert math.exp(log_ln(np.array([2.0]), p)) == pytest.approx(math.e * 0.75**3)


@given(st.lists(st.floats(0.0, 1e4), min_size=3, max_size=3), st.floats(1e3, 1e8))
def test_log_ln_against_direct_formula(mu, a2):
    p = EnsembleParams(2.0, 3, 5.0, a2)
    mu = np.array(mu)
    got = log_ln(mu, p)
    if mu.max() > 2 * a2:
        assert got == -math.inf
        return
    ref = sum(mpmath.mpf(m) / 2 + (a2 - p.p) * mpmath.log1p(-mpmath.mpf(m) / (2 * a2)) for m in mu)
    assert abs(got - float(ref)) <= 1e-12 * (1 + abs(float(ref)))


@given(st.lists(st.floats(0.0, 50.0), min_size=4, max_size=4))
def test_log_ln_continuity(mu):
    p = EnsembleParams(2.0, 4, 6.0, 1e3)
    mu = np.array(mu)
    assert abs(log_ln(mu + 1e-8, p) - log_ln(mu, p)) < 1e-6


def test_log_ln_batch_rows():
    p = EnsembleParams(2.0, 2, 4.0, 10.0)
    mu = np.array([[1.0, 2.0], [0.5, 30.0]])
    out = log_ln(mu, p)
    assert out[0] == pytest.approx(log_ln(mu[0], p)) and out[1] == -math.inf


def test_log_ln_rejects_negative():
    with pytest.raises(ParameterError):
        log_ln(np.array([-1.0]), EnsembleParams(1.0, 1, 1.0, 4.0))


def test_log_kn_needs_a2():
    with pytest.raises(ParameterError):
        log_kn_exact(EnsembleParams(2.0, 3, 5.0))


def test_unit_mean_small():
    p = EnsembleParams(2.0, 3, 4.0, 50.0)
    est = estimate_tv(p, 20_000, RngStream(1))
    assert abs(est.unit_mean_hat - 1) <= 3 * est.stderr_mean
    assert 0 <= est.tv_hat <= 2 + 3 * est.stderr_tv and est.reps == 20_000


def test_degenerate_tv_matches_quadrature():
    a2 = 1e6
    # Beta(1, a2) scaled by 2 a2 against Exp with mean 2
    fj = lambda m: 0.5 * math.exp((a2 - 1) * math.log1p(-m / (2 * a2)))
    fl = lambda m: 0.5 * math.exp(-m / 2)
    exact, _ = quad(lambda m: abs(fj(m) - fl(m)), 0, 200, limit=400, epsabs=1e-14)
    est = estimate_tv(EnsembleParams(2.0, 1, 1.0, a2), 100_000, RngStream(2))
    assert est.tv_hat < 0.01
    assert abs(est.tv_hat - exact) < 4 * est.stderr_tv + 1e-9


def test_indicator_hits_count_as_one():
    # tiny a2 puts mass beyond 2 a2; those draws contribute |0 - 1| = 1
    p = EnsembleParams(2.0, 2, 2.0, 1.5)
    rows = tv_rows(p, 2000, RngStream(3))
    hit = np.isneginf(rows.log_ln)
    assert hit.any()
    assert np.all(rows.abs_dev[hit] == 1.0) and np.all(rows.kl_product[hit] == 0.0)
    assert np.all(np.isfinite(rows.abs_dev))


def test_thread_count_does_not_change_estimate():
    p = EnsembleParams(2.0, 4, 4.0, 1e4)
    a = estimate_tv(p, 3500, RngStream(4), threads=1)
    b = estimate_tv(p, 3500, RngStream(4), threads=3)
    assert a == b


def test_estimate_tv_guards(monkeypatch):
    from ensemble_lab import coupling

    with pytest.raises(ParameterError):
        estimate_tv(EnsembleParams(2.0, 2, 2.0, 10.0), 50, RngStream(0))
    # a product beyond the exp range aborts instead of averaging infinities
    monkeypatch.setattr(coupling, "log_kn_exact", lambda params: 1e4)
    with pytest.raises(NumericalRangeError):
        coupling.estimate_tv(EnsembleParams(2.0, 3, 3.0, 5.0), 100, RngStream(0))


def test_regime_examples():
    seq = [EnsembleParams(2.0, k, k, float(k) ** 5) for k in (2, 4, 8)]
    reps = check_regime(seq, 1.0)
    ratio_n = [r.ratio_n for r in reps]
    assert ratio_n == pytest.approx([k**-1.5 for k in (2, 4, 8)])
    assert all(b < a for a, b in zip(ratio_n, ratio_n[1:]))
    const = check_regime([EnsembleParams(2.0, 3, 5.0, 100.0)] * 3, 0.5)
    assert len({(r.ratio_a1, r.ratio_n, r.gamma_hat) for r in const}) == 1
    assert check_regime([EnsembleParams(2.0, 7, 7.0, 100.0)], 1.0)[0].gamma_hat == 1.0
    assert all(r.ratio_a1 > 0 and r.ratio_n > 0 and r.gamma_hat > 0 for r in reps)
    with pytest.raises(ParameterError):
        check_regime([], 0.5)
