import math

import numpy as np
import pytest
from scipy import stats

from dos_density.errors import BracketError, InsufficientSamplesError, ToleranceNotMetError
from dos_density.validation import KsResult, argmax_1d, argmax_log_scale, ks_test, quadrature


def _uniform_cdf(x):
    return min(max(x, 0.0), 1.0)


def test_ks_accepts_matching_distribution(gen):
    result = ks_test(gen.random(5000), _uniform_cdf)
    assert isinstance(result, KsResult)
    assert result.n == 5000
    assert 0.0 <= result.d_statistic <= 1.0
    assert result.passed(0.001)


def test_ks_rejects_wrong_distribution(gen):
    result = ks_test(gen.random(5000) ** 2, _uniform_cdf)
    assert result.p_value < 1e-6
    assert not result.passed()


def test_ks_matches_scipy_statistic(gen):
    x = gen.standard_exponential(500)
    ours = ks_test(x, lambda v: 1 - math.exp(-v))
    ref = stats.kstest(x, 'expon')
    assert ours.d_statistic == pytest.approx(ref.statistic, rel=1e-12)


def test_ks_needs_ten_samples():
    with pytest.raises(InsufficientSamplesError):
        ks_test([0.1] * 9, _uniform_cdf)


def test_ks_all_samples_below_support():
    result = ks_test(np.full(20, -1.0), _uniform_cdf)
    assert result.d_statistic == 1.0
    assert result.p_value == pytest.approx(0.0, abs=1e-12)


def test_quadrature_examples():
    assert quadrature(lambda x: x * x, 0.0, 1.0, 1e-12) == pytest.approx(1 / 3, abs=1e-12)
    assert quadrature(lambda x: math.exp(-x), 0.0, math.inf, 1e-10) == pytest.approx(1.0, abs=1e-10)
    assert quadrature(math.sin, 0.0, math.pi, 1e-12) == pytest.approx(2.0, abs=1e-12)


def test_quadrature_semi_infinite_scale():
    total = quadrature(lambda x: math.exp(-x / 50.0) / 50.0, 0.0, math.inf, 1e-10, scale=50.0)
    assert total == pytest.approx(1.0, abs=1e-10)


def test_quadrature_rejects_empty_interval():
    with pytest.raises(ValueError):
        quadrature(lambda x: 1.0, 1.0, 1.0)


def test_quadrature_reports_unreachable_tolerance():
    with pytest.raises(ToleranceNotMetError) as e:
        quadrature(lambda x: math.sin(1.0 / x) if x > 0 else 0.0, 0.0, 1.0, 1e-14, limit=5)
    assert e.value.error_estimate > 1e-14
    assert math.isfinite(e.value.best_estimate)


def test_argmax_quadratic():
    assert argmax_1d(lambda x: -(x - 3) ** 2, 0, 10, 1e-9) == pytest.approx(3.0, abs=1e-8)


def test_argmax_accepts_reversed_bracket():
    assert argmax_1d(lambda x: -(x - 3) ** 2, 10, 0, 1e-9) == pytest.approx(3.0, abs=1e-8)


def test_argmax_on_boundary_raises():
    with pytest.raises(BracketError):
        argmax_1d(lambda x: x, 0.0, 1.0, 1e-9)


def test_argmax_invariant_under_reparameterization():
    f = lambda x: -(x - 0.7) ** 2
    direct = argmax_1d(f, 0.0, 2.0, 1e-10)
    through_log = math.exp(argmax_1d(lambda t: f(math.exp(t)), math.log(0.01), math.log(2.0), 1e-10))
    assert through_log == pytest.approx(direct, rel=1e-6)


def test_argmax_log_scale():
    # λ^5 e^{-2λ} peaks at 2.5
    f = lambda lam: 5 * math.log(lam) - 2 * lam
    assert argmax_log_scale(f, 1.0) == pytest.approx(2.5, rel=1e-6)
    with pytest.raises(ValueError):
        argmax_log_scale(f, 0.0)
