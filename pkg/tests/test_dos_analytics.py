import math

import numpy as np
import pytest

from dos_density.channel import ChannelParams, invert_to_distance, received_power
from dos_density.dos_analytics import (FiniteBallModel, IntensityModel, cdf_kth_nearest,
                                       cdf_kth_nearest_finite, cdf_kth_power, log_pdf_joint_powers,
                                       log_pdf_kth_nearest, log_pdf_kth_power, pdf_joint_finite,
                                       pdf_joint_intensity, pdf_joint_powers, pdf_kth_nearest,
                                       pdf_kth_nearest_finite, pdf_kth_power, pdf_single_distance)
from dos_density.errors import DomainError, InvalidParameterError
from dos_density.stochastic_geometry import SpaceConfig
from dos_density.validation import quadrature


def test_models_validate():
    with pytest.raises(InvalidParameterError):
        FiniteBallModel(0, 1.0)
    with pytest.raises(InvalidParameterError):
        FiniteBallModel(3, 0.0)
    with pytest.raises(InvalidParameterError):
        IntensityModel(0.0)


# Single node in a ball

def test_pdf_single_distance_examples():
    assert pdf_single_distance(3.0, FiniteBallModel(1, 10.0, SpaceConfig(1))) == pytest.approx(0.1)
    assert pdf_single_distance(5.0, FiniteBallModel(1, 10.0, SpaceConfig(2))) == pytest.approx(0.1)


def test_pdf_single_distance_normalized():
    model = FiniteBallModel(1, 10.0, SpaceConfig(3))
    assert quadrature(lambda r: pdf_single_distance(r, model), 0.0, 10.0, 1e-10) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize('r', [0.0, -1.0, 10.5])
def test_pdf_single_distance_domain(r):
    with pytest.raises(DomainError):
        pdf_single_distance(r, FiniteBallModel(1, 10.0))


# k-th nearest neighbour, intensity model

def test_pdf_kth_nearest_example():
    # m = 1, λ = 0.5: λ c_1 = 1 and the k = 1 density is e^{-r}
    model = IntensityModel(0.5, SpaceConfig(1))
    assert pdf_kth_nearest(1.0, 1, model) == pytest.approx(math.exp(-1), rel=1e-14)


@pytest.mark.parametrize('k, lam, m', [(1, 0.5, 1), (3, 0.01, 2), (5, 0.001, 3), (2, 1 / math.pi, 2)])
def test_pdf_kth_nearest_normalized(k, lam, m):
    model = IntensityModel(lam, SpaceConfig(m))
    scale = (k / model.rate) ** (1.0 / m)
    total = quadrature(lambda r: pdf_kth_nearest(r, k, model) if r > 0 else 0.0, 0.0, math.inf, 1e-9, scale=scale)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_pdf_kth_nearest_survives_large_rank():
    model = IntensityModel(0.01, SpaceConfig(2))
    k = 10_000
    r_mode = math.sqrt(k / model.rate)
    assert 0 < pdf_kth_nearest(r_mode, k, model) < math.inf
    assert math.isfinite(log_pdf_kth_nearest(r_mode, k, model))


def test_pdf_kth_nearest_domain():
    model = IntensityModel(0.01)
    with pytest.raises(DomainError):
        pdf_kth_nearest(0.0, 1, model)
    with pytest.raises(DomainError):
        pdf_kth_nearest(1.0, 0, model)


def test_cdf_kth_nearest_examples():
    model = IntensityModel(0.5, SpaceConfig(1))
    assert cdf_kth_nearest(0.0, 3, model) == 0.0
    assert cdf_kth_nearest(1.0, 1, model) == pytest.approx(1 - math.exp(-1), rel=1e-13)
    with pytest.raises(DomainError):
        cdf_kth_nearest(1.0, 0, model)


def test_cdf_kth_nearest_limits_and_monotonicity():
    model = IntensityModel(0.01, SpaceConfig(2))
    r = np.linspace(0.0, 200.0, 400)
    values = [cdf_kth_nearest(x, 4, model) for x in r]
    assert np.all(np.diff(values) >= 0)
    assert values[0] == 0.0 and values[-1] == pytest.approx(1.0, abs=1e-12)


def test_cdf_derivative_matches_pdf():
    model = IntensityModel(0.01, SpaceConfig(2))
    r, h = 10.0, 1e-4
    slope = (cdf_kth_nearest(r + h, 3, model) - cdf_kth_nearest(r - h, 3, model)) / (2 * h)
    assert slope == pytest.approx(pdf_kth_nearest(r, 3, model), abs=1e-6)


# k-th nearest of N uniform nodes

def test_pdf_kth_finite_reduces_to_single():
    model = FiniteBallModel(1, 4.0, SpaceConfig(2))
    for r in (0.5, 1.0, 3.9):
        assert pdf_kth_nearest_finite(r, 1, model) == pytest.approx(pdf_single_distance(r, model), rel=1e-13)


def test_pdf_kth_finite_example():
    model = FiniteBallModel(5, 1.0, SpaceConfig(2))
    assert pdf_kth_nearest_finite(0.5, 5, model) == pytest.approx(5 / 256, rel=1e-13)


def test_pdf_kth_finite_normalized():
    model = FiniteBallModel(10, 1.0, SpaceConfig(2))
    assert quadrature(lambda r: pdf_kth_nearest_finite(r, 3, model), 0.0, 1.0, 1e-10) == pytest.approx(1.0, abs=1e-8)


def test_pdf_kth_finite_domain():
    model = FiniteBallModel(5, 1.0)
    with pytest.raises(DomainError):
        pdf_kth_nearest_finite(0.5, 6, model)
    with pytest.raises(DomainError):
        pdf_kth_nearest_finite(1.5, 2, model)


def test_cdf_kth_finite_derivative_matches_pdf():
    model = FiniteBallModel(10, 2.0, SpaceConfig(3))
    r, h = 1.1, 1e-5
    slope = (cdf_kth_nearest_finite(r + h, 3, model) - cdf_kth_nearest_finite(r - h, 3, model)) / (2 * h)
    assert slope == pytest.approx(pdf_kth_nearest_finite(r, 3, model), rel=1e-6)
    assert cdf_kth_nearest_finite(2.0, 3, model) == 1.0


def test_finite_ball_converges_to_intensity_model():
    lam, n = 0.01, 10_000
    space = SpaceConfig(2)
    radius = (n / (lam * space.c_m)) ** 0.5
    finite = FiniteBallModel(n, radius, space)
    intensity = IntensityModel(lam, space)
    for r in (2.0, 5.0, 10.0):
        assert pdf_kth_nearest_finite(r, 1, finite) == pytest.approx(pdf_kth_nearest(r, 1, intensity), rel=1e-2)


# Joint distance order statistics

def test_pdf_joint_finite_examples():
    assert pdf_joint_finite([4.0], 1, FiniteBallModel(1, 10.0, SpaceConfig(1))) == pytest.approx(0.1)
    assert pdf_joint_finite([0.3, 0.7], 2, FiniteBallModel(2, 1.0, SpaceConfig(1))) == pytest.approx(2.0)


@pytest.mark.parametrize('n, m, radius', [(1, 1, 3.0), (4, 2, 1.0), (10, 3, 5.0)])
def test_pdf_joint_finite_single_rank(n, m, radius):
    model = FiniteBallModel(n, radius, SpaceConfig(m))
    for r in (0.1 * radius, 0.5 * radius, 0.9 * radius):
        assert pdf_joint_finite([r], 1, model) == pytest.approx(pdf_kth_nearest_finite(r, 1, model), rel=1e-12)


def test_pdf_joint_finite_domain():
    model = FiniteBallModel(3, 1.0)
    with pytest.raises(DomainError):
        pdf_joint_finite([0.5, 0.2], 2, model)
    with pytest.raises(DomainError):
        pdf_joint_finite([0.5, 1.2], 2, model)
    with pytest.raises(DomainError):
        pdf_joint_finite([0.5], 2, model)


def test_pdf_joint_intensity_examples():
    line = IntensityModel(0.5, SpaceConfig(1))
    assert pdf_joint_intensity([1.0, 2.0], 2, line) == pytest.approx(math.exp(-2), rel=1e-13)

    plane = IntensityModel(0.01, SpaceConfig(2))
    for r in (1.0, 5.0, 20.0):
        assert pdf_joint_intensity([r], 1, plane) == pytest.approx(pdf_kth_nearest(r, 1, plane), rel=1e-12)

    with pytest.raises(DomainError):
        pdf_joint_intensity([2.0, 1.0], 2, plane)


def test_joint_intensity_marginalizes_to_kth_nearest_k2():
    model = IntensityModel(0.01, SpaceConfig(2))
    for r2 in np.linspace(2.0, 30.0, 10):
        target = pdf_kth_nearest(r2, 2, model)
        value = quadrature(lambda r1: pdf_joint_intensity([r1, r2], 2, model) if 0 < r1 < r2 else 0.0,
                           0.0, float(r2), 1e-9 * target)
        assert value == pytest.approx(target, rel=1e-6)


def test_joint_intensity_marginalizes_to_kth_nearest_k3():
    model = IntensityModel(0.05, SpaceConfig(2))
    for r3 in (2.0, 4.0, 7.0):
        target = pdf_kth_nearest(r3, 3, model)

        def inner(r2):
            if not 0 < r2 < r3:
                return 0.0
            return quadrature(lambda r1: pdf_joint_intensity([r1, r2, r3], 3, model) if 0 < r1 < r2 else 0.0,
                              0.0, r2, 1e-11 * target)

        assert quadrature(inner, 0.0, r3, 1e-9 * target) == pytest.approx(target, rel=1e-6)


# Received powers

def test_pdf_kth_power_jacobian(quartic_channel):
    model = IntensityModel(0.01, SpaceConfig(2))
    for p in (1e-2, 1e-4, 1e-6):
        r = float(invert_to_distance(p, quartic_channel))
        dp_dr = quartic_channel.gamma * quartic_channel.reference_power * r ** (-quartic_channel.gamma - 1)
        for k in (1, 2, 7):
            assert pdf_kth_power(p, k, model, quartic_channel) * dp_dr == pytest.approx(pdf_kth_nearest(r, k, model), rel=1e-8)


def test_pdf_kth_power_normalized(quartic_channel):
    model = IntensityModel(0.01, SpaceConfig(2))
    total = quadrature(lambda y: pdf_kth_power(math.exp(y), 2, model, quartic_channel) * math.exp(y), -30.0, 30.0, 1e-9)
    assert total == pytest.approx(1.0, abs=1e-5)


def test_cdf_kth_power_is_distance_complement(quartic_channel):
    model = IntensityModel(0.01, SpaceConfig(2))
    p = float(received_power(8.0, quartic_channel))
    assert cdf_kth_power(p, 2, model, quartic_channel) == pytest.approx(1 - cdf_kth_nearest(8.0, 2, model))
    assert cdf_kth_power(0.0, 2, model, quartic_channel) == 0.0


def test_cdf_kth_power_weak_tail_keeps_precision(quartic_channel):
    # rate 1 and r^2 = 50 at p = 4e-4, far below the resolution of 1 - P(k, x)
    model = IntensityModel(1 / math.pi, SpaceConfig(2))
    assert cdf_kth_power(4e-4, 1, model, quartic_channel) == pytest.approx(math.exp(-50.0), rel=1e-9)
    assert cdf_kth_power(4e-4, 3, model, quartic_channel) == pytest.approx(math.exp(-50.0) * 1301.0, rel=1e-9)


def test_pdf_kth_power_domain(quartic_channel):
    with pytest.raises(DomainError):
        pdf_kth_power(0.0, 1, IntensityModel(0.01), quartic_channel)


def test_pdf_joint_powers_reduces_to_single(quartic_channel):
    model = IntensityModel(0.01, SpaceConfig(2))
    for p in (1e-3, 1e-5):
        assert pdf_joint_powers([p], model, quartic_channel) == pytest.approx(pdf_kth_power(p, 1, model, quartic_channel), rel=1e-12)


def test_pdf_joint_powers_jacobian():
    channel = ChannelParams(transmit_power=2.0, constant=0.7, gamma=3.0)
    model = IntensityModel(0.02, SpaceConfig(3))
    r = np.array([1.0, 2.5, 3.0, 4.2])
    p = received_power(r, channel)
    jacobian = np.prod(r / (channel.gamma * p))
    expected = pdf_joint_intensity(r, 4, model) * jacobian
    assert pdf_joint_powers(p, model, channel) == pytest.approx(expected, rel=1e-8)


def test_pdf_joint_powers_normalized(quartic_channel):
    # λ c_2 = 1 keeps the mass around unit power; integrate in y = ln P
    model = IntensityModel(1.0 / math.pi, SpaceConfig(2))
    hi = 60.0

    def inner(y2):
        return quadrature(lambda y1: pdf_joint_powers([math.exp(y1), math.exp(y2)], model, quartic_channel) * math.exp(y1 + y2),
                          y2, hi, 1e-8)

    assert quadrature(inner, -10.0, hi, 1e-6) == pytest.approx(1.0, abs=1e-3)


def test_pdf_joint_powers_domain(quartic_channel):
    model = IntensityModel(0.01)
    with pytest.raises(DomainError):
        pdf_joint_powers([1e-4, 1e-3], model, quartic_channel)
    with pytest.raises(DomainError):
        pdf_joint_powers([1e-3, 1e-3], model, quartic_channel)


def test_log_and_linear_agree(quartic_channel):
    model = IntensityModel(0.01, SpaceConfig(2))
    p = np.array([1e-3, 4e-4, 1e-4])
    assert math.exp(log_pdf_joint_powers(p, model, quartic_channel)) == pytest.approx(pdf_joint_powers(p, model, quartic_channel), rel=1e-12)
    assert math.exp(log_pdf_kth_power(2e-4, 3, model, quartic_channel)) == pytest.approx(pdf_kth_power(2e-4, 3, model, quartic_channel), rel=1e-12)
    assert math.exp(log_pdf_kth_nearest(7.0, 3, model)) == pytest.approx(pdf_kth_nearest(7.0, 3, model), rel=1e-12)


def test_densities_are_non_negative(quartic_channel):
    model = IntensityModel(0.01, SpaceConfig(2))
    for r in np.logspace(-3, 3, 50):
        assert pdf_kth_nearest(r, 3, model) >= 0
        assert pdf_kth_power(float(received_power(r, quartic_channel)), 3, model, quartic_channel) >= 0
