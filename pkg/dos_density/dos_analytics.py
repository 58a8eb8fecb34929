"""
Analytic distance and power order-statistic distributions.

Every density has a log-space core (`log_pdf_*`) built on log-gamma so that
large ranks do not overflow; the linear functions exponentiate it. Outside
the support a density is 0 only through underflow; arguments that violate
the domain raise DomainError.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, gammainc, gammaincc, gammaln, xlog1py, xlogy

from dos_density.channel import ChannelParams, distance_measure
from dos_density.errors import DomainError, InvalidParameterError
from dos_density.stochastic_geometry import SpaceConfig
from dos_density.utilities import is_strictly_decreasing, is_strictly_increasing


@dataclass(frozen=True)
class FiniteBallModel:
    """
    N nodes uniform in the m-ball Ω of radius R centred on the observer.

    Attributes:
        n (int): Total node count N.
        radius (float): R in meters.
        space (SpaceConfig): Ambient space.
    """
    n: int
    radius: float
    space: SpaceConfig = SpaceConfig()

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameterError(f'Node count must be at least 1, got {self.n}')
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise InvalidParameterError(f'Radius must be positive and finite, got {self.radius!r}')

    def cdf_single(self, r):
        """F(r) = r^m / R^m for a single node."""
        return np.power(np.asarray(r, dtype=float) / self.radius, self.space.m)


@dataclass(frozen=True)
class IntensityModel:
    """Homogeneous PPP of density `lam` (nodes/m^m)."""
    lam: float
    space: SpaceConfig = SpaceConfig()

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise InvalidParameterError(f'Density must be positive and finite, got {self.lam!r}')

    @property
    def rate(self) -> float:
        """λ c_m, the expected node count per unit r^m."""
        return self.lam * self.space.c_m


def _check_rank(k, upper=None):
    if int(k) != k or k < 1:
        raise DomainError(f'Rank must be a positive integer, got {k!r}')
    if upper is not None and k > upper:
        raise DomainError(f'Rank {k} exceeds node count {upper}')


def _as_ordered(r, ascending=True) -> np.ndarray:
    values = np.asarray(r, dtype=float).ravel()
    if values.size == 0:
        raise DomainError('Empty ordered vector')
    if np.any(~(values > 0)) or not np.all(np.isfinite(values)):
        raise DomainError('Ordered values must be positive and finite')
    ordered = is_strictly_increasing(values) if ascending else is_strictly_decreasing(values)
    if not ordered:
        order = 'increasing' if ascending else 'decreasing'
        raise DomainError(f'Values must be strictly {order}')
    return values


# Single node in a finite ball

def log_pdf_single_distance(r: float, model: FiniteBallModel) -> float:
    if not 0 < r <= model.radius:
        raise DomainError(f'Distance {r!r} outside (0, {model.radius}]')
    m = model.space.m
    return math.log(m) + xlogy(m - 1, r) - m * math.log(model.radius)


def pdf_single_distance(r: float, model: FiniteBallModel) -> float:
    """PDF m r^{m-1} / R^m of one node's distance on (0, R]."""
    return math.exp(log_pdf_single_distance(r, model))


# k-th nearest neighbour under a PPP

def log_pdf_kth_nearest(r_k: float, k: int, model: IntensityModel) -> float:
    if not r_k > 0:
        raise DomainError(f'Distance must be positive, got {r_k!r}')
    _check_rank(k)
    m = model.space.m
    x = model.rate * r_k ** m
    return math.log(m) - math.log(r_k) - x + xlogy(k, x) - gammaln(k)


def pdf_kth_nearest(r_k: float, k: int, model: IntensityModel) -> float:
    """
    PDF of the distance to the k-th nearest neighbour,
    (m / r) e^{-λc_m r^m} (λc_m r^m)^k / Γ(k).

    Raises:
        DomainError: If r_k <= 0 or k < 1.
    """
    return math.exp(log_pdf_kth_nearest(r_k, k, model))


def cdf_kth_nearest(r: float, k: int, model: IntensityModel) -> float:
    """
    CDF of the k-th nearest-neighbour distance, the regularized lower
    incomplete gamma P(k, λ c_m r^m).
    """
    _check_rank(k)
    if r <= 0:
        return 0.0
    return float(gammainc(k, model.rate * r ** model.space.m))


# k-th nearest neighbour among N uniform nodes

def log_pdf_kth_nearest_finite(r_k: float, k: int, model: FiniteBallModel) -> float:
    _check_rank(k, model.n)
    base = log_pdf_single_distance(r_k, model)
    n = model.n
    f = float(model.cdf_single(r_k))
    log_coeff = gammaln(n + 1) - gammaln(k) - gammaln(n - k + 1)
    return log_coeff + xlogy(k - 1, f) + xlog1py(n - k, -f) + base


def pdf_kth_nearest_finite(r_k: float, k: int, model: FiniteBallModel) -> float:
    """
    PDF of the k-th smallest of N uniform-ball distances,
    N!/((k-1)!(N-k)!) F^{k-1} (1-F)^{N-k} m r^{m-1}/R^m.

    Raises:
        DomainError: If r_k is outside (0, R] or k is not in 1..N.
    """
    return math.exp(log_pdf_kth_nearest_finite(r_k, k, model))


def cdf_kth_nearest_finite(r: float, k: int, model: FiniteBallModel) -> float:
    """CDF of the k-th smallest of N uniform-ball distances, I_{F(r)}(k, N-k+1)."""
    _check_rank(k, model.n)
    if r <= 0:
        return 0.0
    if r >= model.radius:
        return 1.0
    return float(betainc(k, model.n - k + 1, float(model.cdf_single(r))))


# Joint distance order statistics

def log_pdf_joint_finite(r, k: int, model: FiniteBallModel) -> float:
    _check_rank(k, model.n)
    values = _as_ordered(r)
    if values.size != k:
        raise DomainError(f'Expected {k} distances, got {values.size}')
    if values[-1] > model.radius:
        raise DomainError(f'Distance {values[-1]!r} exceeds radius {model.radius}')

    m, n, radius = model.space.m, model.n, model.radius
    f_last = (values[-1] / radius) ** m
    log_falling = gammaln(n + 1) - gammaln(n - k + 1)
    log_singles = k * (math.log(m) - m * math.log(radius)) + (m - 1) * float(np.sum(np.log(values)))
    return log_falling + xlog1py(n - k, -f_last) + log_singles


def pdf_joint_finite(r, k: int, model: FiniteBallModel) -> float:
    """
    Joint PDF of the k nearest of N uniform-ball distances,
    N!/(N-k)! (1 - r_k^m/R^m)^{N-k} ∏ m r_i^{m-1}/R^m.

    Raises:
        DomainError: If r is not strictly increasing, has the wrong length, or r_k > R.
    """
    return math.exp(log_pdf_joint_finite(r, k, model))


def log_pdf_joint_intensity(r, k: int, model: IntensityModel) -> float:
    _check_rank(k)
    values = _as_ordered(r)
    if values.size != k:
        raise DomainError(f'Expected {k} distances, got {values.size}')

    m = model.space.m
    return (-model.rate * values[-1] ** m
            + k * math.log(m * model.rate)
            + (m - 1) * float(np.sum(np.log(values))))


def pdf_joint_intensity(r, k: int, model: IntensityModel) -> float:
    """
    Joint PDF of the k nearest-neighbour distances of a PPP,
    e^{-λc_m r_k^m} (mλc_m)^k ∏ r_i^{m-1}.
    """
    return math.exp(log_pdf_joint_intensity(r, k, model))


# Received powers

def log_pdf_kth_power(p: float, k: int, model: IntensityModel, channel: ChannelParams) -> float:
    if not p > 0:
        raise DomainError(f'Power must be positive, got {p!r}')
    _check_rank(k)
    m, gamma = model.space.m, channel.gamma
    x = model.rate * float(distance_measure(p, channel, model.space))
    # (λc_m)^k (C P_t / P)^{km/γ} is x^k
    return math.log(m) + xlogy(k, x) - x - math.log(gamma) - math.log(p) - gammaln(k)


def pdf_kth_power(p: float, k: int, model: IntensityModel, channel: ChannelParams) -> float:
    """
    PDF of the k-th strongest received power,
    m (λc_m)^k (C P_t/P)^{km/γ} e^{-λc_m (C P_t/P)^{m/γ}} / (γ P Γ(k)).

    Raises:
        DomainError: If p <= 0 or k < 1.
    """
    return math.exp(log_pdf_kth_power(p, k, model, channel))


def cdf_kth_power(p: float, k: int, model: IntensityModel, channel: ChannelParams) -> float:
    """
    CDF of the k-th strongest received power.

    A power at or below p means the k-th neighbour sits at or beyond the
    distance where p is received, the regularized upper incomplete gamma
    Q(k, λ c_m r^m).
    """
    _check_rank(k)
    if p <= 0:
        return 0.0
    return float(gammaincc(k, model.rate * float(distance_measure(p, channel, model.space))))


def log_pdf_joint_powers(p, model: IntensityModel, channel: ChannelParams) -> float:
    """
    Log joint PDF of the N strongest received powers P_1 > ... > P_N.

    Raises:
        DomainError: If the powers are not strictly decreasing and positive.
    """
    values = _as_ordered(p, ascending=False)
    n = values.size
    m, gamma = model.space.m, channel.gamma
    ref = channel.reference_power
    last_measure = float(distance_measure(values[-1], channel, model.space))
    return (n * math.log(m * model.rate)
            + (n * m / gamma) * math.log(ref)
            - n * math.log(gamma)
            - model.rate * last_measure
            - (m / gamma + 1.0) * float(np.sum(np.log(values))))


def pdf_joint_powers(p, model: IntensityModel, channel: ChannelParams) -> float:
    """
    Joint PDF of the N strongest received powers,
    (mλc_m)^N (C P_t)^{Nm/γ} γ^{-N} e^{-λc_m (C P_t/P_N)^{m/γ}} ∏ P_i^{-(m/γ+1)}.
    """
    return math.exp(log_pdf_joint_powers(p, model, channel))
