"""
Maximum-likelihood node density estimators from received power samples.

Two sample regimes exist. A node can rank the powers it hears itself
(LocalPowerSamples, statistically dependent across ranks) or collect one
c-th strongest power from each of N neighbours (CooperativePowerSamples,
independent). Each closed form is written once over arrays of distance
measures (`*_from_measures`) and reused by the scalar estimators and by the
Monte Carlo harness.
"""
import math
import logging
from dataclasses import dataclass, field
from typing import Dict, Any

import numpy as np

from dos_density.channel import ChannelParams, distance_measure
from dos_density.dos_analytics import IntensityModel, log_pdf_joint_powers, log_pdf_kth_power
from dos_density.errors import DomainError, MissingSamplesError, RankViolationError
from dos_density.models import EstimatorType
from dos_density.stochastic_geometry import SpaceConfig
from dos_density.utilities import is_strictly_decreasing

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LocalPowerSamples:
    """
    Powers heard by one node, strongest first (index i is rank i+1).

    Attributes:
        powers (np.ndarray): Strictly decreasing positive powers in watts.
        channel (ChannelParams): Channel the powers were received through.
    """
    powers: np.ndarray
    channel: ChannelParams

    def __post_init__(self):
        values = np.asarray(self.powers, dtype=float).ravel()
        if values.size == 0:
            raise MissingSamplesError('Local sample set is empty')
        if np.any(~(values > 0)) or not np.all(np.isfinite(values)):
            raise DomainError('Powers must be positive and finite')
        if not is_strictly_decreasing(values):
            bad = int(np.argmax(np.diff(values) >= 0)) + 1
            raise RankViolationError(
                f'Local powers must be strictly decreasing; sample {bad + 1} '
                f'({values[bad]!r}) is not below sample {bad} ({values[bad - 1]!r})',
                line=bad + 1)
        values.setflags(write=False)
        object.__setattr__(self, 'powers', values)

    def __len__(self) -> int:
        return int(self.powers.size)

    def measures(self, space: SpaceConfig) -> np.ndarray:
        return distance_measure(self.powers, self.channel, space)


@dataclass(frozen=True)
class CooperativePowerSamples:
    """
    c-th strongest powers shared by N neighbours, in any order.

    Attributes:
        powers (np.ndarray): Positive powers in watts; ties are allowed.
        rank (int): Common rank c of every sample.
        channel (ChannelParams): Channel the powers were received through.
    """
    powers: np.ndarray
    rank: int
    channel: ChannelParams

    def __post_init__(self):
        values = np.asarray(self.powers, dtype=float).ravel()
        if values.size == 0:
            raise MissingSamplesError('Cooperative sample set is empty')
        if np.any(~(values > 0)) or not np.all(np.isfinite(values)):
            raise DomainError('Powers must be positive and finite')
        if int(self.rank) != self.rank or self.rank < 1:
            raise DomainError(f'Sample rank must be a positive integer, got {self.rank!r}')
        values.setflags(write=False)
        object.__setattr__(self, 'powers', values)
        object.__setattr__(self, 'rank', int(self.rank))

    def __len__(self) -> int:
        return int(self.powers.size)

    def measures(self, space: SpaceConfig) -> np.ndarray:
        return distance_measure(self.powers, self.channel, space)


@dataclass(frozen=True)
class DensityEstimate:
    """
    One density estimate.

    Attributes:
        value (float): λ̂ in nodes/m^m.
        estimator (EstimatorType): Which estimator produced it.
        degenerate (bool): True when the estimator's numerator vanished
            (single sample), so the zero carries no information.
        sample_size (int): Number of samples used.
    """
    value: float
    estimator: EstimatorType
    degenerate: bool = False
    sample_size: int = 0
    metadata: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (self.value >= 0 and math.isfinite(self.value)):
            raise DomainError(f'Density estimate must be finite and non-negative, got {self.value!r}')


# Closed forms over distance measures (last axis = samples)

def cde_from_measures(measures, rank: int, c_m: float):
    """(N c - 1) / (c_m Σ measures)"""
    measures = np.asarray(measures, dtype=float)
    n = measures.shape[-1]
    return (n * rank - 1) / (c_m * np.sum(measures, axis=-1))


def cde_ml_from_measures(measures, rank: int, c_m: float):
    """Uncorrected maximizer N c / (c_m Σ measures) of the cooperative likelihood."""
    measures = np.asarray(measures, dtype=float)
    n = measures.shape[-1]
    return n * rank / (c_m * np.sum(measures, axis=-1))


def ide_ml_from_measures(measures, c_m: float):
    """N / (c_m measure_N); only the farthest neighbour's sample enters."""
    measures = np.asarray(measures, dtype=float)
    n = measures.shape[-1]
    return n / (c_m * measures[..., -1])


def ide_from_measures(measures, c_m: float):
    """(N - 1) / (c_m measure_N)"""
    measures = np.asarray(measures, dtype=float)
    n = measures.shape[-1]
    return (n - 1) / (c_m * measures[..., -1])


def ide_wrong_from_measures(measures, c_m: float):
    """N (N + 1) / (2 c_m Σ measures), the maximizer of the independent-sample likelihood."""
    measures = np.asarray(measures, dtype=float)
    n = measures.shape[-1]
    return n * (n + 1) / (2.0 * c_m * np.sum(measures, axis=-1))


# Estimators

def estimate_cde(s: CooperativePowerSamples, space: SpaceConfig) -> DensityEstimate:
    """
    Cooperative density estimate (N c - 1) / (c_m Σ_i (P^i / (C P_t))^{-m/γ}).

    Unbiased when every sample is an independent c-th strongest power.
    The estimate is 0 (and flagged degenerate) when N c = 1.

    Args:
        s (CooperativePowerSamples): Shared samples.
        space (SpaceConfig): Ambient space.

    Returns:
        DensityEstimate: λ̂_C.
    """
    n = len(s)
    value = float(cde_from_measures(s.measures(space), s.rank, space.c_m))
    degenerate = n * s.rank == 1
    if degenerate:
        logger.debug('C-DE from a single rank-1 sample is identically 0')
    return DensityEstimate(value, EstimatorType.CDE, degenerate=degenerate, sample_size=n,
                           metadata={'rank': s.rank})


def estimate_cde_ml(s: CooperativePowerSamples, space: SpaceConfig) -> float:
    return float(cde_ml_from_measures(s.measures(space), s.rank, space.c_m))


def estimate_ide_ml(s: LocalPowerSamples, space: SpaceConfig) -> DensityEstimate:
    """
    ML individual density estimate N / (c_m (P_N / (C P_t))^{-m/γ}).

    Biased upwards by exactly N / (N - 1); see ide_ml_bias_factor.
    """
    value = float(ide_ml_from_measures(s.measures(space), space.c_m))
    return DensityEstimate(value, EstimatorType.IDE_ML, sample_size=len(s))


def estimate_ide(s: LocalPowerSamples, space: SpaceConfig) -> DensityEstimate:
    """
    Bias-corrected individual density estimate (N - 1) / (c_m (P_N / (C P_t))^{-m/γ}).

    Returns 0, flagged degenerate, for a single sample.
    """
    n = len(s)
    value = float(ide_from_measures(s.measures(space), space.c_m))
    degenerate = n == 1
    if degenerate:
        logger.debug('Corrected I-DE from a single sample is identically 0')
    return DensityEstimate(value, EstimatorType.IDE_CORRECT, degenerate=degenerate, sample_size=n)


def estimate_ide_wrong(s: LocalPowerSamples, space: SpaceConfig) -> DensityEstimate:
    """
    Individual estimate that treats the ranked local powers as independent.

    Maximizes Σ_i ln pdf_kth_power(P_i, i, λ); kept for comparison only.
    """
    value = float(ide_wrong_from_measures(s.measures(space), space.c_m))
    return DensityEstimate(value, EstimatorType.IDE_WRONG, sample_size=len(s))


def ide_ml_bias_factor(n: int) -> float:
    """
    Multiplicative bias N / (N - 1) of the ML individual estimate,
    E[λ̂_ML] = N / (N - 1) λ.

    Raises:
        DomainError: If n < 2 (the expectation diverges).
    """
    if int(n) != n or n < 2:
        raise DomainError(f'Bias factor needs at least 2 samples, got {n!r}')
    return n / (n - 1.0)


# Likelihoods

def _check_density(lam: float):
    if not (lam > 0 and math.isfinite(lam)):
        raise DomainError(f'Density must be positive and finite, got {lam!r}')


def loglik_cde(lam: float, s: CooperativePowerSamples, space: SpaceConfig) -> float:
    """Σ_i ln pdf_kth_power(P^i, c, λ): the likelihood of independent shared samples."""
    _check_density(lam)
    model = IntensityModel(lam, space)
    return math.fsum(log_pdf_kth_power(p, s.rank, model, s.channel) for p in s.powers)


def loglik_ide_joint(lam: float, s: LocalPowerSamples, space: SpaceConfig) -> float:
    """Log joint PDF of the ranked local powers; the correct I-DE likelihood."""
    _check_density(lam)
    return log_pdf_joint_powers(s.powers, IntensityModel(lam, space), s.channel)


def loglik_ide_wrong(lam: float, s: LocalPowerSamples, space: SpaceConfig) -> float:
    """Σ_i ln pdf_kth_power(P_i, i, λ): the likelihood that ignores rank dependence."""
    _check_density(lam)
    model = IntensityModel(lam, space)
    return math.fsum(log_pdf_kth_power(p, i, model, s.channel)
                     for i, p in enumerate(s.powers, start=1))


ESTIMATOR_FUNCTIONS = {
    EstimatorType.IDE_ML: estimate_ide_ml,
    EstimatorType.IDE_CORRECT: estimate_ide,
    EstimatorType.IDE_WRONG: estimate_ide_wrong,
}


def estimate_local(s: LocalPowerSamples, space: SpaceConfig, estimators=None) -> Dict[EstimatorType, DensityEstimate]:
    """Run every requested local estimator on the same sample set."""
    estimators = estimators or list(ESTIMATOR_FUNCTIONS)
    return {e: ESTIMATOR_FUNCTIONS[e](s, space) for e in estimators if e in ESTIMATOR_FUNCTIONS}
