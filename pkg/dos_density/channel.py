import math
from dataclasses import dataclass

import numpy as np

from dos_density import settings
from dos_density.errors import DomainError, InvalidParameterError
from dos_density.stochastic_geometry import SpaceConfig


@dataclass(frozen=True)
class ChannelParams:
    """
    Deterministic path-loss channel P = C P_t r^{-γ}.

    Attributes:
        transmit_power (float): P_t in watts.
        constant (float): Non-distance-related constant C.
        gamma (float): Path-loss exponent γ.
    """
    transmit_power: float = settings.DEFAULT_TRANSMIT_POWER
    constant: float = settings.DEFAULT_CHANNEL_CONSTANT
    gamma: float = settings.DEFAULT_PATH_LOSS_EXPONENT

    def __post_init__(self):
        for name in ('transmit_power', 'constant', 'gamma'):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidParameterError(f'Channel {name} must be positive and finite, got {value!r}')

    @property
    def reference_power(self) -> float:
        """C P_t, the power received at unit distance."""
        return self.constant * self.transmit_power


def _check_positive(name, values):
    if np.any(~(np.asarray(values) > 0)):
        raise DomainError(f'{name} must be positive')


def received_power(r, ch: ChannelParams):
    """
    Received power at distance r, C P_t r^{-γ}.

    Works elementwise on arrays.

    Raises:
        DomainError: If any distance is not positive.
    """
    _check_positive('Distance', r)
    return ch.reference_power * np.power(r, -ch.gamma)


def invert_to_distance(p, ch: ChannelParams):
    """
    Distance at which power p is received, (C P_t / p)^{1/γ}.

    Raises:
        DomainError: If any power is not positive.
    """
    _check_positive('Power', p)
    return np.power(ch.reference_power / np.asarray(p, dtype=float), 1.0 / ch.gamma)


def distance_measure(p, ch: ChannelParams, space: SpaceConfig):
    """
    Normalized distance measure (p / (C P_t))^{-m/γ}, equal to r^m.

    Every estimator divides by c_m times a sum of these, so it is the ball
    volume (up to c_m) reaching out to the node that produced the sample.

    Raises:
        DomainError: If any power is not positive.
    """
    _check_positive('Power', p)
    return np.power(np.asarray(p, dtype=float) / ch.reference_power, -space.m / ch.gamma)
