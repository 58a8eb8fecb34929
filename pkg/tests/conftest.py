import numpy as np
import pytest

from dos_density.channel import ChannelParams
from dos_density.stochastic_geometry import RngStream, SpaceConfig


class FixedUniforms:
    """Generator stand-in whose random() always returns the same value."""
    def __init__(self, value):
        self.value = value

    def random(self, size=None):
        return np.full(size, self.value, dtype=float)


@pytest.fixture
def plane():
    return SpaceConfig(2)


@pytest.fixture
def line_space():
    return SpaceConfig(1)


@pytest.fixture
def unit_channel():
    """C P_t = 1 with γ = 2, the channel of the hand-worked estimator examples."""
    return ChannelParams(transmit_power=1.0, constant=1.0, gamma=2.0)


@pytest.fixture
def quartic_channel():
    return ChannelParams(transmit_power=1.0, constant=1.0, gamma=4.0)


@pytest.fixture
def gen():
    return RngStream(1234).generator()


@pytest.fixture
def fixed_uniforms():
    return FixedUniforms
