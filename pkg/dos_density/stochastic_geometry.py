"""
Random network realizations around an observer at the origin.

Nodes are placed either uniformly in an m-ball (fixed count) or by a
homogeneous Poisson point process; only their distances to the observer
matter to the estimators, so every sampler returns a sorted DistanceVector.
"""
import math
import logging
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import gammaln

from dos_density.errors import InvalidParameterError
from dos_density.utilities import is_strictly_increasing

logger = logging.getLogger(__name__)


def ball_volume_coeff(m: int) -> float:
    """
    Volume of the unit m-ball, c_m = π^{m/2} / Γ(m/2 + 1).

    Args:
        m (int): Ambient dimension, at least 1.

    Returns:
        float: c_m, e.g. 2 for m=1, π for m=2, 4π/3 for m=3.

    Raises:
        InvalidParameterError: If m is not a positive integer.
    """
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise InvalidParameterError(f'Dimension must be a positive integer, got {m!r}')
    m = int(m)

    # Exact values for the common dimensions
    if m == 1:
        return 2.0
    if m == 2:
        return math.pi
    if m == 3:
        return 4.0 * math.pi / 3.0

    return math.exp(0.5 * m * math.log(math.pi) - gammaln(0.5 * m + 1.0))


@dataclass(frozen=True)
class SpaceConfig:
    """
    Ambient space of the network.

    Attributes:
        m (int): Dimension.
        c_m (float): Unit-ball volume coefficient, derived from m.
    """
    m: int = 2
    c_m: float = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, 'c_m', ball_volume_coeff(self.m))
        object.__setattr__(self, 'm', int(self.m))

    def ball_volume(self, radius: float) -> float:
        """Lebesgue measure c_m r^m of the ball of the given radius."""
        return self.c_m * radius ** self.m


@dataclass(frozen=True)
class RngStream:
    """
    Reproducible random stream identified by (seed, stream index).

    The same identifiers always give the same draws, whichever order or
    process the streams are consumed in.
    """
    seed: int
    stream: int = 0
    sweep_index: int = 0

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.sweep_index, self.stream))
        return np.random.Generator(np.random.PCG64(seq))


RandomSource = Union[RngStream, np.random.Generator]


def as_generator(rng: RandomSource) -> np.random.Generator:
    """Accept either a stream descriptor or a live generator."""
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng


@dataclass(frozen=True)
class DistanceVector:
    """Strictly increasing positive nodal distances r_1 < ... < r_N (meters)."""
    distances: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.distances, dtype=float).ravel()
        if values.size:
            if not np.all(np.isfinite(values)) or np.any(values <= 0):
                raise InvalidParameterError('Distances must be finite and positive')
            if not is_strictly_increasing(values):
                raise InvalidParameterError('Distances must be strictly increasing')
        values.setflags(write=False)
        object.__setattr__(self, 'distances', values)

    def __len__(self) -> int:
        return int(self.distances.size)

    def __iter__(self):
        return iter(self.distances.tolist())

    def __getitem__(self, index):
        return self.distances[index]

    @property
    def farthest(self) -> float:
        return float(self.distances[-1])


def _check_positive(name: str, value: float):
    if not (value > 0 and math.isfinite(value)):
        raise InvalidParameterError(f'{name} must be positive and finite, got {value!r}')


def _open_unit_uniform(gen: np.random.Generator, size) -> np.ndarray:
    # Generator.random is on [0, 1); flipping it gives (0, 1] so r > 0
    return 1.0 - gen.random(size)


def sample_uniform_ball_distances(n: int, radius: float, space: SpaceConfig,
                                  rng: RandomSource) -> DistanceVector:
    """
    Distances of n nodes placed uniformly in the m-ball of the given radius.

    Each distance has CDF r^m / R^m on (0, R], sampled by inversion
    r = R U^{1/m}.

    Args:
        n (int): Number of nodes; 0 gives an empty vector.
        radius (float): Ball radius R in meters.
        space (SpaceConfig): Ambient space.
        rng: RngStream or numpy Generator.

    Returns:
        DistanceVector: n sorted distances.

    Raises:
        InvalidParameterError: If radius <= 0 or n < 0.
    """
    _check_positive('Radius', radius)
    if n < 0:
        raise InvalidParameterError(f'Node count must be non-negative, got {n}')

    gen = as_generator(rng)
    u = _open_unit_uniform(gen, int(n))
    return DistanceVector(np.sort(radius * u ** (1.0 / space.m)))


def sample_uniform_ball_batch(n: int, radius: float, space: SpaceConfig,
                              rng: RandomSource, size: int) -> np.ndarray:
    """Vectorized sample_uniform_ball_distances: array of shape (size, n), rows sorted."""
    _check_positive('Radius', radius)
    gen = as_generator(rng)
    u = _open_unit_uniform(gen, (int(size), int(n)))
    return np.sort(radius * u ** (1.0 / space.m), axis=1)


def sample_ppp_distances(lam: float, radius: float, space: SpaceConfig,
                         rng: RandomSource) -> DistanceVector:
    """
    Distances of a homogeneous PPP realization inside the m-ball of the given radius.

    The count is drawn as K ~ Poisson(λ c_m R^m); given K the nodes are
    uniform in the ball.

    Raises:
        InvalidParameterError: If lam <= 0 or radius <= 0.
    """
    _check_positive('Density', lam)
    _check_positive('Radius', radius)

    gen = as_generator(rng)
    count = int(gen.poisson(lam * space.ball_volume(radius)))
    logger.debug(f'PPP realization with {count} nodes (mean {lam * space.ball_volume(radius):.3f})')
    return sample_uniform_ball_distances(count, radius, space, gen)


def sample_joint_dos(lam: float, n: int, space: SpaceConfig,
                     rng: RandomSource) -> DistanceVector:
    """
    Draw the n nearest-neighbour distances of a PPP of intensity lam jointly.

    Uses the exponential-increment construction: with S_i the cumulative sum
    of i unit exponentials, r_i = (S_i / (λ c_m))^{1/m} has exactly the joint
    density e^{-λc_m r_n^m} (mλc_m)^n ∏ r_i^{m-1}.

    Args:
        lam (float): Node density λ in nodes/m^m.
        n (int): Number of ordered distances, at least 1.
        space (SpaceConfig): Ambient space.
        rng: RngStream or numpy Generator.

    Returns:
        DistanceVector: r_1 < ... < r_n.

    Raises:
        InvalidParameterError: If lam <= 0 or n < 1.
    """
    _check_positive('Density', lam)
    if n < 1:
        raise InvalidParameterError(f'Number of order statistics must be at least 1, got {n}')

    gen = as_generator(rng)
    arrivals = np.cumsum(gen.standard_exponential(int(n)))
    return DistanceVector((arrivals / (lam * space.c_m)) ** (1.0 / space.m))


def sample_joint_dos_batch(lam: float, n: int, space: SpaceConfig,
                           rng: RandomSource, size: int) -> np.ndarray:
    """Vectorized sample_joint_dos: array of shape (size, n), each row increasing."""
    _check_positive('Density', lam)
    if n < 1:
        raise InvalidParameterError(f'Number of order statistics must be at least 1, got {n}')

    gen = as_generator(rng)
    arrivals = np.cumsum(gen.standard_exponential((int(size), int(n))), axis=1)
    return (arrivals / (lam * space.c_m)) ** (1.0 / space.m)


def sample_kth_nearest(lam: float, k: int, space: SpaceConfig,
                       rng: RandomSource, size: int) -> np.ndarray:
    """
    Independent draws of the k-th nearest-neighbour distance.

    λ c_m r_k^m is Gamma(k, 1), so each draw inverts one gamma variate.
    This is how neighbours' shared c-th rank samples are modelled.
    """
    _check_positive('Density', lam)
    if k < 1:
        raise InvalidParameterError(f'Rank must be at least 1, got {k}')

    gen = as_generator(rng)
    return (gen.standard_gamma(float(k), int(size)) / (lam * space.c_m)) ** (1.0 / space.m)
