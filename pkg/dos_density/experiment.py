"""
Monte Carlo harness for the density and range sweeps.

A trial places neighbours around one observer, converts their distances
to received powers and runs every configured estimator on them. Trials of
a sweep point are independent streams (base_seed, sweep index, trial
index), so a sweep gives the same report whether it runs serially or on a
process pool.
"""
import json
import math
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from dos_density import settings
from dos_density.channel import ChannelParams, received_power
from dos_density.errors import ConfigError, InvalidParameterError, MissingSamplesError, RankViolationError
from dos_density.estimators import (CooperativePowerSamples, DensityEstimate, LocalPowerSamples,
                                    estimate_cde, estimate_local)
from dos_density.models import LOCAL_ESTIMATORS, Conditioning, EstimatorType, SweepType
from dos_density.stochastic_geometry import (RandomSource, RngStream, SpaceConfig, as_generator,
                                             sample_kth_nearest, sample_ppp_distances,
                                             sample_uniform_ball_distances)
from dos_density.utilities import exact_mean, format_float, parse_grid

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ['sweep_param', 'estimator', 'lambda_true', 'mape_percent', 'rmse',
                  'mean_estimate', 'trials_used', 'degenerate_trials', 'mean_sample_size']
FLOAT_COLUMNS = ['sweep_param', 'lambda_true', 'mape_percent', 'rmse', 'mean_estimate',
                 'mean_sample_size']


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Parameter bundle of one sweep.

    Attributes:
        sweep (SweepType): DENSITY sweeps λ at fixed_range, RANGE sweeps R at fixed_density.
        grid (tuple): Strictly increasing positive sweep values.
        fixed_range (float): Sampling range R in meters for DENSITY sweeps.
        fixed_density (float): λ in nodes/m^m for RANGE sweeps.
        space (SpaceConfig): Ambient space.
        channel (ChannelParams): Path-loss channel.
        trials (int): Trials per sweep point.
        base_seed (int): Root seed of every trial stream.
        estimators (tuple): Estimators to run.
        conditioning (Conditioning): How the neighbour count is drawn. POISSON_COUNT
            (default) draws it per trial and scores against λ; FIXED_COUNT is opt-in.
        rank (int): Rank c of the samples neighbours share with the C-DE.
        fixed_count (int, optional): Pin N in FIXED_COUNT mode.
        workers (int): Worker processes per sweep point.
    """
    sweep: SweepType
    grid: Tuple[float, ...]
    fixed_range: float = settings.DEFAULT_RANGE
    fixed_density: float = settings.DEFAULT_DENSITY
    space: SpaceConfig = SpaceConfig(settings.DEFAULT_DIMENSION)
    channel: ChannelParams = ChannelParams()
    trials: int = settings.DEFAULT_TRIALS
    base_seed: int = settings.DEFAULT_SEED
    estimators: Tuple[EstimatorType, ...] = tuple(EstimatorType)
    conditioning: Conditioning = Conditioning.POISSON_COUNT
    rank: int = settings.DEFAULT_RANK
    fixed_count: Optional[int] = None
    workers: int = settings.DEFAULT_WORKERS

    def __post_init__(self):
        grid = tuple(float(v) for v in self.grid)
        object.__setattr__(self, 'grid', grid)
        object.__setattr__(self, 'estimators', tuple(self.estimators))

        if not grid:
            raise ConfigError('Sweep grid is empty')
        if any(not (v > 0 and math.isfinite(v)) for v in grid):
            raise ConfigError('Sweep grid values must be positive and finite')
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError('Sweep grid must be strictly increasing')
        if self.trials < 1:
            raise ConfigError(f'Trials must be at least 1, got {self.trials}')
        if not (self.fixed_range > 0 and math.isfinite(self.fixed_range)):
            raise ConfigError(f'Fixed range must be positive, got {self.fixed_range!r}')
        if not (self.fixed_density > 0 and math.isfinite(self.fixed_density)):
            raise ConfigError(f'Fixed density must be positive, got {self.fixed_density!r}')
        if not self.estimators:
            raise ConfigError('At least one estimator is required')
        if self.rank < 1:
            raise ConfigError(f'C-DE rank must be at least 1, got {self.rank}')
        if self.fixed_count is not None and self.fixed_count < 0:
            raise ConfigError(f'Fixed count must be non-negative, got {self.fixed_count}')
        if self.workers < 1:
            raise ConfigError(f'Workers must be at least 1, got {self.workers}')

    def point_parameters(self, sweep_value: float) -> Tuple[float, float]:
        """(λ, R) at one sweep point."""
        if self.sweep == SweepType.DENSITY:
            return sweep_value, self.fixed_range
        return self.fixed_density, sweep_value

    def sample_count(self, lam: float, radius: float) -> int:
        """Neighbour count N of a FIXED_COUNT trial: sample size = density x sampling area."""
        if self.fixed_count is not None:
            return int(self.fixed_count)
        return int(math.floor(lam * self.space.ball_volume(radius) + 0.5))

    def lambda_true(self, sweep_value: float) -> float:
        """Reference density the estimates are scored against."""
        lam, radius = self.point_parameters(sweep_value)
        if self.conditioning == Conditioning.POISSON_COUNT:
            return lam
        return self.sample_count(lam, radius) / self.space.ball_volume(radius)

    def to_dict(self) -> Dict[str, Any]:
        """JSON mirror; keys are the field names."""
        return {
            'sweep': self.sweep.value,
            'grid': list(self.grid),
            'fixed_range': self.fixed_range,
            'fixed_density': self.fixed_density,
            'space': {'m': self.space.m},
            'channel': asdict(self.channel),
            'trials': self.trials,
            'base_seed': self.base_seed,
            'estimators': [e.value for e in self.estimators],
            'conditioning': self.conditioning.value,
            'rank': self.rank,
            'fixed_count': self.fixed_count,
            'workers': self.workers,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ExperimentConfig':
        """
        Build a config from its JSON mirror.

        Missing keys fall back to the defaults; unknown keys are rejected.

        Raises:
            ConfigError: If a key is unknown or a value does not parse.
        """
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f'Unknown config keys: {", ".join(sorted(unknown))}')

        try:
            kwargs = dict(data)
            kwargs['sweep'] = SweepType(str(data['sweep']).lower())
            grid = data.get('grid')
            if isinstance(grid, str):
                grid = parse_grid(grid)
            elif grid is None:
                grid = parse_grid(settings.DEFAULT_DENSITY_GRID if kwargs['sweep'] == SweepType.DENSITY
                                  else settings.DEFAULT_RANGE_GRID)
            kwargs['grid'] = tuple(grid)
            if 'space' in data:
                kwargs['space'] = SpaceConfig(**data['space'])
            if 'channel' in data:
                kwargs['channel'] = ChannelParams(**data['channel'])
            if 'estimators' in data:
                kwargs['estimators'] = tuple(EstimatorType.parse(e) for e in data['estimators'])
            if 'conditioning' in data:
                kwargs['conditioning'] = Conditioning(str(data['conditioning']).lower())
            return cls(**kwargs)
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f'Invalid experiment config: {e}') from e


@dataclass(frozen=True)
class TrialResult:
    """Estimates of one trial; empty when the trial had no neighbours."""
    trial_index: int
    sample_size: int
    estimates: Dict[EstimatorType, DensityEstimate] = field(default_factory=dict)

    @property
    def degenerate(self) -> bool:
        return self.sample_size == 0


@dataclass(frozen=True)
class MetricsRow:
    """Metrics of one (sweep value, estimator) cell."""
    sweep_param: float
    estimator: EstimatorType
    lambda_true: float
    mape_percent: float
    rmse: float
    mean_estimate: float
    trials_used: int
    degenerate_trials: int
    mean_sample_size: float

    def to_record(self) -> Dict[str, Any]:
        record = asdict(self)
        record['estimator'] = self.estimator.value
        return record


@dataclass(frozen=True)
class MetricsReport:
    """Per-cell MAPE/RMSE over a sweep."""
    config: ExperimentConfig
    rows: Tuple[MetricsRow, ...]

    def cell(self, sweep_value: float, estimator: EstimatorType) -> MetricsRow:
        for row in self.rows:
            if row.sweep_param == sweep_value and row.estimator == estimator:
                return row
        raise KeyError(f'No metrics for {estimator.value} at {sweep_value}')

    def series(self, estimator: EstimatorType, metric: str) -> List[float]:
        """One metric for one estimator across the grid, in grid order."""
        return [getattr(row, metric) for row in self.rows if row.estimator == estimator]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.to_record() for row in self.rows], columns=REPORT_COLUMNS)

    def to_csv(self, path: Optional[str] = None) -> str:
        """
        Write the report as CSV; floats use their shortest round-trip text.

        Returns:
            str: CSV text (also written to `path` when given).
        """
        frame = self.to_frame().astype(object)
        for column in FLOAT_COLUMNS:
            frame[column] = frame[column].map(format_float)
        text = frame.to_csv(index=False, lineterminator='\n')
        if path:
            with open(path, 'w', encoding='utf-8', newline='') as fh:
                fh.write(text)
        return text

    def to_json(self, path: Optional[str] = None) -> str:
        text = json.dumps([row.to_record() for row in self.rows], indent=2)
        if path:
            with open(path, 'w', encoding='utf-8') as fh:
                fh.write(text + '\n')
        return text


def _check_metric_input(estimates: Sequence[float], lambda_true: float) -> np.ndarray:
    values = np.asarray(list(estimates), dtype=float)
    if values.size == 0:
        raise MissingSamplesError('No estimates to score')
    if not (lambda_true > 0 and math.isfinite(lambda_true)):
        raise InvalidParameterError(f'True density must be positive, got {lambda_true!r}')
    return values


def mape(estimates: Sequence[float], lambda_true: float) -> float:
    """
    Mean absolute percentage error, 100 mean(|λ̂ - λ| / λ).

    Raises:
        MissingSamplesError: If there are no estimates.
    """
    values = _check_metric_input(estimates, lambda_true)
    return 100.0 * math.fsum(np.abs(values - lambda_true) / lambda_true) / values.size


def rmse(estimates: Sequence[float], lambda_true: float) -> float:
    """
    Root mean square error sqrt(mean((λ̂ - λ)^2)), summed exactly.

    Raises:
        MissingSamplesError: If there are no estimates.
    """
    values = _check_metric_input(estimates, lambda_true)
    return math.sqrt(math.fsum((values - lambda_true) ** 2) / values.size)


def _run_trial_chunk(cfg: ExperimentConfig, sweep_index: int, sweep_value: float,
                     start: int, stop: int) -> List[TrialResult]:
    manager = ExperimentManager(cfg)
    return [manager.run_trial(sweep_value, RngStream(cfg.base_seed, i, sweep_index), trial_index=i)
            for i in range(start, stop)]


class ExperimentManager:
    """
    Runs Monte Carlo trials and sweeps for one ExperimentConfig.

    Handles trial generation, per-point aggregation into MAPE/RMSE cells,
    and the two sweep modes.
    """
    def __init__(self, config: ExperimentConfig):
        self.config = config

    def run_trial(self, sweep_value: float, rng: RandomSource, trial_index: int = 0) -> TrialResult:
        """
        Run one trial at a sweep point.

        POISSON_COUNT draws a PPP realization in the sampling ball;
        FIXED_COUNT places N uniform nodes in it. Distances become powers
        through the channel and feed the local estimators. The C-DE gets N
        independent c-th nearest distances drawn at the reference density,
        standing in for samples shared by the N neighbours.

        Args:
            sweep_value (float): λ (DENSITY sweep) or R (RANGE sweep).
            rng: RngStream or numpy Generator for this trial.
            trial_index (int): Recorded in the result.

        Returns:
            TrialResult: Estimates keyed by estimator; empty for a trial without neighbours.
        """
        cfg = self.config
        gen = as_generator(rng)
        lam, radius = cfg.point_parameters(sweep_value)

        if cfg.conditioning == Conditioning.POISSON_COUNT:
            distances = sample_ppp_distances(lam, radius, cfg.space, gen)
        else:
            distances = sample_uniform_ball_distances(cfg.sample_count(lam, radius), radius, cfg.space, gen)

        n = len(distances)
        if n == 0:
            logger.debug(f'Trial {trial_index} at {sweep_value}: no neighbours in range')
            return TrialResult(trial_index, 0)

        estimates = {}
        local_estimators = [e for e in cfg.estimators if e in LOCAL_ESTIMATORS]
        if local_estimators:
            try:
                local = LocalPowerSamples(received_power(distances.distances, cfg.channel), cfg.channel)
                estimates.update(estimate_local(local, cfg.space, local_estimators))
            except RankViolationError as e:
                # Two distances closer than float resolution collapse to one power
                logger.warning(f'Trial {trial_index} at {sweep_value}: {e}')

        if EstimatorType.CDE in cfg.estimators:
            shared = sample_kth_nearest(cfg.lambda_true(sweep_value), cfg.rank, cfg.space, gen, n)
            samples = CooperativePowerSamples(received_power(shared, cfg.channel), cfg.rank, cfg.channel)
            estimates[EstimatorType.CDE] = estimate_cde(samples, cfg.space)

        return TrialResult(trial_index, n, estimates)

    def run_point(self, sweep_index: int, sweep_value: float) -> List[TrialResult]:
        """All trials of one sweep point, in trial-index order."""
        cfg = self.config
        if cfg.workers == 1:
            return _run_trial_chunk(cfg, sweep_index, sweep_value, 0, cfg.trials)

        bounds = np.linspace(0, cfg.trials, cfg.workers + 1).astype(int)
        results = []
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(_run_trial_chunk, cfg, sweep_index, sweep_value, int(a), int(b))
                       for a, b in zip(bounds, bounds[1:]) if b > a]
            for future in futures:
                results.extend(future.result())
        return sorted(results, key=lambda r: r.trial_index)

    def aggregate(self, sweep_value: float, results: Sequence[TrialResult]) -> List[MetricsRow]:
        """
        Score the trials of one sweep point.

        Degenerate estimates (no neighbours, or a vanishing numerator) are
        left out of the metrics and counted in degenerate_trials.
        """
        cfg = self.config
        lambda_true = cfg.lambda_true(sweep_value)
        mean_size = exact_mean(r.sample_size for r in results)

        rows = []
        for estimator in cfg.estimators:
            values = [r.estimates[estimator].value for r in results
                      if estimator in r.estimates and not r.estimates[estimator].degenerate]
            degenerate = len(results) - len(values)
            if values:
                row_mape, row_rmse, row_mean = mape(values, lambda_true), rmse(values, lambda_true), exact_mean(values)
            else:
                row_mape = row_rmse = row_mean = math.nan
            rows.append(MetricsRow(
                sweep_param=sweep_value,
                estimator=estimator,
                lambda_true=lambda_true,
                mape_percent=row_mape,
                rmse=row_rmse,
                mean_estimate=row_mean,
                trials_used=len(values),
                degenerate_trials=degenerate,
                mean_sample_size=mean_size,
            ))
            if degenerate:
                logger.warning(f'{estimator.value} at {sweep_value}: {degenerate}/{len(results)} degenerate trials excluded')
        return rows

    def _sweep(self, expected: SweepType) -> MetricsReport:
        cfg = self.config
        if cfg.sweep != expected:
            raise ConfigError(f'Config is a {cfg.sweep.value} sweep, not a {expected.value} sweep')

        rows = []
        for sweep_index, value in enumerate(cfg.grid):
            lam, radius = cfg.point_parameters(value)
            logger.info(f'{expected.value} sweep point {sweep_index + 1}/{len(cfg.grid)}: '
                        f'lambda={lam:g}, range={radius:g} m, {cfg.trials} trials')
            rows.extend(self.aggregate(value, self.run_point(sweep_index, value)))

        logger.info(f'{expected.value} sweep finished: {len(rows)} report rows')
        return MetricsReport(cfg, tuple(rows))

    def sweep_density(self) -> MetricsReport:
        """Density sweep at a fixed sampling range."""
        return self._sweep(SweepType.DENSITY)

    def sweep_range(self) -> MetricsReport:
        """Range sweep at a fixed density."""
        return self._sweep(SweepType.RANGE)

    def run(self) -> MetricsReport:
        if self.config.sweep == SweepType.DENSITY:
            return self.sweep_density()
        return self.sweep_range()


def run_trial(sweep_value: float, cfg: ExperimentConfig, rng: RandomSource) -> TrialResult:
    return ExperimentManager(cfg).run_trial(sweep_value, rng)


def sweep_density(cfg: ExperimentConfig) -> MetricsReport:
    return ExperimentManager(cfg).sweep_density()


def sweep_range(cfg: ExperimentConfig) -> MetricsReport:
    return ExperimentManager(cfg).sweep_range()
