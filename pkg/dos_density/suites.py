"""
Named validation suites run by `main.py validate`.

Each check is deterministic under a fixed seed and reports one
CheckResult; a suite passes when all of its checks do.
"""
import math
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from dos_density import settings
from dos_density.channel import ChannelParams, received_power
from dos_density.dos_analytics import (FiniteBallModel, IntensityModel, cdf_kth_nearest,
                                       cdf_kth_nearest_finite, cdf_kth_power, pdf_joint_intensity,
                                       pdf_joint_powers, pdf_kth_nearest)
from dos_density.errors import DensityToolkitError
from dos_density.estimators import (LocalPowerSamples, cde_from_measures, ide_from_measures,
                                    ide_ml_bias_factor, ide_ml_from_measures, ide_wrong_from_measures,
                                    loglik_ide_joint, loglik_ide_wrong)
from dos_density.stochastic_geometry import (RngStream, SpaceConfig, sample_joint_dos_batch,
                                             sample_kth_nearest, sample_uniform_ball_batch)
from dos_density.validation import argmax_log_scale, ks_test, quadrature

logger = logging.getLogger(__name__)

KS_SAMPLES = 10000
KS_ALPHA = 0.01
KS_REPEATS = 3
ARGMAX_REL_TOL = 1e-6
VALIDATION_CHUNK = 100_000  # trials held in memory at once


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f'{"PASS" if self.passed else "FAIL"}\t{self.name}\t{self.detail}'


def _majority_ks(name: str, draw: Callable[[np.random.Generator], np.ndarray],
                 cdf: Callable[[float], float], seed: int, stream: int) -> CheckResult:
    # Three independent repeats, majority vote
    p_values = []
    for repeat in range(KS_REPEATS):
        gen = RngStream(seed, stream, repeat).generator()
        p_values.append(ks_test(draw(gen), cdf).p_value)
    passes = sum(p > KS_ALPHA for p in p_values)
    detail = 'p=' + ','.join(f'{p:.4f}' for p in p_values)
    return CheckResult(name, passes * 2 > KS_REPEATS, detail)


def _within_standard_errors(name: str, values: np.ndarray, target: float, z: float = 3.0) -> CheckResult:
    mean = float(np.mean(values))
    se = float(np.std(values, ddof=1) / math.sqrt(values.size))
    score = abs(mean - target) / se if se > 0 else math.inf
    return CheckResult(name, score <= z, f'mean={mean:.6g} target={target:.6g} se={se:.3g} z={score:.2f}')


def _chunked(trials: int, draw: Callable[[int], np.ndarray]) -> np.ndarray:
    """Per-trial values of `draw(size)`, drawn in chunks of at most VALIDATION_CHUNK trials."""
    sizes = [VALIDATION_CHUNK] * (trials // VALIDATION_CHUNK)
    if trials % VALIDATION_CHUNK:
        sizes.append(trials % VALIDATION_CHUNK)
    return np.concatenate([draw(size) for size in sizes])


# Distribution checks

def check_joint_dos_marginals(seed: int, trials: int) -> List[CheckResult]:
    space = SpaceConfig(2)
    model = IntensityModel(0.01, space)
    results = []
    for stream, k in enumerate((1, 3, 5)):
        results.append(_majority_ks(
            f'joint-dos-marginal-k{k}',
            lambda gen, k=k: sample_joint_dos_batch(model.lam, 5, space, gen, KS_SAMPLES)[:, k - 1],
            lambda r, k=k: cdf_kth_nearest(r, k, model),
            seed, stream))
    return results


def check_uniform_ball_order_statistics(seed: int, trials: int) -> List[CheckResult]:
    space = SpaceConfig(2)
    results = []
    for stream, (n, k) in enumerate(((5, 1), (5, 5), (10, 3)), start=10):
        model = FiniteBallModel(n, 1.0, space)
        results.append(_majority_ks(
            f'uniform-ball-order-n{n}-k{k}',
            lambda gen, n=n, k=k: sample_uniform_ball_batch(n, 1.0, space, gen, KS_SAMPLES)[:, k - 1],
            lambda r, k=k, model=model: cdf_kth_nearest_finite(r, k, model),
            seed, stream))
    return results


def check_power_marginal(seed: int, trials: int) -> List[CheckResult]:
    space = SpaceConfig(2)
    model = IntensityModel(0.01, space)
    channel = ChannelParams(1.0, 1.0, 4.0)
    return [_majority_ks(
        'kth-power-marginal-k2',
        lambda gen: received_power(sample_joint_dos_batch(model.lam, 2, space, gen, KS_SAMPLES)[:, 1], channel),
        lambda p: cdf_kth_power(p, 2, model, channel),
        seed, 20)]


def check_normalization(seed: int, trials: int) -> List[CheckResult]:
    results = []
    model = IntensityModel(0.01, SpaceConfig(2))
    total = quadrature(lambda r: pdf_kth_nearest(r, 3, model) if r > 0 else 0.0, 0.0, math.inf, 1e-9, scale=10.0)
    results.append(CheckResult('kth-nearest-normalization-k3', abs(total - 1) < 1e-6, f'integral={total:.10f}'))

    # Joint power density over P_1 > P_2 > 0, integrated in y = ln P
    unit = IntensityModel(1.0 / math.pi, SpaceConfig(2))
    channel = ChannelParams(1.0, 1.0, 4.0)
    lo, hi = -10.0, 60.0

    def inner(y2):
        return quadrature(lambda y1: pdf_joint_powers([math.exp(y1), math.exp(y2)], unit, channel) * math.exp(y1 + y2),
                          y2, hi, 1e-8)

    total = quadrature(inner, lo, hi, 1e-6)
    results.append(CheckResult('joint-powers-normalization-n2', abs(total - 1) < 1e-3, f'integral={total:.8f}'))
    return results


def check_marginalization(seed: int, trials: int) -> List[CheckResult]:
    model = IntensityModel(0.01, SpaceConfig(2))
    worst = 0.0
    for r2 in np.linspace(2.0, 30.0, 10):
        target = pdf_kth_nearest(r2, 2, model)
        value = quadrature(lambda r1: pdf_joint_intensity([r1, r2], 2, model) if 0 < r1 < r2 else 0.0,
                           0.0, float(r2), 1e-9 * target)
        worst = max(worst, abs(value / target - 1))
    return [CheckResult('joint-dos-marginalization-k2', worst < 1e-6, f'max_rel_err={worst:.3g}')]


# Estimator checks

def check_ml_certification(seed: int, trials: int) -> List[CheckResult]:
    gen = RngStream(seed, 30).generator()
    worst_joint = worst_wrong = 0.0
    for _ in range(100):
        n = int(gen.integers(2, 51))
        space = SpaceConfig(int(gen.integers(1, 4)))
        channel = ChannelParams(float(gen.uniform(0.1, 10)), float(gen.uniform(0.1, 10)), float(gen.uniform(2, 6)))
        lam = float(10 ** gen.uniform(-3, -1))
        r = sample_joint_dos_batch(lam, n, space, gen, 1)[0]
        samples = LocalPowerSamples(received_power(r, channel), channel)
        measures = samples.measures(space)

        closed = float(ide_ml_from_measures(measures, space.c_m))
        found = argmax_log_scale(lambda x: loglik_ide_joint(x, samples, space), closed * 1.7)
        worst_joint = max(worst_joint, abs(found / closed - 1))

        closed = float(ide_wrong_from_measures(measures, space.c_m))
        found = argmax_log_scale(lambda x: loglik_ide_wrong(x, samples, space), closed * 0.6)
        worst_wrong = max(worst_wrong, abs(found / closed - 1))

    return [
        CheckResult('ide-ml-argmax', worst_joint < ARGMAX_REL_TOL, f'max_rel_err={worst_joint:.3g}'),
        CheckResult('ide-wrong-argmax', worst_wrong < ARGMAX_REL_TOL, f'max_rel_err={worst_wrong:.3g}'),
    ]


def _ide_ratios(measures: np.ndarray, space: SpaceConfig, lam: float) -> np.ndarray:
    return np.column_stack([ide_ml_from_measures(measures, space.c_m), ide_from_measures(measures, space.c_m)]) / lam


def check_bias_factor(seed: int, trials: int) -> List[CheckResult]:
    space = SpaceConfig(2)
    lam = 0.01
    results = []
    for stream, n in enumerate((2, 5, 20), start=40):
        gen = RngStream(seed, stream).generator()
        ratios = _chunked(trials, lambda size, n=n, gen=gen: _ide_ratios(
            sample_joint_dos_batch(lam, n, space, gen, size) ** space.m, space, lam))
        results.append(_within_standard_errors(f'ide-ml-bias-n{n}', ratios[:, 0], ide_ml_bias_factor(n)))
        results.append(_within_standard_errors(f'ide-unbiased-n{n}', ratios[:, 1], 1.0))
    return results


def check_cde_unbiased(seed: int, trials: int) -> List[CheckResult]:
    space = SpaceConfig(2)
    lam, n = 0.01, 10
    results = []
    for stream, c in enumerate((1, 3), start=50):
        gen = RngStream(seed, stream).generator()
        ratios = _chunked(trials, lambda size, c=c, gen=gen: cde_from_measures(
            sample_kth_nearest(lam, c, space, gen, size * n).reshape(size, n) ** space.m, c, space.c_m) / lam)
        results.append(_within_standard_errors(f'cde-unbiased-c{c}', ratios, 1.0))
    return results


def check_fixed_range_overshoot(seed: int, trials: int) -> List[CheckResult]:
    space = SpaceConfig(2)
    n, radius = 50, 100.0
    gen = RngStream(seed, 60).generator()
    empirical = n / space.ball_volume(radius)
    overshoot = _chunked(trials, lambda size: ide_ml_from_measures(
        sample_uniform_ball_batch(n, radius, space, gen, size) ** space.m, space.c_m) > empirical)
    share = float(np.mean(overshoot))
    return [CheckResult('ide-ml-overshoots-in-range-density', bool(np.all(overshoot)), f'share={share:.6f}')]


SUITES: Dict[str, List[Callable[[int, int], List[CheckResult]]]] = {
    'distributions': [
        check_joint_dos_marginals,
        check_uniform_ball_order_statistics,
        check_power_marginal,
        check_normalization,
        check_marginalization,
    ],
    'estimators': [
        check_ml_certification,
        check_bias_factor,
        check_cde_unbiased,
        check_fixed_range_overshoot,
    ],
}
SUITES['all'] = SUITES['distributions'] + SUITES['estimators']


def run_suite(name: str, seed: int = settings.DEFAULT_SEED,
              trials: int = settings.DEFAULT_VALIDATION_TRIALS) -> List[CheckResult]:
    """
    Run every check of a named suite.

    A check that raises is reported as a failure instead of aborting the suite.

    Raises:
        KeyError: If the suite name is unknown.
    """
    if name not in SUITES:
        raise KeyError(f'Unknown suite {name!r}; expected one of {", ".join(SUITES)}')

    results = []
    for check in SUITES[name]:
        logger.info(f'Running {check.__name__}')
        try:
            results.extend(check(seed, trials))
        except DensityToolkitError as e:
            results.append(CheckResult(check.__name__, False, f'error: {e}'))
    return results
