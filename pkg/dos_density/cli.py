"""
Command-line front end.

Sub-commands:
    sweep-density   density sweep at a fixed sampling range
    sweep-range     range sweep at a fixed density
    estimate        density estimates from a file of received powers
    validate        run a validation suite
    sample          draw from one of the distance samplers

Exit codes: 0 success, 1 usage/config error, 2 runtime/data error,
3 validation-suite failure.
"""
import sys
import json
import logging
import argparse
from dataclasses import dataclass, field, asdict, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

from dos_density import __version__, settings
from dos_density.channel import ChannelParams, received_power
from dos_density.dos_analytics import FiniteBallModel
from dos_density.errors import (ConfigError, DensityToolkitError, InvalidParameterError,
                                RankViolationError, SampleParseError)
from dos_density.estimators import (CooperativePowerSamples, LocalPowerSamples, estimate_cde,
                                    estimate_local)
from dos_density.experiment import ExperimentConfig, ExperimentManager, MetricsReport
from dos_density.models import Conditioning, EstimatorType, SweepType
from dos_density.stochastic_geometry import (RngStream, SpaceConfig, sample_joint_dos,
                                             sample_kth_nearest, sample_ppp_distances,
                                             sample_uniform_ball_distances)
from dos_density.suites import SUITES, run_suite
from dos_density.utilities import format_float, parse_grid, utc_timestamp

logger = logging.getLogger(__name__)

SAMPLERS = ('kth-nearest', 'joint-dos', 'uniform-ball', 'kth-finite', 'ppp', 'kth-power')


class UsageError(DensityToolkitError):
    """Raised for missing or inconsistent command-line parameters"""
    pass


class ToolkitArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that exits with the toolkit's usage code."""
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(settings.EXIT_USAGE, f'{self.prog}: error: {message}\n')


@dataclass
class RunManifest:
    """
    Everything needed to reproduce an output file.

    Attributes:
        command (str): Sub-command that produced the outputs.
        config (dict): Echo of the experiment configuration.
        version (str): Toolkit version.
        base_seed (int): Root seed.
        timestamp (str): UTC creation time.
        outputs (list): Paths written by the run.
    """
    command: str
    config: Dict[str, Any]
    version: str = __version__
    base_seed: int = settings.DEFAULT_SEED
    timestamp: str = field(default_factory=utc_timestamp)
    outputs: List[str] = field(default_factory=list)

    def write(self, path: str):
        with open(path, 'w', encoding='utf-8') as fh:
            json.dump(asdict(self), fh, indent=2)
            fh.write('\n')
        logger.info(f'Manifest written to {path}')


# Parsing helpers

def load_power_samples(path: str) -> List[Tuple[int, float]]:
    """
    Read one power (watts, decimal text) per line.

    Blank lines and lines starting with '#' are skipped.

    Returns:
        list: (1-based line number, power) pairs in file order.

    Raises:
        SampleParseError: If a line is not a number.
    """
    samples = []
    with open(path, 'r', encoding='utf-8') as fh:
        for line_no, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text or text.startswith('#'):
                continue
            try:
                samples.append((line_no, float(text)))
            except ValueError:
                raise SampleParseError(f'{path}:{line_no}: not a number: {text!r}', line=line_no)
    return samples


def _parse_estimators(text: str) -> Tuple[EstimatorType, ...]:
    try:
        return tuple(EstimatorType.parse(name) for name in text.split(',') if name.strip())
    except ValueError as e:
        raise ConfigError(str(e))


def _channel_from_args(args, base: Optional[ChannelParams] = None) -> ChannelParams:
    base = base or ChannelParams()
    return ChannelParams(
        transmit_power=args.pt if args.pt is not None else base.transmit_power,
        constant=args.c_const if args.c_const is not None else base.constant,
        gamma=args.gamma if args.gamma is not None else base.gamma,
    )


def build_config(args, sweep: SweepType) -> ExperimentConfig:
    """
    Merge built-in defaults, an optional JSON config file and explicit flags.

    Flags win over the config file, which wins over environment defaults.
    """
    data: Dict[str, Any] = {'sweep': sweep.value}
    if args.config:
        with open(args.config, 'r', encoding='utf-8') as fh:
            try:
                data.update(json.load(fh))
            except json.JSONDecodeError as e:
                raise ConfigError(f'{args.config}: invalid JSON: {e}')

    base = ExperimentConfig.from_dict(data)
    if base.sweep != sweep:
        raise ConfigError(f'Config file describes a {base.sweep.value} sweep, not a {sweep.value} sweep')
    overrides: Dict[str, Any] = {}
    if args.grid is not None:
        try:
            overrides['grid'] = tuple(parse_grid(args.grid))
        except ValueError as e:
            raise ConfigError(str(e))
    if args.range is not None:
        overrides['fixed_range'] = args.range
    if args.lam is not None:
        overrides['fixed_density'] = args.lam
    if args.m is not None:
        overrides['space'] = SpaceConfig(args.m)
    overrides['channel'] = _channel_from_args(args, base.channel)
    if args.trials is not None:
        overrides['trials'] = args.trials
    if args.seed is not None:
        overrides['base_seed'] = args.seed
    if args.estimators is not None:
        overrides['estimators'] = _parse_estimators(args.estimators)
    if args.conditioning is not None:
        overrides['conditioning'] = Conditioning(args.conditioning)
    if args.rank is not None:
        overrides['rank'] = args.rank
    if args.fixed_count is not None:
        overrides['fixed_count'] = args.fixed_count
    if args.workers is not None:
        overrides['workers'] = args.workers

    return replace(base, **overrides)


# Commands

def _emit_report(report: MetricsReport, args, command: str) -> int:
    if args.out:
        csv_path, json_path, manifest_path = f'{args.out}.csv', f'{args.out}.json', f'{args.out}.manifest.json'
        report.to_csv(csv_path)
        report.to_json(json_path)
        RunManifest(command=command, config=report.config.to_dict(), base_seed=report.config.base_seed,
                    outputs=[csv_path, json_path]).write(manifest_path)
        logger.info(f'Report written to {csv_path} and {json_path}')
    elif args.format == 'json':
        sys.stdout.write(report.to_json() + '\n')
    else:
        sys.stdout.write(report.to_csv())
    return settings.EXIT_OK


def cmd_sweep_density(args) -> int:
    """Density sweep at a fixed sampling range."""
    cfg = build_config(args, SweepType.DENSITY)
    return _emit_report(ExperimentManager(cfg).sweep_density(), args, 'sweep-density')


def cmd_sweep_range(args) -> int:
    """Range sweep at a fixed density."""
    cfg = build_config(args, SweepType.RANGE)
    return _emit_report(ExperimentManager(cfg).sweep_range(), args, 'sweep-range')


def cmd_estimate(args) -> int:
    """
    Print every applicable estimate for a file of powers as one JSON line.

    Local mode runs the three individual estimators; cooperative mode runs
    the C-DE and needs --rank.
    """
    space = SpaceConfig(args.m if args.m is not None else settings.DEFAULT_DIMENSION)
    channel = _channel_from_args(args)
    samples = load_power_samples(args.samples)
    if not samples:
        raise SampleParseError(f'{args.samples}: no samples')

    powers = [value for _, value in samples]
    if args.mode == 'local':
        for (_, previous), (line_no, value) in zip(samples, samples[1:]):
            if not value < previous:
                raise RankViolationError(
                    f'{args.samples}:{line_no}: local powers must be strictly decreasing '
                    f'({value!r} after {previous!r})', line=line_no)
        estimates = estimate_local(LocalPowerSamples(powers, channel), space)
    else:
        if args.rank is None:
            raise UsageError('cooperative mode requires --rank')
        cde = estimate_cde(CooperativePowerSamples(powers, args.rank, channel), space)
        estimates = {EstimatorType.CDE: cde}

    for estimate in estimates.values():
        if estimate.degenerate:
            logger.warning(f'{estimate.estimator.value} is degenerate for {estimate.sample_size} sample(s); value is 0')

    sys.stdout.write(json.dumps({e.value: est.value for e, est in estimates.items()}) + '\n')
    return settings.EXIT_OK


def cmd_validate(args) -> int:
    """Run a validation suite; exit 3 if any check fails."""
    seed = args.seed if args.seed is not None else settings.DEFAULT_SEED
    trials = args.trials if args.trials is not None else settings.DEFAULT_VALIDATION_TRIALS
    if trials < 2:
        raise UsageError(f'--trials must be at least 2, got {trials}')
    results = run_suite(args.suite, seed=seed, trials=trials)
    for result in results:
        sys.stdout.write(result.line() + '\n')

    failed = [r for r in results if not r.passed]
    if failed:
        logger.error(f'{len(failed)} of {len(results)} checks failed')
        return settings.EXIT_VALIDATION_FAILED
    logger.info(f'All {len(results)} checks passed')
    return settings.EXIT_OK


def _require(args, *names):
    missing = [f'--{n.replace("_", "-")}' for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f'{args.distribution} needs {", ".join(missing)}')


def cmd_sample(args) -> int:
    """
    Draw `count` samples; joint samplers print one comma-separated tuple per line.
    """
    space = SpaceConfig(args.m if args.m is not None else settings.DEFAULT_DIMENSION)
    seed = args.seed if args.seed is not None else settings.DEFAULT_SEED
    gen = RngStream(seed).generator()
    name = args.distribution
    if args.count < 0:
        raise UsageError(f'--count must be non-negative, got {args.count}')

    if name == 'kth-nearest':
        _require(args, 'k', 'lam')
        rows = [[v] for v in sample_kth_nearest(args.lam, args.k, space, gen, args.count)]
    elif name == 'kth-power':
        _require(args, 'k', 'lam')
        r = sample_kth_nearest(args.lam, args.k, space, gen, args.count)
        rows = [[v] for v in received_power(r, _channel_from_args(args))]
    elif name == 'joint-dos':
        _require(args, 'k', 'lam')
        rows = [list(sample_joint_dos(args.lam, args.k, space, gen)) for _ in range(args.count)]
    elif name == 'uniform-ball':
        _require(args, 'nodes', 'range')
        rows = [list(sample_uniform_ball_distances(args.nodes, args.range, space, gen)) for _ in range(args.count)]
    elif name == 'kth-finite':
        _require(args, 'k', 'nodes', 'range')
        FiniteBallModel(args.nodes, args.range, space)
        if not 1 <= args.k <= args.nodes:
            raise UsageError(f'--k must lie in 1..{args.nodes}')
        rows = [[sample_uniform_ball_distances(args.nodes, args.range, space, gen)[args.k - 1]]
                for _ in range(args.count)]
    else:
        _require(args, 'lam', 'range')
        rows = [list(sample_ppp_distances(args.lam, args.range, space, gen)) for _ in range(args.count)]

    sys.stdout.write(''.join(','.join(format_float(v) for v in row) + '\n' for row in rows))
    return settings.EXIT_OK


# Parser

def _add_channel_flags(parser):
    parser.add_argument('--m', type=int, help='space dimension')
    parser.add_argument('--gamma', type=float, help='path-loss exponent')
    parser.add_argument('--pt', type=float, help='transmit power in watts')
    parser.add_argument('--c-const', dest='c_const', type=float, help='channel constant C')


def _add_sweep_flags(parser):
    _add_channel_flags(parser)
    parser.add_argument('--config', help='JSON file mirroring ExperimentConfig')
    parser.add_argument('--lambda', dest='lam', type=float, help='fixed density (range sweep)')
    parser.add_argument('--range', type=float, help='fixed sampling range in meters (density sweep)')
    parser.add_argument('--trials', type=int, help='trials per sweep point')
    parser.add_argument('--seed', type=int, help='base seed')
    parser.add_argument('--grid', help='comma list or start:step:stop')
    parser.add_argument('--estimators', help='comma list of cde,ide,ide-ml,ide-wrong')
    parser.add_argument('--rank', type=int, help='rank c of the samples shared with the C-DE')
    parser.add_argument('--conditioning', choices=[c.value for c in Conditioning])
    parser.add_argument('--fixed-count', dest='fixed_count', type=int, help='pin N in fixed-count mode')
    parser.add_argument('--workers', type=int, help='worker processes per sweep point')
    parser.add_argument('--out', help='output prefix; writes PREFIX.csv, PREFIX.json, PREFIX.manifest.json')
    parser.add_argument('--format', choices=['csv', 'json'], default='csv', help='stdout format without --out')


def build_parser() -> argparse.ArgumentParser:
    parser = ToolkitArgumentParser(prog='dos-density', description='Node density estimation toolkit')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('sweep-density', help='density sweep at a fixed range')
    _add_sweep_flags(p)
    p.set_defaults(handler=cmd_sweep_density)

    p = sub.add_parser('sweep-range', help='range sweep at a fixed density')
    _add_sweep_flags(p)
    p.set_defaults(handler=cmd_sweep_range)

    p = sub.add_parser('estimate', help='estimate density from a power sample file')
    p.add_argument('samples', help='file with one power in watts per line')
    p.add_argument('--mode', choices=['local', 'cooperative'], default='local')
    p.add_argument('--rank', type=int, help='common rank c (cooperative mode)')
    _add_channel_flags(p)
    p.set_defaults(handler=cmd_estimate)

    p = sub.add_parser('validate', help='run a validation suite')
    p.add_argument('suite', choices=sorted(SUITES))
    p.add_argument('--seed', type=int)
    p.add_argument('--trials', type=int, help='Monte Carlo trials per estimator check')
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser('sample', help='draw samples from a distance sampler')
    p.add_argument('distribution', choices=SAMPLERS)
    p.add_argument('-n', '--count', type=int, default=1)
    p.add_argument('--k', type=int, help='rank (number of ordered distances for joint-dos)')
    p.add_argument('--lambda', dest='lam', type=float)
    p.add_argument('--nodes', type=int, help='node count in the ball')
    p.add_argument('--range', type=float, help='ball radius in meters')
    p.add_argument('--seed', type=int)
    _add_channel_flags(p)
    p.set_defaults(handler=cmd_sample)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.LOG_LEVEL,
        format=settings.LOG_FORMAT,
        stream=sys.stderr,
    )

    try:
        return args.handler(args)
    except (UsageError, ConfigError, InvalidParameterError) as e:
        logger.error(str(e))
        return settings.EXIT_USAGE
    except (DensityToolkitError, OSError) as e:
        logger.error(str(e))
        return settings.EXIT_RUNTIME
