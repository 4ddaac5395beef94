#!/usr/bin/env python3
"""Ruin-dependent bivariate fluid process: joint ruin law and its Monte Carlo check"""

#
import argparse
import logging
import math
import sys
import time
from dataclasses import dataclass
from typing import Optional, Tuple
#
import humanize
import sentry_sdk
#
from rbsf.config import Config
from rbsf.joint import joint_cdf, step_floor, step_pmf_table, JointLawRequest, CSV_HEADER
from rbsf.log import conditional_log, setup_logger
from rbsf.model import parse_model, renormalize, validate, ModelSpec, ValidationReport
from rbsf.output.file import CSVFileWriter
from rbsf.simulator import (compare_with_recursion, convergence_report, default_horizon, empirical_joint_cdf,
                            sample_exact_path, sample_many, sample_pasting, sample_row, ConvergenceBudget,
                            COMPARE_HEADER, CONVERGENCE_HEADER, SAMPLE_HEADER)
from rbsf.utils import log_exception, ConfigurationError, FluidRuinError
#

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2

# subcommand -> fields that must be set
REQUIRED = {
    'validate': (),
    'psi': ('gamma', 'n_max'),
    'joint': ('gamma', 'x_grid', 'y_grid'),
    'simulate': ('samples',),
    'compare': ('gamma', 'samples', 'x_grid', 'y_grid'),
    'converge': ('gammas', 'samples'),
}


@dataclass(frozen=True)
class RunConfig:  # pylint:disable=too-many-instance-attributes
    """
    RunConfig - command line merged over the configuration file
    """
    subcommand: str
    model: str
    out: str = '-'
    gamma: Optional[float] = None
    n_max: Optional[int] = None
    x_grid: Tuple[float, ...] = ()
    y_grid: Tuple[float, ...] = ()
    samples: Optional[int] = None
    seed: int = 1
    threads: int = 1
    workers: int = 1
    allow_truncation: bool = False
    renormalize_inputs: bool = False
    epsilon: float = 0.5
    q: float = 1.0
    gammas: Tuple[float, ...] = ()
    horizon: Optional[float] = None
    se_factor: float = 4.0
    tolerance: float = 1e-12
    chunk: int = 250

    def __post_init__(self):
        for name in REQUIRED[self.subcommand]:
            if getattr(self, name) in (None, ()):
                raise ConfigurationError(f'{self.subcommand} requires --{name.replace("_", "-")}')
        if self.samples is not None and self.samples < 1:
            raise ConfigurationError(f'--samples={self.samples} must be positive')
        if self.threads < 1 or self.workers < 1:
            raise ConfigurationError('thread and worker counts must be positive')
        if self.horizon is not None and not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ConfigurationError(f'--horizon={self.horizon} must be a positive time')
        if self.se_factor < 0:
            raise ConfigurationError(f'--se-factor={self.se_factor} must not be negative')

    def steps(self) -> int:
        """
        steps - explicit n_max, otherwise the steps needed by the grids

        :return:
        """
        if self.n_max is not None:
            return self.n_max
        return max(step_floor(self.gamma, max(self.x_grid + self.y_grid)), 2)


def parse_list(value: Optional[str], name: str) -> Tuple[float, ...]:
    """
    parse_list - comma separated numbers

    :param value:
    :param name:
    :return:
    """
    if value is None:
        return ()
    try:
        return tuple(float(item) for item in value.split(',') if item.strip())
    except ValueError as exc:
        raise ConfigurationError(f'--{name}: {exc}') from exc


def run_config(args, config: Config) -> RunConfig:
    """
    run_config - merge parsed arguments over configuration defaults

    :param args:
    :param config:
    :return:
    """
    threads = args.threads or config.enforce_type(int, config.Simulation.Threads)
    workers = args.threads or config.enforce_type(int, config.Recursion.Workers)
    se_factor = getattr(args, 'se_factor', None)
    return RunConfig(
        subcommand=args.subcommand,
        model=args.model,
        out=args.out,
        gamma=getattr(args, 'gamma', None),
        n_max=getattr(args, 'n_max', None),
        x_grid=parse_list(getattr(args, 'x_grid', None), 'x-grid'),
        y_grid=parse_list(getattr(args, 'y_grid', None), 'y-grid'),
        samples=getattr(args, 'samples', None),
        seed=args.seed,
        threads=threads,
        workers=workers,
        allow_truncation=getattr(args, 'allow_truncation', False),
        renormalize_inputs=args.renormalize_inputs,
        epsilon=getattr(args, 'epsilon', 0.5),
        q=getattr(args, 'q', 1.0),
        gammas=parse_list(getattr(args, 'gammas', None), 'gammas'),
        horizon=getattr(args, 'horizon', None),
        se_factor=config.enforce_type(float, config.Compare.SEFactor) if se_factor is None else se_factor,
        tolerance=config.enforce_type(float, config.Model.Tolerance),
        chunk=config.enforce_type(int, config.Simulation.ChunkSize),
    )


def load_model(run_cfg: RunConfig, logger: logging.Logger) -> Tuple[ModelSpec, ValidationReport]:
    """
    load_model - read, parse, optionally renormalize and validate the model file

    :param run_cfg:
    :param logger:
    :return: model and validation report
    """
    with open(run_cfg.model, 'rb') as model_file:
        spec = parse_model(model_file.read())
    if run_cfg.renormalize_inputs:
        spec, changes = renormalize(spec)
        for change in changes:
            logger.warning(f'Renormalized {change}')
    return spec, validate(spec, run_cfg.tolerance)


def horizon_of(run_cfg: RunConfig, spec: ModelSpec, config: Config) -> float:
    """
    horizon_of - explicit horizon or the drift based default

    :param run_cfg:
    :param spec:
    :param config:
    :return:
    """
    if run_cfg.horizon is not None:
        return run_cfg.horizon
    return default_horizon(spec, drifts=config.enforce_type(float, config.Simulation.HorizonDrifts),
                           fallback=config.enforce_type(float, config.Simulation.HorizonFallback),
                           tolerance=run_cfg.tolerance)


def writer(run_cfg: RunConfig, logger: logging.Logger) -> CSVFileWriter:
    """
    writer - CSV writer bound to --out

    :param run_cfg:
    :param logger:
    :return:
    """
    csv_writer = CSVFileWriter(run_cfg.out)
    csv_writer.set_logger(logger)
    return csv_writer


def cmd_validate(run_cfg: RunConfig, spec: ModelSpec, config: Config, logger: logging.Logger) -> int:
    """
    cmd_validate - validation report, one issue per line

    :return:
    """
    del config
    report = validate(spec, run_cfg.tolerance)
    for issue in report.issues:
        print(issue)
    errors = len(report.errors)
    logger.info(f'{run_cfg.model}: {errors} error(s), {len(report.issues) - errors} warning(s)')
    return EXIT_OK if report.ok else EXIT_DOMAIN


def cmd_psi(run_cfg: RunConfig, spec: ModelSpec, config: Config, logger: logging.Logger) -> int:
    """
    cmd_psi - step probability tables of both coordinates

    :return:
    """
    del config
    tables = step_pmf_table(spec, run_cfg.gamma, run_cfg.steps(), workers=run_cfg.workers, logger=logger)
    rows = ((coord, ell, n, float(table.p2[ell, n]))
            for coord, table in enumerate(tables, start=1)
            for n in range(2, table.n_max + 1)
            for ell in range(1, n + 1))
    writer(run_cfg, logger).write(('coord', 'ell', 'n', 'value'), rows)
    return EXIT_OK


def cmd_joint(run_cfg: RunConfig, spec: ModelSpec, config: Config, logger: logging.Logger) -> int:
    """
    cmd_joint - joint CDF of both ruin times on the grid

    :return:
    """
    del config
    request = JointLawRequest(spec=spec, gamma=run_cfg.gamma, x_grid=run_cfg.x_grid, y_grid=run_cfg.y_grid,
                              n_max=run_cfg.steps(), allow_truncation=run_cfg.allow_truncation,
                              workers=run_cfg.workers)
    result = joint_cdf(request, logger=logger)
    logger.info(f'Joint law at gamma={run_cfg.gamma:g} over {humanize.intcomma(result.total.size)} cell(s), '
                f'largest truncation defect {result.truncation_defect.max():.3g}')
    writer(run_cfg, logger).write(CSV_HEADER, result.rows())
    return EXIT_OK


def cmd_simulate(run_cfg: RunConfig, spec: ModelSpec, config: Config, logger: logging.Logger) -> int:
    """
    cmd_simulate - dump exact paths, or pasting samples when --gamma is given

    :return:
    """
    horizon = horizon_of(run_cfg, spec, config)
    if run_cfg.gamma is None:
        samples = sample_many(sample_exact_path, spec, run_cfg.seed, run_cfg.samples, threads=run_cfg.threads,
                              logger=logger, horizon=horizon)
    else:
        samples = sample_many(sample_pasting, spec, run_cfg.seed, run_cfg.samples, threads=run_cfg.threads,
                              logger=logger, gamma=run_cfg.gamma, horizon=horizon, chunk=run_cfg.chunk)
    censored = sum(1 for sample in samples if getattr(sample, 'base', sample).censored)
    logger.info(f'Horizon {horizon:g}: {humanize.intcomma(censored)} of {humanize.intcomma(len(samples))} '
                f'samples censored ({censored / len(samples):.2%})')
    writer(run_cfg, logger).write(SAMPLE_HEADER, (sample_row(sample) for sample in samples))
    return EXIT_OK


def cmd_compare(run_cfg: RunConfig, spec: ModelSpec, config: Config, logger: logging.Logger) -> int:
    """
    cmd_compare - recursion against simulation, exit status by tolerance band

    :return:
    """
    request = JointLawRequest(spec=spec, gamma=run_cfg.gamma, x_grid=run_cfg.x_grid, y_grid=run_cfg.y_grid,
                              n_max=run_cfg.steps(), allow_truncation=run_cfg.allow_truncation,
                              workers=run_cfg.workers)
    law = joint_cdf(request, logger=logger)
    samples = sample_many(sample_exact_path, spec, run_cfg.seed, run_cfg.samples, threads=run_cfg.threads,
                          logger=logger, horizon=horizon_of(run_cfg, spec, config))
    empirical = empirical_joint_cdf(samples, run_cfg.x_grid, run_cfg.y_grid, logger=logger)
    comparison = compare_with_recursion(law, empirical, run_cfg.se_factor)
    writer(run_cfg, logger).write(COMPARE_HEADER, comparison.rows())
    outside = int((~comparison.within).sum())
    logger.info(f'{outside} of {comparison.within.size} cell(s) outside {run_cfg.se_factor:g} SE + defect, '
                f'censored fraction {empirical.censored_fraction:.4f}')
    return EXIT_OK if comparison.ok else EXIT_DOMAIN


def cmd_converge(run_cfg: RunConfig, spec: ModelSpec, config: Config, logger: logging.Logger) -> int:
    """
    cmd_converge - observation scheme diagnostics per gamma

    :return:
    """
    budget = ConvergenceBudget(epsilon=run_cfg.epsilon, q=run_cfg.q, gammas=run_cfg.gammas)
    rows = convergence_report(spec, budget, run_cfg.samples, run_cfg.seed, horizon_of(run_cfg, spec, config),
                              threads=run_cfg.threads, chunk=run_cfg.chunk, logger=logger)
    writer(run_cfg, logger).write(CONVERGENCE_HEADER, (row.row() for row in rows))
    return EXIT_OK


def run(args) -> int:
    """
    run - set up configuration and logging, validate the model, dispatch the subcommand

    :param args:
    :return: exit status
    """
    config = Config(config_path=args.config)
    config.read()
    debug = args.debug or config.enforce_type(bool, config.DEFAULT.Debug)
    logger = setup_logger('fluidruin', logging.DEBUG if debug else logging.INFO)
    # setup APM
    if config.enforce_type(bool, config.DEFAULT.SentryEnabled):
        sentry_sdk.init(dsn=config.DEFAULT.SentryDSN, traces_sample_rate=1.0)
    start = time.time()
    try:
        run_cfg = run_config(args, config)
        conditional_log(f'Run configuration: {run_cfg}', logger, debug)
        spec, report = load_model(run_cfg, logger)
        if run_cfg.subcommand != 'validate':
            for issue in report.errors:
                logger.error(f'{issue}')
            if not report.ok:
                return EXIT_DOMAIN
        status = args.func(run_cfg, spec, config, logger)
    except OSError as exc:
        log_exception(logger, exc, 'I/O error', level='debug')
        logger.error(f'{exc}')
        return EXIT_IO
    except FluidRuinError as exc:
        log_exception(logger, exc, f'{args.subcommand} failed', level='debug')
        logger.error(f'{exc}')
        return EXIT_DOMAIN
    conditional_log(f'{args.subcommand} finished in {humanize.precisedelta(time.time() - start)}', logger, debug)
    return status


def cmd():
    """
    cmd - Run argument parser and process command line parameters

    :return:
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="path to config", default="./fluidruin.ini")
    common.add_argument("-m", "--model", help="path to JSON model", required=True)
    common.add_argument("-o", "--out", help="CSV destination, - for stdout", default="-")
    common.add_argument("--seed", help="root seed", type=int, default=1)
    common.add_argument("--threads", help="worker thread cap", type=int, default=None)
    common.add_argument("--debug", help="debug logging", action="store_true")
    common.add_argument("--renormalize-inputs", help="repair generator and switch row sums",
                        action="store_true")

    parser = argparse.ArgumentParser(description=__doc__)
    subparser = parser.add_subparsers(title="commands", help="commands", dest="subcommand", required=True)

    checker = subparser.add_parser("validate", help="validate model", parents=[common])
    checker.set_defaults(func=cmd_validate)
    #
    psi = subparser.add_parser("psi", help="step probability tables", parents=[common])
    psi.add_argument("--gamma", type=float, help="observation rate")
    psi.add_argument("--n-max", type=int, help="largest step")
    psi.set_defaults(func=cmd_psi)
    #
    joint = subparser.add_parser("joint", help="joint CDF of the ruin times", parents=[common])
    joint.add_argument("--gamma", type=float, help="observation rate")
    joint.add_argument("--n-max", type=int, help="step truncation")
    joint.add_argument("--x-grid", help="comma separated times for tau1")
    joint.add_argument("--y-grid", help="comma separated times for tau2")
    joint.add_argument("--allow-truncation", action="store_true", help="accept n-max below the grid")
    joint.set_defaults(func=cmd_joint)
    #
    simulate = subparser.add_parser("simulate", help="dump simulated samples", parents=[common])
    simulate.add_argument("--samples", type=int, help="number of samples")
    simulate.add_argument("--gamma", type=float, help="observation rate, enables pasting")
    simulate.add_argument("--horizon", type=float, help="censoring horizon")
    simulate.set_defaults(func=cmd_simulate)
    #
    compare = subparser.add_parser("compare", help="recursion against simulation", parents=[common])
    compare.add_argument("--gamma", type=float, help="observation rate")
    compare.add_argument("--n-max", type=int, help="step truncation")
    compare.add_argument("--x-grid", help="comma separated times for tau1")
    compare.add_argument("--y-grid", help="comma separated times for tau2")
    compare.add_argument("--samples", type=int, help="number of samples")
    compare.add_argument("--horizon", type=float, help="censoring horizon")
    compare.add_argument("--se-factor", type=float, help="band width in standard errors")
    compare.add_argument("--allow-truncation", action="store_true", help="accept n-max below the grid")
    compare.set_defaults(func=cmd_compare)
    #
    converge = subparser.add_parser("converge", help="observation scheme diagnostics", parents=[common])
    converge.add_argument("--gammas", help="comma separated ascending rates")
    converge.add_argument("--samples", type=int, help="samples per rate")
    converge.add_argument("--epsilon", type=float, default=0.5, help="budget exponent in (0, 1)")
    converge.add_argument("--q", type=float, default=1.0, help="budget order")
    converge.add_argument("--horizon", type=float, help="censoring horizon")
    converge.set_defaults(func=cmd_converge)
    #
    args = parser.parse_args(sys.argv[1:])
    sys.exit(run(args))


if __name__ == '__main__':
    cmd()
