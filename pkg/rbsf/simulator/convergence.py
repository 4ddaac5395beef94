# -*- coding: utf-8 -*-
""" Convergence diagnostics of the Poisson observation scheme """

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import humanize
import numpy as np
from scipy import stats

from rbsf.model import ModelSpec
from rbsf.utils import ConfigurationError, SamplingError

from .pasting import sample_pasting, DEFAULT_CHUNK, PastingSample
from .runner import sample_many

MIN_SAMPLES = 100

METRICS = ('sigma1', 'sigma2', 'tilde_tau1', 'tilde_tau2', 'ell', 'n')

CONVERGENCE_HEADER = (('gamma', 'delta', 'k_budget', 'samples', 'uncensored', 'compat_fail',
                       'violations_abs', 'violations_printed', 'exceed_delta',
                       'overshoot_mean', 'overshoot_se', 'ks_statistic', 'ks_pvalue')
                      + tuple(f'{prefix}_{metric}' for metric in METRICS for prefix in ('med', 'q90')))


@dataclass(frozen=True)
class ConvergenceBudget:
    """
    Observation-scheme budget. The distance bound and the time budget use a unit constant
    """
    epsilon: float
    q: float
    gammas: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, 'gammas', tuple(float(gamma) for gamma in self.gammas))
        if not 0 < self.epsilon < 1:
            raise ConfigurationError(f'epsilon={self.epsilon} must lie in (0, 1)')
        if not self.q > 0:
            raise ConfigurationError(f'q={self.q} must be positive')
        if not self.gammas:
            raise ConfigurationError('gamma list is empty')
        if any(gamma <= 1 for gamma in self.gammas):
            raise ConfigurationError('every gamma must be above 1')
        if any(left >= right for left, right in zip(self.gammas, self.gammas[1:])):
            raise ConfigurationError('gamma list must be strictly ascending')

    def delta(self, gamma: float) -> float:
        """
        delta - distance within which the switch observations fall, log(g) g^(-1/2+eps/2)

        :param gamma:
        :return:
        """
        return math.log(gamma) * gamma ** (-0.5 + self.epsilon / 2)

    def k_budget(self, gamma: float) -> float:
        """
        k_budget - time budget floor(g^(1+eps))/g - log(g) g^(-1/2+eps/2), of order g^eps

        :param gamma:
        :return:
        """
        return math.floor(gamma ** (1 + self.epsilon)) / gamma - self.delta(gamma)

    def order_issues(self) -> List[str]:
        """
        order_issues - neighbouring rates where delta does not shrink or the time budget does not grow.
        delta only decreases once log(g) > 2 / (1 - eps)

        :return:
        """
        issues = []
        for left, right in zip(self.gammas, self.gammas[1:]):
            if self.delta(right) >= self.delta(left):
                issues.append(f'delta grows from {self.delta(left):.4g} at gamma={left:g} '
                              f'to {self.delta(right):.4g} at gamma={right:g}')
            if self.k_budget(right) <= self.k_budget(left):
                issues.append(f'time budget shrinks from {self.k_budget(left):.4g} at gamma={left:g} '
                              f'to {self.k_budget(right):.4g} at gamma={right:g}')
        return issues


@dataclass(frozen=True)
class OvershootStatistics:
    """
    Law of sigma1_star - tau1 against Exp(gamma)
    """
    count: int
    mean: float
    se: float
    expected_mean: float
    ks_statistic: float
    ks_pvalue: float


def overshoot_statistics(samples: Sequence[PastingSample], gamma: float) -> OvershootStatistics:
    """
    overshoot_statistics - mean, standard error and KS test of the overshoots

    :param samples:
    :param gamma:
    :return:
    """
    overshoots = np.array([sample.overshoot for sample in samples if math.isfinite(sample.base.tau1)])
    if overshoots.size < 2:
        raise SamplingError('at least two uncensored samples are needed')
    test = stats.kstest(overshoots, 'expon', args=(0.0, 1.0 / gamma))
    return OvershootStatistics(
        count=int(overshoots.size),
        mean=float(overshoots.mean()),
        se=float(overshoots.std(ddof=1) / math.sqrt(overshoots.size)),
        expected_mean=1.0 / gamma,
        ks_statistic=float(test.statistic),
        ks_pvalue=float(test.pvalue),
    )


def _quantiles(values: List[float]) -> Tuple[float, float]:
    finite = np.array([value for value in values if math.isfinite(value)])
    if finite.size == 0:
        return math.nan, math.nan
    median, q90 = np.quantile(finite, [0.5, 0.9])
    return float(median), float(q90)


def _distances(sample: PastingSample) -> Dict[str, float]:
    base, gamma = sample.base, sample.gamma
    n_star = math.nan if sample.n_star is None else sample.n_star
    return {
        'sigma1': abs(base.tau1 - sample.sigma1_star),
        'sigma2': abs(base.tau1 - sample.sigma2_star),
        # incompatible pastings keep tilde_tau1 == tau1 and are left out
        'tilde_tau1': abs(sample.tilde_tau1 - base.tau1) if sample.compat_ok else math.nan,
        'tilde_tau2': abs(sample.tilde_tau2 - base.tau2),
        'ell': abs(sample.ell_star / gamma - base.tau1),
        'n': abs(n_star / gamma - base.tau2),
    }


@dataclass(frozen=True)
class ConvergenceRow:  # pylint:disable=too-many-instance-attributes
    """
    Diagnostics of one gamma
    """
    gamma: float
    delta: float
    k_budget: float
    samples: int
    uncensored: int
    compat_fail: float
    violations_abs: int
    violations_printed: int
    exceed_delta: float
    overshoot: Optional[OvershootStatistics]
    quantiles: Dict[str, Tuple[float, float]] = field(default_factory=dict)

    def row(self) -> tuple:
        """
        row - CSV row in CONVERGENCE_HEADER order

        :return:
        """
        overshoot = self.overshoot
        head = (self.gamma, self.delta, self.k_budget, self.samples, self.uncensored, self.compat_fail,
                self.violations_abs, self.violations_printed, self.exceed_delta,
                overshoot.mean if overshoot else None, overshoot.se if overshoot else None,
                overshoot.ks_statistic if overshoot else None, overshoot.ks_pvalue if overshoot else None)
        return head + tuple(value for metric in METRICS for value in self.quantiles[metric])


def summarize(samples: Sequence[PastingSample], gamma: float, budget: ConvergenceBudget) -> ConvergenceRow:
    """
    summarize - diagnostics of a set of pasting samples drawn at one gamma

    :param samples:
    :param gamma:
    :param budget:
    :return:
    """
    ruined = [sample for sample in samples if math.isfinite(sample.base.tau1)]
    compatible = [sample for sample in ruined if sample.compat_ok]
    delta, k_budget = budget.delta(gamma), budget.k_budget(gamma)
    exceed = sum(1 for sample in ruined
                 if sample.base.tau1 <= k_budget
                 and max(abs(sample.base.tau1 - sample.sigma1_star), abs(sample.base.tau1 - sample.sigma2_star)) > delta)
    distances = [_distances(sample) for sample in ruined]
    return ConvergenceRow(
        gamma=gamma,
        delta=delta,
        k_budget=k_budget,
        samples=len(samples),
        uncensored=len(ruined),
        compat_fail=1.0 - len(compatible) / len(ruined) if ruined else math.nan,
        violations_abs=sum(1 for sample in compatible if sample.violates_abs),
        violations_printed=sum(1 for sample in compatible if sample.violates_printed),
        exceed_delta=exceed / len(samples),
        overshoot=overshoot_statistics(ruined, gamma) if len(ruined) >= 2 else None,
        quantiles={metric: _quantiles([item[metric] for item in distances]) for metric in METRICS},
    )


def convergence_report(spec: ModelSpec, budget: ConvergenceBudget, samples: int, seed: int, horizon: float,
                       threads: int = 1, chunk: int = DEFAULT_CHUNK,
                       logger: Optional[logging.Logger] = None) -> List[ConvergenceRow]:
    """
    convergence_report - one diagnostics row per gamma of the budget.
    Every gamma reuses the same root seed, so the exact paths are shared across rows

    :param spec:
    :param budget:
    :param samples:
    :param seed:
    :param horizon:
    :param threads:
    :param chunk:
    :param logger:
    :return:
    """
    if samples < MIN_SAMPLES:
        raise SamplingError(f'convergence report needs at least {MIN_SAMPLES} samples, got {samples}')
    if logger is not None:
        for issue in budget.order_issues():
            logger.warning(f'Budget is not monotone: {issue}')
    rows = []
    for gamma in budget.gammas:
        drawn = sample_many(sample_pasting, spec, seed, samples, threads=threads, logger=logger,
                            gamma=gamma, horizon=horizon, chunk=chunk)
        row = summarize(drawn, gamma, budget)
        if logger is not None:
            logger.info(f'gamma={gamma:g}: {humanize.intcomma(row.uncensored)} ruined paths, '
                        f'compatibility failures {row.compat_fail:.4f}, '
                        f'{row.violations_abs} pathwise bound violation(s)')
        rows.append(row)
    return rows
