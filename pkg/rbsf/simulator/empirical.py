# -*- coding: utf-8 -*-
""" Empirical joint CDF of simulated ruin times """

import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from rbsf.joint import JointLawResult
from rbsf.utils import SamplingError

from .paths import PathSample

COMPARE_HEADER = ('x', 'y', 'recursion', 'empirical', 'abs_diff', 'se', 'defect', 'band', 'within')


def binomial_se(p: np.ndarray, count: int) -> np.ndarray:
    """
    binomial_se - standard error of a frequency estimated from count trials

    :param p:
    :param count:
    :return:
    """
    return np.sqrt(np.clip(p * (1.0 - p), 0.0, None) / count)


def base_sample(sample) -> PathSample:
    """
    base_sample - the exact path behind a path or pasting sample

    :param sample:
    :return:
    """
    return getattr(sample, 'base', sample)


@dataclass(frozen=True, eq=False)
class EmpiricalJointCdf:  # pylint:disable=too-many-instance-attributes
    """
    Frequencies of {tau1 <= x, tau2 <= y} split by first ruiner, censored samples count as non-events
    """
    x_grid: Tuple[float, ...]
    y_grid: Tuple[float, ...]
    count: int
    censored_fraction: float
    order1: np.ndarray
    order2: np.ndarray
    total: np.ndarray
    se_total: np.ndarray
    marginal_tau1: np.ndarray

    @property
    def all_censored(self) -> bool:
        """
        True when no sample reached both ruins

        :return:
        """
        return self.censored_fraction >= 1.0


def empirical_joint_cdf(samples: Sequence, x_grid: Sequence[float], y_grid: Sequence[float],
                        logger: Optional[logging.Logger] = None) -> EmpiricalJointCdf:
    """
    empirical_joint_cdf - grid estimates with binomial standard errors

    :param samples: PathSample or PastingSample items
    :param x_grid:
    :param y_grid:
    :param logger:
    :return:
    """
    if not samples:
        raise SamplingError('empty sample set')
    bases = [base_sample(sample) for sample in samples]
    count = len(bases)
    tau1 = np.array([sample.tau1 for sample in bases])
    tau2 = np.array([sample.tau2 for sample in bases])
    first = np.array([sample.first_ruiner for sample in bases])
    censored = float(np.mean([sample.censored for sample in bases]))
    xs, ys = np.asarray(x_grid, dtype=float), np.asarray(y_grid, dtype=float)
    hit1 = tau1[:, None] <= xs[None, :]
    hit2 = (tau2[:, None] <= ys[None, :]).astype(float)
    orders = []
    for k in (1, 2):
        events = (hit1 & (first == k)[:, None]).astype(float)
        orders.append(events.T @ hit2 / count)
    total = orders[0] + orders[1]
    marginal = hit1.mean(axis=0)
    if censored >= 1.0 and logger is not None:
        logger.warning(f'All {count} samples are censored')
    return EmpiricalJointCdf(
        x_grid=tuple(float(x) for x in xs), y_grid=tuple(float(y) for y in ys), count=count,
        censored_fraction=censored, order1=orders[0], order2=orders[1], total=total,
        se_total=binomial_se(total, count), marginal_tau1=marginal,
    )


@dataclass(frozen=True, eq=False)
class Comparison:
    """
    Per-cell agreement of recursion and simulation
    """
    law: JointLawResult
    empirical: EmpiricalJointCdf
    se: np.ndarray
    band: np.ndarray

    @property
    def within(self) -> np.ndarray:
        """
        Cells whose difference stays inside the band

        :return:
        """
        return np.abs(self.law.total - self.empirical.total) <= self.band

    @property
    def ok(self) -> bool:
        """
        True when every cell is within its band

        :return:
        """
        return bool(np.all(self.within))

    def rows(self) -> Iterator[tuple]:
        """
        rows - CSV rows in COMPARE_HEADER order

        :return:
        """
        within = self.within
        for ix, x in enumerate(self.law.x_grid):
            for iy, y in enumerate(self.law.y_grid):
                recursion, empirical = self.law.total[ix, iy], self.empirical.total[ix, iy]
                yield (x, y, float(recursion), float(empirical), float(abs(recursion - empirical)),
                       float(self.se[ix, iy]), float(self.law.truncation_defect[ix, iy]),
                       float(self.band[ix, iy]), bool(within[ix, iy]))


def compare_with_recursion(law: JointLawResult, empirical: EmpiricalJointCdf, se_factor: float) -> Comparison:
    """
    compare_with_recursion - band = se_factor * SE + truncation defect per cell.
    SE takes the larger of the empirical and the recursion-implied binomial error, so cells
    with no observed event are not judged against a zero width band

    :param law:
    :param empirical:
    :param se_factor:
    :return:
    """
    if law.x_grid != empirical.x_grid or law.y_grid != empirical.y_grid:
        raise SamplingError('recursion and simulation grids differ')
    se = np.maximum(empirical.se_total, binomial_se(np.clip(law.total, 0.0, 1.0), empirical.count))
    return Comparison(law=law, empirical=empirical, se=se, band=se_factor * se + law.truncation_defect)
