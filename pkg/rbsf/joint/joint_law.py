# -*- coding: utf-8 -*-
""" Joint law of the two ruin times, assembled from one-dimensional step probabilities """

import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from rbsf.bridge import psi_matrix, QTable
from rbsf.model import gamma_zero, ModelSpec
from rbsf.uniformization import build_kernel
from rbsf.utils import ConfigurationError, GammaTooSmallError, IndexRangeError, TruncationError

# relative slack so that e.g. 100 * 0.29 still lands on step 29
FLOOR_SLACK = 1e-12

CSV_HEADER = ('x', 'y', 'order1', 'order2', 'total', 'defect')


def step_floor(gamma: float, t: float) -> int:
    """
    step_floor - number of whole observation steps of rate gamma within time t

    :param gamma:
    :param t:
    :return:
    """
    return int(math.floor(gamma * t * (1.0 + FLOOR_SLACK)))


def _check_grid(grid: Sequence[float], name: str) -> Tuple[float, ...]:
    values = tuple(float(value) for value in grid)
    if not values:
        raise ConfigurationError(f'{name} is empty')
    if any(not math.isfinite(value) or value <= 0 for value in values):
        raise ConfigurationError(f'{name} must hold positive times')
    if any(left >= right for left, right in zip(values, values[1:])):
        raise ConfigurationError(f'{name} must be strictly ascending')
    return values


@dataclass(frozen=True, eq=False)
class StepPmfTable:
    """
    Step probabilities of one coordinate started in its initial state.
    p1[l]: ruin confirmed at step l before any switch; p2[l, n]: ruin confirmed at step n given the switch at step l
    """
    p1: np.ndarray
    p2: np.ndarray

    @property
    def n_max(self) -> int:
        """
        Largest step held by the table

        :return:
        """
        return self.p1.shape[0] - 1

    def p1_cumulative(self) -> np.ndarray:
        """
        Running sum of p1 over l

        :return:
        """
        return np.cumsum(self.p1)

    def p2_cumulative(self) -> np.ndarray:
        """
        Running sum of p2 over n, row l

        :return:
        """
        return np.cumsum(self.p2, axis=1)


@dataclass(frozen=True, eq=False)
class JointLawRequest:
    """
    Inputs of joint_cdf
    """
    spec: ModelSpec
    gamma: float
    x_grid: Tuple[float, ...]
    y_grid: Tuple[float, ...]
    n_max: int
    allow_truncation: bool = False
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'x_grid', _check_grid(self.x_grid, 'x grid'))
        object.__setattr__(self, 'y_grid', _check_grid(self.y_grid, 'y grid'))
        minimal = gamma_zero(self.spec)
        if not math.isfinite(self.gamma) or self.gamma <= minimal:
            raise GammaTooSmallError(self.gamma, minimal)
        if self.n_max < 2:
            raise IndexRangeError(f'n_max={self.n_max} must be at least 2')

    @property
    def required_steps(self) -> int:
        """
        Steps needed to cover every grid point without truncation

        :return:
        """
        return step_floor(self.gamma, max(self.x_grid[-1], self.y_grid[-1]))


@dataclass(frozen=True, eq=False)
class JointLawResult:  # pylint:disable=too-many-instance-attributes
    """
    Joint CDF values on the grid, split by which coordinate ruins first
    """
    gamma: float
    n_max: int
    x_grid: Tuple[float, ...]
    y_grid: Tuple[float, ...]
    order1: np.ndarray
    order2: np.ndarray
    total: np.ndarray
    marginal_tau1: np.ndarray
    truncation_defect: np.ndarray
    tables: Tuple[StepPmfTable, StepPmfTable] = field(repr=False)

    def rows(self) -> Iterator[Tuple[float, float, float, float, float, float]]:
        """
        rows - one CSV row per grid cell, x outer

        :return:
        """
        for ix, x in enumerate(self.x_grid):
            for iy, y in enumerate(self.y_grid):
                yield (x, y, float(self.order1[ix, iy]), float(self.order2[ix, iy]),
                       float(self.total[ix, iy]), float(self.truncation_defect[ix, iy]))


def _coordinate_table(table: QTable, initial: str, n_max: int) -> StepPmfTable:
    kernel = table.kernel
    row = kernel.row_of(initial)
    split = kernel.e_minus
    p1 = np.zeros(n_max + 1)
    p2 = np.zeros((n_max + 1, n_max + 1))
    for n in range(2, n_max + 1):
        for ell in range(1, n + 1):
            values = psi_matrix(table, ell, n).values[row]
            # a switch at the confirming step itself leaves the bridge in a pre-regime down-state
            p2[ell, n] = values[:split].sum() if ell == n else values[split:].sum()
        p1[n] = p2[n, n]
    p1.setflags(write=False)
    p2.setflags(write=False)
    return StepPmfTable(p1=p1, p2=p2)


def step_pmf_table(spec: ModelSpec, gamma: float, n_max: int, workers: int = 1,
                   logger: Optional[logging.Logger] = None) -> Tuple[StepPmfTable, StepPmfTable]:
    """
    step_pmf_table - p1 and p2 tables of both coordinates up to step n_max

    :param spec:
    :param gamma:
    :param n_max:
    :param workers:
    :param logger:
    :return:
    """
    if n_max < 2:
        raise IndexRangeError(f'n_max={n_max} must be at least 2')
    tables = []
    for coord in spec.coord:
        table = QTable(build_kernel(coord, gamma), workers=workers, logger=logger).fill(n_max)
        tables.append(_coordinate_table(table, coord.initial_state, n_max))
    return tables[0], tables[1]


def _one_order(first: StepPmfTable, second: StepPmfTable, x_steps: Sequence[int], y_steps: Sequence[int],
               n_max: int) -> Tuple[np.ndarray, np.ndarray]:
    s1 = first.p1_cumulative()
    c2 = second.p2_cumulative()
    weighted = first.p1[:, None] * c2
    # cumulative over l of p1(l) * C2(l, N)
    partial = np.cumsum(weighted, axis=0)
    tail = np.cumsum(first.p1 * np.clip(1.0 - c2[:, n_max], 0.0, None))
    values = np.zeros((len(x_steps), len(y_steps)))
    defect = np.zeros_like(values)
    for ix, lx in enumerate(x_steps):
        lx_cut = min(lx, n_max)
        for iy, ny in enumerate(y_steps):
            ny_cut = min(ny, n_max)
            if lx_cut >= 2 and ny_cut >= 2:
                values[ix, iy] = partial[lx_cut, ny_cut]
            if lx > n_max:
                defect[ix, iy] += max(1.0 - s1[n_max], 0.0)
            if ny > n_max and lx_cut >= 2:
                defect[ix, iy] += tail[lx_cut]
    return values, defect


def joint_cdf(req: JointLawRequest, logger: Optional[logging.Logger] = None) -> JointLawResult:
    """
    joint_cdf - P(tau1 <= x, tau2 <= y) on the request grid, for both ruin orders.
    Steps beyond n_max are cut and their mass bounded by the per-cell defect

    :param req:
    :param logger:
    :return:
    """
    required = req.required_steps
    if req.n_max < required:
        if not req.allow_truncation:
            raise TruncationError(f'n_max={req.n_max} does not cover the grid, {required} steps needed')
        if logger is not None:
            logger.warning(f'Truncating at n_max={req.n_max} while the grid needs {required} steps')
    tables = step_pmf_table(req.spec, req.gamma, req.n_max, workers=req.workers, logger=logger)
    x_steps = [step_floor(req.gamma, x) for x in req.x_grid]
    y_steps = [step_floor(req.gamma, y) for y in req.y_grid]
    order1, defect1 = _one_order(tables[0], tables[1], x_steps, y_steps, req.n_max)
    order2, defect2 = _one_order(tables[1], tables[0], x_steps, y_steps, req.n_max)
    s1 = [table.p1_cumulative() for table in tables]
    marginal = np.array([1.0 - (1.0 - s1[0][min(lx, req.n_max)]) * (1.0 - s1[1][min(lx, req.n_max)])
                         for lx in x_steps])
    for array in (order1, order2, marginal):
        array.setflags(write=False)
    total = order1 + order2
    total.setflags(write=False)
    defect = defect1 + defect2
    defect.setflags(write=False)
    return JointLawResult(gamma=req.gamma, n_max=req.n_max, x_grid=req.x_grid, y_grid=req.y_grid,
                          order1=order1, order2=order2, total=total, marginal_tau1=marginal,
                          truncation_defect=defect, tables=tables)
