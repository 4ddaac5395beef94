# -*- coding: utf-8 -*-
""" Exact sample paths of the bivariate ruin-dependent fluid process """

import bisect
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from rbsf.model import CoordinateModel, ModelSpec
from rbsf.utils import ConfigurationError, SamplingError

PRE = 'pre'
POST = 'post'

STREAMS = 4


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Piecewise-linear level path. Segment j runs over [times[j], times[j+1]) in states[j] with slopes[j]
    """
    times: np.ndarray
    levels: np.ndarray
    states: Tuple[str, ...]
    slopes: np.ndarray
    regimes: Tuple[str, ...]

    @property
    def end(self) -> float:
        """
        Last simulated instant

        :return:
        """
        return float(self.times[-1])

    def level_at(self, t):
        """
        level_at - level at time(s) t, valid on [0, end]

        :param t:
        :return:
        """
        return np.interp(t, self.times, self.levels)

    def segment_index(self, t: float) -> int:
        """
        segment_index - segment holding time t, right-continuous

        :param t:
        :return:
        """
        return min(max(int(np.searchsorted(self.times, t, side='right')) - 1, 0), len(self.states) - 1)

    def state_at(self, t: float) -> str:
        """
        state_at - environmental state at time t

        :param t:
        :return:
        """
        return self.states[self.segment_index(t)]


@dataclass(frozen=True, eq=False)
class PathSample:  # pylint:disable=too-many-instance-attributes
    """
    One simulated bivariate path. first_ruiner is 1 or 2, 0 when no ruin happened before the horizon.
    State tuples are in coordinate order, grids hold the uniformization epochs when they were simulated
    """
    seed: int
    trajectories: Tuple[Trajectory, Trajectory]
    tau1: float
    tau2: float
    first_ruiner: int
    censored: bool
    horizon: float
    pre_switch_states: Optional[Tuple[str, str]] = None
    switch_states: Optional[Tuple[str, str]] = None
    double_hit: bool = False
    grids: Optional[Tuple[np.ndarray, np.ndarray]] = None

    @property
    def second_ruiner(self) -> int:
        """
        Coordinate that ruins second, 0 without a first ruin

        :return:
        """
        return 3 - self.first_ruiner if self.first_ruiner else 0


class TransitionTable:
    """
    TransitionTable - holding rates and cumulative next-state rows of one regime.
    Without gamma0 it is the jump chain of the generator, with gamma0 the uniformized kernel I + A/gamma0
    """

    def __init__(self, generator: np.ndarray, gamma0: Optional[float] = None):
        size = generator.shape[0]
        if gamma0 is None:
            self.rates = [max(-float(generator[idx, idx]), 0.0) for idx in range(size)]
            jumps = np.array(generator, dtype=float)
            np.fill_diagonal(jumps, 0.0)
            rows = [jumps[idx] / rate if rate > 0 else np.eye(size)[idx] for idx, rate in enumerate(self.rates)]
        else:
            self.rates = [float(gamma0)] * size
            kernel = np.eye(size) + generator / gamma0 if gamma0 > 0 else np.eye(size)
            rows = list(np.clip(kernel, 0.0, None))
        self.rows = [cumulative_row(row) for row in rows]


def cumulative_row(row: Sequence[float]) -> List[float]:
    """
    cumulative_row - normalized running sums of one probability row, last entry exactly 1

    :param row:
    :return:
    """
    sums = np.cumsum(row)
    sums = sums / sums[-1]
    sums[-1] = 1.0
    return sums.tolist()


class CoordinatePath:  # pylint:disable=too-many-instance-attributes
    """
    CoordinatePath - resumable simulator of one coordinate.
    The next event time is kept between calls of run(), so a path can be stopped and extended later
    """

    def __init__(self, coord: CoordinateModel, rng: np.random.Generator, gamma0: Optional[float] = None):
        self.coord = coord
        self.rng = rng
        self.gamma0 = gamma0
        self.tables = {PRE: TransitionTable(coord.pre_generator, gamma0),
                       POST: TransitionTable(coord.post_generator, gamma0)}
        self.switch_rows = [cumulative_row(row) for row in coord.switch_matrix]
        self.rewards = {PRE: coord.pre_rewards.tolist(), POST: coord.post_rewards.tolist()}
        self.labels = {PRE: coord.pre_states, POST: coord.post_states}
        self.regime = PRE
        self.state = coord.initial_index
        self.time = 0.0
        self.level = 0.0
        self.times = [0.0]
        self.levels = [0.0]
        self.states = [self.state]
        self.regimes = [PRE]
        self.grid = [0.0]
        self.switch_from: Optional[int] = None
        self.switch_to: Optional[int] = None
        self.next_event = self._draw_clock()

    @property
    def slope(self) -> float:
        """
        Reward of the current state

        :return:
        """
        return self.rewards[self.regime][self.state]

    @property
    def label(self) -> str:
        """
        Label of the current state

        :return:
        """
        return self.labels[self.regime][self.state]

    def _draw_clock(self) -> float:
        rate = self.tables[self.regime].rates[self.state]
        if rate <= 0:
            return math.inf
        return self.time + self.rng.standard_exponential() / rate

    def _draw_index(self, row: List[float]) -> int:
        return min(bisect.bisect_right(row, self.rng.random()), len(row) - 1)

    def _start_segment(self) -> None:
        if self.time == self.times[-1]:
            self.states[-1], self.regimes[-1] = self.state, self.regime
            return
        self.times.append(self.time)
        self.levels.append(self.level)
        self.states.append(self.state)
        self.regimes.append(self.regime)

    def _transition(self) -> None:
        if self.gamma0 is not None:
            self.grid.append(self.time)
        state = self._draw_index(self.tables[self.regime].rows[self.state])
        if state != self.state:
            self.state = state
            self._start_segment()
        self.next_event = self._draw_clock()

    def run(self, t_stop: float, stop_at_zero: bool = True) -> Optional[float]:
        """
        run - advance until t_stop or, with stop_at_zero, until the level reaches 0 from above

        :param t_stop:
        :param stop_at_zero:
        :return: hit time or None
        """
        if not math.isfinite(t_stop):
            raise SamplingError('paths can only be advanced to a finite time')
        while True:
            slope = self.slope
            t_end = min(self.next_event, t_stop)
            if stop_at_zero and slope < 0 < self.level:
                t_hit = self.time + self.level / -slope
                if t_hit <= t_end:
                    self.time, self.level = t_hit, 0.0
                    return t_hit
            self.level += slope * (t_end - self.time)
            self.time = t_end
            if t_end == self.next_event:
                self._transition()
            if t_end >= t_stop:
                return None

    def extend(self, t: float) -> None:
        """
        extend - continue the path without ruin detection up to time t

        :param t:
        :return:
        """
        if t > self.time:
            self.run(t, stop_at_zero=False)

    def next_grid_point(self, t: float) -> float:
        """
        next_grid_point - first uniformization epoch strictly after t, extending the path as needed

        :param t:
        :return:
        """
        while self.grid[-1] <= t:
            if math.isinf(self.next_event):
                return math.inf
            self.extend(self.next_event)
        return self.grid[bisect.bisect_right(self.grid, t)]

    def truncate(self, t: float) -> None:
        """
        truncate - forget everything simulated after time t

        :param t:
        :return:
        """
        idx = bisect.bisect_right(self.times, t) - 1
        del self.times[idx + 1:]
        del self.levels[idx + 1:]
        del self.states[idx + 1:]
        del self.regimes[idx + 1:]
        self.state, self.regime = self.states[idx], self.regimes[idx]
        self.level = self.levels[idx] + self.slope * (t - self.times[idx])
        self.time = t
        del self.grid[bisect.bisect_right(self.grid, t):]

    def switch(self) -> str:
        """
        switch - behavioral switch at the current time, post state drawn from the switch matrix row

        :return: post-ruin state label
        """
        self.switch_from = self.state
        self.regime = POST
        self.state = self._draw_index(self.switch_rows[self.switch_from])
        self.switch_to = self.state
        self._start_segment()
        # a fresh clock in the new regime
        self.next_event = self._draw_clock()
        return self.label

    def trajectory(self) -> Trajectory:
        """
        trajectory - frozen copy of the path simulated so far

        :return:
        """
        times, levels = list(self.times), list(self.levels)
        states, regimes = list(self.states), list(self.regimes)
        if self.time > times[-1]:
            times.append(self.time)
            levels.append(self.level)
        else:
            # the open segment has zero length
            states.pop()
            regimes.pop()
        labels = tuple(self.labels[regime][state] for regime, state in zip(regimes, states))
        slopes = np.array([self.rewards[regime][state] for regime, state in zip(regimes, states)])
        return Trajectory(times=np.array(times), levels=np.array(levels), states=labels, slopes=slopes,
                          regimes=tuple(regimes))


def spawn_streams(seed: int) -> List[np.random.Generator]:
    """
    spawn_streams - independent generators of one sample: path 1, path 2, extra grid 1, extra grid 2

    :param seed:
    :return:
    """
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(STREAMS)]


def check_horizon(horizon: float) -> float:
    """
    check_horizon - censoring horizon must be a positive finite time

    :param horizon:
    :return:
    """
    if not math.isfinite(horizon) or horizon <= 0:
        raise ConfigurationError(f'horizon={horizon} must be a positive finite time')
    return float(horizon)


def simulate_paths(spec: ModelSpec, seed: int, horizon: float, streams: List[np.random.Generator],
                   gamma0: Optional[float] = None,
                   logger: Optional[logging.Logger] = None) -> Tuple[List[CoordinatePath], PathSample]:
    """
    simulate_paths - run both coordinates through the first ruin, the switch and the second ruin.
    Returns the live path builders along with the sample so that callers may extend the paths

    :param spec:
    :param seed:
    :param horizon:
    :param streams:
    :param gamma0:
    :param logger:
    :return:
    """
    horizon = check_horizon(horizon)
    paths = [CoordinatePath(coord, rng, gamma0) for coord, rng in zip(spec.coord, streams[:2])]
    hit1 = paths[0].run(horizon)
    hit2 = paths[1].run(horizon if hit1 is None else hit1)

    def sample(tau1, tau2, first, censored, double_hit=False):
        switched = first != 0
        return PathSample(
            seed=seed,
            trajectories=(paths[0].trajectory(), paths[1].trajectory()),
            tau1=tau1, tau2=tau2, first_ruiner=first, censored=censored, horizon=horizon,
            pre_switch_states=tuple(path.labels[PRE][path.switch_from] for path in paths) if switched else None,
            switch_states=tuple(path.labels[POST][path.switch_to] for path in paths) if switched else None,
            double_hit=double_hit,
            grids=tuple(np.array(path.grid) for path in paths) if gamma0 is not None else None,
        )

    if hit1 is None and hit2 is None:
        return paths, sample(math.inf, math.inf, 0, True)
    double_hit = False
    if hit2 is not None and (hit1 is None or hit2 < hit1):
        first, tau1 = 2, hit2
        paths[0].truncate(tau1)
    else:
        first, tau1 = 1, hit1
        if hit2 is not None:
            double_hit = True
            if logger is not None:
                logger.warning(f'Both coordinates reached zero at {tau1!r} (seed {seed})')
    for path in paths:
        path.switch()
    survivor, ruined = paths[2 - first], paths[first - 1]
    hit = survivor.run(horizon)
    if hit is None:
        ruined.extend(horizon)
        return paths, sample(tau1, math.inf, first, True, double_hit)
    ruined.extend(hit)
    return paths, sample(tau1, hit, first, False, double_hit)


def sample_exact_path(spec: ModelSpec, seed: int, horizon: float,
                      logger: Optional[logging.Logger] = None) -> PathSample:
    """
    sample_exact_path - one exact path with competing exponential holding times

    :param spec:
    :param seed:
    :param horizon:
    :param logger:
    :return:
    """
    _, result = simulate_paths(spec, seed, horizon, spawn_streams(seed), logger=logger)
    return result
