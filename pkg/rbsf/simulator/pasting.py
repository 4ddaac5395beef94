# -*- coding: utf-8 -*-
""" Compatible pasting on a Poisson observation grid """

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from rbsf.model import gamma_zero, CoordinateModel, ModelSpec
from rbsf.utils import GammaTooSmallError

from .paths import spawn_streams, simulate_paths, CoordinatePath, PathSample, Trajectory, POST, PRE

BOUND_SLACK = 1e-9
DEFAULT_CHUNK = 250
# initial search window, in mean grid spacings
WINDOW_STEPS = 8


class PoissonGrid:
    """
    PoissonGrid - homogeneous Poisson points on (0, inf), generated lazily in fixed-size chunks
    """

    def __init__(self, rng: np.random.Generator, rate: float, chunk: int = DEFAULT_CHUNK):
        self.rng = rng
        self.rate = rate
        self.chunk = max(1, int(chunk))
        self.points = np.empty(0)
        self.last = 0.0

    def until(self, t: float) -> np.ndarray:
        """
        until - all points not later than t

        :param t:
        :return:
        """
        if self.rate <= 0:
            return self.points
        while self.last <= t:
            fresh = self.last + np.cumsum(self.rng.standard_exponential(self.chunk) / self.rate)
            self.points = np.concatenate([self.points, fresh])
            self.last = float(fresh[-1])
        return self.points[:np.searchsorted(self.points, t, side='right')]


@dataclass(frozen=True, eq=False)
class PastingSample:  # pylint:disable=too-many-instance-attributes
    """
    Pasted version of one path. Every pair is in ruin order: index 0 is the first ruiner.
    Times are NaN and indices None when the path is censored before they are defined
    """
    base: PathSample
    gamma: float
    gamma0: float
    ell_star: Optional[int] = None
    n_star: Optional[int] = None
    sigma1_star: float = math.nan
    sigma2_star: float = math.nan
    sigma1: float = math.nan
    sigma2: float = math.nan
    tilde_tau1: float = math.nan
    tilde_tau2: float = math.nan
    compat_ok: bool = False
    sup_distance: Tuple[float, float] = (math.nan, math.nan)
    poisson_index: Optional[Tuple[int, int]] = None
    pasted: Optional[Tuple[Trajectory, Trajectory]] = None
    bound_printed: Tuple[float, float] = (math.nan, math.nan)
    bound_abs: Tuple[float, float] = (math.nan, math.nan)
    violates_printed: bool = False
    violates_abs: bool = False
    grids: Optional[Tuple[np.ndarray, np.ndarray]] = None

    @property
    def overshoot(self) -> float:
        """
        Distance from the first ruin to the next observation of the first ruiner

        :return:
        """
        return self.sigma1_star - self.base.tau1


def paste(trajectory: Trajectory, tau1: float, sigma: float, pre: Tuple[str, float],
          post: Tuple[str, float]) -> Trajectory:
    """
    paste - move the behavioral switch of one coordinate from tau1 to sigma.
    Only [min, max) of the two instants changes state, later levels carry the accumulated offset

    :param trajectory:
    :param tau1:
    :param sigma:
    :param pre: (label, reward) of the state held just before tau1
    :param post: (label, reward) of the state drawn at the switch
    :return:
    """
    if sigma == tau1:
        return trajectory
    start, stop = min(tau1, sigma), max(tau1, sigma)
    label, slope, regime = (pre[0], pre[1], PRE) if sigma > tau1 else (post[0], post[1], POST)
    replaced = post[1] if sigma > tau1 else pre[1]
    times = np.union1d(trajectory.times, [start, stop])
    offset = np.interp(times, [start, stop], [0.0, (stop - start) * (slope - replaced)])
    levels = trajectory.level_at(times) + offset
    states, slopes, regimes = [], [], []
    for left in times[:-1]:
        if start <= left < stop:
            states.append(label)
            slopes.append(slope)
            regimes.append(regime)
        else:
            idx = trajectory.segment_index(left)
            states.append(trajectory.states[idx])
            slopes.append(float(trajectory.slopes[idx]))
            regimes.append(trajectory.regimes[idx])
    return Trajectory(times=times, levels=levels, states=tuple(states), slopes=np.array(slopes),
                      regimes=tuple(regimes))


def sup_distance(original: Trajectory, pasted: Trajectory) -> float:
    """
    sup_distance - uniform distance of two piecewise-linear paths over the shorter time span

    :param original:
    :param pasted:
    :return:
    """
    end = min(original.end, pasted.end)
    times = np.union1d(original.times, pasted.times)
    times = times[times <= end]
    return float(np.max(np.abs(original.level_at(times) - pasted.level_at(times))))


def _reward_bounds(coord: CoordinateModel) -> Tuple[float, float]:
    printed = float(coord.pre_rewards.max() + coord.post_rewards.max())
    absolute = float(np.abs(coord.pre_rewards).max() + np.abs(coord.post_rewards).max())
    return printed, absolute


class _ObservedCoordinate:
    """
    One coordinate with its uniformization grid and its extra Poisson grid merged on demand
    """

    def __init__(self, path: CoordinatePath, extra: PoissonGrid):
        self.path = path
        self.extra = extra

    def merged(self, t: float) -> np.ndarray:
        self.path.extend(t)
        own = np.array(self.path.grid[1:])
        own = own[own <= t]
        return np.concatenate([[0.0], np.sort(np.concatenate([own, self.extra.until(t)]))])

    def merged_count(self, count: int, t: float) -> Tuple[np.ndarray, float]:
        # doubling window until count points are observed
        grid = self.merged(t)
        while len(grid) < count:
            t *= 2
            grid = self.merged(t)
        return grid, t

    def poisson_interval(self, t: float) -> Tuple[int, float, float]:
        grid = self.path.grid
        idx = int(np.searchsorted(grid, t, side='right')) - 1
        return idx, grid[idx], self.path.next_grid_point(t)

    def switch_states(self) -> Tuple[Tuple[str, float], Tuple[str, float]]:
        path = self.path
        pre = (path.labels[PRE][path.switch_from], path.rewards[PRE][path.switch_from])
        post = (path.labels[POST][path.switch_to], path.rewards[POST][path.switch_to])
        return pre, post


def sample_pasting(spec: ModelSpec, gamma: float, seed: int, horizon: float, chunk: int = DEFAULT_CHUNK,
                   keep_grids: bool = False, logger: Optional[logging.Logger] = None) -> PastingSample:
    """
    sample_pasting - exact path on the gamma0 uniformization grid plus its compatible pasting
    on the rate gamma observation grid

    :param spec:
    :param gamma:
    :param seed:
    :param horizon:
    :param chunk: extra grid points drawn per batch
    :param keep_grids: store the merged observation grids in the sample
    :param logger:
    :return:
    """
    gamma0 = gamma_zero(spec)
    if not math.isfinite(gamma) or gamma <= gamma0:
        raise GammaTooSmallError(gamma, gamma0)
    streams = spawn_streams(seed)
    paths, base = simulate_paths(spec, seed, horizon, streams, gamma0=gamma0, logger=logger)
    if base.first_ruiner == 0:
        return PastingSample(base=base, gamma=gamma, gamma0=gamma0)

    first, second = base.first_ruiner - 1, 2 - base.first_ruiner
    observed = [_ObservedCoordinate(paths[idx], PoissonGrid(streams[2 + idx], gamma - gamma0, chunk))
                for idx in (first, second)]
    tau1 = base.tau1
    window = WINDOW_STEPS / gamma

    reach = tau1 + window
    grid1 = observed[0].merged(reach)
    while grid1[-1] <= tau1:
        reach = tau1 + 2 * (reach - tau1)
        grid1 = observed[0].merged(reach)
    ell_star = int(np.searchsorted(grid1, tau1, side='right'))
    sigma1_star = float(grid1[ell_star])
    grid2, _ = observed[1].merged_count(ell_star + 1, max(reach, sigma1_star))
    sigma2_star = float(grid2[ell_star])

    intervals = [item.poisson_interval(tau1) for item in observed]
    compat_ok = (sigma1_star < intervals[0][2]
                 and intervals[1][1] <= sigma2_star < intervals[1][2])
    sigmas = (sigma1_star, sigma2_star) if compat_ok else (tau1, tau1)

    def pasted_pair():
        return tuple(paste(item.path.trajectory(), tau1, sigma, *item.switch_states())
                     for item, sigma in zip(observed, sigmas))

    n_star, tilde_tau2 = None, math.nan
    if math.isfinite(base.tau2):
        reach = max(base.tau2, float(grid2[ell_star])) + window
        while n_star is None:
            grid2 = observed[1].merged(reach)
            pasted2 = pasted_pair()[1]
            below = np.flatnonzero(pasted2.level_at(grid2[ell_star:]) < 0)
            if below.size:
                n_star = ell_star + int(below[0])
                tilde_tau2 = float(grid2[n_star])
            elif reach > 2 * base.horizon:
                if logger is not None:
                    logger.debug(f'No observed ruin of the second coordinate before {reach:g} (seed {seed})')
                break
            else:
                reach = base.tau2 + 2 * (reach - base.tau2)

    pasted = pasted_pair()
    originals = tuple(item.path.trajectory() for item in observed)
    distances = tuple(sup_distance(original, copy) for original, copy in zip(originals, pasted))
    bounds = [_reward_bounds(spec.coord[idx]) for idx in (first, second)]
    printed = tuple(abs(sigma - tau1) * bound[0] for sigma, bound in zip(sigmas, bounds))
    absolute = tuple(abs(sigma - tau1) * bound[1] for sigma, bound in zip(sigmas, bounds))
    violates_printed = compat_ok and any(d > b + BOUND_SLACK for d, b in zip(distances, printed))
    violates_abs = compat_ok and any(d > b + BOUND_SLACK for d, b in zip(distances, absolute))
    if violates_abs and logger is not None:
        logger.warning(f'Pathwise distance {distances} above {absolute} (seed {seed})')

    trajectories = [None, None]
    trajectories[first], trajectories[second] = originals
    return PastingSample(
        base=replace(base, trajectories=tuple(trajectories),
                     grids=tuple(np.array(path.grid) for path in paths)),
        gamma=gamma,
        gamma0=gamma0,
        ell_star=ell_star,
        n_star=n_star,
        sigma1_star=sigma1_star,
        sigma2_star=sigma2_star,
        sigma1=sigmas[0],
        sigma2=sigmas[1],
        tilde_tau1=sigmas[0],
        tilde_tau2=tilde_tau2,
        compat_ok=compat_ok,
        sup_distance=distances,
        poisson_index=(intervals[0][0], intervals[1][0]),
        pasted=pasted,
        bound_printed=printed,
        bound_abs=absolute,
        violates_printed=violates_printed,
        violates_abs=violates_abs,
        grids=(grid1, grid2) if keep_grids else None,
    )
