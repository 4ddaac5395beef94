# -*- coding: utf-8 -*-
""" Brute-force n-bridge frequencies on the uniformized grid """

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from rbsf.model import CoordinateModel
from rbsf.uniformization import build_kernel, UniformizedKernel
from rbsf.utils import IndexRangeError, SamplingError

BATCH = 1 << 17


@dataclass(frozen=True, eq=False)
class BridgeFrequencies:
    """
    Counts of bridges confirming ruin at step n, per final down-state column
    """
    ell: int
    n: int
    start: str
    labels: Tuple[str, ...]
    counts: np.ndarray
    draws: int

    @property
    def frequencies(self) -> np.ndarray:
        """
        Counts over draws

        :return:
        """
        return self.counts / self.draws

    @property
    def se(self) -> np.ndarray:
        """
        Binomial standard errors of the frequencies

        :return:
        """
        p = self.frequencies
        return np.sqrt(p * (1.0 - p) / self.draws)


def _cumulative(matrix: np.ndarray) -> np.ndarray:
    sums = np.cumsum(np.clip(matrix, 0.0, None), axis=1)
    sums = sums / sums[:, -1:]
    sums[:, -1] = 1.0
    return sums


def _step_kernels(coord: CoordinateModel, kernel: UniformizedKernel) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    # cumulative rows on the joint pre+post index space, before, at and after the switch
    pre, post = len(coord.pre_states), len(coord.post_states)
    size = pre + post
    before, switch, after = np.eye(size), np.eye(size), np.eye(size)
    before[:pre, :pre] = kernel.b_pre
    switch[:pre, :pre] = 0.0
    switch[:pre, pre:] = kernel.b_switch
    after[pre:, pre:] = kernel.b_post
    return _cumulative(before), _cumulative(switch), _cumulative(after)


def bridge_frequencies(coord: CoordinateModel, gamma: float, ell: int, n: int, start: str, draws: int,
                       seed: int) -> BridgeFrequencies:
    """
    bridge_frequencies - Monte Carlo estimate of one row of Psi(ell, n).
    Segments last Exp(gamma), the transition at step m uses the pre kernel for m < ell, the switch matrix
    for m = ell and the post kernel for m > ell. A bridge counts when every interior level is positive
    and the level at step n is negative

    :param coord:
    :param gamma:
    :param ell:
    :param n:
    :param start: up-state label, pre-ruin for ell >= 1, post-ruin for ell <= 0
    :param draws:
    :param seed:
    :return:
    """
    if n < 2:
        raise IndexRangeError(f'bridge length n={n} must be at least 2')
    if draws < 1:
        raise SamplingError(f'draws={draws} must be positive')
    kernel = build_kernel(coord, gamma)
    labels = kernel.minus_labels
    counts = np.zeros(len(labels), dtype=np.int64)
    pre = len(coord.pre_states)
    if start in coord.pre_states:
        origin, regime_ok = coord.pre_states.index(start), ell >= 1
    elif start in coord.post_states:
        origin, regime_ok = pre + coord.post_states.index(start), ell <= 0
    else:
        raise IndexRangeError(f'unknown state {start!r}')
    rewards = np.concatenate([coord.pre_rewards, coord.post_rewards])
    if rewards[origin] <= 0:
        raise IndexRangeError(f'{start!r} is not a state with positive reward')
    if not regime_ok:
        # a bridge cannot switch back, or switch before it starts
        return BridgeFrequencies(ell=ell, n=n, start=start, labels=labels, counts=counts, draws=draws)

    before, switch, after = _step_kernels(coord, kernel)
    # joint index -> down-state column, E- first then S-
    column = np.full(len(rewards), -1)
    part = kernel.partition
    for col, idx in enumerate(list(part.minus_pre) + [pre + idx for idx in part.minus_post]):
        column[idx] = col

    rng = np.random.default_rng(seed)
    done = 0
    while done < draws:
        size = min(BATCH, draws - done)
        states = np.full(size, origin)
        levels = np.zeros(size)
        alive = np.ones(size, dtype=bool)
        for step in range(1, n + 1):
            levels += rewards[states] * rng.standard_exponential(size) / gamma
            if step == n:
                break
            alive &= levels > 0
            rows = before if step < ell else switch if step == ell else after
            uniforms = rng.random(size)
            states = np.minimum((uniforms[:, None] >= rows[states]).sum(axis=1), rows.shape[1] - 1)
        ruined = alive & (levels < 0)
        hits = column[states[ruined]]
        counts += np.bincount(hits[hits >= 0], minlength=len(labels))
        done += size
    return BridgeFrequencies(ell=ell, n=n, start=start, labels=labels, counts=counts, draws=draws)
