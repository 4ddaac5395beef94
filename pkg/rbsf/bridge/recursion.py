# -*- coding: utf-8 -*-
""" n-bridge first-return recursion """

import logging
import time
from dataclasses import dataclass
from threading import RLock
from typing import Dict, Optional, Tuple

import humanize
import numpy as np

from rbsf.uniformization import MINUS, PLUS, UniformizedKernel
from rbsf.utils import IndexRangeError, Memcache, NumericalError, named_pool


def canonical_switch_index(ell: int, n: int) -> int:
    """
    canonical_switch_index - switch steps outside 0..n all behave like the nearest end

    :param ell:
    :param n:
    :return:
    """
    if n < 2:
        raise IndexRangeError(f'bridge length n={n} must be at least 2')
    return min(max(ell, 0), n)


@dataclass(frozen=True, eq=False)
class PsiMatrix:
    """
    Probabilities of confirming ruin at step n, per (start up-state, end down-state), for switch step ell
    """
    ell: int
    n: int
    values: np.ndarray


@dataclass(frozen=True, eq=False)
class LevelDensity:
    """
    n-bridge level density at level s, rows are up-states, columns down-states
    """
    ell: int
    n: int
    s: float
    values: np.ndarray


class QTable:
    """
    QTable - memoized Q matrices, filled bottom-up one bridge length at a time.
    A level is written once, after every shorter level is complete, and is read-only afterwards
    """

    def __init__(self, kernel: UniformizedKernel, workers: int = 1, logger: Optional[logging.Logger] = None):
        self.kernel = kernel
        self.workers = max(1, int(workers))
        self.logger = logger
        self.cache = Memcache(logger)
        self.lock = RLock()
        self.level = 1
        # stacks over the canonical switch index: R+ Q and Q R-
        self._left: Dict[int, np.ndarray] = {}
        self._right: Dict[int, np.ndarray] = {}
        mp_block = kernel.blocks[(MINUS, PLUS)]
        self._b_mp = np.stack([mp_block.pre, mp_block.switch, mp_block.post])

    def _base(self, ell: int) -> np.ndarray:
        kernel = self.kernel
        return kernel.blocks[(PLUS, MINUS)].select(ell, 1) * kernel.h_plus_minus

    def _compute(self, ell: int, n: int) -> np.ndarray:
        if n == 2:
            return self._base(ell)
        kernel = self.kernel
        total = kernel.blocks[(PLUS, PLUS)].select(ell, 1) @ self._right[n - 1][min(max(ell - 1, 0), n - 1)]
        total = total + self._left[n - 1][min(max(ell, 0), n - 1)] @ kernel.blocks[(MINUS, MINUS)].select(ell, n - 1)
        if n >= 4:
            splits = range(2, n - 1)
            lefts = np.stack([self._left[w][min(max(ell, 0), w)] for w in splits])
            rights = np.stack([self._right[n - w][min(max(ell - w, 0), n - w)] for w in splits])
            variants = [0 if ell > w else 1 if ell == w else 2 for w in splits]
            total = total + (lefts @ self._b_mp[variants] @ rights).sum(axis=0)
        return total * kernel.h_plus_minus

    def _store_level(self, n: int, matrices) -> None:
        for ell, matrix in enumerate(matrices):
            if not np.all(np.isfinite(matrix)):
                raise NumericalError(f'non-finite Q entries at ell={ell}, n={n}')
            matrix.setflags(write=False)
            self.cache.set((ell, n), matrix)
        stack = np.stack(matrices)
        self._left[n] = self.kernel.r_plus @ stack
        self._right[n] = stack @ self.kernel.r_minus
        self.level = n

    def fill(self, n_max: int, workers: Optional[int] = None) -> 'QTable':
        """
        fill - compute every canonical Q up to bridge length n_max

        :param n_max:
        :param workers:
        :return:
        """
        if n_max < 2:
            raise IndexRangeError(f'bridge length n={n_max} must be at least 2')
        workers = self.workers if workers is None else max(1, int(workers))
        with self.lock:
            if n_max <= self.level:
                return self
            start, first = time.time(), self.level + 1
            pool = named_pool(workers, 'QTable') if workers > 1 else None
            try:
                for n in range(first, n_max + 1):
                    if pool is None:
                        matrices = [self._compute(ell, n) for ell in range(n + 1)]
                    else:
                        matrices = list(pool.map(lambda ell, size=n: self._compute(ell, size), range(n + 1)))
                    self._store_level(n, matrices)
            finally:
                if pool is not None:
                    pool.shutdown(wait=True)
            if self.logger is not None:
                self.logger.debug(f'Filled bridge levels {first}..{n_max} with {workers} worker(s) '
                                  f'in {humanize.precisedelta(time.time() - start, minimum_unit="milliseconds")}')
        return self

    def q(self, ell: int, n: int) -> np.ndarray:
        """
        q - cached Q for any integer ell, filling missing levels on demand

        :param ell:
        :param n:
        :return:
        """
        key = (canonical_switch_index(ell, n), n)
        if n > self.level:
            self.fill(n)
        return self.cache.get(key)


def q_matrix(table: QTable, ell: int, n: int) -> np.ndarray:
    """
    q_matrix - Q for switch step ell and bridge length n

    :param table:
    :param ell:
    :param n:
    :return:
    """
    return table.q(ell, n)


def psi_matrix(table: QTable, ell: int, n: int) -> PsiMatrix:
    """
    psi_matrix - ruin confirmation probabilities, Q R-

    :param table:
    :param ell:
    :param n:
    :return:
    """
    values = table.q(ell, n) @ table.kernel.r_minus
    values.setflags(write=False)
    return PsiMatrix(ell=ell, n=n, values=values)


def level_density(table: QTable, ell: int, n: int, s: float) -> LevelDensity:
    """
    level_density - density of the final level of an n-bridge.
    Below zero the decay runs over the down-state columns, above zero over the up-state rows

    :param table:
    :param ell:
    :param n:
    :param s:
    :return:
    """
    kernel = table.kernel
    q = table.q(ell, n)
    gamma = kernel.gamma
    if s < 0:
        values = q * (gamma * np.exp(gamma * s / kernel.minus_rates))[None, :]
    else:
        values = (gamma * np.exp(-gamma * s / kernel.plus_rates))[:, None] * q
    return LevelDensity(ell=ell, n=n, s=float(s), values=values)


def ruin_step_pmf(table: QTable, i: str, ell: int, n: int) -> float:
    """
    ruin_step_pmf - probability that ruin is confirmed exactly at step n from up-state i.
    With ell >= n the bridge ends before the switch, so it ends in a pre-regime down-state;
    otherwise it ends in a post-regime down-state

    :param table:
    :param i:
    :param ell:
    :param n:
    :return:
    """
    if n < 2:
        raise IndexRangeError(f'bridge length n={n} must be at least 2')
    row = table.kernel.row_of(i)
    split = table.kernel.e_minus
    psi = psi_matrix(table, ell, n).values
    if ell >= n:
        return float(psi[row, :split].sum())
    return float(psi[row, split:].sum())


def psi_table(table: QTable, n_max: int) -> Dict[Tuple[int, int], PsiMatrix]:
    """
    psi_table - every canonical Psi up to bridge length n_max, keyed by (ell, n)

    :param table:
    :param n_max:
    :return:
    """
    table.fill(n_max)
    return {(ell, n): psi_matrix(table, ell, n) for n in range(2, n_max + 1) for ell in range(n + 1)}
