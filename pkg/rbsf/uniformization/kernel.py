# -*- coding: utf-8 -*-
""" Uniformized discrete-step kernel of one fluid coordinate """

import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from rbsf.model import coordinate_gamma_zero, partition_signs, CoordinateModel, SignPartition
from rbsf.utils import GammaTooSmallError, IndexRangeError

PLUS = '+'
MINUS = '-'


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class BlockTriple:
    """
    Pre, switch and post variants of one signed block, already embedded in the unified
    (E then S) index order with all other sub-blocks zero
    """
    pre: np.ndarray
    switch: np.ndarray
    post: np.ndarray

    def select(self, ell: int, threshold: int) -> np.ndarray:
        """
        Pick the variant active for switch index ell

        :param ell:
        :param threshold:
        :return:
        """
        if ell > threshold:
            return self.pre
        if ell == threshold:
            return self.switch
        return self.post


@dataclass(frozen=True, eq=False)
class UniformizedKernel:  # pylint:disable=too-many-instance-attributes
    """
    All discrete-step matrices of one coordinate at observation rate gamma.
    Rows of signed blocks run over E+ then S+, columns over E- then S-
    """
    gamma: float
    partition: SignPartition
    b_pre: np.ndarray
    b_post: np.ndarray
    b_switch: np.ndarray
    h_plus_minus: np.ndarray
    r_plus: np.ndarray
    r_minus: np.ndarray
    plus_labels: Tuple[str, ...]
    minus_labels: Tuple[str, ...]
    plus_rates: np.ndarray
    minus_rates: np.ndarray
    blocks: Dict[Tuple[str, str], BlockTriple] = field(repr=False)

    @property
    def n_minus(self) -> int:
        """
        Size of E- and S- together

        :return:
        """
        return len(self.minus_labels)

    @property
    def e_plus(self) -> int:
        """
        Number of pre-regime up-states, first rows of every plus block

        :return:
        """
        return len(self.partition.plus_pre)

    @property
    def e_minus(self) -> int:
        """
        Number of pre-regime down-states, first columns of every minus block

        :return:
        """
        return len(self.partition.minus_pre)

    def row_of(self, label: str) -> int:
        """
        row_of - position of an up-state label in the unified plus order

        :param label:
        :return:
        """
        try:
            return self.plus_labels.index(label)
        except ValueError as exc:
            raise IndexRangeError(f'{label!r} is not a state with positive reward') from exc

    def column_kind(self, col: int) -> str:
        """
        column_kind - 'pre' for E- columns, 'post' for S- columns

        :param col:
        :return:
        """
        if not 0 <= col < self.n_minus:
            raise IndexRangeError(f'column {col} out of range 0..{self.n_minus - 1}')
        return 'pre' if col < self.e_minus else 'post'


@dataclass(frozen=True, eq=False)
class IndicatorBlocks:
    """
    Blocks of one recursion term, each selected by its own switch threshold
    """
    b_pp: np.ndarray
    b_mm: np.ndarray
    b_mp: np.ndarray
    b_pm: np.ndarray


def _embed(partition: SignPartition, b_pre: np.ndarray, b_post: np.ndarray, b_switch: np.ndarray,
           rows: str, cols: str) -> BlockTriple:
    row_pre = partition.plus_pre if rows == PLUS else partition.minus_pre
    row_post = partition.plus_post if rows == PLUS else partition.minus_post
    col_pre = partition.plus_pre if cols == PLUS else partition.minus_pre
    col_post = partition.plus_post if cols == PLUS else partition.minus_post
    shape = (len(row_pre) + len(row_post), len(col_pre) + len(col_post))
    upper, left = len(row_pre), len(col_pre)

    pre = np.zeros(shape)
    pre[:upper, :left] = b_pre[np.ix_(row_pre, col_pre)]
    switch = np.zeros(shape)
    switch[:upper, left:] = b_switch[np.ix_(row_pre, col_post)]
    post = np.zeros(shape)
    post[upper:, left:] = b_post[np.ix_(row_post, col_post)]
    return BlockTriple(pre=_frozen(pre), switch=_frozen(switch), post=_frozen(post))


def build_kernel(coord: CoordinateModel, gamma: float) -> UniformizedKernel:
    """
    build_kernel - uniformize one coordinate at rate gamma

    :param coord:
    :param gamma:
    :return:
    """
    minimal = coordinate_gamma_zero(coord)
    if not math.isfinite(gamma) or gamma <= minimal:
        raise GammaTooSmallError(gamma, minimal, 'this coordinate')
    part = partition_signs(coord)
    b_pre = _frozen(np.eye(len(coord.pre_states)) + coord.pre_generator / gamma)
    b_post = _frozen(np.eye(len(coord.post_states)) + coord.post_generator / gamma)
    b_switch = _frozen(np.array(coord.switch_matrix, dtype=float))

    plus_rates = np.concatenate([coord.pre_rewards[list(part.plus_pre)],
                                 coord.post_rewards[list(part.plus_post)]])
    minus_rates = np.abs(np.concatenate([coord.pre_rewards[list(part.minus_pre)],
                                         coord.post_rewards[list(part.minus_post)]]))
    h_plus_minus = 1.0 / (plus_rates[:, None] + minus_rates[None, :])
    # S+ rows never reach E- columns
    h_plus_minus[len(part.plus_pre):, :len(part.minus_pre)] = 0.0

    blocks = {(rows, cols): _embed(part, b_pre, b_post, b_switch, rows, cols)
              for rows in (PLUS, MINUS) for cols in (PLUS, MINUS)}
    return UniformizedKernel(
        gamma=float(gamma),
        partition=part,
        b_pre=b_pre,
        b_post=b_post,
        b_switch=b_switch,
        h_plus_minus=_frozen(h_plus_minus),
        r_plus=_frozen(np.diag(plus_rates)),
        r_minus=_frozen(np.diag(minus_rates)),
        plus_labels=tuple([coord.pre_states[idx] for idx in part.plus_pre]
                          + [coord.post_states[idx] for idx in part.plus_post]),
        minus_labels=tuple([coord.pre_states[idx] for idx in part.minus_pre]
                           + [coord.post_states[idx] for idx in part.minus_post]),
        plus_rates=_frozen(plus_rates),
        minus_rates=_frozen(minus_rates),
        blocks=blocks,
    )


def indicator_blocks(kernel: UniformizedKernel, ell: int, n: int, w: int) -> IndicatorBlocks:
    """
    indicator_blocks - assemble the signed blocks of one recursion term.
    b_pp and b_pm switch at step 1, b_mm at step n-1, b_mp at step w

    :param kernel:
    :param ell:
    :param n:
    :param w:
    :return:
    """
    if n < 2:
        raise IndexRangeError(f'bridge length n={n} must be at least 2')
    if not 1 <= w <= n - 1:
        raise IndexRangeError(f'split index w={w} out of range 1..{n - 1}')
    return IndicatorBlocks(
        b_pp=kernel.blocks[(PLUS, PLUS)].select(ell, 1),
        b_mm=kernel.blocks[(MINUS, MINUS)].select(ell, n - 1),
        b_mp=kernel.blocks[(MINUS, PLUS)].select(ell, w),
        b_pm=kernel.blocks[(PLUS, MINUS)].select(ell, 1),
    )
