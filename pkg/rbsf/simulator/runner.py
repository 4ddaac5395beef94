# -*- coding: utf-8 -*-
""" Deterministic parallel sampling driver """

import logging
import math
import time
from typing import Callable, List, Optional

import humanize

from rbsf.model import mean_drift, ModelSpec
from rbsf.utils import mix_seed, named_pool, SamplingError

SAMPLE_HEADER = ('seed', 'tau1', 'tau2', 'first_ruiner', 'censored', 'ell_star', 'n_star',
                 'sigma1', 'sigma2', 'sup_dist1', 'sup_dist2', 'compat_ok')


def default_horizon(spec: ModelSpec, drifts: float = 50.0, fallback: float = 200.0,
                    tolerance: float = 1e-12) -> float:
    """
    default_horizon - censoring horizon of drifts / |mean pre-ruin drift|, the largest over both
    coordinates. A coordinate without drift contributes the fallback

    :param spec:
    :param drifts:
    :param fallback:
    :param tolerance:
    :return:
    """
    horizons = []
    for coord in spec.coord:
        drift = abs(mean_drift(coord))
        horizons.append(drifts / drift if drift > tolerance else fallback)
    return max(horizons)


def sample_many(fn: Callable, spec: ModelSpec, root_seed: int, count: int, threads: int = 1,
                logger: Optional[logging.Logger] = None, **kwargs) -> List:
    """
    sample_many - run fn(spec, seed=mix_seed(root_seed, i), **kwargs) for i in range(count).
    Results are ordered by i whatever the thread count

    :param fn: sample_exact_path, sample_pasting or a compatible callable
    :param spec:
    :param root_seed:
    :param count:
    :param threads:
    :param logger:
    :param kwargs:
    :return:
    """
    if count < 1:
        raise SamplingError(f'sample count {count} must be positive')
    start = time.time()

    def one(index: int):
        return fn(spec, seed=mix_seed(root_seed, index), logger=logger, **kwargs)

    if threads <= 1:
        samples = [one(index) for index in range(count)]
    else:
        with named_pool(threads, 'Sampler') as pool:
            samples = list(pool.map(one, range(count)))
    if logger is not None:
        logger.info(f'Simulated {humanize.intcomma(count)} samples with {threads} thread(s) '
                    f'in {humanize.naturaldelta(time.time() - start)}')
    return samples


def _optional(value):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return None
    return value


def sample_row(sample) -> tuple:
    """
    sample_row - one CSV row in SAMPLE_HEADER order, pasting columns empty for exact paths

    :param sample:
    :return:
    """
    base = getattr(sample, 'base', sample)
    row = (base.seed, base.tau1, base.tau2, base.first_ruiner, base.censored)
    if base is sample:
        return row + (None,) * 7
    return row + (sample.ell_star, sample.n_star, _optional(sample.sigma1), _optional(sample.sigma2),
                  _optional(sample.sup_distance[0]), _optional(sample.sup_distance[1]),
                  sample.compat_ok if base.first_ruiner else None)
