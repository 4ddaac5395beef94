# -*- coding: utf-8 -*-
""" Shared fixtures """

import json
from pathlib import Path

import numpy as np
import pytest

from rbsf.model import parse_model

ROOT = Path(__file__).resolve().parent.parent
TM1_PATH = ROOT / 'models' / 'tm1.json'


@pytest.fixture
def tm1_document() -> dict:
    return json.loads(TM1_PATH.read_text(encoding='utf-8'))


@pytest.fixture
def tm1():
    return parse_model(TM1_PATH.read_text(encoding='utf-8'))


@pytest.fixture
def write_model(tmp_path):
    def write(document: dict, name: str = 'model.json') -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding='utf-8')
        return path
    return write


def _generator(rng, size: int) -> list:
    rates = rng.uniform(0.1, 2.0, size=(size, size)) * (rng.random((size, size)) < 0.8)
    np.fill_diagonal(rates, 0.0)
    # keep every state able to leave
    for row in range(size):
        if not rates[row].any():
            rates[row, (row + 1) % size] = 1.0
    np.fill_diagonal(rates, -rates.sum(axis=1))
    return rates.tolist()


def _signed_rewards(rng, size: int, shuffle: bool) -> list:
    signs = np.array([1.0 if idx % 2 == 0 else -1.0 for idx in range(size)])
    if shuffle:
        signs = rng.permutation(signs)
    return (signs * rng.uniform(0.5, 3.0, size=size)).tolist()


def coordinate_document(rng, n_pre: int, n_post: int) -> dict:
    """
    Valid coordinate with interleaved reward signs; the first pre-ruin state climbs and is the initial one
    """
    return {
        'pre_states': [f'e{idx}' for idx in range(n_pre)],
        'post_states': [f's{idx}' for idx in range(n_post)],
        'pre_generator': _generator(rng, n_pre),
        'post_generator': _generator(rng, n_post),
        'pre_rewards': _signed_rewards(rng, n_pre, shuffle=False),
        'post_rewards': _signed_rewards(rng, n_post, shuffle=True),
        'switch_matrix': rng.dirichlet(np.ones(n_post), size=n_pre).tolist(),
        'initial_state': 'e0',
    }


def random_document(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    return {key: coordinate_document(rng, int(rng.integers(2, 5)), int(rng.integers(2, 5)))
            for key in ('coord1', 'coord2')}
