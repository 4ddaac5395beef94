# -*- coding: utf-8 -*-
""" n-bridge recursion """

import json
import math

import numpy as np
import pytest
from scipy import integrate

from rbsf.bridge import (canonical_switch_index, level_density, psi_matrix, psi_table, q_matrix, ruin_step_pmf,
                         QTable)
from rbsf.model import parse_model
from rbsf.simulator import bridge_frequencies
from rbsf.uniformization import build_kernel
from rbsf.utils import IndexRangeError


def table_for(spec, gamma, workers=1):
    return QTable(build_kernel(spec.coord[0], gamma), workers=workers)


def test_two_step_bridges(tm1):
    table = table_for(tm1, 10.0)
    assert psi_matrix(table, 2, 2).values[0, 0] == pytest.approx(0.05, abs=1e-12)
    assert psi_matrix(table, 1, 2).values[0, 1] == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert psi_matrix(table, 0, 2).values[1, 1] == pytest.approx(0.4 / 3.0, abs=1e-12)
    np.testing.assert_allclose(q_matrix(table, 1, 2), [[0.0, 0.5 / 3.0], [0.0, 0.0]], atol=1e-15)


def test_two_step_bridges_match_competing_exponentials(tm1):
    # up-move Exp(gamma / r_i), then down-move Exp(gamma / |r_j|) that must overshoot it
    gamma = 10.0
    table = table_for(tm1, gamma)
    transition, r_i, r_j = 0.1, 1.0, 1.0
    expected = transition * r_j / (r_i + r_j)
    assert psi_matrix(table, 5, 2).values[0, 0] == pytest.approx(expected, abs=1e-12)
    transition, r_j = 0.5, 2.0
    expected = transition * r_j / (r_i + r_j)
    assert psi_matrix(table, 1, 2).values[0, 1] == pytest.approx(expected, abs=1e-12)


def test_three_step_bridges(tm1):
    table = table_for(tm1, 10.0)
    assert psi_matrix(table, 3, 3).values[0, 0] == pytest.approx(0.045, abs=1e-12)
    assert psi_matrix(table, 1, 3).values[0, 1] == pytest.approx(2.0 / 15.0, abs=1e-12)
    assert psi_matrix(table, 2, 3).values[0, 1] == pytest.approx(13.0 / 60.0, abs=1e-12)


def test_switch_index_is_clamped(tm1):
    table = table_for(tm1, 10.0)
    table.fill(20)
    for n in range(2, 21):
        for ell in range(-3, n + 4):
            clamped = min(max(ell, 0), n)
            np.testing.assert_array_equal(psi_matrix(table, ell, n).values, psi_matrix(table, clamped, n).values)
    assert canonical_switch_index(-7, 5) == 0
    assert canonical_switch_index(9, 5) == 5
    with pytest.raises(IndexRangeError):
        canonical_switch_index(1, 1)


def test_entries_are_probabilities(tm1):
    table = table_for(tm1, 10.0)
    psis = psi_table(table, 12)
    assert len(psis) == sum(n + 1 for n in range(2, 13))
    for psi in psis.values():
        assert (psi.values >= 0).all()
    # every start row sums to at most one over all bridge lengths
    for ell in range(0, 6):
        total = sum(psis[(min(ell, n), n)].values for n in range(2, 13))
        assert (total.sum(axis=1) <= 1.0 + 1e-12).all()


def test_pre_start_never_reaches_pre_down_state_after_switch(tm1):
    table = table_for(tm1, 10.0)
    for n in range(3, 8):
        for ell in range(0, n):
            assert psi_matrix(table, ell, n).values[0, 0] == 0.0
        # post start never switches back
        assert psi_matrix(table, 0, n).values[1, 0] == 0.0


def test_level_density(tm1):
    table = table_for(tm1, 10.0)
    density = level_density(table, 2, 2, -0.1)
    assert density.values[0, 0] == pytest.approx(0.5 * math.exp(-1.0), rel=1e-12)
    below = level_density(table, 3, 4, -1e-13).values
    above = level_density(table, 3, 4, 0.0).values
    np.testing.assert_allclose(below, above, rtol=1e-9)


def test_density_integrates_to_psi(tm1):
    table = table_for(tm1, 5.0)
    for n in range(2, 9):
        for ell in range(0, n + 1):
            psi = psi_matrix(table, ell, n).values
            for i in range(2):
                for j in range(2):
                    def entry(s, a=ell, b=n, r=i, c=j):
                        return level_density(table, a, b, s).values[r, c]
                    value, _ = integrate.quad(entry, -np.inf, 0.0, epsabs=1e-13, epsrel=1e-12)
                    assert value == pytest.approx(psi[i, j], abs=1e-10)


def test_ruin_step_pmf(tm1):
    table = table_for(tm1, 10.0)
    assert ruin_step_pmf(table, 'e+', 2, 2) == pytest.approx(0.05, abs=1e-12)
    assert ruin_step_pmf(table, 'e+', 1, 2) == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert ruin_step_pmf(table, 's+', 0, 2) == pytest.approx(0.4 / 3.0, abs=1e-12)
    with pytest.raises(IndexRangeError):
        ruin_step_pmf(table, 'e+', 1, 1)
    with pytest.raises(IndexRangeError):
        ruin_step_pmf(table, 's-', 1, 3)


def test_workers_do_not_change_values(tm1):
    serial = table_for(tm1, 7.0).fill(15)
    parallel = table_for(tm1, 7.0, workers=4).fill(15)
    for n in range(2, 16):
        for ell in range(n + 1):
            np.testing.assert_array_equal(serial.q(ell, n), parallel.q(ell, n))


def test_fill_on_demand(tm1):
    table = table_for(tm1, 10.0)
    assert table.level == 1
    table.q(1, 6)
    assert table.level == 6
    with pytest.raises(IndexRangeError):
        table.fill(1)


@pytest.mark.slow
def test_recursion_against_bridge_oracle(tm1):
    gamma, draws = 5.0, 1_000_000
    table = table_for(tm1, gamma)
    coord = tm1.coord[0]
    within, cells = 0, 0
    for n in range(2, 7):
        for ell in range(0, n + 1):
            start = 'e+' if ell >= 1 else 's+'
            row = table.kernel.row_of(start)
            psi = psi_matrix(table, ell, n).values[row]
            found = bridge_frequencies(coord, gamma, ell, n, start, draws, seed=1000 * n + ell)
            se = np.sqrt(psi * (1.0 - psi) / draws)
            within += int((np.abs(found.frequencies - psi) <= 3.0 * se + 1e-12).sum())
            cells += psi.size
    assert within >= 0.95 * cells


MIXED = {
    'pre_states': ['a', 'b', 'c'],
    'post_states': ['x', 'y', 'z'],
    'pre_generator': [[-1.5, 1.0, 0.5], [0.3, -0.8, 0.5], [2.0, 0.0, -2.0]],
    'post_generator': [[-1.0, 0.6, 0.4], [1.2, -2.5, 1.3], [0.0, 0.9, -0.9]],
    'pre_rewards': [1.5, -1.0, 0.7],
    'post_rewards': [-2.0, 1.0, -0.5],
    'switch_matrix': [[0.2, 0.5, 0.3], [0.6, 0.1, 0.3], [0.0, 1.0, 0.0]],
    'initial_state': 'a',
}


def test_asymmetric_model_against_bridge_oracle():
    coord = parse_model(json.dumps({'coord1': MIXED, 'coord2': MIXED})).coord[0]
    gamma, draws = 6.0, 100_000
    table = QTable(build_kernel(coord, gamma))
    assert table.kernel.plus_labels == ('a', 'c', 'y')
    assert table.kernel.minus_labels == ('b', 'x', 'z')
    within, cells = 0, 0
    for n in range(2, 6):
        for ell in range(0, n + 1):
            for start in (('a', 'c') if ell >= 1 else ('y',)):
                psi = psi_matrix(table, ell, n).values[table.kernel.row_of(start)]
                found = bridge_frequencies(coord, gamma, ell, n, start, draws, seed=1000 * n + 10 * ell + ord(start))
                se = np.sqrt(psi * (1.0 - psi) / draws)
                within += int((np.abs(found.frequencies - psi) <= 4.0 * se + 1e-12).sum())
                cells += psi.size
    assert within >= 0.95 * cells
