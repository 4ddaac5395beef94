# -*- coding: utf-8 -*-
""" Exact paths, pasting and empirical estimates """

import logging
import math

import numpy as np
import pytest

from rbsf.simulator import (compare_with_recursion, convergence_report, default_horizon, empirical_joint_cdf,
                            overshoot_statistics, paste, sample_exact_path, sample_many, sample_pasting, sample_row,
                            summarize, sup_distance, ConvergenceBudget, PoissonGrid, Trajectory, SAMPLE_HEADER)
from rbsf.joint import joint_cdf, step_floor, JointLawRequest
from rbsf.utils import ConfigurationError, GammaTooSmallError, SamplingError

HORIZON = 200.0


def test_exact_path_is_deterministic(tm1):
    left = sample_exact_path(tm1, seed=11, horizon=HORIZON)
    right = sample_exact_path(tm1, seed=11, horizon=HORIZON)
    assert (left.tau1, left.tau2, left.first_ruiner) == (right.tau1, right.tau2, right.first_ruiner)
    for one, two in zip(left.trajectories, right.trajectories):
        np.testing.assert_array_equal(one.times, two.times)
        np.testing.assert_array_equal(one.levels, two.levels)
        assert one.states == two.states


def test_thread_count_does_not_change_samples(tm1):
    serial = sample_many(sample_exact_path, tm1, 3, 40, threads=1, horizon=HORIZON)
    parallel = sample_many(sample_exact_path, tm1, 3, 40, threads=4, horizon=HORIZON)
    assert [sample_row(sample) for sample in serial] == [sample_row(sample) for sample in parallel]


def test_paths_are_consistent(tm1):
    for sample in sample_many(sample_exact_path, tm1, 5, 50, horizon=HORIZON):
        for trajectory in sample.trajectories:
            assert trajectory.states[0] == 'e+'
            assert trajectory.slopes[0] == 1.0
            np.testing.assert_allclose(np.diff(trajectory.levels), trajectory.slopes * np.diff(trajectory.times),
                                       atol=1e-9)
        if sample.censored and sample.first_ruiner == 0:
            assert math.isinf(sample.tau1)
            continue
        ruiner = sample.trajectories[sample.first_ruiner - 1]
        assert ruiner.level_at(sample.tau1) == pytest.approx(0.0, abs=1e-9)
        for trajectory in sample.trajectories:
            interior = trajectory.times[(trajectory.times > 0) & (trajectory.times < sample.tau1)]
            assert (trajectory.level_at(interior) > -1e-9).all()
            assert trajectory.state_at(sample.tau1) in ('s+', 's-')
        assert sample.switch_states[0] in ('s+', 's-')
        assert sample.pre_switch_states[sample.first_ruiner - 1] == 'e-'
        if not sample.censored:
            assert sample.tau2 >= sample.tau1
            survivor = sample.trajectories[sample.second_ruiner - 1]
            assert survivor.level_at(sample.tau2) == pytest.approx(0.0, abs=1e-9)


def test_short_horizon_censors(tm1):
    sample = sample_exact_path(tm1, seed=2, horizon=1e-6)
    assert sample.censored
    assert sample.first_ruiner == 0
    assert math.isinf(sample.tau1) and math.isinf(sample.tau2)
    assert sample_row(sample)[3] == 0
    with pytest.raises(ConfigurationError):
        sample_exact_path(tm1, seed=2, horizon=-1.0)


def test_sample_count_must_be_positive(tm1):
    with pytest.raises(SamplingError):
        sample_many(sample_exact_path, tm1, 1, 0, horizon=HORIZON)


def test_default_horizon(tm1):
    # zero mean drift falls back
    assert default_horizon(tm1) == 200.0
    assert default_horizon(tm1, fallback=30.0) == 30.0


def test_poisson_grid_is_lazy_and_stable():
    grid = PoissonGrid(np.random.default_rng(4), rate=5.0, chunk=3)
    early = grid.until(1.0)
    late = grid.until(10.0)
    assert (np.diff(late) > 0).all()
    assert (late <= 10.0).all()
    np.testing.assert_array_equal(late[:len(early)], early)
    assert grid.until(1.0).size == early.size


def _line(times, slopes, states, regimes):
    times = np.array(times, dtype=float)
    levels = np.concatenate([[0.0], np.cumsum(np.array(slopes) * np.diff(times))])
    return Trajectory(times=times, levels=levels, states=tuple(states), slopes=np.array(slopes, dtype=float),
                      regimes=tuple(regimes))


def test_paste_moves_switch():
    original = _line([0, 1, 2, 4], [1, -1, 2], ['e+', 'e-', 's+'], ['pre', 'pre', 'post'])
    assert paste(original, 2.0, 2.0, ('e-', -1.0), ('s+', 2.0)) is original
    later = paste(original, 2.0, 2.5, ('e-', -1.0), ('s+', 2.0))
    assert later.state_at(2.2) == 'e-'
    assert later.state_at(3.0) == 's+'
    assert later.level_at(2.5) == pytest.approx(-0.5)
    assert later.level_at(4.0) == pytest.approx(original.level_at(4.0) - 1.5)
    assert sup_distance(original, later) == pytest.approx(1.5)
    earlier = paste(original, 2.0, 1.5, ('e-', -1.0), ('s+', 2.0))
    assert earlier.state_at(1.7) == 's+'
    assert earlier.level_at(4.0) == pytest.approx(original.level_at(4.0) + 1.5)


def test_pasting_sample(tm1):
    gamma = 50.0
    for seed in range(30):
        sample = sample_pasting(tm1, gamma, seed=seed, horizon=HORIZON, keep_grids=True)
        base = sample.base
        assert sample.gamma0 == 2.0
        if base.first_ruiner == 0:
            assert sample.ell_star is None
            continue
        assert sample.ell_star >= 1
        assert sample.sigma1_star > base.tau1
        grid1, grid2 = sample.grids
        assert grid1[sample.ell_star - 1] <= base.tau1 < grid1[sample.ell_star]
        assert sample.sigma2_star == grid2[sample.ell_star]
        assert not sample.violates_abs
        if sample.compat_ok:
            assert (sample.sigma1, sample.sigma2) == (sample.sigma1_star, sample.sigma2_star)
            for distance, bound in zip(sample.sup_distance, sample.bound_abs):
                assert distance <= bound + 1e-9
        else:
            assert (sample.sigma1, sample.sigma2) == (base.tau1, base.tau1)
        if sample.n_star is not None:
            assert sample.n_star >= sample.ell_star
            assert sample.tilde_tau2 >= sample.sigma2_star
            assert sample.pasted[1].level_at(sample.tilde_tau2) < 0


def test_pasting_is_deterministic(tm1):
    left = sample_pasting(tm1, 20.0, seed=9, horizon=HORIZON)
    right = sample_pasting(tm1, 20.0, seed=9, horizon=HORIZON)
    assert sample_row(left) == sample_row(right)
    assert len(sample_row(left)) == len(SAMPLE_HEADER)


def test_pasting_gamma_must_dominate(tm1):
    with pytest.raises(GammaTooSmallError):
        sample_pasting(tm1, 2.0, seed=1, horizon=HORIZON)


def test_empirical_joint_cdf(tm1):
    samples = sample_many(sample_exact_path, tm1, 8, 200, horizon=HORIZON)
    empirical = empirical_joint_cdf(samples, (0.5, 1.0, 2.0), (0.5, 1.0, 2.0))
    assert empirical.count == 200
    np.testing.assert_allclose(empirical.total, empirical.order1 + empirical.order2)
    assert (np.diff(empirical.total, axis=0) >= 0).all()
    assert (empirical.total <= empirical.marginal_tau1[:, None] + 1e-15).all()
    assert (empirical.se_total >= 0).all()
    with pytest.raises(SamplingError):
        empirical_joint_cdf([], (1.0,), (1.0,))


def test_all_censored(tm1):
    samples = sample_many(sample_exact_path, tm1, 8, 20, horizon=1e-6)
    empirical = empirical_joint_cdf(samples, (1.0,), (1.0,))
    assert empirical.all_censored
    assert empirical.total[0, 0] == 0.0


def test_compare_band(tm1):
    grid = (0.5, 1.0)
    law = joint_cdf(JointLawRequest(spec=tm1, gamma=100.0, x_grid=grid, y_grid=grid, n_max=100))
    samples = sample_many(sample_exact_path, tm1, 21, 2000, horizon=HORIZON)
    comparison = compare_with_recursion(law, empirical_joint_cdf(samples, grid, grid), se_factor=4.0)
    assert comparison.band.shape == (2, 2)
    assert (comparison.se > 0).all()
    assert comparison.ok
    with pytest.raises(SamplingError):
        compare_with_recursion(law, empirical_joint_cdf(samples, (0.5,), grid), se_factor=4.0)


@pytest.mark.slow
def test_recursion_gap_shrinks_with_gamma(tm1):
    grid = (0.5, 1.0, 2.0)
    samples = sample_many(sample_exact_path, tm1, 23, 50_000, threads=4, horizon=HORIZON)
    empirical = empirical_joint_cdf(samples, grid, grid)
    gaps = {}
    for gamma in (25.0, 100.0):
        law = joint_cdf(JointLawRequest(spec=tm1, gamma=gamma, x_grid=grid, y_grid=grid,
                                        n_max=step_floor(gamma, grid[-1])))
        gaps[gamma] = empirical.total - law.total
    # the recursion sits below the exact law by O(1 / gamma)
    assert gaps[25.0].mean() > 0.0
    assert np.abs(gaps[100.0]).max() < np.abs(gaps[25.0]).max()
    assert np.abs(gaps[100.0]).max() < 0.015


def test_budget():
    budget = ConvergenceBudget(epsilon=0.5, q=1.0, gammas=(10, 50, 250))
    assert budget.k_budget(10.0) == pytest.approx(3.1 - math.log(10.0) * 10.0 ** -0.25)
    assert budget.delta(100.0) == pytest.approx(math.log(100.0) * 100.0 ** -0.25)
    assert budget.delta(1e6) < budget.delta(1e4)
    for kwargs in ({'epsilon': 1.0}, {'q': 0.0}, {'gammas': (50, 10)}, {'gammas': (0.5,)}, {'gammas': ()}):
        values = {'epsilon': 0.5, 'q': 1.0, 'gammas': (10,)}
        values.update(kwargs)
        with pytest.raises(ConfigurationError):
            ConvergenceBudget(**values)


def test_budget_order_along_gammas():
    # with eps = 0.5 delta peaks at gamma = e^4
    issues = ConvergenceBudget(epsilon=0.5, q=1.0, gammas=(10, 50, 250)).order_issues()
    assert len(issues) == 1
    assert issues[0].startswith('delta grows from 1.295 at gamma=10')
    assert ConvergenceBudget(epsilon=0.5, q=1.0, gammas=(100, 1000, 10000)).order_issues() == []
    assert ConvergenceBudget(epsilon=0.5, q=1.0, gammas=(60,)).order_issues() == []


def test_report_warns_about_budget_order(tm1, caplog):
    budget = ConvergenceBudget(epsilon=0.5, q=1.0, gammas=(10, 50))
    logger = logging.getLogger('budget-test')
    with caplog.at_level(logging.WARNING, logger='budget-test'):
        rows = convergence_report(tm1, budget, 100, 3, 5.0, logger=logger)
    assert len(rows) == 2
    assert 'Budget is not monotone: delta grows' in caplog.text


def test_summarize(tm1):
    budget = ConvergenceBudget(epsilon=0.5, q=1.0, gammas=(20,))
    samples = sample_many(sample_pasting, tm1, 4, 60, gamma=20.0, horizon=HORIZON)
    row = summarize(samples, 20.0, budget)
    assert row.samples == 60
    assert row.violations_abs == 0
    assert 0.0 <= row.compat_fail <= 1.0
    assert row.overshoot.expected_mean == pytest.approx(0.05)
    assert len(row.row()) == 13 + 12
    with pytest.raises(SamplingError):
        overshoot_statistics(samples[:1], 20.0)
    with pytest.raises(SamplingError):
        convergence_report(tm1, budget, 10, 1, HORIZON)


@pytest.mark.slow
def test_overshoot_is_exponential(tm1):
    gamma = 50.0
    samples = sample_many(sample_pasting, tm1, 17, 20000, threads=4, gamma=gamma, horizon=HORIZON)
    stats = overshoot_statistics(samples, gamma)
    assert stats.ks_pvalue > 0.01
    assert abs(stats.mean - 1.0 / gamma) <= 5.0 * stats.se


@pytest.mark.slow
def test_observation_scheme_converges(tm1):
    budget = ConvergenceBudget(epsilon=0.5, q=1.0, gammas=(10, 50, 250))
    rows = convergence_report(tm1, budget, 2000, 31, HORIZON, threads=4)
    assert all(row.violations_abs == 0 for row in rows)
    fails = [row.compat_fail for row in rows]
    assert fails[0] > fails[1] > fails[2]
    for metric in ('sigma2', 'tilde_tau1', 'tilde_tau2', 'ell', 'n'):
        medians = [row.quantiles[metric][0] for row in rows]
        assert medians[0] > medians[1] > medians[2]


def test_tilde_tau1_distance_skips_incompatible_pastings(tm1):
    budget = ConvergenceBudget(epsilon=0.5, q=1.0, gammas=(10,))
    samples = sample_many(sample_pasting, tm1, 5, 150, gamma=10.0, horizon=HORIZON)
    compatible = [sample for sample in samples if math.isfinite(sample.base.tau1) and sample.compat_ok]
    assert compatible
    row = summarize(samples, 10.0, budget)
    expected = float(np.median([sample.tilde_tau1 - sample.base.tau1 for sample in compatible]))
    assert row.quantiles['tilde_tau1'][0] == pytest.approx(expected, rel=1e-12)
    assert row.quantiles['tilde_tau1'][0] > 0.0
