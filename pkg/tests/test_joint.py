# -*- coding: utf-8 -*-
""" Joint law of the ruin times """

import numpy as np
import pytest

from rbsf.joint import joint_cdf, step_floor, step_pmf_table, JointLawRequest, CSV_HEADER
from rbsf.utils import ConfigurationError, GammaTooSmallError, IndexRangeError, TruncationError

GRID = (0.2, 0.5, 1.0)


def request(spec, gamma=10.0, x_grid=GRID, y_grid=GRID, n_max=None, **kwargs):
    if n_max is None:
        n_max = max(step_floor(gamma, max(x_grid + y_grid)), 2)
    return JointLawRequest(spec=spec, gamma=gamma, x_grid=x_grid, y_grid=y_grid, n_max=n_max, **kwargs)


def test_smallest_cell(tm1):
    result = joint_cdf(request(tm1, x_grid=(0.2,), y_grid=(0.2,)))
    assert result.order1[0, 0] == pytest.approx(0.0025, abs=1e-15)
    assert result.order2[0, 0] == pytest.approx(0.0025, abs=1e-15)
    assert result.total[0, 0] == pytest.approx(0.005, abs=1e-15)
    assert result.truncation_defect[0, 0] == 0.0


def test_step_tables(tm1):
    first, second = step_pmf_table(tm1, 10.0, 4)
    assert first.n_max == 4
    assert first.p1[2] == pytest.approx(0.05, abs=1e-15)
    assert first.p2[1, 2] == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert first.p1[3] == pytest.approx(0.045, abs=1e-15)
    assert first.p2[2, 3] == pytest.approx(13.0 / 60.0, abs=1e-15)
    assert first.p1[:2].sum() == 0.0
    np.testing.assert_array_equal(first.p1, second.p1)
    with pytest.raises(IndexRangeError):
        step_pmf_table(tm1, 10.0, 1)


def test_identical_coordinates_are_symmetric(tm1):
    result = joint_cdf(request(tm1))
    np.testing.assert_allclose(result.order1, result.order2, rtol=0, atol=1e-15)


def test_monotone_and_bounded(tm1):
    result = joint_cdf(request(tm1, gamma=20.0, x_grid=(0.1, 0.3, 0.7, 1.5), y_grid=(0.2, 0.9, 1.5)))
    assert (np.diff(result.total, axis=0) >= -1e-15).all()
    assert (np.diff(result.total, axis=1) >= -1e-15).all()
    assert (result.total >= 0).all() and (result.total <= 1.0 + 1e-12).all()
    assert (np.diff(result.marginal_tau1) >= 0).all()


def test_floor_of_grid_points():
    assert step_floor(100.0, 0.29) == 29
    assert step_floor(10.0, 0.2) == 2
    assert step_floor(10.0, 0.2999) == 2
    assert step_floor(3.0, 0.1) == 0


def test_values_only_depend_on_whole_steps(tm1):
    result = joint_cdf(request(tm1, x_grid=(0.2, 0.25, 0.3), y_grid=(0.5,)))
    assert result.total[0, 0] == result.total[1, 0]
    assert result.total[2, 0] > result.total[1, 0]


def test_truncation_is_refused(tm1):
    with pytest.raises(TruncationError):
        joint_cdf(request(tm1, n_max=5))


def test_truncation_defect_bounds_missing_mass(tm1):
    full = joint_cdf(request(tm1))
    cut = joint_cdf(request(tm1, n_max=5, allow_truncation=True))
    assert full.n_max == 10
    assert (cut.total <= full.total + 1e-15).all()
    assert (full.total <= cut.total + cut.truncation_defect + 1e-12).all()
    # cells within the first five steps are exact
    assert cut.truncation_defect[0, 0] == 0.0
    assert cut.total[1, 1] == pytest.approx(full.total[1, 1], abs=1e-15)
    assert cut.truncation_defect[2, 2] > 0.0


def test_rows(tm1):
    result = joint_cdf(request(tm1))
    rows = list(result.rows())
    assert len(rows) == len(GRID) ** 2
    assert len(rows[0]) == len(CSV_HEADER)
    assert rows[1][:2] == (0.2, 0.5)
    assert result.total.shape == (3, 3)
    with pytest.raises(ValueError):
        result.total[0, 0] = 1.0


@pytest.mark.parametrize('x_grid', [(), (0.5, 0.2), (0.0, 1.0), (-1.0,), (float('inf'),)])
def test_bad_grids(tm1, x_grid):
    with pytest.raises(ConfigurationError):
        JointLawRequest(spec=tm1, gamma=10.0, x_grid=x_grid, y_grid=GRID, n_max=10)


def test_bad_gamma_and_steps(tm1):
    with pytest.raises(GammaTooSmallError):
        JointLawRequest(spec=tm1, gamma=2.0, x_grid=GRID, y_grid=GRID, n_max=10)
    with pytest.raises(IndexRangeError):
        JointLawRequest(spec=tm1, gamma=10.0, x_grid=GRID, y_grid=GRID, n_max=1)
