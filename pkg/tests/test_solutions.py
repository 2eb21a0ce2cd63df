#!/usr/bin/env python
# _*_ coding:utf-8 _*_
import math

import numpy as np
import pytest

from sewflow.almostflow import SamplerSpec, validate_almost_flow
from sewflow.builtins import linear_path, scalar_exponential_field, sine_path, sqrt_hoelder_field, zero_field
from sewflow.errors import InvalidArgument
from sewflow.schemes import young_flow
from sewflow.sewing import SewSchedule, sew, uniform_bound_sweep
from sewflow.solutions import DPath, davie_defect, flow_to_solution, restrict, splice
from sewflow.timegrid import random_partition, uniform_partition

GRID = np.linspace(0.0, 1.0, 17).tolist()


@pytest.fixture
def sqrt_flow():
    """dy = sqrt|y| dt from 0: both y = 0 and y = t^2/4 solve it"""
    return young_flow(sqrt_hoelder_field(), linear_path(), p=1.0)


@pytest.fixture(scope='module')
def exponential_run():
    phi = young_flow(scalar_exponential_field(), sine_path(), p=1.0)
    sampler = SamplerSpec(pairs=[[0.0, 1.0], [0.25, 0.75]], states=[[1.0]])
    approx = sew(phi, SewSchedule(max_levels=16, tolerance=2e-5, sampler=sampler), check='warn')
    return phi, sampler, approx


def _path(func, times=GRID, start=None):
    return DPath(times, [np.array([func(t)]) for t in times], start=start)


def test_dpath_validation():
    with pytest.raises(InvalidArgument):
        DPath([], [])
    with pytest.raises(InvalidArgument):
        DPath([0.0, 1.0], [np.zeros(1)])
    with pytest.raises(InvalidArgument):
        DPath([0.0, 0.5, 0.5], [np.zeros(1)] * 3)
    y = _path(lambda t: t)
    assert y.r == 0.0
    with pytest.raises(InvalidArgument):
        y.value_at(0.3)


def test_dpath_csv(tmp_path):
    y = _path(lambda t: t * t)
    z = DPath.from_csv(y.to_csv(str(tmp_path / 'y.csv')))
    assert z.times == y.times
    np.testing.assert_array_equal(np.array(z.values), np.array(y.values))


def test_both_solutions_have_a_finite_defect(sqrt_flow):
    zero = davie_defect(_path(lambda t: 0.0), sqrt_flow)
    assert zero.constant == 0.0
    assert zero.pairs == 16 * 17 // 2
    parabola = davie_defect(_path(lambda t: t * t / 4.0), sqrt_flow)
    # (t - s)^2 / 4 against N(0) (t - s)^1.5 with N(0) = 2
    assert 0.0 < parabola.constant <= 1.0 / 8.0 + 1e-12
    assert parabola.worst_pair is not None


def test_a_path_that_is_no_solution(sqrt_flow):
    report = davie_defect(_path(lambda t: math.sqrt(t)), sqrt_flow)
    assert report.constant > 1.0
    assert report.to_dict()['grid_size'] == 17


def test_splicing_two_solutions(sqrt_flow):
    y = _path(lambda t: 0.0)
    z = _path(lambda t: (t - 0.5) ** 2 / 4.0, times=[t for t in GRID if t >= 0.5])
    spliced = splice(y, z, 0.5)
    assert spliced.times == GRID
    assert spliced.start == y.start
    np.testing.assert_array_equal(spliced.value_at(0.75), [0.015625])
    assert davie_defect(spliced, sqrt_flow).constant <= 1.0 / 8.0 + 1e-12


def test_splice_of_two_young_solutions(exponential_run):
    phi, sampler, approx = exponential_run
    y = flow_to_solution(approx, 0.0, [1.0], GRID)
    z = flow_to_solution(approx, 0.5, y.value_at(0.5), GRID)
    spliced = splice(y, z, 0.5)
    assert spliced.times == GRID
    delta = validate_almost_flow(phi, sampler).fitted['delta_T']
    bound = (2.0 + delta) * max(davie_defect(y, phi).constant, davie_defect(z, phi).constant)
    assert 0 < davie_defect(spliced, phi).constant <= 1.1 * bound


def test_splice_needs_matching_junction():
    y = _path(lambda t: 0.0)
    z = _path(lambda t: 1.0, times=[t for t in GRID if t >= 0.5])
    with pytest.raises(InvalidArgument):
        splice(y, z, 0.5)
    w = _path(lambda t: 0.0, times=[t for t in GRID if t >= 0.5625])
    with pytest.raises(InvalidArgument):
        splice(y, w, 0.5)


def test_restrict_keeps_the_start():
    y = _path(lambda t: t)
    sub = restrict(y, [0.0, 0.5, 1.0])
    assert sub.times == [0.0, 0.5, 1.0]
    assert sub.start == y.start
    later = restrict(y, [0.5, 1.0])
    assert later.r == 0.5
    with pytest.raises(InvalidArgument):
        restrict(y, [0.3])


def test_zero_field_gives_a_constant_solution():
    phi = young_flow(zero_field(), linear_path(), p=1.0)
    approx = sew(phi, SewSchedule(max_levels=3, tolerance=1e-9))
    y = flow_to_solution(approx, 0.0, [0.5], GRID)
    assert all(v[0] == 0.5 for v in y.values)
    assert davie_defect(y, phi).constant == 0.0


def test_exponential_solution(exponential_run):
    phi, sampler, approx = exponential_run
    assert approx.converged
    y = flow_to_solution(approx, 0.0, [1.0], GRID)
    np.testing.assert_allclose([v[0] for v in y.values], [math.exp(math.sin(t)) for t in GRID], atol=1e-4)

    report = davie_defect(y, phi)
    partitions = [uniform_partition(1.0, 1)] + [random_partition(1.0, 65, seed) for seed in range(4)]
    sweep = uniform_bound_sweep(phi, partitions, sampler)
    assert 0.0 < report.constant <= 2.0 * sweep['L_max']


def test_solution_from_a_later_start(exponential_run):
    _, _, approx = exponential_run
    y = flow_to_solution(approx, 0.25, [2.0], GRID)
    assert y.times[0] == 0.25
    assert len(y) == 13
    expected = 2.0 * math.exp(math.sin(1.0) - math.sin(0.25))
    assert y.values[-1][0] == pytest.approx(expected, abs=2e-4)


def test_solution_arguments(exponential_run):
    _, _, approx = exponential_run
    with pytest.raises(InvalidArgument):
        flow_to_solution(approx, 1.0, [1.0], GRID)
    with pytest.raises(InvalidArgument):
        flow_to_solution(approx, 0.0, [1.0], [0.0, 2.0])
