#!/usr/bin/env python
# _*_ coding:utf-8 _*_
import logging

import numpy as np
import pytest

from sewflow.almostflow import SamplerSpec, perturb
from sewflow.builtins import (broken_flow, identity_flow, integral_functional, linear_path, quadratic_perturbation,
                              remainder_perturbation, scalar_exponential_field, sine_path)
from sewflow.errors import DivergenceError, InsufficientData, InvalidArgument
from sewflow.metadata import LevelRecord
from sewflow.schemes import additive_flow, young_flow
from sewflow.sewing import (SewSchedule, cauchy_gap, flow_property_check, rate_fit, rate_fit_history, sew,
                            ul_spot_check, uniform_bound_sweep, uniqueness_crosscheck)
from sewflow.timegrid import dyadic_refine, random_partition, sample_triples, uniform_partition
from sewflow.utils import read_csv_file, read_json_file


@pytest.fixture
def integral_flow():
    return additive_flow(integral_functional(linear_path()))


@pytest.fixture
def integral_schedule(end_pairs_sampler):
    return SewSchedule(max_levels=12, tolerance=2.5e-4, sampler=end_pairs_sampler)


def test_schedule_from_dict():
    schedule = SewSchedule.from_dict({'base': {'n': 4}, 'max_levels': 3, 'tolerance': 1e-3}, horizon=2.0)
    assert schedule.base == uniform_partition(2.0, 4)
    assert schedule.to_dict()['base'] == [0.0, 0.5, 1.0, 1.5, 2.0]
    listed = SewSchedule.from_dict({'base': [0.0, 0.3, 1.0]})
    assert len(listed.base) == 3
    with pytest.raises(InvalidArgument):
        SewSchedule(max_levels=0)
    with pytest.raises(InvalidArgument):
        SewSchedule(tolerance=0.0)


def test_base_partition_must_match_the_horizon(integral_flow):
    schedule = SewSchedule(base=uniform_partition(2.0, 2))
    with pytest.raises(InvalidArgument):
        schedule.base_for(integral_flow)


def test_integral_of_x_dx(integral_flow, integral_schedule):
    approx = sew(integral_flow, integral_schedule)
    assert approx.converged
    assert len(approx.history) - 1 == 12
    # left Riemann sums of int_0^1 t dt on 2^k cells
    value = approx.evaluate(0.0, 1.0, np.zeros(1))[0]
    assert value == pytest.approx(0.5 - 2.0 ** -13, abs=1e-12)
    gaps = [record.gap for record in approx.history[1:]]
    # from level 3 on both sampled pairs have their ends on the grid
    for coarse, fine in zip(gaps[2:], gaps[3:]):
        assert 0.375 <= fine / coarse <= 0.625


def test_richardson_recovers_the_integral(integral_flow, end_pairs_sampler):
    base = uniform_partition(1.0, 1)
    values = []
    pi = base
    for _ in range(12):
        pi = dyadic_refine(pi)
        approx = sew(integral_flow, SewSchedule(base=pi, max_levels=1, tolerance=1.0, sampler=end_pairs_sampler),
                     check=False)
        values.append(approx.evaluate(0.0, 1.0, np.zeros(1))[0])
    assert 2.0 * values[-1] - values[-2] == pytest.approx(0.5, abs=1e-12)


def test_rate_fit_of_first_order_sums(integral_flow):
    sampler = SamplerSpec(pairs=[[0.0, 1.0]], states=[[0.0]])
    approx = sew(integral_flow, SewSchedule(max_levels=12, tolerance=1e-9, sampler=sampler))
    fit = rate_fit(approx)
    # gap ~ mesh and theta ~ mesh^(2 (1 - lambda)) with lambda 0.9
    assert fit.slope == pytest.approx(5.0, abs=0.2)
    assert fit.r2 >= 0.99
    assert approx.fitted_rate.slope == pytest.approx(fit.slope)


@pytest.fixture(scope='module')
def exponential_young():
    """dy = y dsin sewn on the schedule of the young-exponential config"""
    phi = young_flow(scalar_exponential_field(), sine_path(), p=1.0)
    sampler = SamplerSpec(seed=7, pairs=[[0.0, 1.0], [0.25, 0.75]], states=[[1.0]])
    return phi, SewSchedule(max_levels=16, tolerance=2e-5, sampler=sampler)


def test_rate_fit_of_the_young_scheme(exponential_young):
    phi, schedule = exponential_young
    approx = sew(phi, schedule, check='warn')
    assert approx.converged
    fit = rate_fit(approx)
    assert fit.slope >= 0.9
    assert fit.r2 >= 0.95


def test_rate_fit_needs_three_levels():
    history = [LevelRecord(0, 1.0, 1.0), LevelRecord(1, 0.5, 0.8, 0.1)]
    with pytest.raises(InsufficientData):
        rate_fit_history(history)


def test_single_level_does_not_certify(integral_flow, end_pairs_sampler):
    approx = sew(integral_flow, SewSchedule(max_levels=1, tolerance=1e-6, sampler=end_pairs_sampler))
    assert not approx.converged
    assert approx.final_gap > 1e-6
    assert approx.fitted_rate is None


def test_broken_flow_is_refused_then_diverges(end_pairs_sampler):
    schedule = SewSchedule(max_levels=10, sampler=end_pairs_sampler)
    with pytest.raises(InvalidArgument):
        sew(broken_flow(), schedule)
    with pytest.raises(DivergenceError) as excinfo:
        sew(broken_flow(), schedule, check='warn')
    history = excinfo.value.history
    assert len(history) >= 5
    gaps = [record.gap for record in history[1:]]
    assert gaps[-1] > gaps[-2] > gaps[-3]


def test_large_horizon_warning(caplog, end_pairs_sampler):
    phi = identity_flow()
    psi = perturb(phi, quadratic_perturbation(phi))
    with caplog.at_level(logging.WARNING):
        sew(psi, SewSchedule(max_levels=2, sampler=end_pairs_sampler), check=False)
    assert 'Horizon may be too large' in caplog.text


def test_identity_flow_converges_at_once(sampler):
    approx = sew(identity_flow(), SewSchedule(max_levels=5, tolerance=1e-9, sampler=sampler))
    assert approx.converged
    assert approx.final_gap == 0.0
    assert len(approx.history) == 2


def test_history_and_summary_files(tmp_path, integral_flow, integral_schedule):
    approx = sew(integral_flow, integral_schedule)
    header, data = read_csv_file(approx.history_to_csv(str(tmp_path / 'history.csv')))
    assert header == ['level', 'mesh', 'theta', 'gap', 'evaluations']
    assert data.shape == (13, 5)
    assert np.isnan(data[0, 3])
    np.testing.assert_allclose(data[:, 1], 2.0 ** -np.arange(13))
    summary = read_json_file(approx.summary_to_json(str(tmp_path / 'summary.json'), {'value': 0.5}))
    assert summary['converged'] is True
    assert summary['levels'] == 12
    assert summary['value'] == 0.5
    assert summary['fitted_rate']['slope'] > 4.0


def test_cauchy_gap_needs_nested_partitions(integral_flow, end_pairs_sampler):
    coarse = uniform_partition(1.0, 4)
    gap = cauchy_gap(integral_flow, coarse, dyadic_refine(coarse), end_pairs_sampler)
    assert gap > 0
    with pytest.raises(InvalidArgument):
        cauchy_gap(integral_flow, random_partition(1.0, 5, 1), random_partition(1.0, 9, 2), end_pairs_sampler)


def test_sewn_limit_is_nearly_a_flow(integral_flow, integral_schedule):
    approx = sew(integral_flow, integral_schedule)
    result = flow_property_check(approx, sample_triples(1.0, 50, 3), [np.zeros(1), np.ones(1)])
    assert result['max_defect'] <= 1e-3
    assert len(result['witness']) == 3


def test_uniqueness_in_a_galaxy(end_pairs_sampler):
    phi = identity_flow()
    chi = perturb(phi, quadratic_perturbation(phi))
    result = uniqueness_crosscheck(phi, chi, SewSchedule(max_levels=12, tolerance=1e-3, sampler=end_pairs_sampler))
    assert result['per_level'][-1] < result['per_level'][0]
    assert result['limit_distance'] <= 1e-2
    assert result['galaxy_distance'] <= 1.0 + 1e-9


def test_uniqueness_of_the_young_limit(exponential_young):
    phi, schedule = exponential_young
    chi = perturb(phi, remainder_perturbation(phi, 0.5))
    result = uniqueness_crosscheck(phi, chi, schedule)
    assert result['galaxy_distance'] < float('inf')
    assert result['limit_distance'] <= 10.0 * schedule.tolerance
    tail = result['per_level'][-4:]
    assert len(tail) == 4
    for coarse, fine in zip(tail, tail[1:]):
        assert fine < coarse


def test_uniqueness_needs_a_common_galaxy(end_pairs_sampler):
    schedule = SewSchedule(max_levels=4, tolerance=1e-3, sampler=end_pairs_sampler)
    with pytest.raises(InvalidArgument):
        uniqueness_crosscheck(identity_flow(), broken_flow(), schedule)


def test_uniform_bound_sweep(sampler):
    phi = identity_flow()
    psi = perturb(phi, quadratic_perturbation(phi))
    partitions = [random_partition(1.0, n, seed) for seed, n in enumerate([2, 5, 17, 65, 257])]
    result = uniform_bound_sweep(psi, partitions, sampler)
    assert len(result['partitions']) == 5
    assert result['L_max'] <= 1.0 + 1e-12
    assert result['K_max'] == 1.0


def test_young_bound_is_uniform_over_random_partitions(exponential_young):
    phi, schedule = exponential_young
    sizes = np.linspace(5, 200, 20).astype(int)
    partitions = [random_partition(1.0, int(n), seed) for seed, n in enumerate(sizes)]
    result = uniform_bound_sweep(phi, partitions, schedule.sampler)
    assert [row['n_points'] for row in result['partitions']] == list(sizes)
    assert result['L_min'] > 0
    assert result['L_max'] <= 2.0 * result['L_min']
    assert result['K_max'] < float('inf')


def test_ul_spot_check(integral_flow, sampler):
    partitions = [uniform_partition(1.0, 2 ** k) for k in range(4)]
    result = ul_spot_check(integral_flow, partitions, sampler)
    assert result['passed']
    assert result['max_ratio'] == pytest.approx(1.0)
    assert result['checked_partitions'] == [2, 3, 5, 9]
