#!/usr/bin/env python
# _*_ coding:utf-8 _*_
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sewflow.errors import InvalidArgument
from sewflow.timegrid import (DiscretePath, Partition, SimplexTriple, check_contraction, check_superadditive,
                              control_linear, control_pvar, default_lambda, dyadic_refine, lambda_lower_bound,
                              pi_distance, random_partition, remainder_power, sample_pairs, sample_triples,
                              theta_stat, uniform_partition)


def test_partition_rejects_bad_points():
    with pytest.raises(InvalidArgument):
        Partition([0.0])
    with pytest.raises(InvalidArgument):
        Partition([0.1, 1.0])
    with pytest.raises(InvalidArgument):
        Partition([0.0, 0.5, 0.5, 1.0])


def test_partition_points_are_read_only():
    pi = uniform_partition(1.0, 4)
    with pytest.raises(ValueError):
        pi.points[1] = 0.3


def test_simplex_triple_order():
    assert SimplexTriple(0, 0.5, 1).s == 0.5
    with pytest.raises(InvalidArgument):
        SimplexTriple(0.5, 0.2, 1.0)


@settings(max_examples=50, deadline=None)
@given(n=st.integers(min_value=1, max_value=64), horizon=st.floats(min_value=0.1, max_value=10.0),
       levels=st.integers(min_value=1, max_value=4))
def test_dyadic_refinement_nests_and_halves_mesh(n, horizon, levels):
    pi = uniform_partition(horizon, n)
    fine = pi
    for _ in range(levels):
        coarse, fine = fine, dyadic_refine(fine)
        assert fine.is_refinement_of(coarse)
        assert len(fine) == 2 * len(coarse) - 1
    assert fine.mesh == pytest.approx(pi.mesh / 2 ** levels)
    assert fine.horizon == pi.horizon


def test_random_partition_is_seeded():
    assert random_partition(2.0, 33, seed=3) == random_partition(2.0, 33, seed=3)
    assert random_partition(2.0, 33, seed=3) != random_partition(2.0, 33, seed=4)
    pi = random_partition(2.0, 33, seed=3)
    assert len(pi) == 33
    assert pi.horizon == 2.0


def test_inner_span_and_pi_distance():
    pi = uniform_partition(1.0, 4)
    assert pi.inner_span(0.1, 0.8) == (1, 3)
    assert pi.inner_span(0.25, 0.5) == (1, 2)
    i, j = pi.inner_span(0.3, 0.4)
    assert i > j
    assert pi_distance(pi, 0.25, 1.0) == 3
    with pytest.raises(InvalidArgument):
        pi_distance(pi, 0.3, 1.0)


def test_partition_csv(tmp_path):
    pi = random_partition(1.0, 9, seed=1)
    assert Partition.from_csv(pi.to_csv(str(tmp_path / 'pi.csv'))) == pi


def test_linear_control_is_additive():
    omega = control_linear(2.0)
    assert omega(0.25, 0.75) == pytest.approx(1.0)
    assert omega(0.3, 0.3) == 0.0
    assert check_superadditive(omega, sample_triples(1.0, 64, 5))['max_violation'] <= 1e-12


def test_pvar_of_monotone_path_is_its_increment():
    x = DiscretePath.from_function(lambda t: t ** 2, 1.0, 64)
    omega = control_pvar(x, 1.0)
    assert omega(0.0, 1.0) == pytest.approx(1.0)
    assert omega(0.5, 1.0) == pytest.approx(0.75)


def test_pvar_picks_the_best_subpartition():
    x = DiscretePath([0.0, 1.0, 2.0], [0.0, 1.0, 0.0])
    assert control_pvar(x, 2.0)(0.0, 2.0) == pytest.approx(2.0)
    y = DiscretePath([0.0, 1.0, 2.0], [0.0, 0.5, 1.0])
    # one jump beats the split for p > 1
    assert control_pvar(y, 2.0)(0.0, 2.0) == pytest.approx(1.0)
    assert control_pvar(y, 1.0)(0.0, 2.0) == pytest.approx(1.0)


def test_pvar_is_superadditive():
    rng = np.random.default_rng(11)
    x = DiscretePath(np.linspace(0.0, 1.0, 65), np.cumsum(rng.normal(size=(65, 2)), axis=0) / 8.0)
    omega = control_pvar(x, 2.5)
    result = check_superadditive(omega, sample_triples(1.0, 128, 2))
    assert result['max_violation'] <= 1e-12


def _sine_samples(n=1025):
    times = np.linspace(0.0, 1.0, n)
    return DiscretePath(times, np.sin(times))


def test_pvar_shrinks_to_zero_off_the_grid():
    omega = control_pvar(_sine_samples(), 1.0)
    s = 0.5 + 1e-4
    fine, coarse = omega(s, s + 2.0 ** -14), omega(s, s + 2.0 ** -10)
    assert fine == pytest.approx(math.cos(s) * 2.0 ** -14, rel=2e-3)
    assert fine / coarse == pytest.approx(2.0 ** -4, rel=1e-2)
    assert omega(s, s) == 0.0


def test_pvar_is_additive_for_bounded_variation():
    omega = control_pvar(_sine_samples(), 1.0)
    r, s, t = 0.1 + 1e-5, 0.37 + 3e-4, 0.9 - 2e-4
    assert omega(r, t) == pytest.approx(omega(r, s) + omega(s, t), abs=1e-12)
    assert omega(0.0, 1.0) == pytest.approx(math.sin(1.0), abs=1e-12)


@pytest.mark.parametrize('p', [1.0, 2.5])
@settings(max_examples=100, deadline=None)
@given(points=st.lists(st.floats(min_value=0.0, max_value=1.0, allow_nan=False), min_size=3, max_size=3))
def test_pvar_is_superadditive_off_the_grid(p, points):
    rng = np.random.default_rng(5)
    x = DiscretePath(np.linspace(0.0, 1.0, 33), np.cumsum(rng.normal(size=(33, 2)), axis=0) / 8.0)
    omega = control_pvar(x, p)
    r, s, t = sorted(points)
    assert omega(r, s) + omega(s, t) <= omega(r, t) + 1e-12

    with pytest.raises(InvalidArgument):
        control_pvar(DiscretePath([0.0], [[1.0]]), 1.0)
    with pytest.raises(InvalidArgument):
        control_pvar(DiscretePath([0.0, 1.0], [0.0, 1.0]), 0.5)


@pytest.mark.parametrize('theta', [1.2, 1.5, 2.0, 3.0])
def test_power_remainder_contraction(theta):
    varpi = remainder_power(theta)
    assert varpi.kappa == pytest.approx(2.0 ** (1.0 - theta))
    assert check_contraction(varpi) <= 1e-12


def test_remainder_power_of_power():
    varpi = remainder_power(2.0)
    lam = 0.9
    powered = varpi.power(lam)
    assert powered.kappa == pytest.approx(2.0 ** (1.0 - lam) * 0.5 ** lam)
    assert powered(0.5) == pytest.approx(0.25 ** lam)
    assert check_contraction(powered) <= 1e-12
    with pytest.raises(InvalidArgument):
        varpi.power(0.4)


def test_remainder_rejects_small_exponent():
    with pytest.raises(InvalidArgument):
        remainder_power(1.0)


def test_default_lambda_is_admissible():
    for kappa in (0.1, 0.5, 0.87, 0.99):
        lam = default_lambda(kappa)
        assert lambda_lower_bound(kappa) < lam < 1


def test_theta_stat_on_uniform_grid():
    varpi = remainder_power(2.0)
    omega = control_linear(1.0)
    lam = 0.9
    for n in (4, 16, 64):
        expected = (1.0 / n) ** (2.0 * (1.0 - lam))
        assert theta_stat(uniform_partition(1.0, n), omega, varpi, lam) == pytest.approx(expected)
    with pytest.raises(InvalidArgument) as excinfo:
        theta_stat(uniform_partition(1.0, 4), omega, varpi, 0.3)
    assert 'bound' in excinfo.value.details


def test_discrete_path_interpolation():
    x = DiscretePath([0.0, 1.0, 2.0], [[0.0, 1.0], [2.0, 1.0], [2.0, 3.0]])
    assert x.dim == 2
    np.testing.assert_allclose(x.value_at(0.5), [1.0, 1.0])
    np.testing.assert_allclose(x.value_at(1.5), [2.0, 2.0])
    np.testing.assert_allclose(x.value_at(5.0), [2.0, 3.0])
    np.testing.assert_allclose(x.increment(0.0, 2.0), [2.0, 2.0])
    np.testing.assert_allclose(x.values_at([0.5, 1.5]), [[1.0, 1.0], [2.0, 2.0]])


def test_discrete_path_csv(tmp_path):
    x = DiscretePath.from_function(lambda t: [math.sin(t), t], 1.0, 8)
    y = DiscretePath.from_csv(x.to_csv(str(tmp_path / 'x.csv')))
    np.testing.assert_array_equal(x.times, y.times)
    np.testing.assert_array_equal(x.values, y.values)


def test_sampled_pairs_are_ordered_and_seeded():
    pairs = sample_pairs(2.0, 16, 9)
    assert pairs == sample_pairs(2.0, 16, 9)
    assert all(0 <= s <= t <= 2.0 for s, t in pairs)
    assert len(pairs) == 16
