#!/usr/bin/env python
# _*_ coding:utf-8 _*_
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from sewflow.errors import InvalidArgument
from sewflow.statespace import (MatrixAlgebra, TensorAlgebra, TensorElement, VectorSpace, algebra_exp, check_gauge,
                                constant_gauge, distance, grouplike_distance, norm_gauge, operator_norm,
                                tensor_inverse, tensor_mul)

coordinates = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)
vectors = st.lists(coordinates, min_size=3, max_size=3).map(np.array)


@settings(max_examples=100, deadline=None)
@given(a=vectors, b=vectors, c=vectors)
def test_vector_distance_is_a_metric(a, b, c):
    assert distance(a, a) == 0.0
    assert distance(a, b) == distance(b, a)
    assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-12


def test_distance_rejects_shape_mismatch():
    with pytest.raises(InvalidArgument):
        distance(np.zeros(2), np.zeros(3))
    with pytest.raises(InvalidArgument):
        distance(TensorElement.unit(2, 2), np.zeros(7))


def test_matrix_distance_is_frobenius():
    assert distance(np.eye(2), np.zeros((2, 2))) == pytest.approx(np.sqrt(2.0))


def _tensor(seed, base_dim=2, level=3, unit=True):
    rng = np.random.default_rng(seed)
    algebra = TensorAlgebra(base_dim, level)
    data = rng.normal(size=algebra.unit().data.size)
    if unit:
        data[0] = 1.0
    return TensorElement(data, base_dim, level)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10 ** 6))
def test_tensor_product_is_associative(seed):
    a, b, c = _tensor(seed), _tensor(seed + 1), _tensor(seed + 2)
    left = tensor_mul(tensor_mul(a, b), c)
    right = tensor_mul(a, tensor_mul(b, c))
    assert distance(left, right) <= 1e-9 * (1.0 + left.norm())


matrices = st.lists(coordinates, min_size=9, max_size=9).map(lambda entries: np.array(entries).reshape(3, 3))


@settings(max_examples=100, deadline=None)
@given(a=matrices, b=matrices)
def test_matrix_norm_is_submultiplicative(a, b):
    algebra = MatrixAlgebra(3)
    assert algebra.norm(algebra.mul(a, b)) <= algebra.norm(a) * algebra.norm(b) * (1.0 + 1e-12) + 1e-12


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10 ** 6), unit=st.booleans())
def test_tensor_norm_is_submultiplicative(seed, unit):
    algebra = TensorAlgebra(2, 3)
    a, b = _tensor(seed, unit=unit), _tensor(seed + 1, unit=unit)
    assert algebra.norm(algebra.mul(a, b)) <= algebra.norm(a) * algebra.norm(b) * (1.0 + 1e-12)


def test_tensor_unit_and_inverse():
    a = _tensor(3)
    unit = TensorElement.unit(2, 3)
    assert tensor_mul(a, unit) == a
    assert tensor_mul(unit, a) == a
    assert distance(tensor_mul(a, tensor_inverse(a)), unit) <= 1e-10
    assert grouplike_distance(a, a) <= 1e-10
    with pytest.raises(InvalidArgument):
        tensor_inverse(_tensor(4, unit=False) * 3.0)


def test_tensor_product_degree_two():
    x = TensorElement.from_blocks([1.0, [1.0, 2.0]], 2, 2)
    y = TensorElement.from_blocks([1.0, [3.0, 0.0]], 2, 2)
    product = tensor_mul(x, y)
    np.testing.assert_allclose(product.block(1), [4.0, 2.0])
    np.testing.assert_allclose(product.block(2), np.outer([1.0, 2.0], [3.0, 0.0]))


def test_tensor_batch_product_matches_single():
    batch = TensorElement(np.stack([_tensor(k).data for k in range(4)]), 2, 3)
    other = _tensor(9)
    product = batch * other
    for k in range(4):
        assert distance(product[k], tensor_mul(_tensor(k), other)) <= 1e-12


def test_tensor_dict_codec():
    a = _tensor(5)
    assert TensorElement.from_dict(a.to_dict()) == a
    with pytest.raises(InvalidArgument):
        TensorElement.from_dict({'level': 2})


def test_algebra_exp_matches_expm():
    a = np.array([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(algebra_exp(a), expm(a), atol=1e-12)
    big = np.array([[0.0, 4.0], [-4.0, 0.0]])
    np.testing.assert_allclose(algebra_exp(big), expm(big), atol=1e-10)
    with pytest.raises(InvalidArgument):
        algebra_exp(np.zeros(3))


def test_algebra_exp_of_tensor_line():
    v = np.array([1.0, -2.0])
    x = TensorElement.from_blocks([0.0, v], 2, 3)
    result = algebra_exp(x)
    np.testing.assert_allclose(result.block(2), np.outer(v, v) / 2.0, atol=1e-12)
    np.testing.assert_allclose(result.block(3), np.einsum('i,j,k->ijk', v, v, v) / 6.0, atol=1e-12)


def test_operator_norm_is_max_row_sum():
    assert operator_norm([[1.0, -2.0], [0.5, 0.5]]) == 3.0
    assert operator_norm([1.0, -4.0]) == 4.0


@pytest.mark.parametrize('space', [VectorSpace(3), MatrixAlgebra(2), TensorAlgebra(2, 2)])
def test_state_sampling_is_seeded(space):
    first = space.sample(4, 1.0, 12)
    second = space.sample(4, 1.0, 12)
    assert len(first) == 4
    for a, b in zip(first, second):
        assert space.distance(a, b) == 0.0
        assert space.coerce(space.decode(space.encode(a))) is not None


def test_coerce_rejects_wrong_shapes():
    with pytest.raises(InvalidArgument):
        VectorSpace(2).coerce([1.0, 2.0, 3.0])
    with pytest.raises(InvalidArgument):
        MatrixAlgebra(2).coerce(np.eye(3))
    with pytest.raises(InvalidArgument):
        TensorAlgebra(2, 2).coerce(TensorElement.unit(2, 3))


def test_tensor_samples_are_grouplike_candidates():
    for a in TensorAlgebra(2, 3).sample(5, 0.5, 1):
        assert a.block(0) == 1.0


def test_gauges():
    space = VectorSpace(2)
    states = space.sample(16, 3.0, 4)
    result = check_gauge(norm_gauge(space), space, states)
    assert result['floor_ok']
    assert result['hoelder_ok']
    assert check_gauge(constant_gauge(2.0), space, states)['min_value'] == 2.0
    with pytest.raises(InvalidArgument):
        constant_gauge(0.5)
