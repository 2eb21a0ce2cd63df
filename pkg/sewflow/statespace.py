#!/usr/bin/env python
# _*_ coding:utf-8 _*_

"""
sewflow.statespace

State spaces the flows act on: real vectors with the max-norm, square matrices with the
Frobenius norm, and the truncated tensor algebra over R^d with per-degree Frobenius norms
summed over degrees.
"""
import logging
import math

import numpy as np

from sewflow.errors import InvalidArgument
from sewflow.timegrid import sobol_points


def tensor_offsets(base_dim, level):
    """Start index of every degree block in the flat storage, plus the total size"""
    offsets = [0]
    for j in range(level + 1):
        offsets.append(offsets[-1] + base_dim ** j)
    return offsets


def _flat_mul(x, y, base_dim, level, offsets):
    batch = np.broadcast_shapes(x.shape[:-1], y.shape[:-1])
    out = np.empty(batch + (offsets[-1],))
    for j in range(level + 1):
        acc = None
        for i in range(j + 1):
            xi = x[..., offsets[i]:offsets[i + 1]]
            yi = y[..., offsets[j - i]:offsets[j - i + 1]]
            term = (xi[..., :, None] * yi[..., None, :]).reshape(batch + (base_dim ** j,))
            acc = term if acc is None else acc + term
        out[..., offsets[j]:offsets[j + 1]] = acc
    return out


class TensorElement(object):
    """Element (or batch of elements) of T_k(R^d), degree blocks stored flat along the last axis"""

    __slots__ = ('data', 'base_dim', 'level', '_offsets')

    def __init__(self, data, base_dim, level):
        data = np.asarray(data, dtype=float)
        offsets = tensor_offsets(base_dim, level)
        if data.ndim == 0 or data.shape[-1] != offsets[-1]:
            raise InvalidArgument('tensor data does not match the base dimension and level',
                                  {'base_dim': base_dim, 'level': level, 'shape': data.shape})
        self.data = data
        self.base_dim = int(base_dim)
        self.level = int(level)
        self._offsets = offsets

    @classmethod
    def from_blocks(cls, blocks, base_dim, level):
        """Build from per-degree arrays; missing degrees are zero, degrees above `level` are dropped"""
        offsets = tensor_offsets(base_dim, level)
        data = np.zeros(offsets[-1])
        for j, block in enumerate(blocks[:level + 1]):
            block = np.asarray(block, dtype=float).ravel()
            if block.size != base_dim ** j:
                raise InvalidArgument('block size does not match its degree',
                                      {'degree': j, 'size': block.size, 'expected': base_dim ** j})
            data[offsets[j]:offsets[j + 1]] = block
        return cls(data, base_dim, level)

    @classmethod
    def unit(cls, base_dim, level):
        data = np.zeros(tensor_offsets(base_dim, level)[-1])
        data[0] = 1.0
        return cls(data, base_dim, level)

    @classmethod
    def zero(cls, base_dim, level):
        return cls(np.zeros(tensor_offsets(base_dim, level)[-1]), base_dim, level)

    @property
    def batch_shape(self):
        return self.data.shape[:-1]

    def block(self, j):
        if not 0 <= j <= self.level:
            raise InvalidArgument('degree out of range', {'degree': j, 'level': self.level})
        flat = self.data[..., self._offsets[j]:self._offsets[j + 1]]
        return flat.reshape(self.batch_shape + (self.base_dim,) * j)

    def blocks(self):
        return [self.block(j) for j in range(self.level + 1)]

    def degree_norms(self):
        return [np.linalg.norm(self.data[..., self._offsets[j]:self._offsets[j + 1]], axis=-1)
                for j in range(self.level + 1)]

    def norm(self):
        norms = self.degree_norms()
        total = norms[0]
        for n in norms[1:]:
            total = total + n
        return total if self.batch_shape else float(total)

    def _check_same(self, other):
        if not isinstance(other, TensorElement) or (other.base_dim, other.level) != (self.base_dim, self.level):
            raise InvalidArgument('tensor elements differ in base dimension or level')

    def __getitem__(self, index):
        return TensorElement(self.data[index], self.base_dim, self.level)

    def __add__(self, other):
        self._check_same(other)
        return TensorElement(self.data + other.data, self.base_dim, self.level)

    def __sub__(self, other):
        self._check_same(other)
        return TensorElement(self.data - other.data, self.base_dim, self.level)

    def __neg__(self):
        return TensorElement(-self.data, self.base_dim, self.level)

    def __mul__(self, other):
        if isinstance(other, TensorElement):
            return tensor_mul(self, other)
        return TensorElement(self.data * float(other), self.base_dim, self.level)

    def __rmul__(self, other):
        return TensorElement(self.data * float(other), self.base_dim, self.level)

    def __eq__(self, other):
        return (isinstance(other, TensorElement) and other.base_dim == self.base_dim
                and other.level == self.level and np.array_equal(self.data, other.data))

    def __repr__(self):
        return 'TensorElement(base_dim={0}, level={1}, batch={2})'.format(self.base_dim, self.level, self.batch_shape)

    def to_dict(self):
        return {
            'base_dim': self.base_dim,
            'level': self.level,
            'blocks': [block.tolist() if j else float(block) for j, block in enumerate(self.blocks())]
        }

    @classmethod
    def from_dict(cls, data):
        try:
            base_dim, level = int(data['base_dim']), int(data['level'])
            blocks = data['blocks']
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidArgument('malformed tensor descriptor', {'error': e})
        return cls.from_blocks(blocks, base_dim, level)


def tensor_mul(a, b):
    """Truncated tensor product; degree j of the result is sum_i a_i (x) b_(j-i), summed in increasing i"""
    if not isinstance(a, TensorElement) or not isinstance(b, TensorElement):
        raise InvalidArgument('tensor_mul expects two tensor elements')
    a._check_same(b)
    return TensorElement(_flat_mul(a.data, b.data, a.base_dim, a.level, a._offsets), a.base_dim, a.level)


def tensor_inverse(a):
    """Inverse of an element with degree-0 block 1, by the finite series sum (1 - a)^n"""
    if np.any(a.data[..., 0] != 1.0):
        raise InvalidArgument('only elements with degree-0 block equal to 1 are inverted here')
    unit = TensorElement.unit(a.base_dim, a.level)
    x = unit - a
    result = unit
    power = unit
    for _ in range(a.level):
        power = tensor_mul(power, x)
        result = result + power
    return result


def algebra_exp(a, terms=30):
    """
    Exponential series used as an oracle: partial sum up to a^terms/terms!,
    with scaling and squaring when the norm exceeds 1
    :param a: square matrix or tensor element
    """
    if terms < 1:
        raise InvalidArgument('the exponential series needs at least one term', {'terms': terms})

    if isinstance(a, TensorElement):
        unit = TensorElement.unit(a.base_dim, a.level)
        mul = tensor_mul
        norm = a.norm()
    else:
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidArgument('algebra_exp expects a square matrix', {'shape': a.shape})
        unit = np.eye(a.shape[0])
        mul = np.matmul
        norm = np.linalg.norm(a)

    squarings = int(math.ceil(math.log2(norm))) if norm > 1 else 0
    x = a * (0.5 ** squarings)
    result = unit
    term = unit
    for j in range(1, terms + 1):
        term = mul(term, x) * (1.0 / j)
        result = result + term
    for _ in range(squarings):
        result = mul(result, result)
    return result


def operator_norm(matrix):
    """Norm of a linear map for the max-norm on both sides: the largest absolute row sum"""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim == 1:
        matrix = matrix.reshape(-1, 1)
    return float(np.max(np.sum(np.abs(matrix), axis=-1)))


def distance(a, b):
    """Flat distance: max-norm for vectors, Frobenius for matrices, summed degree norms for tensors"""
    if isinstance(a, TensorElement) or isinstance(b, TensorElement):
        if not (isinstance(a, TensorElement) and isinstance(b, TensorElement)):
            raise InvalidArgument('cannot measure a tensor against a non-tensor state')
        return (a - b).norm()
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise InvalidArgument('states have different shapes', {'a': a.shape, 'b': b.shape})
    if a.ndim <= 1:
        return float(np.max(np.abs(a - b))) if a.size else 0.0
    return float(np.linalg.norm(a - b))


def grouplike_distance(a, b):
    """|a^-1 (x) b - 1| on elements whose degree-0 block is 1"""
    unit = TensorElement.unit(a.base_dim, a.level)
    return (tensor_mul(tensor_inverse(a), b) - unit).norm()


class StateSpace(object):
    """Common interface of the state spaces; addition is available unless `supports_addition` is False"""

    name = 'state space'
    supports_addition = True

    def coerce(self, a):
        raise NotImplementedError

    def norm(self, a):
        raise NotImplementedError

    def distance(self, a, b):
        return distance(a, b)

    def add(self, a, b):
        return a + b

    def zero(self):
        raise NotImplementedError

    def sample(self, n, box, seed):
        raise NotImplementedError

    def encode(self, a):
        return a.tolist()

    def decode(self, data):
        return self.coerce(data)

    def to_dict(self):
        raise NotImplementedError


class VectorSpace(StateSpace):

    name = 'vector'

    def __init__(self, dim):
        if dim < 1:
            raise InvalidArgument('vector space dimension must be positive', {'dim': dim})
        self.dim = int(dim)

    def coerce(self, a):
        a = np.atleast_1d(np.asarray(a, dtype=float))
        if a.shape != (self.dim,):
            raise InvalidArgument('state does not match the vector dimension', {'dim': self.dim, 'shape': a.shape})
        return a

    def norm(self, a):
        return float(np.max(np.abs(a)))

    def zero(self):
        return np.zeros(self.dim)

    def sample(self, n, box, seed):
        """Low-discrepancy states in the cube [-box, box]^dim"""
        return [box * (2.0 * u - 1.0) for u in sobol_points(self.dim, n, seed)]

    def to_dict(self):
        return {'kind': self.name, 'dim': self.dim}


class MatrixAlgebra(StateSpace):

    name = 'matrix'

    def __init__(self, dim):
        if dim < 1:
            raise InvalidArgument('matrix dimension must be positive', {'dim': dim})
        self.dim = int(dim)

    def coerce(self, a):
        a = np.asarray(a, dtype=float)
        if a.shape != (self.dim, self.dim):
            raise InvalidArgument('state is not a square matrix of the algebra', {'dim': self.dim, 'shape': a.shape})
        return a

    def norm(self, a):
        return float(np.linalg.norm(a))

    def unit(self):
        return np.eye(self.dim)

    def zero(self):
        return np.zeros((self.dim, self.dim))

    def mul(self, a, b):
        return a @ b

    def sample(self, n, box, seed):
        """Unit plus a low-discrepancy perturbation with entries in [-box, box]"""
        points = sobol_points(self.dim * self.dim, n, seed)
        return [np.eye(self.dim) + box * (2.0 * u - 1.0).reshape(self.dim, self.dim) for u in points]

    def to_dict(self):
        return {'kind': self.name, 'dim': self.dim}


class TensorAlgebra(StateSpace):

    name = 'tensor'

    def __init__(self, base_dim, level):
        if base_dim < 1 or level < 1:
            raise InvalidArgument('tensor algebra needs base_dim >= 1 and level >= 1',
                                  {'base_dim': base_dim, 'level': level})
        self.base_dim = int(base_dim)
        self.level = int(level)

    def coerce(self, a):
        if isinstance(a, TensorElement):
            if (a.base_dim, a.level) != (self.base_dim, self.level):
                raise InvalidArgument('tensor element belongs to another algebra',
                                      {'base_dim': a.base_dim, 'level': a.level})
            return a
        if isinstance(a, dict):
            return self.coerce(TensorElement.from_dict(a))
        return TensorElement(a, self.base_dim, self.level)

    def norm(self, a):
        return a.norm()

    def unit(self):
        return TensorElement.unit(self.base_dim, self.level)

    def zero(self):
        return TensorElement.zero(self.base_dim, self.level)

    def mul(self, a, b):
        return tensor_mul(a, b)

    def sample(self, n, box, seed):
        """Elements with degree-0 block 1 and higher entries in [-box, box]"""
        size = tensor_offsets(self.base_dim, self.level)[-1]
        states = []
        for u in sobol_points(size - 1, n, seed):
            data = np.concatenate([[1.0], box * (2.0 * u - 1.0)])
            states.append(TensorElement(data, self.base_dim, self.level))
        return states

    def encode(self, a):
        return a.to_dict()

    def to_dict(self):
        return {'kind': self.name, 'base_dim': self.base_dim, 'level': self.level}


class GrowthGauge(object):

    def __init__(self, evaluator, gamma=1.0, hoelder_const=0.0, name='custom'):
        """
        GrowthGauge
        :param evaluator: state -> real >= 1
        :param gamma: Hoelder exponent in (0, 1]
        :param hoelder_const: declared Hoelder constant of the evaluator
        """
        if not 0 < gamma <= 1:
            raise InvalidArgument('gauge exponent must lie in (0, 1]', {'gamma': gamma})
        self.evaluator = evaluator
        self.gamma = float(gamma)
        self.hoelder_const = float(hoelder_const)
        self.name = name

    def __call__(self, a):
        return float(self.evaluator(a))

    def to_dict(self):
        return {'name': self.name, 'gamma': self.gamma, 'hoelder_const': self.hoelder_const}


def constant_gauge(value=1.0, gamma=1.0):
    if value < 1:
        raise InvalidArgument('a gauge is bounded below by 1', {'value': value})
    value = float(value)
    return GrowthGauge(lambda a: value, gamma, 0.0, 'constant')


def norm_gauge(space):
    """N(a) = |a| v 1, 1-Lipschitz for the flat distance"""
    return GrowthGauge(lambda a: max(space.norm(a), 1.0), 1.0, 1.0, 'norm')


def check_gauge(gauge, space, states):
    """Floor and Hoelder spot-check of a gauge on the given states (consecutive pairs)"""
    values = [gauge(a) for a in states]
    worst_ratio = 0.0
    for a, b, na, nb in zip(states, states[1:], values, values[1:]):
        d = space.distance(a, b)
        if d > 0:
            worst_ratio = max(worst_ratio, abs(na - nb) / d ** gauge.gamma)
    report = {
        'min_value': min(values),
        'floor_ok': min(values) >= 1.0,
        'hoelder_ratio': worst_ratio,
        'hoelder_ok': worst_ratio <= gauge.hoelder_const * (1.0 + 1e-12) + 1e-12
    }
    if not report['floor_ok']:
        logging.warning('Gauge %s drops below 1: %s', gauge.name, report['min_value'])
    return report
