#!/usr/bin/env python
# _*_ coding:utf-8 _*_

"""
sewflow.timegrid

Time simplices, partitions and their dyadic refinement, controls, remainders,
discrete driving paths and the rate statistic of a partition.
"""
import logging
import math
from bisect import bisect_left, bisect_right
from collections import namedtuple

import numpy as np
from scipy.stats import qmc

from sewflow import const
from sewflow.errors import InvalidArgument
from sewflow.utils import read_csv_file, write_csv_file


class SimplexTriple(namedtuple('SimplexTriple', ['r', 's', 't'])):
    """Ordered times r <= s <= t"""
    __slots__ = ()

    def __new__(cls, r, s, t):
        r, s, t = float(r), float(s), float(t)
        if not r <= s <= t:
            raise InvalidArgument('simplex triple must satisfy r <= s <= t', {'r': r, 's': s, 't': t})
        return super(SimplexTriple, cls).__new__(cls, r, s, t)


class Partition(object):

    def __init__(self, points):
        """
        Partition
        :param points: strictly increasing times, first one 0, last one the horizon T
        """
        points = np.array(points, dtype=float).ravel()
        if points.size < 2:
            raise InvalidArgument('a partition needs at least two points', {'size': points.size})
        if points[0] != 0.0:
            raise InvalidArgument('a partition starts at 0', {'first': points[0]})
        if not np.all(np.diff(points) > 0):
            raise InvalidArgument('partition points must be strictly increasing')
        points.setflags(write=False)
        self.points = points
        self._point_list = points.tolist()

    @property
    def horizon(self):
        return self._point_list[-1]

    @property
    def mesh(self):
        return float(np.max(np.diff(self.points)))

    def __len__(self):
        return len(self._point_list)

    def __iter__(self):
        return iter(self._point_list)

    def __contains__(self, t):
        i = bisect_left(self._point_list, t)
        return i < len(self._point_list) and self._point_list[i] == t

    def __eq__(self, other):
        return isinstance(other, Partition) and np.array_equal(self.points, other.points)

    def __repr__(self):
        return 'Partition(n={0}, horizon={1}, mesh={2})'.format(len(self), self.horizon, self.mesh)

    def index_of(self, t):
        """Index of a grid point; off-grid times are rejected"""
        i = bisect_left(self._point_list, t)
        if i == len(self._point_list) or self._point_list[i] != t:
            raise InvalidArgument('time is not a point of the partition', {'t': t})
        return i

    def inner_span(self, s, t):
        """Indices (i, j) of the first point >= s and the last point <= t; i > j when none is inside"""
        return bisect_left(self._point_list, s), bisect_right(self._point_list, t) - 1

    def is_refinement_of(self, other):
        return all(t in self for t in other)

    def to_dict(self):
        return {'points': self._point_list, 'mesh': self.mesh}

    def to_csv(self, csv_file):
        return write_csv_file([[t] for t in self._point_list], csv_file, fileheader=['time'])

    @classmethod
    def from_csv(cls, csv_file):
        header, data = read_csv_file(csv_file)
        return cls(data[:, 0])


def uniform_partition(horizon, n):
    """n+1 equally spaced points on [0, horizon]"""
    if not horizon > 0:
        raise InvalidArgument('horizon must be positive', {'horizon': horizon})
    if int(n) != n or n < 1:
        raise InvalidArgument('the number of intervals must be a positive integer', {'n': n})
    return Partition(np.linspace(0.0, horizon, int(n) + 1))


def dyadic_refine(pi):
    """Insert the midpoint of every interval; every parent point is kept"""
    points = pi.points
    refined = np.empty(2 * len(points) - 1)
    refined[0::2] = points
    refined[1::2] = (points[:-1] + points[1:]) / 2.0
    return Partition(refined)


def random_partition(horizon, n_points, seed, jitter=0.4):
    """Seeded jittered grid: interior points move by at most `jitter` cells around a uniform grid"""
    if n_points < 2:
        raise InvalidArgument('a partition needs at least two points', {'n_points': n_points})
    if not 0 <= jitter < 0.5:
        raise InvalidArgument('jitter must lie in [0, 0.5)', {'jitter': jitter})
    n = int(n_points) - 1
    rng = np.random.default_rng(seed)
    interior = (np.arange(1, n) + rng.uniform(-jitter, jitter, size=n - 1)) * (horizon / n)
    return Partition(np.concatenate([[0.0], interior, [float(horizon)]]))


def pi_distance(pi, s, t):
    """Number of gaps between two grid points; successive points are at distance 1"""
    if s > t:
        raise InvalidArgument('pi_distance expects s <= t', {'s': s, 't': t})
    return pi.index_of(t) - pi.index_of(s)


class Control(object):

    def __init__(self, evaluator, kind=const.KIND_CUSTOM, parameters=None):
        """
        Control
        :param evaluator: (s, t) -> nonnegative real, super-additive on the simplex
        :param kind: linear | p-variation-from-path | custom
        :param parameters: descriptor parameters, serialized with the kind
        """
        self.evaluator = evaluator
        self.kind = kind
        self.parameters = parameters or {}

    def __call__(self, s, t):
        if s == t:
            return 0.0
        return float(self.evaluator(s, t))

    def to_dict(self):
        return {'kind': self.kind, 'parameters': dict(self.parameters)}

    @classmethod
    def from_dict(cls, data):
        kind = data.get('kind')
        parameters = data.get('parameters', {})
        if kind == const.KIND_LINEAR:
            return control_linear(parameters.get('c', 1.0))
        raise InvalidArgument('only linear controls can be rebuilt from a descriptor', {'kind': kind})


def control_linear(c):
    if c < 0:
        raise InvalidArgument('the control constant must be nonnegative', {'c': c})
    c = float(c)
    return Control(lambda s, t: c * (t - s), const.KIND_LINEAR, {'c': c})


def control_pvar(samples, p):
    """
    p-variation control of a discrete path, exact over the sample grid. Inside a cell the cell
    jump |x_{k+1} - x_k|^p is shared pro rata, so the control stays super-additive and vanishes
    on the diagonal for off-grid times too.
    :param samples: a DiscretePath
    :param p: variation exponent, p >= 1
    """
    if len(samples) < 2:
        raise InvalidArgument('p-variation needs at least two samples', {'samples': len(samples)})
    if p < 1:
        raise InvalidArgument('p must be at least 1', {'p': p})

    times = samples.times.tolist()
    values = samples.values
    m = len(times)
    widths = np.diff(samples.times)
    cells = np.max(np.abs(np.diff(values, axis=0)), axis=1) ** p

    if p == 1:
        # triangle inequality: the finest sub-partition is optimal
        cumulative = np.concatenate([[0.0], np.cumsum(cells)])

        def pair_value(i, j):
            return float(cumulative[j] - cumulative[i])
    else:
        jumps = np.max(np.abs(values[:, None, :] - values[None, :, :]), axis=2) ** p
        table = np.full((m, m), -np.inf)
        np.fill_diagonal(table, 0.0)
        for j in range(1, m):
            table[:j, j] = np.max(table[:j, :j] + jumps[:j, j][None, :], axis=1)
        logging.debug('p-variation table of %s samples built for p=%s', m, p)

        def pair_value(i, j):
            return float(table[i, j])

    def share(k, length):
        return float(cells[k]) * length / widths[k]

    def evaluator(s, t):
        i = bisect_left(times, s)
        j = bisect_right(times, t) - 1
        if i > j:
            # both ends inside one cell
            if j < 0 or j >= m - 1:
                return 0.0
            return share(j, t - s)
        value = pair_value(i, j)
        if 0 < i and s < times[i]:
            value += share(i - 1, times[i] - s)
        if j < m - 1 and times[j] < t:
            value += share(j, t - times[j])
        return value

    return Control(evaluator, const.KIND_PVAR, {'p': float(p), 'n_samples': m})


def check_superadditive(omega, triples):
    """Largest positive part of omega(r,s) + omega(s,t) - omega(r,t) over the sample, with its witness"""
    if not triples:
        raise InvalidArgument('super-additivity check needs a nonempty sample')
    max_violation = 0.0
    worst_triple = None
    for r, s, t in triples:
        violation = omega(r, s) + omega(s, t) - omega(r, t)
        if violation > max_violation:
            max_violation = violation
            worst_triple = (r, s, t)
    return {'max_violation': max_violation, 'worst_triple': worst_triple}


class Remainder(object):

    def __init__(self, evaluator, kappa, theta=None, kind=const.KIND_CUSTOM):
        """
        Remainder
        :param evaluator: increasing continuous function with value 0 at 0
        :param kappa: dyadic contraction factor in (0, 1)
        :param theta: exponent when the remainder is a power
        """
        if not 0 < kappa < 1:
            raise InvalidArgument('the contraction factor must lie in (0, 1)', {'kappa': kappa})
        self.evaluator = evaluator
        self.kappa = float(kappa)
        self.theta = theta
        self.kind = kind

    def __call__(self, delta):
        return self.evaluator(delta)

    def power(self, lam):
        """The remainder raised to the power lam, with kappa_lam = 2^(1-lam) kappa^lam"""
        kappa = 2.0 ** (1.0 - lam) * self.kappa ** lam
        if not kappa < 1:
            raise InvalidArgument('lambda too small for the remainder power',
                                  {'lambda': lam, 'bound': lambda_lower_bound(self.kappa)})
        theta = self.theta * lam if self.theta is not None else None
        return Remainder(lambda delta: np.power(self.evaluator(delta), lam), kappa, theta, self.kind)

    def to_dict(self):
        parameters = {'kappa': self.kappa}
        if self.theta is not None:
            parameters['theta'] = self.theta
        return {'kind': self.kind, 'parameters': parameters}

    @classmethod
    def from_dict(cls, data):
        if data.get('kind') != const.KIND_POWER:
            raise InvalidArgument('only power remainders can be rebuilt from a descriptor', {'kind': data.get('kind')})
        return remainder_power(data['parameters']['theta'])


def remainder_power(theta):
    """delta -> delta^theta with kappa = 2^(1-theta)"""
    if not theta > 1:
        raise InvalidArgument('a power remainder needs theta > 1', {'theta': theta})
    theta = float(theta)
    return Remainder(lambda delta: np.power(delta, theta), 2.0 ** (1.0 - theta), theta, const.KIND_POWER)


def check_contraction(varpi, deltas=None):
    """Largest relative excess of 2 varpi(delta/2) over kappa varpi(delta); <= 0 means the contraction holds"""
    if deltas is None:
        deltas = np.logspace(-6, 0, 1000)
    deltas = np.asarray(deltas, dtype=float)
    full = np.asarray(varpi(deltas), dtype=float)
    half = np.asarray(varpi(deltas / 2.0), dtype=float)
    excess = (2.0 * half - varpi.kappa * full) / full
    return float(np.max(excess))


def lambda_lower_bound(kappa):
    return 1.0 / (1.0 - math.log2(kappa))


def default_lambda(kappa):
    return max(0.9, 0.5 * (1.0 + lambda_lower_bound(kappa)))


def theta_stat(pi, omega, varpi, lam=None):
    """Rate statistic: sup over successive points of varpi(omega)^(1 - lam)"""
    bound = lambda_lower_bound(varpi.kappa)
    if lam is None:
        lam = default_lambda(varpi.kappa)
    if not bound < lam < 1:
        raise InvalidArgument('lambda must lie in (1/(1 - log2 kappa), 1)', {'lambda': lam, 'bound': bound})
    points = pi.points
    return max(float(varpi(omega(points[i], points[i + 1]))) ** (1.0 - lam) for i in range(len(points) - 1))


class DiscretePath(object):

    def __init__(self, times, values):
        """
        DiscretePath
        :param times: strictly increasing sample times
        :param values: one row of coordinates per sample time
        """
        times = np.array(times, dtype=float).ravel()
        values = np.array(values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if times.size != values.shape[0]:
            raise InvalidArgument('one value row per sample time is needed',
                                  {'times': times.size, 'values': values.shape[0]})
        if times.size >= 2 and not np.all(np.diff(times) > 0):
            raise InvalidArgument('sample times must be strictly increasing')
        times.setflags(write=False)
        values.setflags(write=False)
        self.times = times
        self.values = values
        self._time_list = times.tolist()

    def __len__(self):
        return len(self._time_list)

    @property
    def dim(self):
        return self.values.shape[1]

    @property
    def horizon(self):
        return self._time_list[-1]

    def value_at(self, t):
        """Linear interpolation between samples, constant outside the sample range"""
        times = self._time_list
        if t <= times[0]:
            return self.values[0]
        if t >= times[-1]:
            return self.values[-1]
        i = bisect_right(times, t) - 1
        if times[i] == t:
            return self.values[i]
        w = (t - times[i]) / (times[i + 1] - times[i])
        return self.values[i] + w * (self.values[i + 1] - self.values[i])

    def values_at(self, ts):
        ts = np.asarray(ts, dtype=float)
        return np.stack([np.interp(ts, self.times, self.values[:, k]) for k in range(self.dim)], axis=-1)

    def increment(self, s, t):
        return self.value_at(t) - self.value_at(s)

    def to_csv(self, csv_file):
        header = ['time'] + ['x{0}'.format(k) for k in range(self.dim)]
        rows = [[t] + row for t, row in zip(self._time_list, self.values.tolist())]
        return write_csv_file(rows, csv_file, fileheader=header)

    @classmethod
    def from_csv(cls, csv_file):
        header, data = read_csv_file(csv_file)
        if data.shape[1] < 2:
            raise InvalidArgument('a path csv needs a time column and at least one value column', {'file': csv_file})
        return cls(data[:, 0], data[:, 1:])

    @classmethod
    def from_function(cls, func, horizon, n):
        """Sample `func` (time -> coordinates) on n+1 uniform times of [0, horizon]"""
        times = np.linspace(0.0, horizon, int(n) + 1)
        return cls(times, np.array([np.atleast_1d(func(t)) for t in times], dtype=float))


def sobol_points(dim, n, seed):
    """First n points of a scrambled Sobol sequence in the unit cube"""
    if n < 1:
        raise InvalidArgument('the sample needs at least one point', {'n': n})
    sampler = qmc.Sobol(d=dim, scramble=True, seed=seed)
    return sampler.random_base2(max(0, int(math.ceil(math.log2(n)))))[:n]


def sample_times(horizon, n, seed):
    return [float(u) * horizon for u in sobol_points(1, n, seed)[:, 0]]


def sample_pairs(horizon, n, seed):
    points = np.sort(sobol_points(2, n, seed), axis=1) * horizon
    return [(float(s), float(t)) for s, t in points]


def sample_triples(horizon, n, seed):
    points = np.sort(sobol_points(3, n, seed), axis=1) * horizon
    return [SimplexTriple(r, s, t) for r, s, t in points]


def grid_triples(pi):
    """Every ordered triple of partition points"""
    points = pi.points.tolist()
    n = len(points)
    return [SimplexTriple(points[i], points[j], points[k])
            for i in range(n) for j in range(i, n) for k in range(j, n)]
