#!/usr/bin/env python
# _*_ coding:utf-8 _*_

"""
sewflow.schemes

Concrete almost flows: additive and multiplicative functionals, signatures in the truncated
tensor algebra, Davie's first order scheme for Young equations and his second order scheme
for equations driven by level-2 rough paths, plus the path objects they are built from.
"""
import functools
import logging
import math

import numpy as np

from sewflow import const
from sewflow.almostflow import AlmostFlow, Perturbation, perturb
from sewflow.errors import InvalidArgument
from sewflow.statespace import (GrowthGauge, TensorAlgebra, TensorElement, VectorSpace, _flat_mul, constant_gauge,
                                norm_gauge, operator_norm)
from sewflow.timegrid import (DiscretePath, control_linear, control_pvar, dyadic_refine, remainder_power,
                              sample_pairs, sample_triples, uniform_partition)
from sewflow.utils import write_csv_file


class SmoothPath(object):

    def __init__(self, func, horizon, dim, name='custom'):
        """
        SmoothPath
        :param func: vectorized map from an array of times to an array of shape (n, dim)
        :param horizon: right end of the time interval
        :param dim: number of coordinates
        """
        self.func = func
        self.horizon = float(horizon)
        self.dim = int(dim)
        self.name = name

    def values_at(self, ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        return np.asarray(self.func(ts), dtype=float).reshape(ts.size, self.dim)

    def value_at(self, t):
        return self.values_at([t])[0]

    def increment(self, s, t):
        values = self.values_at([s, t])
        return values[1] - values[0]

    def sample(self, n):
        """The path on n + 1 uniform times, as a DiscretePath"""
        times = np.linspace(0.0, self.horizon, int(n) + 1)
        return DiscretePath(times, self.values_at(times))


def _discretized(x, max_samples=1025):
    if isinstance(x, DiscretePath):
        return x
    return x.sample(max_samples - 1)


class AdditiveFunctional(object):

    def __init__(self, evaluator, varpi, omega, space, horizon, delta_bound=None, name='additive'):
        """
        AdditiveFunctional
        :param evaluator: (s, t) -> alpha_{s,t}, a state increment
        :param varpi: declared Remainder of the almost additivity defect
        :param omega: declared Control
        :param space: StateSpace the increments live in
        :param delta_bound: declared bound of |alpha_{s,t}| on [0, T], estimated when omitted
        """
        self.evaluator = evaluator
        self.varpi = varpi
        self.omega = omega
        self.space = space
        self.horizon = float(horizon)
        self.delta_bound = delta_bound
        self.name = name

    def __call__(self, s, t):
        return self.evaluator(s, t)


def check_almost_additive(alpha, triples):
    """Worst ratio |alpha_{r,s} + alpha_{s,t} - alpha_{r,t}| / varpi(omega_{r,t}) over the triples"""
    worst = 0.0
    for r, s, t in triples:
        defect = alpha.space.norm(alpha(r, s) + alpha(s, t) - alpha(r, t))
        bound = float(alpha.varpi(alpha.omega(r, t)))
        if defect > 0:
            worst = max(worst, defect / bound if bound > 0 else float('inf'))
    return worst


def _grid_sup(norm, evaluator, horizon, n=64):
    points = np.linspace(0.0, horizon, n + 1)
    return max(norm(evaluator(points[i], points[j])) for i in range(n + 1) for j in range(i + 1, n + 1))


def additive_flow(alpha):
    """a -> a + alpha_{s,t}, with constant gauge 1 and no Hoelder term"""
    delta_bound = alpha.delta_bound
    if delta_bound is None:
        delta_bound = 1.25 * _grid_sup(alpha.space.norm, alpha.evaluator, alpha.horizon)
        logging.debug('Estimated delta_T of %s: %s', alpha.name, delta_bound)
    evaluator = alpha.evaluator

    def step(s, t, a):
        return a + evaluator(s, t)

    return AlmostFlow(step, alpha.space, constant_gauge(1.0), delta_bound, None, alpha.varpi, alpha.omega,
                      alpha.horizon, name=alpha.name)


class MultiplicativeFunctional(object):

    def __init__(self, evaluator, varpi, omega, algebra, horizon, delta_bound=None, stationary=False,
                 batch=None, name='multiplicative'):
        """
        MultiplicativeFunctional
        :param evaluator: (s, t) -> alpha_{s,t}, an element of `algebra`
        :param algebra: MatrixAlgebra or TensorAlgebra
        :param stationary: alpha_{s,t} only depends on t - s, values are cached by step size
        :param batch: optional vectorized evaluator (ss, ts) -> batch of elements
        """
        self.evaluator = evaluator
        self.varpi = varpi
        self.omega = omega
        self.algebra = algebra
        self.horizon = float(horizon)
        self.delta_bound = delta_bound
        self.stationary = stationary
        self.batch = batch
        self.name = name

    def __call__(self, s, t):
        return self.evaluator(s, t)


def check_almost_multiplicative(alpha, triples):
    """Worst ratio d(alpha_{r,s} alpha_{s,t}, alpha_{r,t}) / varpi(omega_{r,t}) over the triples"""
    algebra = alpha.algebra
    worst = 0.0
    for r, s, t in triples:
        defect = algebra.distance(algebra.mul(alpha(r, s), alpha(s, t)), alpha(r, t))
        bound = float(alpha.varpi(alpha.omega(r, t)))
        if defect > 0:
            worst = max(worst, defect / bound if bound > 0 else float('inf'))
    return worst


def multiplicative_flow(alpha, algebra=None):
    """a -> a alpha_{s,t} on the algebra of the functional, gauge |a| v 1"""
    if algebra is not None and algebra.to_dict() != alpha.algebra.to_dict():
        raise InvalidArgument('functional and flow live in different algebras',
                              {'functional': alpha.algebra.to_dict(), 'flow': algebra.to_dict()})
    algebra = alpha.algebra
    algebra.coerce(alpha(0.0, alpha.horizon))
    unit = algebra.unit()

    delta_bound = alpha.delta_bound
    if delta_bound is None:
        delta_bound = 1.25 * _grid_sup(lambda e: algebra.distance(e, unit), alpha.evaluator, alpha.horizon)

    evaluator = alpha.evaluator
    if alpha.stationary:
        # one entry per step length; uniform dyadic levels need one each
        @functools.lru_cache(maxsize=const.STATIONARY_CACHE)
        def by_length(h):
            return alpha.evaluator(0.0, h)

        def evaluator(s, t):
            return by_length(t - s)

    mul = algebra.mul

    def step(s, t, a):
        return mul(a, evaluator(s, t))

    return AlmostFlow(step, algebra, norm_gauge(algebra), delta_bound, None, alpha.varpi, alpha.omega,
                      alpha.horizon, name=alpha.name)


def affine_flow(alpha, beta, lambda_bound, name='affine'):
    """
    a -> a alpha_{s,t} + beta_{s,t}, built as the multiplicative flow of alpha perturbed by beta;
    beta has to vanish on the diagonal and stay below lambda |a| v 1 varpi(omega_{s,t})
    """
    logging.warning('Affine flow %s is experimental: the joint regularity of (alpha, beta) is not checked', name)
    base = multiplicative_flow(alpha)
    eps = Perturbation.for_flow(base, lambda s, t, a: beta(s, t), lambda_bound, eta=None, gamma=1.0)
    flow = perturb(base, eps)
    flow.name = name
    return flow


class RoughPath2(object):

    def __init__(self, increment, p, omega, horizon, dim, batch=None, x1_norm=None, x2_norm=None, name='rough'):
        """
        RoughPath2
        :param increment: (s, t) -> (x1 of shape (d,), x2 of shape (d, d)), x2[l, j] the iterated integral of dx^l dx^j
        :param p: regularity, 1 <= p < 3
        :param omega: Control of the path
        :param batch: optional vectorized (ss, ts) -> (x1 of shape (n, d), x2 of shape (n, d, d))
        :param x1_norm: declared |x1|_p, fitted on samples when omitted
        :param x2_norm: declared |x2|_{p/2}, fitted on samples when omitted
        """
        if not 1 <= p < 3:
            raise InvalidArgument('level-2 rough paths need 1 <= p < 3', {'p': p})
        self.increment = increment
        self.p = float(p)
        self.omega = omega
        self.horizon = float(horizon)
        self.dim = int(dim)
        self.batch = batch
        self.name = name
        self._norms = None
        if x1_norm is not None and x2_norm is not None:
            self._norms = {'x1': float(x1_norm), 'x2': float(x2_norm)}

    def x1(self, s, t):
        return self.increment(s, t)[0]

    def x2(self, s, t):
        return self.increment(s, t)[1]

    def increments(self, ss, ts):
        if self.batch is not None:
            return self.batch(np.asarray(ss, dtype=float), np.asarray(ts, dtype=float))
        pairs = [self.increment(s, t) for s, t in zip(ss, ts)]
        return np.array([x1 for x1, _ in pairs]), np.array([x2 for _, x2 in pairs])

    def norms(self):
        if self._norms is None:
            pairs = sample_pairs(self.horizon, 256, const.DEFAULT_SEED)
            pairs += [(0.0, self.horizon * 2.0 ** -k) for k in range(12)]
            self._norms = rough_path_norms(self, pairs)
            logging.debug('Fitted norms of %s: %s', self.name, self._norms)
        return self._norms

    def with_area(self, area):
        """Same path with x2_{s,t} shifted by (t - s) area, area antisymmetric"""
        area = _antisymmetric(area, self.dim)
        increment = self.increment
        batch = self.batch

        def shifted(s, t):
            x1, x2 = increment(s, t)
            return x1, x2 + (t - s) * area

        shifted_batch = None
        if batch is not None:
            def shifted_batch(ss, ts):
                x1, x2 = batch(ss, ts)
                return x1, x2 + (ts - ss)[:, None, None] * area

        x1_norm = x2_norm = None
        c = self.omega.parameters.get('c', 0.0)
        if self._norms is not None and self.omega.kind == const.KIND_LINEAR and c > 0:
            # (t - s) / (c (t - s))^(2/p) is largest at t - s = T
            x1_norm = self._norms['x1']
            x2_norm = self._norms['x2'] + float(np.max(np.abs(area))) * (c * self.horizon) ** (1.0 - 2.0 / self.p) / c
        return RoughPath2(shifted, self.p, self.omega, self.horizon, self.dim, shifted_batch, x1_norm, x2_norm,
                          name='{0}+area'.format(self.name))

    def to_csv(self, csv_file, pairs):
        d = self.dim
        header = ['s', 't'] + ['x1_{0}'.format(i) for i in range(d)] + \
                 ['x2_{0}_{1}'.format(i, j) for i in range(d) for j in range(d)]
        rows = []
        for s, t in pairs:
            x1, x2 = self.increment(s, t)
            rows.append([s, t] + list(np.ravel(x1)) + list(np.ravel(x2)))
        return write_csv_file(rows, csv_file, fileheader=header)


def _antisymmetric(area, dim):
    area = np.asarray(area, dtype=float)
    if area.shape != (dim, dim):
        raise InvalidArgument('area must be a square array of the path dimension', {'shape': area.shape, 'dim': dim})
    if not np.array_equal(area, -area.T):
        raise InvalidArgument('area must be antisymmetric')
    return area


def rough_path_norms(X, pairs):
    """Fitted |x1|_p = sup |x1| / omega^(1/p) and |x2|_{p/2} = sup |x2| / omega^(2/p), max-abs entries"""
    x1_norm = 0.0
    x2_norm = 0.0
    for s, t in pairs:
        w = X.omega(s, t)
        x1, x2 = X.increment(s, t)
        a1 = float(np.max(np.abs(x1))) if np.size(x1) else 0.0
        a2 = float(np.max(np.abs(x2))) if np.size(x2) else 0.0
        if w > 0:
            x1_norm = max(x1_norm, a1 / w ** (1.0 / X.p))
            x2_norm = max(x2_norm, a2 / w ** (2.0 / X.p))
        elif a1 > 0 or a2 > 0:
            raise InvalidArgument('rough path moves where its control vanishes', {'s': s, 't': t})
    return {'x1': x1_norm, 'x2': x2_norm}


def chen_defect(X, triples):
    """Largest entry of x2_{r,t} - x2_{r,s} - x2_{s,t} - x1_{r,s} (x) x1_{s,t} over the triples"""
    if not triples:
        raise InvalidArgument('chen_defect needs a nonempty list of triples')
    worst = 0.0
    for r, s, t in triples:
        x1_rs, x2_rs = X.increment(r, s)
        x1_st, x2_st = X.increment(s, t)
        _, x2_rt = X.increment(r, t)
        defect = x2_rt - x2_rs - x2_st - np.outer(x1_rs, x1_st)
        worst = max(worst, float(np.max(np.abs(defect))))
    return worst


def pure_area(area, scale=1.0, p=2.5, horizon=1.0):
    """x1 = 0, x2_{s,t} = scale (t - s) area, for an antisymmetric area; the control is t - s"""
    area = np.asarray(area, dtype=float)
    if area.ndim != 2:
        raise InvalidArgument('area must be a square array', {'shape': area.shape})
    area = _antisymmetric(area, area.shape[0]) * float(scale)
    dim = area.shape[0]

    def increment(s, t):
        return np.zeros(dim), (t - s) * area

    def batch(ss, ts):
        return np.zeros((len(ss), dim)), (ts - ss)[:, None, None] * area

    x2_norm = float(np.max(np.abs(area))) * horizon ** (1.0 - 2.0 / p) if area.size else 0.0
    return RoughPath2(increment, p, control_linear(1.0), horizon, dim, batch, 0.0, x2_norm, name='pure-area')


class _PrefixTable(object):
    """Nodes u_k, path values x_{u_k} and the running integral I(u_k) of x (x) dx"""

    def __init__(self, path, nodes, values, prefix):
        self.path = path
        self.nodes = nodes
        self.values = values
        self.prefix = prefix

    def integral(self, taus):
        taus = np.asarray(taus, dtype=float)
        k = np.clip(np.searchsorted(self.nodes, taus, side='right') - 1, 0, len(self.nodes) - 1)
        x = self.path.values_at(taus)
        step = x - self.values[k]
        return (self.prefix[k] + np.einsum('nl,nj->nlj', self.values[k], step)
                + 0.5 * np.einsum('nl,nj->nlj', step, step)), x

    def increments(self, ss, ts):
        i_s, x_s = self.integral(ss)
        i_t, x_t = self.integral(ts)
        x1 = x_t - x_s
        return x1, i_t - i_s - np.einsum('nl,nj->nlj', x_s, x1)

    def increment(self, s, t):
        x1, x2 = self.increments([s], [t])
        return x1[0], x2[0]


def _polygon_prefix(values):
    steps = np.diff(values, axis=0)
    panels = np.einsum('nl,nj->nlj', values[:-1], steps) + 0.5 * np.einsum('nl,nj->nlj', steps, steps)
    prefix = np.zeros((values.shape[0],) + panels.shape[1:])
    np.cumsum(panels, axis=0, out=prefix[1:])
    return prefix


def lift_smooth(x, quad_refine=12, p=2.5, omega=None):
    """
    Level-2 lift x2_{s,t} = int_s^t (x_u - x_s) (x) dx_u of a path.
    A DiscretePath is lifted exactly as the polygon through its samples. A SmoothPath is
    integrated along polygons with 2^quad_refine and 2^(quad_refine - 1) panels, combined by
    Richardson extrapolation; the Chen relation holds for the result up to rounding.
    """
    if quad_refine < 1:
        raise InvalidArgument('quad_refine must be at least 1', {'quad_refine': quad_refine})
    if isinstance(x, DiscretePath):
        if len(x) < 2:
            raise InvalidArgument('lifting needs at least two samples', {'samples': len(x)})
        table = _PrefixTable(x, x.times, x.values, _polygon_prefix(x.values))
    else:
        nodes = np.linspace(0.0, x.horizon, 2 ** int(quad_refine) + 1)
        values = x.values_at(nodes)
        fine = _polygon_prefix(values)[::2]
        half = _polygon_prefix(values[::2])
        table = _PrefixTable(x, nodes[::2], values[::2], (4.0 * fine - half) / 3.0)

    if omega is None:
        omega = control_pvar(_discretized(x), 1.0)
    return RoughPath2(table.increment, p, omega, x.horizon, x.dim, table.increments,
                      name='lift({0})'.format(getattr(x, 'name', 'path')))


def multiplicative_functional_from_rough_path(X, level):
    """alpha_{s,t} = 1 + x1_{s,t} + x2_{s,t} in T_level(R^d), degrees above 2 set to 0"""
    if level < 2:
        raise InvalidArgument('the rough path functional needs level >= 2', {'level': level})
    algebra = TensorAlgebra(X.dim, level)
    d = X.dim
    size = sum(d ** j for j in range(level + 1))

    def batch(ss, ts):
        x1, x2 = X.increments(ss, ts)
        data = np.zeros((len(x1), size))
        data[:, 0] = 1.0
        data[:, 1:1 + d] = x1
        data[:, 1 + d:1 + d + d * d] = x2.reshape(len(x1), d * d)
        return TensorElement(data, d, level)

    def evaluator(s, t):
        return batch(np.array([s]), np.array([t]))[0]

    return MultiplicativeFunctional(evaluator, remainder_power(3.0 / X.p), X.omega, algebra, X.horizon,
                                    batch=batch, name='extension({0})'.format(X.name))


def ordered_product(batch):
    """Product of a batch of tensor elements in batch order, by pairwise reduction"""
    data = batch.data
    d, level = batch.base_dim, batch.level
    offsets = batch._offsets
    while data.shape[0] > 1:
        n = data.shape[0] // 2
        paired = _flat_mul(data[0:2 * n:2], data[1:2 * n:2], d, level, offsets)
        data = np.concatenate([paired, data[2 * n:]]) if data.shape[0] % 2 else paired
    return TensorElement(data[0], d, level)


def signature(increments, k, tolerance=1e-13, max_level=20, chen_tolerance=1e-8, seed=const.DEFAULT_SEED):
    """
    Level-k signature over [0, T]: the multiplicative functional 1 + x1 + x2 sewn in T_k
    along dyadic partitions until two consecutive products differ by at most `tolerance`.
    Products of smooth lifts converge like the squared mesh, so the first Romberg column
    (4 P_n - P_(n-1)) / 3 is carried along and returned once two of its entries agree.
    :param increments: RoughPath2 with the level-1 and level-2 data
    """
    if k < 2:
        raise InvalidArgument('signature level must be at least 2', {'k': k})
    X = increments
    defect = chen_defect(X, sample_triples(X.horizon, 64, seed))
    if defect > chen_tolerance:
        raise InvalidArgument('increments violate the Chen relation', {'defect': defect})

    alpha = multiplicative_functional_from_rough_path(X, k)
    pi = uniform_partition(X.horizon, 1)
    previous = extrapolated = None
    for level in range(max_level + 1):
        points = pi.points
        current = ordered_product(alpha.batch(points[:-1], points[1:]))
        if previous is not None:
            gap = (current - previous).norm()
            logging.debug('Signature level %s: gap %s', level, gap)
            if gap <= tolerance:
                logging.info('Signature of %s reached %s at level %s (%s products)', X.name, gap, level,
                             len(points) - 1)
                return current
            romberg = (4.0 * current - previous) * (1.0 / 3.0)
            if extrapolated is not None:
                gap = (romberg - extrapolated).norm()
                if gap <= tolerance:
                    logging.info('Signature of %s reached %s at level %s (%s products, extrapolated)', X.name, gap,
                                 level, len(points) - 1)
                    return romberg
            extrapolated = romberg
        previous = current
        if level < max_level:
            pi = dyadic_refine(pi)
    logging.warning('Signature of %s stopped at level %s before reaching %s', X.name, max_level, tolerance)
    return previous


class VectorField(object):

    def __init__(self, f, dim, path_dim, df=None, gamma=1.0, sup_f=None, sup_df=None, hoelder_f=None,
                 hoelder_df=None, fd_fallback=True, fd_step=const.DEFAULT_FD_STEP, name='custom'):
        """
        VectorField
        :param f: state of shape (dim,) -> linear map, array of shape (dim, path_dim)
        :param df: state -> derivative, array df[i, k, j] = d f_ij / d a_k; central differences when omitted
        :param gamma: Hoelder exponent of f (Young) or of df (rough)
        :param sup_f: declared sup of |f(a)|, max absolute row sum
        :param sup_df: declared sup of |df(a)|, max over i of the absolute sum over (k, j)
        :param hoelder_f: declared gamma-Hoelder (or Lipschitz) constant of f
        :param hoelder_df: declared gamma-Hoelder constant of df
        :param fd_fallback: allow finite differences when df is omitted
        """
        if not 0 < gamma <= 1:
            raise InvalidArgument('Hoelder exponent must lie in (0, 1]', {'gamma': gamma})
        self.f = f
        self.dim = int(dim)
        self.path_dim = int(path_dim)
        self.df = df
        self.gamma = float(gamma)
        self.sup_f = sup_f
        self.sup_df = sup_df
        self.hoelder_f = hoelder_f
        self.hoelder_df = hoelder_df
        self.fd_fallback = fd_fallback
        self.fd_step = fd_step
        self.name = name

    @property
    def has_derivative(self):
        return self.df is not None or self.fd_fallback

    def __call__(self, a):
        return self.f(a)

    def finite_difference(self, a):
        a = np.asarray(a, dtype=float)
        h = self.fd_step * max(1.0, float(np.max(np.abs(a))))
        result = np.empty((self.dim, self.dim, self.path_dim))
        for k in range(self.dim):
            e = np.zeros(self.dim)
            e[k] = h
            result[:, k, :] = (np.asarray(self.f(a + e)) - np.asarray(self.f(a - e))) / (2.0 * h)
        return result

    def derivative(self, a):
        if self.df is not None:
            return np.asarray(self.df(a), dtype=float)
        if not self.fd_fallback:
            raise InvalidArgument('vector field has no derivative', {'field': self.name})
        return self.finite_difference(a)

    def to_dict(self):
        return {'name': self.name, 'dim': self.dim, 'path_dim': self.path_dim, 'gamma': self.gamma,
                'sup_f': self.sup_f, 'sup_df': self.sup_df, 'hoelder_f': self.hoelder_f,
                'hoelder_df': self.hoelder_df}


def check_derivative(field, states):
    """Largest relative difference between the analytic derivative and central differences"""
    if field.df is None:
        raise InvalidArgument('no analytic derivative to compare with', {'field': field.name})
    worst = 0.0
    for a in states:
        exact = np.asarray(field.df(a), dtype=float)
        approx = field.finite_difference(a)
        worst = max(worst, float(np.max(np.abs(exact - approx))) / max(1.0, float(np.max(np.abs(exact)))))
    return worst


def _required(value, what, field):
    if value is None:
        raise InvalidArgument('vector field must declare {0}'.format(what), {'field': field.name})
    return float(value)


def young_flow(f, x, p=1.0, omega=None):
    """
    Davie's first order scheme a + f(a) x_{s,t} for a path of finite p-variation, 1 + gamma > p.
    The control is the p-variation of x, so |x|_p = 1; the remainder is delta^((1 + gamma)/p).
    """
    if p < 1:
        raise InvalidArgument('p must be at least 1', {'p': p})
    if not 1.0 + f.gamma > p:
        raise InvalidArgument('Young regularity condition 1 + gamma > p violated', {'gamma': f.gamma, 'p': p})
    if isinstance(x, DiscretePath) and len(x) < 2:
        raise InvalidArgument('driving path needs at least two samples', {'samples': len(x)})
    if x.dim != f.path_dim:
        raise InvalidArgument('path and vector field dimensions differ', {'path': x.dim, 'field': f.path_dim})
    hoelder = _required(f.hoelder_f, 'hoelder_f', f)

    if omega is None:
        samples = _discretized(x, 1025 if p > 1 else 2 ** 14 + 1)
        if p > 1 and len(samples) > 1025:
            stride = int(math.ceil(len(samples) / 1024.0))
            samples = DiscretePath(samples.times[::stride], samples.values[::stride])
            logging.info('p-variation control of %s taken on every %s-th sample', f.name, stride)
        omega = control_pvar(samples, p)
    x_norm = 1.0
    total = omega(0.0, x.horizon)
    scale = x_norm + hoelder * x_norm ** 2
    field = f.f
    increment = x.increment

    def step(s, t, a):
        return a + field(a) @ increment(s, t)

    def gauge(a):
        return (1.0 + operator_norm(field(a))) * scale

    def eta(w):
        return hoelder * x_norm * w ** (1.0 / p)

    return AlmostFlow(step, VectorSpace(f.dim), GrowthGauge(gauge, f.gamma, scale * hoelder, 'young'),
                      total ** (1.0 / p) * x_norm, eta, remainder_power((1.0 + f.gamma) / p), omega, x.horizon,
                      name='young({0})'.format(f.name))


def rough_flow(f, X):
    """
    Davie's second order scheme a + f(a) x1_{s,t} + (df f)(a) x2_{s,t} for a level-2 rough path,
    2 + gamma > p, with a constant gauge assembled from the declared field bounds
    """
    if not 2.0 + f.gamma > X.p:
        raise InvalidArgument('rough regularity condition 2 + gamma > p violated', {'gamma': f.gamma, 'p': X.p})
    if not f.has_derivative:
        raise InvalidArgument('rough scheme needs the derivative of the vector field', {'field': f.name})
    if X.dim != f.path_dim:
        raise InvalidArgument('rough path and vector field dimensions differ', {'path': X.dim, 'field': f.path_dim})
    sup_f = _required(f.sup_f, 'sup_f', f)
    sup_df = _required(f.sup_df, 'sup_df', f)
    hoelder_df = _required(f.hoelder_df, 'hoelder_df', f)

    p, gamma = X.p, f.gamma
    norms = X.norms()
    x1n, x2n = norms['x1'], norms['x2']
    total = X.omega(0.0, X.horizon)
    root = total ** (1.0 / p)
    sup_dff = sup_df * sup_f
    lip_g = hoelder_df * sup_f + sup_df ** 2
    reach = sup_f * x1n + sup_dff * x2n * root
    scale = total ** ((1.0 - gamma) / p)
    c_first = hoelder_df * x1n * reach ** (1.0 + gamma)
    c_second = sup_df * sup_dff * x1n * x2n * scale
    c_third = lip_g * reach * x2n * scale
    gauge_value = max(1.0, c_first + c_second + c_third)
    logging.debug('Rough flow %s constants: I=%s II=%s III=%s N=%s', f.name, c_first, c_second, c_third, gauge_value)

    field = f.f
    derivative = f.derivative
    increment = X.increment

    def step(s, t, a):
        x1, x2 = increment(s, t)
        fa = np.asarray(field(a), dtype=float)
        g = np.einsum('ikj,kl->ilj', derivative(a), fa)
        return a + fa @ x1 + np.einsum('ilj,lj->i', g, x2)

    def eta(w):
        return sup_df * x1n * w ** (1.0 / p) + lip_g * x2n * w ** (2.0 / p)

    return AlmostFlow(step, VectorSpace(f.dim), constant_gauge(gauge_value), reach * root / gauge_value, eta,
                      remainder_power((2.0 + gamma) / p), X.omega, X.horizon, name='rough({0})'.format(f.name))
