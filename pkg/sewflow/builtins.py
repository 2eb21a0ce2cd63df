#!/usr/bin/env python
# _*_ coding:utf-8 _*_

"""
sewflow.builtins

Registered driving paths, vector fields, functionals and reference flows, selected by name
from experiment configs.
"""
import math

import numpy as np
from scipy.linalg import expm

from sewflow import const
from sewflow.almostflow import AlmostFlow, Perturbation
from sewflow.errors import ConfigError
from sewflow.schemes import AdditiveFunctional, MultiplicativeFunctional, SmoothPath, VectorField
from sewflow.statespace import MatrixAlgebra, VectorSpace, constant_gauge
from sewflow.timegrid import DiscretePath, control_linear, control_pvar, remainder_power

J = np.array([[0.0, -1.0], [1.0, 0.0]])
S = np.array([[1.0, 0.0], [0.0, -1.0]])


def linear_path(v=(1.0,), horizon=1.0):
    v = np.atleast_1d(np.asarray(v, dtype=float))
    return SmoothPath(lambda ts: ts[:, None] * v[None, :], horizon, v.size, 'linear')


def sine_path(horizon=1.0, frequency=1.0):
    return SmoothPath(lambda ts: np.sin(frequency * ts), horizon, 1, 'sine')


def circle_path(horizon=2.0 * math.pi, radius=1.0):
    return SmoothPath(lambda ts: radius * np.stack([np.cos(ts), np.sin(ts)], axis=-1), horizon, 2, 'circle')


def parabola_path(horizon=1.0):
    return SmoothPath(lambda ts: np.stack([ts, ts ** 2 / 2.0], axis=-1), horizon, 2, 'parabola')


def square_path(horizon=1.0):
    return SmoothPath(lambda ts: ts ** 2, horizon, 1, 'square')


def constant_path(value=(0.0,), horizon=1.0):
    value = np.atleast_1d(np.asarray(value, dtype=float))
    return SmoothPath(lambda ts: np.broadcast_to(value, (ts.size, value.size)), horizon, value.size, 'constant')


def weierstrass_path(hurst=0.4, terms=12, horizon=1.0):
    """Deterministic rough driver sum_k 2^(-k hurst) (cos, sin)(2^k pi t) in two dimensions"""
    scales = 2.0 ** np.arange(terms)
    weights = scales ** -hurst

    def func(ts):
        phases = math.pi * ts[:, None] * scales[None, :]
        return np.stack([np.cos(phases) @ weights - weights.sum(), np.sin(phases) @ weights], axis=-1)

    return SmoothPath(func, horizon, 2, 'weierstrass')


def polyline_path(times, values):
    return DiscretePath(times, values)


def csv_path(file):
    return DiscretePath.from_csv(file)


PATHS = {
    'linear': linear_path,
    'sine': sine_path,
    'circle': circle_path,
    'parabola': parabola_path,
    'square': square_path,
    'constant': constant_path,
    'weierstrass': weierstrass_path,
    'polyline': polyline_path,
    'csv': csv_path
}


def zero_field(dim=1, path_dim=1):
    return VectorField(lambda a: np.zeros((dim, path_dim)), dim, path_dim,
                       df=lambda a: np.zeros((dim, dim, path_dim)),
                       sup_f=0.0, sup_df=0.0, hoelder_f=0.0, hoelder_df=0.0, name='zero')


def constant_field(value=((1.0,),)):
    value = np.atleast_2d(np.asarray(value, dtype=float))
    dim, path_dim = value.shape
    return VectorField(lambda a: value, dim, path_dim, df=lambda a: np.zeros((dim, dim, path_dim)),
                       sup_f=float(np.max(np.sum(np.abs(value), axis=1))), sup_df=0.0, hoelder_f=0.0,
                       hoelder_df=0.0, name='constant')


def scalar_exponential_field():
    """dy = y dx"""
    return VectorField(lambda a: np.array([[a[0]]]), 1, 1, df=lambda a: np.ones((1, 1, 1)),
                       sup_df=1.0, hoelder_f=1.0, hoelder_df=0.0, name='scalar-exponential')


def linear_field(matrices, box=1.0, name='linear'):
    """f(a) has columns B_j a; bounds of f hold on the max-norm ball of radius `box`"""
    matrices = np.asarray(matrices, dtype=float)
    if matrices.ndim == 2:
        matrices = matrices[None]
    path_dim, dim = matrices.shape[0], matrices.shape[1]
    derivative = np.transpose(matrices, (1, 2, 0))
    sup_df = float(np.max(np.sum(np.abs(derivative), axis=(1, 2))))
    return VectorField(lambda a: np.einsum('jik,k->ij', matrices, a), dim, path_dim, df=lambda a: derivative,
                       sup_f=sup_df * box, sup_df=sup_df, hoelder_f=sup_df, hoelder_df=0.0, name=name)


def rotation_field(path_dim=1, box=1.0):
    """Ja for one driver, (Ja, Sa) for two"""
    if path_dim not in (1, 2):
        raise ConfigError('rotation field takes one or two drivers', {'path_dim': path_dim})
    return linear_field([J] if path_dim == 1 else [J, S], box=box, name='rotation')


def trig_field(scale=0.5):
    """scale [[sin a1, 0], [0, cos a0]], bounded with bounded derivatives"""

    def f(a):
        return scale * np.array([[math.sin(a[1]), 0.0], [0.0, math.cos(a[0])]])

    def df(a):
        result = np.zeros((2, 2, 2))
        result[0, 1, 0] = scale * math.cos(a[1])
        result[1, 0, 1] = -scale * math.sin(a[0])
        return result

    return VectorField(f, 2, 2, df=df, sup_f=scale, sup_df=scale, hoelder_f=scale, hoelder_df=scale, name='trig')


def sqrt_hoelder_field():
    """sqrt|a|, only 1/2-Hoelder: dy = sqrt|y| dt has several solutions from 0"""
    return VectorField(lambda a: np.array([[math.sqrt(abs(a[0]))]]), 1, 1, gamma=0.5, hoelder_f=1.0,
                       fd_fallback=False, name='sqrt-hoelder')


FIELDS = {
    'zero': zero_field,
    'constant': constant_field,
    'scalar-exponential': scalar_exponential_field,
    'linear': linear_field,
    'rotation': rotation_field,
    'trig': trig_field,
    'sqrt-hoelder': sqrt_hoelder_field
}


def integral_functional(path):
    """alpha_{s,t} = x_s (x_t - x_s), the Riemann sums of int x dx"""
    samples = path if isinstance(path, DiscretePath) else path.sample(2 ** 14)
    value_at = path.value_at

    def evaluator(s, t):
        x_s = value_at(s)
        return x_s * (value_at(t) - x_s)

    return AdditiveFunctional(evaluator, remainder_power(2.0), control_pvar(samples, 1.0), VectorSpace(path.dim),
                              path.horizon, name='integral({0})'.format(getattr(path, 'name', 'path')))


def increment_functional(path):
    """alpha_{s,t} = g_t - g_s, already additive"""
    increment = path.increment
    return AdditiveFunctional(lambda s, t: increment(s, t), remainder_power(2.0), control_linear(1.0),
                              VectorSpace(path.dim), path.horizon, name='increment')


def euler_functional(generator, horizon=1.0):
    """alpha_{s,t} = I + A (t - s)"""
    generator = np.atleast_2d(np.asarray(generator, dtype=float))
    dim = generator.shape[0]
    unit = np.eye(dim)
    rate = float(np.linalg.norm(generator))
    return MultiplicativeFunctional(lambda s, t: unit + generator * (t - s), remainder_power(2.0),
                                    control_linear(rate), MatrixAlgebra(dim), horizon, stationary=True, name='euler')


def lie_product_functional(a, b, horizon=1.0):
    """alpha_{s,t} = exp(A (t - s)) exp(B (t - s))"""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    rate = float(np.linalg.norm(a) + np.linalg.norm(b))
    return MultiplicativeFunctional(lambda s, t: expm(a * (t - s)) @ expm(b * (t - s)), remainder_power(2.0),
                                    control_linear(rate), MatrixAlgebra(a.shape[0]), horizon, stationary=True,
                                    name='lie-product')


ADDITIVE_FUNCTIONALS = {
    'integral': integral_functional,
    'increment': increment_functional
}

MULTIPLICATIVE_FUNCTIONALS = {
    'euler': euler_functional,
    'lie-product': lie_product_functional
}


def identity_flow(dim=1, horizon=1.0):
    return AlmostFlow(lambda s, t, a: a, VectorSpace(dim), constant_gauge(1.0), 0.0, None, remainder_power(2.0),
                      control_linear(1.0), horizon, name=const.SCHEME_IDENTITY)


def broken_flow(dim=1, horizon=1.0):
    """a + sqrt(t - s): not an almost flow for the remainder delta^2"""
    return AlmostFlow(lambda s, t, a: a + math.sqrt(t - s), VectorSpace(dim), constant_gauge(1.0),
                      math.sqrt(horizon), None, remainder_power(2.0), control_linear(1.0), horizon,
                      name=const.SCHEME_BROKEN)


def exponential_flow(rate=1.0, dim=1, horizon=1.0):
    """The exact flow a e^(rate (t - s))"""
    return AlmostFlow(lambda s, t, a: a * math.exp(rate * (t - s)), VectorSpace(dim),
                      constant_gauge(1.0), math.exp(abs(rate) * horizon), None, remainder_power(2.0),
                      control_linear(1.0), horizon, name='exponential')


FLOWS = {
    const.SCHEME_IDENTITY: identity_flow,
    const.SCHEME_BROKEN: broken_flow,
    'exponential': exponential_flow
}


def remainder_perturbation(phi, lambda_bound=0.5):
    """eps_{t,s}(a) = lambda varpi(omega_{s,t}) on every coordinate, independent of a"""
    varpi, omega = phi.varpi, phi.omega

    def evaluator(s, t, a):
        return lambda_bound * float(varpi(omega(s, t))) * np.ones_like(a)

    return Perturbation.for_flow(phi, evaluator, lambda_bound)


def quadratic_perturbation(phi, lambda_bound=1.0):
    """eps_{t,s}(a) = (t - s)^2 on every coordinate"""
    return Perturbation.for_flow(phi, lambda s, t, a: (t - s) ** 2 * np.ones_like(a), lambda_bound)


PERTURBATIONS = {
    'remainder': remainder_perturbation,
    'quadratic': quadratic_perturbation
}


def lookup(registry, name, kind):
    try:
        return registry[name]
    except KeyError:
        raise ConfigError('unknown {0}'.format(kind), {'name': name, 'known': sorted(registry)})
