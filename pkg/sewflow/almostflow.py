#!/usr/bin/env python
# _*_ coding:utf-8 _*_

"""
sewflow.almostflow

Almost flows, their iterated products along partitions, the validator of the four
almost-flow conditions, galaxy distances and perturbations.
"""
import logging
import math

import numpy as np

from sewflow import const
from sewflow.errors import InvalidArgument, UnsupportedOperation
from sewflow.metadata import ConditionCheck, ValidationReport
from sewflow.timegrid import SimplexTriple, sample_pairs, sample_times, sample_triples
from sewflow.utils import parallel_map


class SamplerSpec(object):

    def __init__(self, seed=const.DEFAULT_SEED, n_times=const.DEFAULT_N_TIMES, n_states=const.DEFAULT_N_STATES,
                 state_box=const.DEFAULT_STATE_BOX, pairs=None, states=None):
        """
        SamplerSpec
        :param seed: seed of the scrambled Sobol samples
        :param n_times: number of sampled time pairs (and triples)
        :param n_states: number of sampled states
        :param state_box: half width of the box the states are drawn from
        :param pairs: explicit (s, t) pairs replacing the sampled ones
        :param states: explicit states replacing the sampled ones
        """
        if n_times < 1 or n_states < 1:
            raise InvalidArgument('sampler needs at least one time pair and one state',
                                  {'n_times': n_times, 'n_states': n_states})
        self.seed = int(seed)
        self.n_times = int(n_times)
        self.n_states = int(n_states)
        self.state_box = float(state_box)
        self.explicit_pairs = pairs
        self.explicit_states = states

    def pairs(self, horizon):
        if self.explicit_pairs is not None:
            return [(float(s), float(t)) for s, t in self.explicit_pairs]
        return sample_pairs(horizon, self.n_times, self.seed)

    def diagonal_pairs(self, horizon, scales=10):
        """Pairs shrinking to the diagonal: (s, s + (T - s) 2^-k) from s = 0 and s = T/3"""
        return [(s, s + (horizon - s) * 2.0 ** -k) for s in (0.0, horizon / 3.0) for k in range(1, scales + 1)]

    def triples(self, horizon):
        if self.explicit_pairs is not None:
            return [SimplexTriple(s, (s + t) / 2.0, t) for s, t in self.pairs(horizon)]
        return sample_triples(horizon, self.n_times, self.seed)

    def times(self, horizon):
        return sample_times(horizon, self.n_times, self.seed)

    def states(self, space):
        if self.explicit_states is not None:
            return [space.coerce(a) for a in self.explicit_states]
        return space.sample(self.n_states, self.state_box, self.seed + 1)

    def with_seed(self, seed):
        return SamplerSpec(seed, self.n_times, self.n_states, self.state_box, self.explicit_pairs, self.explicit_states)

    def to_dict(self):
        return {'seed': self.seed, 'n_times': self.n_times, 'n_states': self.n_states, 'state_box': self.state_box}

    @classmethod
    def from_dict(cls, data):
        data = data or {}
        return cls(seed=data.get('seed', const.DEFAULT_SEED),
                   n_times=data.get('n_times', const.DEFAULT_N_TIMES),
                   n_states=data.get('n_states', const.DEFAULT_N_STATES),
                   state_box=data.get('state_box', const.DEFAULT_STATE_BOX),
                   pairs=data.get('pairs'),
                   states=data.get('states'))


def _as_function(value):
    if value is None:
        return lambda x: 0.0
    if callable(value):
        return value
    value = float(value)
    return lambda x: value


class AlmostFlow(object):

    def __init__(self, evaluator, space, gauge, delta, eta, varpi, omega, horizon, h3_const=1.0, name=''):
        """
        AlmostFlow
        :param evaluator: (s, t, a) -> phi_{t,s}(a)
        :param space: StateSpace of the states
        :param gauge: GrowthGauge N
        :param delta: delta_T, a constant or a non-decreasing function of the horizon
        :param eta: function of the control value in the near-Lipschitz condition, None for zero
        :param varpi: Remainder
        :param omega: Control
        :param horizon: time horizon T
        :param h3_const: constant in front of N(a) varpi(omega) in the composition defect bound
        """
        if not horizon > 0:
            raise InvalidArgument('horizon must be positive', {'horizon': horizon})
        self.evaluator = evaluator
        self.space = space
        self.gauge = gauge
        self.delta = _as_function(delta)
        self.eta = _as_function(eta)
        self.varpi = varpi
        self.omega = omega
        self.horizon = float(horizon)
        self.h3_const = float(h3_const)
        self.name = name

    @property
    def delta_T(self):
        return float(self.delta(self.horizon))

    @property
    def gamma(self):
        return self.gauge.gamma

    def check_times(self, s, t):
        if s > t:
            raise InvalidArgument('evaluation needs s <= t', {'s': s, 't': t})
        if s < 0 or t > self.horizon:
            raise InvalidArgument('times outside [0, T]', {'s': s, 't': t, 'T': self.horizon})

    def __call__(self, s, t, a):
        return evaluate(self, s, t, a)

    def to_dict(self):
        return {
            'name': self.name,
            'space': self.space.to_dict(),
            'gauge': self.gauge.to_dict(),
            'delta_T': self.delta_T,
            'h3_const': self.h3_const,
            'horizon': self.horizon,
            'omega': self.omega.to_dict(),
            'varpi': self.varpi.to_dict()
        }


def evaluate(phi, s, t, a):
    """phi_{t,s}(a)"""
    phi.check_times(s, t)
    return phi.evaluator(s, t, a)


def iterate(phi, pi, s, t, a):
    """
    Iterated product along a partition: the grid steps inside [s, t] composed in
    increasing time, with the partial steps at both ends; a single step when no grid
    point lies in [s, t]
    """
    phi.check_times(s, t)
    i, j = pi.inner_span(s, t)
    if i > j:
        return phi.evaluator(s, t, a)

    points = pi._point_list
    step = phi.evaluator
    if points[i] > s:
        a = step(s, points[i], a)
    for k in range(i, j):
        a = step(points[k], points[k + 1], a)
    if t > points[j]:
        a = step(points[j], t, a)
    return a


def iterate_steps(pi, s, t):
    """Number of evaluator calls made by `iterate` on (s, t)"""
    i, j = pi.inner_span(s, t)
    if i > j:
        return 1
    points = pi._point_list
    return (j - i) + (points[i] > s) + (t > points[j])


def flow_defect(phi, triple, a):
    r, s, t = triple
    composed = phi.evaluator(s, t, phi.evaluator(r, s, a))
    return phi.space.distance(composed, phi.evaluator(r, t, a))


def _ratio(value, bound):
    if bound > 0:
        return value / bound
    return 0.0 if value == 0 else float('inf')


def _rounding(space, x, y):
    """Distance below which two images cannot be told apart in floating point"""
    return const.ROUNDING_ULPS * np.finfo(float).eps * max(1.0, space.norm(x), space.norm(y))


def _witness(space, s, t, a, b=None, r=None):
    witness = {'s': s, 't': t, 'a': space.encode(a)}
    if r is not None:
        witness['r'] = r
    if b is not None:
        witness['b'] = space.encode(b)
    return witness


def implied_delta(phi, omegas):
    """Smallest delta_T compatible with eta(w) varpi(w)^gamma <= delta_T varpi(w) on the given control values"""
    implied = 0.0
    for w in omegas:
        v = float(phi.varpi(w))
        if v > 0:
            implied = max(implied, phi.eta(w) * v ** (phi.gamma - 1.0))
    return implied


def gauge_growth_bound(phi):
    """K_T = |N|_gamma varpi(omega_{0,T})^gamma + |N|_gamma delta_T^gamma + 1"""
    hoelder = phi.gauge.hoelder_const
    gamma = phi.gamma
    total = float(phi.varpi(phi.omega(0.0, phi.horizon)))
    return hoelder * total ** gamma + hoelder * phi.delta_T ** gamma + 1.0


def validate_almost_flow(phi, sampler, tolerance=const.DEFAULT_TOLERANCE):
    """
    Worst ratios of the four almost-flow conditions against the declared gauge, delta_T,
    eta and remainder, with the fitted minimal constants
    """
    space = phi.space
    horizon = phi.horizon
    states = sampler.states(space)
    pairs = sampler.pairs(horizon) + sampler.diagonal_pairs(horizon)
    triples = sampler.triples(horizon) + \
        [SimplexTriple(s, (s + t) / 2.0, t) for s, t in sampler.diagonal_pairs(horizon)]
    delta_T = phi.delta_T
    gamma = phi.gamma
    gauges = [phi.gauge(a) for a in states]

    h0 = ConditionCheck('h0', tolerance=tolerance)
    for t in sampler.times(horizon) + [0.0, horizon]:
        for a in states:
            h0.update(_ratio(space.distance(phi.evaluator(t, t, a), a), 0.0), _witness(space, t, t, a))

    def pair_ratios(pair):
        s, t = pair
        w = phi.omega(s, t)
        images = [phi.evaluator(s, t, a) for a in states]
        displacement = [(space.distance(y, a) / n, y) for a, y, n in zip(states, images, gauges)]
        lipschitz = []
        for k in range(len(states) - 1):
            a, b = states[k], states[k + 1]
            d = space.distance(a, b)
            if d == 0:
                continue
            lhs = space.distance(images[k], images[k + 1])
            rhs = (1.0 + delta_T) * d + phi.eta(w) * d ** gamma
            lipschitz.append((_ratio(lhs, rhs), max(0.0, lhs - (1.0 + delta_T) * d) / d ** gamma, k))
        return displacement, lipschitz

    h1 = ConditionCheck('h1', tolerance=tolerance)
    h2 = ConditionCheck('h2', tolerance=tolerance)
    fitted_delta = 0.0
    fitted_eta = 0.0
    for (s, t), (displacement, lipschitz) in zip(pairs, parallel_map(pair_ratios, pairs)):
        for a, (scaled, _) in zip(states, displacement):
            fitted_delta = max(fitted_delta, scaled)
            h1.update(_ratio(scaled, delta_T), _witness(space, s, t, a))
        for ratio, eta_needed, k in lipschitz:
            fitted_eta = max(fitted_eta, eta_needed)
            h2.update(ratio, _witness(space, s, t, states[k], states[k + 1]))

    def triple_ratios(triple):
        bound = float(phi.varpi(phi.omega(triple.r, triple.t)))
        return [(flow_defect(phi, triple, a) / n, bound) for a, n in zip(states, gauges)]

    h3 = ConditionCheck('h3', tolerance=tolerance)
    fitted_h3 = 0.0
    for triple, rows in zip(triples, parallel_map(triple_ratios, triples)):
        for a, (scaled, bound) in zip(states, rows):
            if bound > 0:
                fitted_h3 = max(fitted_h3, scaled / bound)
            h3.update(_ratio(scaled, phi.h3_const * bound), _witness(space, triple.s, triple.t, a, r=triple.r))

    omegas = [phi.omega(s, t) for s, t in pairs]
    report = ValidationReport(
        subject=phi.name or 'almost flow',
        tolerance=tolerance,
        conditions=[h0, h1, h2, h3],
        fitted={'delta_T': fitted_delta, 'eta': fitted_eta, 'h3_const': fitted_h3,
                'implied_delta_T': implied_delta(phi, omegas)},
        declared={'delta_T': delta_T, 'gamma': gamma, 'h3_const': phi.h3_const, 'gauge': phi.gauge.to_dict(),
                  'omega': phi.omega.to_dict(), 'varpi': phi.varpi.to_dict()},
        sampler=sampler.to_dict())
    for condition in report.failures():
        logging.info('Condition %s fails with ratio %s at %s', condition.name, condition.ratio, condition.witness)
    return report


def galaxy_scan(phi, psi, sampler, cap=const.DEFAULT_CAP):
    """
    Empirical distance sup d(phi_{t,s}(a), psi_{t,s}(a)) / (N(a) varpi(omega_{s,t})) over sampled
    (s, t, a) and over scales shrinking to the diagonal. A ratio above `cap`, or one that keeps
    growing along the shrinking scales, is reported as an infinite distance together with its witness.
    Differences at the rounding level of the images count as zero.
    """
    if phi.space.to_dict() != psi.space.to_dict():
        raise InvalidArgument('galaxy distance needs both families on the same state space')
    space = phi.space
    horizon = min(phi.horizon, psi.horizon)
    states = sampler.states(space)
    gauges = [phi.gauge(a) for a in states]

    def ratio_at(pair):
        s, t = pair
        bound = float(phi.varpi(phi.omega(s, t)))
        best = 0.0
        for a, n in zip(states, gauges):
            x, y = phi.evaluator(s, t, a), psi.evaluator(s, t, a)
            d = max(0.0, space.distance(x, y) - _rounding(space, x, y))
            best = max(best, _ratio(d / n, bound))
        return best

    pairs = [(s, t) for s, t in sampler.pairs(horizon) if s < t]
    distance = 0.0
    witness = None
    for pair, ratio in zip(pairs, parallel_map(ratio_at, pairs)):
        if ratio > distance:
            distance, witness = ratio, pair

    diverging = False
    scale_ratios = []
    for start in [0.0] + sampler.times(horizon)[:2]:
        scan = [((start, start + (horizon - start) * 2.0 ** -k), k) for k in range(const.SHRINKING_SCALES + 1)]
        ratios = parallel_map(ratio_at, [pair for pair, _ in scan])
        for (pair, _), ratio in zip(scan, ratios):
            if ratio > distance:
                distance, witness = ratio, pair
        scale_ratios.append({'start': start, 'ratios': ratios})
        half = len(scan) // 2
        tail = [(k, r) for (_, k), r in zip(scan[half:], ratios[half:]) if 0 < r < float('inf')]
        if len(tail) >= 3:
            ks = np.array([k for k, _ in tail], dtype=float)
            logs = np.log2([r for _, r in tail])
            if np.polyfit(ks, logs, 1)[0] > 0.25:
                diverging = True

    cap_exceeded = distance > cap
    if diverging or cap_exceeded:
        logging.info('Galaxy distance reported infinite (diverging=%s, cap_exceeded=%s) witness %s',
                     diverging, cap_exceeded, witness)
    return {
        'distance': float('inf') if (diverging or cap_exceeded) else distance,
        'sampled_sup': distance,
        'cap': cap,
        'cap_exceeded': cap_exceeded or diverging,
        'diverging': diverging,
        'witness': witness,
        'scales': scale_ratios
    }


def galaxy_distance(phi, psi, sampler, cap=const.DEFAULT_CAP):
    return galaxy_scan(phi, psi, sampler, cap)['distance']


class Perturbation(object):

    def __init__(self, evaluator, lambda_bound, space, gauge, varpi, omega, horizon, eta=None, gamma=1.0):
        """
        Perturbation
        :param evaluator: (s, t, a) -> eps_{t,s}(a), a state increment
        :param lambda_bound: lambda in |eps_{t,s}(a)| <= lambda N(a) varpi(omega_{s,t})
        :param eta: function of the control value in the Hoelder bound of eps, None for zero
        :param gamma: Hoelder exponent of eps in the state
        """
        if lambda_bound < 0:
            raise InvalidArgument('the perturbation bound must be nonnegative', {'lambda': lambda_bound})
        self.evaluator = evaluator
        self.lambda_bound = float(lambda_bound)
        self.space = space
        self.gauge = gauge
        self.varpi = varpi
        self.omega = omega
        self.horizon = float(horizon)
        self.eta = _as_function(eta)
        self.gamma = float(gamma)

    @classmethod
    def for_flow(cls, phi, evaluator, lambda_bound, eta=None, gamma=None):
        """Perturbation sharing the state space, gauge, remainder and control of `phi`"""
        return cls(evaluator, lambda_bound, phi.space, phi.gauge, phi.varpi, phi.omega, phi.horizon,
                   eta, phi.gamma if gamma is None else gamma)


def perturb(phi, eps):
    """
    psi_{t,s}(a) = phi_{t,s}(a) + eps_{t,s}(a), with delta_T + lambda varpi(omega_{0,T}) as new
    delta_T, the sum of both eta functions as new eta and an enlarged composition defect constant
    """
    if not phi.space.supports_addition:
        raise UnsupportedOperation('perturbation needs a state space with addition', {'space': phi.space.name})
    lam = eps.lambda_bound
    total = float(phi.varpi(phi.omega(0.0, phi.horizon)))
    delta_T = phi.delta_T
    growth = gauge_growth_bound(phi)
    add = phi.space.add

    def evaluator(s, t, a):
        return add(phi.evaluator(s, t, a), eps.evaluator(s, t, a))

    def delta(horizon):
        return phi.delta(horizon) + lam * total

    def eta(w):
        return phi.eta(w) + eps.eta(w)

    h3_const = phi.h3_const + 1.0 + (1.0 + 2.0 * lam ** phi.gamma) * delta_T + (growth + 1.0) * lam
    return AlmostFlow(evaluator, phi.space, phi.gauge, delta, eta, phi.varpi, phi.omega, phi.horizon,
                      h3_const=h3_const, name='{0}+perturbation'.format(phi.name or 'flow'))


def validate_perturbation(eps, sampler, tolerance=const.DEFAULT_TOLERANCE):
    """Ratios of the three perturbation conditions: vanishing on the diagonal, size and Hoelder continuity"""
    space = eps.space
    horizon = eps.horizon
    states = sampler.states(space)
    gauges = [eps.gauge(a) for a in states]
    pairs = sampler.pairs(horizon) + sampler.diagonal_pairs(horizon)

    e1 = ConditionCheck('epsilon1', tolerance=tolerance)
    for t in sampler.times(horizon) + [0.0, horizon]:
        for a in states:
            e1.update(_ratio(space.norm(eps.evaluator(t, t, a)), 0.0), _witness(space, t, t, a))

    e2 = ConditionCheck('epsilon2', tolerance=tolerance)
    e3 = ConditionCheck('epsilon3', tolerance=tolerance)
    fitted_lambda = 0.0
    fitted_eta = 0.0
    for s, t in pairs:
        w = eps.omega(s, t)
        bound = float(eps.varpi(w))
        values = [eps.evaluator(s, t, a) for a in states]
        for a, n, e in zip(states, gauges, values):
            size = space.norm(e) / n
            if bound > 0:
                fitted_lambda = max(fitted_lambda, size / bound)
            e2.update(_ratio(size, eps.lambda_bound * bound), _witness(space, s, t, a))
        for k in range(len(states) - 1):
            d = space.distance(states[k], states[k + 1])
            if d == 0:
                continue
            change = space.distance(values[k], values[k + 1]) / d ** eps.gamma
            fitted_eta = max(fitted_eta, change)
            e3.update(_ratio(change, eps.eta(w)), _witness(space, s, t, states[k], states[k + 1]))

    report = ValidationReport(
        subject='perturbation',
        tolerance=tolerance,
        conditions=[e1, e2, e3],
        fitted={'lambda': fitted_lambda, 'eta': fitted_eta},
        declared={'lambda': eps.lambda_bound, 'gamma': eps.gamma},
        sampler=sampler.to_dict())
    if not math.isfinite(e2.ratio):
        logging.info('Perturbation does not vanish like the remainder at %s', e2.witness)
    return report
