#!/usr/bin/env python
# _*_ coding:utf-8 _*_

"""
sewflow.sewing

The sewing driver: iterated products along dyadically refined partitions, their Cauchy gaps,
the limit flow candidate and its diagnostics.
"""
import logging

import arrow
import numpy as np
from scipy.stats import linregress

from sewflow import const
from sewflow.almostflow import SamplerSpec, galaxy_scan, iterate, iterate_steps, validate_almost_flow
from sewflow.errors import DivergenceError, InsufficientData, InvalidArgument
from sewflow.metadata import LevelRecord, RateFit
from sewflow.timegrid import Partition, default_lambda, dyadic_refine, theta_stat, uniform_partition
from sewflow.utils import parallel_map, write_csv_file, write_json_file


class SewSchedule(object):

    def __init__(self, base=None, max_levels=10, tolerance=1e-6, sampler=None, lam=None,
                 validation_tolerance=const.DEFAULT_TOLERANCE):
        """
        SewSchedule
        :param base: base Partition, defaults to {0, T} of the sewn flow
        :param max_levels: number of dyadic refinements at most
        :param tolerance: Cauchy gap below which the sewing stops
        :param sampler: SamplerSpec of the (s, t, a) samples the gaps are taken over
        :param lam: power of the remainder in the gap normalization, default from kappa
        :param validation_tolerance: tolerance of the almost-flow validation run before sewing
        """
        if max_levels < 1:
            raise InvalidArgument('a schedule needs at least one level', {'max_levels': max_levels})
        if not tolerance > 0:
            raise InvalidArgument('the schedule tolerance must be positive', {'tolerance': tolerance})
        self.base = base
        self.max_levels = int(max_levels)
        self.tolerance = float(tolerance)
        self.sampler = sampler or SamplerSpec()
        self.lam = lam
        self.validation_tolerance = float(validation_tolerance)

    def base_for(self, phi):
        if self.base is None:
            return uniform_partition(phi.horizon, 1)
        if self.base.horizon != phi.horizon:
            raise InvalidArgument('base partition does not end at the flow horizon',
                                  {'partition': self.base.horizon, 'horizon': phi.horizon})
        return self.base

    def lambda_for(self, phi):
        return default_lambda(phi.varpi.kappa) if self.lam is None else self.lam

    def to_dict(self):
        return {
            'base': None if self.base is None else self.base.to_dict()['points'],
            'max_levels': self.max_levels,
            'tolerance': self.tolerance,
            'sampler': self.sampler.to_dict(),
            'lambda': self.lam,
            'validation_tolerance': self.validation_tolerance
        }

    @classmethod
    def from_dict(cls, data, horizon=None):
        data = data or {}
        base = data.get('base')
        if isinstance(base, dict):
            base = uniform_partition(base.get('horizon', horizon), base.get('n', 1))
        elif base is not None:
            base = Partition(base)
        return cls(base=base,
                   max_levels=data.get('max_levels', 10),
                   tolerance=data.get('tolerance', 1e-6),
                   sampler=SamplerSpec.from_dict(data.get('sampler')),
                   lam=data.get('lambda'),
                   validation_tolerance=data.get('validation_tolerance', const.DEFAULT_TOLERANCE))


class FlowApprox(object):

    def __init__(self, source, partition, history, converged, schedule, lam, fitted_rate=None):
        """
        FlowApprox
        :param source: the sewn AlmostFlow
        :param partition: finest Partition reached, the limit candidate is the iterate along it
        :param history: LevelRecord list, one per level
        :param converged: whether the last gap reached the schedule tolerance
        :param schedule: SewSchedule of the run
        :param lam: power of the remainder used in the gaps
        :param fitted_rate: RateFit of log gap against log theta, None when not enough levels
        """
        self.source = source
        self.partition = partition
        self.history = history
        self.converged = converged
        self.schedule = schedule
        self.lam = lam
        self.fitted_rate = fitted_rate

    @property
    def horizon(self):
        return self.source.horizon

    @property
    def final_gap(self):
        gaps = [record.gap for record in self.history if record.gap is not None]
        return gaps[-1] if gaps else None

    def evaluate(self, s, t, a):
        return iterate(self.source, self.partition, s, t, a)

    def __call__(self, s, t, a):
        return self.evaluate(s, t, a)

    def to_dict(self):
        return {
            'flow': self.source.name,
            'converged': self.converged,
            'levels': len(self.history) - 1,
            'final_mesh': self.partition.mesh,
            'final_gap': self.final_gap,
            'lambda': self.lam,
            'fitted_rate': None if self.fitted_rate is None else self.fitted_rate.to_dict(),
            'schedule': self.schedule.to_dict()
        }

    def history_to_csv(self, csv_file):
        return write_csv_file([record.to_row() for record in self.history], csv_file,
                              fileheader=const.HISTORY_COLUMNS)

    def summary_to_json(self, json_file, extra=None):
        summary = self.to_dict()
        summary.update(extra or {})
        return write_json_file(summary, json_file)


def _samples(phi, sampler):
    states = sampler.states(phi.space)
    pairs = [(s, t) for s, t in sampler.pairs(phi.horizon) if s < t]
    return [(s, t, a) for s, t in pairs for a in states]


def _normalized_gap(phi, samples, fine, coarse, lam):
    gap = 0.0
    for (s, t, a), x, y in zip(samples, fine, coarse):
        d = phi.space.distance(x, y)
        if d == 0:
            continue
        bound = phi.gauge(a) * float(phi.varpi(phi.omega(s, t))) ** lam
        gap = max(gap, d / bound if bound > 0 else float('inf'))
    return gap


def _evaluate_level(phi, pi, samples):
    values = parallel_map(lambda sample: iterate(phi, pi, sample[0], sample[1], sample[2]), samples)
    evaluations = sum(iterate_steps(pi, s, t) for s, t, _ in samples)
    return values, evaluations


def _walk_levels(phi, schedule, samples, lam):
    """Yield (LevelRecord, partition, values) for the base partition and every dyadic refinement"""
    pi = schedule.base_for(phi)
    values, evaluations = _evaluate_level(phi, pi, samples)
    yield LevelRecord(0, pi.mesh, theta_stat(pi, phi.omega, phi.varpi, lam), None, evaluations), pi, values
    for level in range(1, schedule.max_levels + 1):
        started = arrow.now()
        pi = dyadic_refine(pi)
        fine, evaluations = _evaluate_level(phi, pi, samples)
        gap = _normalized_gap(phi, samples, fine, values, lam)
        record = LevelRecord(level, pi.mesh, theta_stat(pi, phi.omega, phi.varpi, lam), gap, evaluations)
        logging.info('Sew %s level %s: mesh=%s theta=%s gap=%s (%.3fs)', phi.name, level, record.mesh,
                     record.theta, gap, (arrow.now() - started).total_seconds())
        values = fine
        yield record, pi, values


def _check_growth(history):
    gaps = [record.gap for record in history if record.gap is not None]
    if len(gaps) > const.DIVERGENCE_RUN and all(
            gaps[-k] > gaps[-k - 1] for k in range(1, const.DIVERGENCE_RUN + 1)):
        raise DivergenceError('Cauchy gaps grew for {0} consecutive levels'.format(const.DIVERGENCE_RUN),
                              history=history, details={'last_gap': gaps[-1]})


def _pre_check(phi, schedule, check, lam):
    if not check:
        return phi.delta_T
    report = validate_almost_flow(phi, schedule.sampler, schedule.validation_tolerance)
    if not report.passed:
        failed = [condition.name for condition in report.failures()]
        if check == 'warn':
            logging.warning('Sewing %s although the almost-flow validation failed on %s', phi.name, failed)
        else:
            raise InvalidArgument('almost-flow validation failed', {'conditions': failed})
    return report.fitted['delta_T']


def sew(phi, schedule, check=True):
    """
    Sew an almost flow: refine the base partition dyadically, measure the Cauchy gap between
    consecutive iterates, stop once it reaches the schedule tolerance
    :param check: True validates first and refuses invalid flows, 'warn' only logs, False skips
    """
    lam = schedule.lambda_for(phi)
    fitted_delta = _pre_check(phi, schedule, check, lam)
    kappa_lam = phi.varpi.power(lam).kappa
    if kappa_lam * (1.0 + fitted_delta) >= 1.0:
        logging.warning('Horizon may be too large: kappa_lambda (1 + delta_T) = %s >= 1',
                        kappa_lam * (1.0 + fitted_delta))

    samples = _samples(phi, schedule.sampler)
    history = []
    converged = False
    partition = None
    started = arrow.now()
    for record, pi, _ in _walk_levels(phi, schedule, samples, lam):
        history.append(record)
        partition = pi
        _check_growth(history)
        if record.gap is not None and record.gap <= schedule.tolerance:
            converged = True
            break

    try:
        fitted_rate = rate_fit_history(history)
    except InsufficientData:
        fitted_rate = None
    logging.info('Sewing %s finished at %s: converged=%s, levels=%s, %.3fs', phi.name, started.format(),
                 converged, len(history) - 1, (arrow.now() - started).total_seconds())
    return FlowApprox(phi, partition, history, converged, schedule, lam, fitted_rate)


def cauchy_gap(phi, pi_coarse, pi_fine, sampler, lam=None):
    """sup over samples of d(phi^fine, phi^coarse) / (N(a) varpi(omega)^lambda)"""
    if not pi_fine.is_refinement_of(pi_coarse):
        raise InvalidArgument('the fine partition does not contain the coarse one')
    lam = default_lambda(phi.varpi.kappa) if lam is None else lam
    samples = _samples(phi, sampler)
    fine, _ = _evaluate_level(phi, pi_fine, samples)
    coarse, _ = _evaluate_level(phi, pi_coarse, samples)
    return _normalized_gap(phi, samples, fine, coarse, lam)


def rate_fit_history(history):
    usable = [record for record in history if record.gap is not None and record.gap > 0 and record.theta > 0]
    if len(usable) < 3:
        raise InsufficientData('rate fit needs at least 3 levels with positive gaps', {'usable': len(usable)})
    fit = linregress(np.log([record.theta for record in usable]), np.log([record.gap for record in usable]))
    return RateFit(float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2), [r.level for r in usable])


def rate_fit(approx):
    """Least squares slope of log(gap) against log(theta) over the sewing history"""
    return rate_fit_history(approx.history)


def flow_property_check(approx, triples, states):
    """Largest composition defect of the limit candidate on the given triples and states"""
    space = approx.source.space

    def defect(item):
        (r, s, t), a = item
        composed = approx.evaluate(s, t, approx.evaluate(r, s, a))
        return space.distance(composed, approx.evaluate(r, t, a))

    items = [(triple, space.coerce(a)) for triple in triples for a in states]
    defects = parallel_map(defect, items)
    worst = int(np.argmax(defects)) if defects else None
    max_defect = max(defects) if defects else 0.0
    gap = approx.final_gap
    return {
        'max_defect': max_defect,
        'witness': None if worst is None else list(items[worst][0]),
        'final_gap': gap,
        'ratio_to_gap': max_defect / gap if gap else None
    }


def uniqueness_crosscheck(phi, chi, schedule):
    """
    Sew both flows level by level and measure the distance between their iterates.
    Both flows have to lie in one galaxy: a diverging or capped galaxy distance is refused.
    """
    scan = galaxy_scan(phi, chi, schedule.sampler)
    if scan['cap_exceeded']:
        raise InvalidArgument('the flows are not galaxy equivalent',
                              {'sampled_sup': scan['sampled_sup'], 'witness': scan['witness']})
    lam = schedule.lambda_for(phi)
    samples = _samples(phi, schedule.sampler)
    per_level = []
    histories = ([], [])
    for (rec_phi, _, x), (rec_chi, _, y) in zip(_walk_levels(phi, schedule, samples, lam),
                                                _walk_levels(chi, schedule, samples, lam)):
        histories[0].append(rec_phi)
        histories[1].append(rec_chi)
        _check_growth(histories[0])
        _check_growth(histories[1])
        distance = _normalized_gap(phi, samples, x, y, lam)
        per_level.append(distance)
        logging.debug('Crosscheck level %s: distance %s', rec_phi.level, distance)
        if (rec_phi.gap is not None and rec_phi.gap <= schedule.tolerance
                and rec_chi.gap is not None and rec_chi.gap <= schedule.tolerance):
            break
    return {'limit_distance': per_level[-1], 'per_level': per_level, 'lambda': lam,
            'galaxy_distance': scan['distance']}


def uniform_bound_sweep(phi, partitions, sampler):
    """
    Fitted constants of the uniform bound over many partitions:
    L = sup d(phi^pi_{t,s}(a), phi_{t,s}(a)) / (N(a) varpi(omega_{s,t})) and
    K = sup N(phi^pi_{t,s}(a)) / N(a), per partition
    """
    states = sampler.states(phi.space)
    pairs = [(s, t) for s, t in sampler.pairs(phi.horizon) if s < t] + [(0.0, phi.horizon)]

    def constants(pi):
        lipschitz = 0.0
        growth = 0.0
        for s, t in pairs:
            bound = float(phi.varpi(phi.omega(s, t)))
            for a in states:
                n = phi.gauge(a)
                y = iterate(phi, pi, s, t, a)
                if bound > 0:
                    lipschitz = max(lipschitz, phi.space.distance(y, phi.evaluator(s, t, a)) / (n * bound))
                growth = max(growth, phi.gauge(y) / n)
        return {'n_points': len(pi), 'L': lipschitz, 'K': growth}

    rows = parallel_map(constants, partitions)
    return {
        'partitions': rows,
        'L_max': max(row['L'] for row in rows),
        'L_min': min(row['L'] for row in rows),
        'K_max': max(row['K'] for row in rows)
    }


def ul_spot_check(phi, partitions, sampler):
    """Largest Lipschitz ratio of the iterates on the checked partitions, against 1 + delta_T"""
    states = sampler.states(phi.space)
    pairs = [(s, t) for s, t in sampler.pairs(phi.horizon) if s < t] + [(0.0, phi.horizon)]
    worst = 0.0
    for pi in partitions:
        for s, t in pairs:
            images = [iterate(phi, pi, s, t, a) for a in states]
            for k in range(len(states) - 1):
                d = phi.space.distance(states[k], states[k + 1])
                if d > 0:
                    worst = max(worst, phi.space.distance(images[k], images[k + 1]) / d)
    bound = 1.0 + phi.delta_T
    return {'max_ratio': worst, 'bound': bound, 'passed': worst <= bound,
            'checked_partitions': [len(pi) for pi in partitions]}
