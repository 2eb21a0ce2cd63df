#!/usr/bin/env python
# _*_ coding:utf-8 _*_

"""
sewflow.solutions

Solutions in the sense of Davie, as paths on finite grids: defect against an almost flow,
extraction from a sewn flow, splicing and restriction.
"""
import logging
from bisect import bisect_left

import numpy as np

from sewflow.errors import InvalidArgument
from sewflow.metadata import DefectReport
from sewflow.utils import read_csv_file, write_csv_file


class DPath(object):

    def __init__(self, times, values, start=None):
        """
        DPath
        :param times: strictly increasing grid times, the first one is the starting time r
        :param values: one state per grid time
        :param start: starting point (r, a) used by the defect gauge, defaults to the first grid value
        """
        times = [float(t) for t in times]
        if not times:
            raise InvalidArgument('a D-path needs at least one grid point')
        if len(times) != len(values):
            raise InvalidArgument('one value per grid time is needed', {'times': len(times), 'values': len(values)})
        if any(b <= a for a, b in zip(times, times[1:])):
            raise InvalidArgument('grid times must be strictly increasing')
        self.times = times
        self.values = list(values)
        self.start = start if start is not None else (times[0], self.values[0])

    def __len__(self):
        return len(self.times)

    @property
    def grid(self):
        return self.times

    @property
    def r(self):
        return self.start[0]

    def value_at(self, t):
        """Value at a grid time; off-grid times are rejected"""
        i = bisect_left(self.times, t)
        if i == len(self.times) or self.times[i] != t:
            raise InvalidArgument('time is not a grid point of the D-path', {'t': t})
        return self.values[i]

    def to_csv(self, csv_file):
        values = [np.atleast_1d(np.asarray(v, dtype=float)) for v in self.values]
        header = ['time'] + ['y{0}'.format(k) for k in range(values[0].size)]
        return write_csv_file([[t] + v.tolist() for t, v in zip(self.times, values)], csv_file, fileheader=header)

    @classmethod
    def from_csv(cls, csv_file):
        header, data = read_csv_file(csv_file)
        return cls(data[:, 0], [row for row in data[:, 1:]])


def davie_defect(y, phi):
    """
    K = max over grid pairs s < t of d(y_t, phi_{t,s}(y_s)) / (N(a) varpi(omega_{s,t})),
    with N taken at the starting point a
    """
    r, a = y.start
    gauge = phi.gauge(a)
    report = DefectReport(grid=y.times, start={'r': r, 'a': phi.space.encode(phi.space.coerce(a))})
    for i, s in enumerate(y.times):
        for j in range(i + 1, len(y.times)):
            t = y.times[j]
            d = phi.space.distance(y.values[j], phi.evaluator(s, t, y.values[i]))
            report.pairs += 1
            if d == 0:
                continue
            bound = gauge * float(phi.varpi(phi.omega(s, t)))
            ratio = d / bound if bound > 0 else float('inf')
            if ratio > report.constant:
                report.constant = ratio
                report.worst_pair = [s, t]
    logging.debug('Davie defect on %s grid points: %s at %s', len(y), report.constant, report.worst_pair)
    return report


def flow_to_solution(approx, r, a, grid):
    """
    y_t = psi_{t,r}(a) on the grid points >= r, psi the sewn limit candidate; values are chained
    from the latest grid point of the final partition, which keeps them equal to psi_{t,r}(a)
    """
    horizon = approx.horizon
    if not 0 <= r < horizon:
        raise InvalidArgument('starting time outside [0, T)', {'r': r, 'T': horizon})
    points = [float(t) for t in grid]
    if any(t < 0 or t > horizon for t in points):
        raise InvalidArgument('grid outside the time domain', {'T': horizon})
    times = [r] + [t for t in points if t > r]
    a = approx.source.space.coerce(a)

    values = [a]
    anchor, anchor_value = r, a
    for t in times[1:]:
        value = approx.evaluate(anchor, t, anchor_value)
        values.append(value)
        if t in approx.partition:
            anchor, anchor_value = t, value
    return DPath(times, values, start=(r, a))


def splice(y, z, s):
    """y on [r, s] followed by z on [s, T]; z has to start at (s, y_s) bit for bit"""
    y_s = y.value_at(s)
    if z.times[0] != s:
        raise InvalidArgument('second path does not start at the splicing time', {'s': s, 'start': z.times[0]})
    if not np.array_equal(np.asarray(z.values[0]), np.asarray(y_s)):
        raise InvalidArgument('junction values differ', {'s': s})
    i = y.times.index(s)
    return DPath(y.times[:i + 1] + z.times[1:], y.values[:i + 1] + z.values[1:], start=y.start)


def restrict(y, times):
    """The D-path on a subset of its grid; the starting point is kept when it stays in the subset"""
    times = sorted(float(t) for t in times)
    values = [y.value_at(t) for t in times]
    start = y.start if times[0] == y.times[0] else (times[0], values[0])
    return DPath(times, values, start=start)
