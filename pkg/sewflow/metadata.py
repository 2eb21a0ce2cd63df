#!/usr/bin/env python
# _*_ coding:utf-8 _*_

"""
sewflow.metadata

Plain report objects produced by validators, the sewing driver and the solution tools.
"""


class ConditionCheck(object):

    def __init__(self, name, ratio=0.0, witness=None, tolerance=0.0, checked=0):
        """
        ConditionCheck
        :param name: condition tag, eg h0, h1, h2, h3, epsilon1
        :param ratio: worst observed ratio of the measured quantity over its declared bound
        :param witness: sample point realizing the worst ratio, eg {'s': 0.1, 't': 0.2, 'a': [1.0]}
        :param tolerance: additive tolerance, the check passes when ratio <= 1 + tolerance
        :param checked: number of evaluated samples
        """
        self.name = name
        self.ratio = ratio
        self.witness = witness
        self.tolerance = tolerance
        self.checked = checked

    @property
    def passed(self):
        return self.ratio <= 1.0 + self.tolerance

    def update(self, ratio, witness):
        self.checked += 1
        if ratio > self.ratio:
            self.ratio = ratio
            self.witness = witness

    def to_dict(self):
        return {
            'name': self.name,
            'ratio': self.ratio,
            'witness': self.witness,
            'passed': self.passed,
            'checked': self.checked
        }


class ValidationReport(object):

    def __init__(self, subject='', tolerance=0.0, conditions=None, fitted=None, declared=None, sampler=None):
        """
        ValidationReport
        :param subject: validated object description, eg 'almost flow' or 'perturbation'
        :param tolerance: additive tolerance shared by every condition
        :param conditions: ConditionCheck list, in check order
        :param fitted: fitted minimal constants {'delta_T': .., 'eta': .., 'lambda': ..}
        :param declared: declared constants the ratios were measured against
        :param sampler: sampler descriptor {seed, n_times, n_states, state_box}
        """
        self.subject = subject
        self.tolerance = tolerance
        self.conditions = conditions or []
        self.fitted = fitted or {}
        self.declared = declared or {}
        self.sampler = sampler or {}

    @property
    def passed(self):
        return all(condition.passed for condition in self.conditions)

    def condition(self, name):
        for condition in self.conditions:
            if condition.name == name:
                return condition
        raise KeyError(name)

    def failures(self):
        return [condition for condition in self.conditions if not condition.passed]

    def to_dict(self):
        return {
            'subject': self.subject,
            'passed': self.passed,
            'tolerance': self.tolerance,
            'conditions': [condition.to_dict() for condition in self.conditions],
            'fitted': self.fitted,
            'declared': self.declared,
            'sampler': self.sampler
        }


class LevelRecord(object):

    def __init__(self, level, mesh, theta, gap=None, evaluations=0):
        """
        LevelRecord
        :param level: refinement level, 0 is the base partition
        :param mesh: mesh of the level partition
        :param theta: rate statistic of the level partition
        :param gap: Cauchy gap to the previous level, None on the base level
        :param evaluations: almost flow evaluations spent on the level
        """
        self.level = level
        self.mesh = mesh
        self.theta = theta
        self.gap = gap
        self.evaluations = evaluations

    def to_row(self):
        return [self.level, self.mesh, self.theta, '' if self.gap is None else self.gap, self.evaluations]

    def to_dict(self):
        return {
            'level': self.level,
            'mesh': self.mesh,
            'theta': self.theta,
            'gap': self.gap,
            'evaluations': self.evaluations
        }


class RateFit(object):

    def __init__(self, slope, intercept, r2, levels):
        self.slope = slope
        self.intercept = intercept
        self.r2 = r2
        self.levels = levels

    def to_dict(self):
        return {'slope': self.slope, 'intercept': self.intercept, 'r2': self.r2, 'levels': self.levels}


class DefectReport(object):

    def __init__(self, constant=0.0, worst_pair=None, grid=None, start=None, pairs=0):
        """
        DefectReport
        :param constant: fitted defect constant K
        :param worst_pair: grid pair (s, t) realizing K
        :param grid: grid points the pairs were taken from
        :param start: starting point (r, a) of the checked path
        :param pairs: number of evaluated grid pairs
        """
        self.constant = constant
        self.worst_pair = worst_pair
        self.grid = grid or []
        self.start = start
        self.pairs = pairs

    def to_dict(self):
        return {
            'constant': self.constant,
            'worst_pair': self.worst_pair,
            'start': self.start,
            'pairs': self.pairs,
            'grid_size': len(self.grid)
        }
