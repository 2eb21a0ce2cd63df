#!/usr/bin/env python
# _*_ coding:utf-8 _*_

"""
sewflow.config

Experiment configuration: one JSON document naming a scheme and the registered built-ins it is
made of, plus the sewing schedule and the sampling used by the validators.
"""
import json
import logging
import os

import numpy as np

from sewflow import builtins, const
from sewflow.almostflow import SamplerSpec, perturb
from sewflow.errors import ConfigError, SewflowError
from sewflow.schemes import (additive_flow, lift_smooth, multiplicative_flow, pure_area, rough_flow,
                             young_flow)
from sewflow.sewing import SewSchedule
from sewflow.statespace import VectorSpace
from sewflow.timegrid import uniform_partition
from sewflow.utils import get_absolute_path

SCHEMES = [const.SCHEME_IDENTITY, const.SCHEME_BROKEN, const.SCHEME_ADDITIVE, const.SCHEME_MULTIPLICATIVE,
           const.SCHEME_YOUNG, const.SCHEME_ROUGH, const.SCHEME_SIGNATURE]


def _descriptor(data, key, required=True):
    value = data.get(key)
    if value is None:
        if required:
            raise ConfigError('missing key', {'key': key})
        return None
    if isinstance(value, str):
        value = {'name': value}
    elif isinstance(value, dict):
        value = dict(value)
    if not isinstance(value, dict) or 'name' not in value:
        raise ConfigError('descriptor needs a name', {'key': key})
    value.setdefault('params', {})
    return value


def _build(registry, descriptor, kind, *args):
    factory = builtins.lookup(registry, descriptor['name'], kind)
    try:
        return factory(*args, **descriptor['params'])
    except TypeError as e:
        raise ConfigError('bad parameters for {0} {1}'.format(kind, descriptor['name']), {'error': e})


class ExperimentConfig(object):

    def __init__(self, data, seed=None):
        """
        ExperimentConfig
        :param data: parsed JSON document
        :param seed: optional seed overriding every sampler seed of the document
        """
        if not isinstance(data, dict):
            raise ConfigError('config must be a JSON object')
        scheme = data.get('scheme')
        if scheme not in SCHEMES:
            raise ConfigError('unknown scheme', {'scheme': scheme, 'known': SCHEMES})
        self.data = data
        self.name = data.get('name', scheme)
        self.scheme = scheme
        self.horizon = float(data.get('horizon', 1.0))
        self.seed = seed

        if scheme in (const.SCHEME_ADDITIVE, const.SCHEME_MULTIPLICATIVE):
            self.functional = _descriptor(data, 'functional')
        if scheme in (const.SCHEME_YOUNG, const.SCHEME_SIGNATURE):
            self.path = _descriptor(data, 'path')
        if scheme in (const.SCHEME_YOUNG, const.SCHEME_ROUGH):
            self.field = _descriptor(data, 'field')
        if scheme == const.SCHEME_ROUGH and 'rough' not in data:
            raise ConfigError('missing key', {'key': 'rough'})
        self.perturbation = _descriptor(data, 'perturbation', required=False)

        try:
            schedule = dict(data.get('schedule', {}))
            if seed is not None:
                schedule['sampler'] = dict(schedule.get('sampler', {}), seed=seed)
            if 'base' not in schedule and 'base_n' in schedule:
                schedule['base'] = {'horizon': self.horizon, 'n': schedule.pop('base_n')}
            self.schedule = SewSchedule.from_dict(schedule, self.horizon)
            validation = data.get('validation', {})
            self.validation_tolerance = float(validation.get('tolerance', const.DEFAULT_TOLERANCE))
            self.validation_sampler = SamplerSpec.from_dict(validation.get('sampler'))
            if seed is not None:
                self.validation_sampler = self.validation_sampler.with_seed(seed)
        except SewflowError as e:
            raise ConfigError('invalid schedule or validation settings', {'error': e.message})
        except (TypeError, ValueError) as e:
            raise ConfigError('invalid schedule or validation settings', {'error': e})

        self.check = data.get('check', True)
        self.solve = data.get('solve', {})
        self.signature = data.get('signature', {})
        self.start = data.get('start')

    @classmethod
    def from_dict(cls, data, seed=None):
        return cls(data, seed)

    @classmethod
    def from_file(cls, config_file, seed=None):
        config_file = get_absolute_path(config_file)
        if not os.path.isfile(config_file):
            raise ConfigError('config file not found', {'file': config_file})
        try:
            with open(config_file, 'r', encoding='utf8') as f:
                data = json.load(f)
        except ValueError as e:
            raise ConfigError('config file is not valid JSON', {'file': config_file, 'error': e})
        logging.info('Loaded experiment config: %s', config_file)
        return cls(data, seed)

    def build_path(self):
        params = dict(self.path['params'])
        if self.path['name'] not in ('polyline', 'csv'):
            params.setdefault('horizon', self.horizon)
        return _build(builtins.PATHS, dict(self.path, params=params), 'path')

    def build_field(self):
        return _build(builtins.FIELDS, self.field, 'vector field')

    def build_rough_path(self):
        rough = dict(self.data.get('rough', {}))
        kind = rough.pop('kind', 'lift')
        area_shift = rough.pop('area_shift', None)
        if kind == 'lift':
            path = _descriptor(rough, 'path')
            params = dict(path['params'])
            if path['name'] not in ('polyline', 'csv'):
                params.setdefault('horizon', self.horizon)
            x = _build(builtins.PATHS, dict(path, params=params), 'path')
            X = lift_smooth(x, quad_refine=rough.get('quad_refine', 12), p=rough.get('p', 2.5))
        elif kind == 'pure-area':
            X = pure_area(np.asarray(rough.get('area'), dtype=float), rough.get('scale', 1.0), rough.get('p', 2.5),
                          self.horizon)
        else:
            raise ConfigError('unknown rough path kind', {'kind': kind, 'known': ['lift', 'pure-area']})
        if area_shift is not None:
            X = X.with_area(np.asarray(area_shift, dtype=float))
        return X

    def build_signature_input(self):
        if self.scheme != const.SCHEME_SIGNATURE:
            raise ConfigError('signature input needs the signature scheme', {'scheme': self.scheme})
        if 'rough' in self.data:
            return self.build_rough_path()
        return lift_smooth(self.build_path(), quad_refine=self.signature.get('quad_refine', 12))

    def build_flow(self):
        """The almost flow of the experiment, perturbed when the config names a perturbation"""
        scheme = self.scheme
        if scheme in (const.SCHEME_IDENTITY, const.SCHEME_BROKEN):
            params = dict(self.data.get('params', {}))
            params.setdefault('horizon', self.horizon)
            flow = _build(builtins.FLOWS, {'name': scheme, 'params': params}, 'flow')
        elif scheme == const.SCHEME_ADDITIVE:
            flow = additive_flow(self._build_functional(builtins.ADDITIVE_FUNCTIONALS))
        elif scheme == const.SCHEME_MULTIPLICATIVE:
            flow = multiplicative_flow(self._build_functional(builtins.MULTIPLICATIVE_FUNCTIONALS))
        elif scheme == const.SCHEME_YOUNG:
            flow = young_flow(self.build_field(), self.build_path(), p=float(self.data.get('p', 1.0)))
        elif scheme == const.SCHEME_ROUGH:
            flow = rough_flow(self.build_field(), self.build_rough_path())
        else:
            raise ConfigError('the signature scheme has no almost flow', {'scheme': scheme})

        if self.perturbation is not None:
            eps = _build(builtins.PERTURBATIONS, self.perturbation, 'perturbation', flow)
            flow = perturb(flow, eps)
        return flow

    def _build_functional(self, registry):
        params = dict(self.functional['params'])
        if 'path' in params:
            path = _descriptor(params, 'path')
            path_params = dict(path['params'])
            path_params.setdefault('horizon', self.horizon)
            params['path'] = _build(builtins.PATHS, dict(path, params=path_params), 'path')
        else:
            params.setdefault('horizon', self.horizon)
        return _build(registry, dict(self.functional, params=params), 'functional')

    def start_state(self, flow):
        if self.start is None:
            if isinstance(flow.space, VectorSpace):
                return flow.space.zero()
            return flow.space.unit()
        return flow.space.coerce(self.start)

    def solve_grid(self):
        return uniform_partition(self.horizon, int(self.solve.get('grid', 16)))

    def to_dict(self):
        return dict(self.data, name=self.name, seed=self.seed)
