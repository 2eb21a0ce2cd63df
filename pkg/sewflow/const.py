#!/usr/bin/env python
# _*_ coding:utf-8 _*_


ERROR_INVALID_ARGUMENT = 'INVALID_ARGUMENT'
ERROR_UNSUPPORTED_OPERATION = 'UNSUPPORTED_OPERATION'
ERROR_DIVERGENCE = 'DIVERGENCE'
ERROR_INSUFFICIENT_DATA = 'INSUFFICIENT_DATA'
ERROR_CONFIG = 'CONFIG_ERROR'

KIND_LINEAR = 'linear'
KIND_PVAR = 'p-variation-from-path'
KIND_CUSTOM = 'custom'
KIND_POWER = 'power'

SCHEME_IDENTITY = 'identity'
SCHEME_BROKEN = 'broken'
SCHEME_ADDITIVE = 'additive'
SCHEME_MULTIPLICATIVE = 'multiplicative'
SCHEME_YOUNG = 'young'
SCHEME_ROUGH = 'rough'
SCHEME_SIGNATURE = 'signature'

FILE_REPORT = 'report.json'
FILE_HISTORY = 'history.csv'
FILE_SUMMARY = 'summary.json'
FILE_SIGNATURE = 'signature.json'
FILE_SOLUTION = 'solution.csv'
FILE_DEFECT = 'defect.json'
FILE_LOG = 'run.log'

HISTORY_COLUMNS = ['level', 'mesh', 'theta', 'gap', 'evaluations']

ENV_THREADS = 'SEWFLOW_THREADS'

DEFAULT_CAP = 1e12
DEFAULT_FD_STEP = 1e-5
DEFAULT_TOLERANCE = 0.05
DEFAULT_SEED = 20240601
DEFAULT_N_TIMES = 8
DEFAULT_N_STATES = 2
DEFAULT_STATE_BOX = 1.0
DIVERGENCE_RUN = 3
SHRINKING_SCALES = 40
ROUNDING_ULPS = 8
STATIONARY_CACHE = 256

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
