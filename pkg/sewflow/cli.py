#!/usr/bin/env python
# _*_ coding:utf-8 _*_
import argparse
import logging
import os
import sys

import arrow
import numpy as np

from sewflow import const
from sewflow.__about__ import __version__
from sewflow.almostflow import validate_almost_flow
from sewflow.config import ExperimentConfig
from sewflow.errors import ConfigError, DivergenceError, SewflowError
from sewflow.schemes import signature
from sewflow.sewing import flow_property_check, sew, ul_spot_check, uniform_bound_sweep
from sewflow.solutions import davie_defect, flow_to_solution
from sewflow.timegrid import dyadic_refine, random_partition, sample_triples
from sewflow.utils import get_absolute_path, write_csv_file, write_json_file

LOG_FORMAT = '%(asctime)s  %(name)s  %(levelname)s  [%(module)s - %(funcName)s]: %(message)s'
LOG_DATEFMT = '%Y/%m/%d %H:%M:%S'

logging.basicConfig(level=logging.INFO, format=LOG_FORMAT, datefmt=LOG_DATEFMT)

using_doc = """
    Sewflow builds flows from almost flows by iterated composition along refining partitions,
    and writes the validation reports, sewing histories, signatures and solutions as JSON/CSV.

    Usage:
     sewflow validate  --config <file> --out <dir> [--seed N]   => report.json
     sewflow sew       --config <file> --out <dir> [--seed N]   => history.csv, summary.json
     sewflow signature --config <file> --out <dir> [--seed N]   => signature.json
     sewflow solve     --config <file> --out <dir> [--seed N]   => solution.csv, defect.json

    Exit codes: 0 pass, 1 failed run, 2 usage or config error.
    SEWFLOW_THREADS caps the threads used for sampled evaluations (default 1).
    """

FLOW_DEFECT_TRIPLES = 16
UL_LEVELS = 3
SWEEP_PARTITIONS = 4
SWEEP_POINTS = 65


def _parser():
    parser = argparse.ArgumentParser(prog='sewflow', description=using_doc,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument('--version', action='version', version='sewflow {0}'.format(__version__))
    parser.add_argument('command', choices=sorted(COMMANDS))
    parser.add_argument('--config', required=True, help='experiment JSON file')
    parser.add_argument('--out', required=True, help='output directory')
    parser.add_argument('--seed', type=int, default=None, help='overrides every sampler seed of the config')
    return parser


def _encode(space, value):
    return space.encode(space.coerce(value))


def cmd_validate(config, out_dir):
    phi = config.build_flow()
    report = validate_almost_flow(phi, config.validation_sampler, config.validation_tolerance)
    write_json_file(dict(report.to_dict(), experiment=config.name, flow=phi.to_dict()),
                    os.path.join(out_dir, const.FILE_REPORT))
    if not report.passed:
        for condition in report.failures():
            logging.error('Condition %s failed: ratio %s at %s', condition.name, condition.ratio, condition.witness)
        return const.EXIT_FAILED
    logging.info('Almost flow %s passed h0-h3 validation', phi.name)
    return const.EXIT_OK


def _sew_diagnostics(config, phi, approx):
    sampler = config.schedule.sampler
    start = config.start_state(phi)
    triples = sample_triples(phi.horizon, FLOW_DEFECT_TRIPLES, sampler.seed)
    partitions = [config.schedule.base_for(phi)]
    for _ in range(min(UL_LEVELS, len(approx.history) - 1)):
        partitions.append(dyadic_refine(partitions[-1]))
    return {
        'experiment': config.name,
        'value': _encode(phi.space, approx.evaluate(0.0, phi.horizon, start)),
        'start': _encode(phi.space, start),
        'flow_defect': flow_property_check(approx, triples, sampler.states(phi.space)),
        'ul_check': ul_spot_check(phi, partitions, sampler)
    }


def cmd_sew(config, out_dir):
    phi = config.build_flow()
    history_file = os.path.join(out_dir, const.FILE_HISTORY)
    summary_file = os.path.join(out_dir, const.FILE_SUMMARY)
    try:
        approx = sew(phi, config.schedule, check=config.check)
    except DivergenceError as e:
        write_csv_file([record.to_row() for record in e.history], history_file, fileheader=const.HISTORY_COLUMNS)
        write_json_file({'experiment': config.name, 'flow': phi.name, 'converged': False,
                         'levels': len(e.history) - 1, 'error': str(e)}, summary_file)
        logging.error('Sewing diverged: %s', e)
        return const.EXIT_FAILED

    approx.history_to_csv(history_file)
    approx.summary_to_json(summary_file, _sew_diagnostics(config, phi, approx))
    if not approx.converged:
        logging.error('Sewing %s did not reach the tolerance %s in %s levels (last gap %s)', phi.name,
                      config.schedule.tolerance, config.schedule.max_levels, approx.final_gap)
        return const.EXIT_FAILED
    return const.EXIT_OK


def cmd_signature(config, out_dir):
    X = config.build_signature_input()
    level = int(config.signature.get('level', 2))
    result = signature(X, level, tolerance=float(config.signature.get('tolerance', 1e-13)),
                       max_level=int(config.signature.get('max_level', 20)), seed=config.schedule.sampler.seed)
    blocks = result.blocks()
    data = {
        'experiment': config.name,
        'path': X.name,
        'horizon': X.horizon,
        'base_dim': result.base_dim,
        'level': result.level,
        'blocks': [np.asarray(block).tolist() for block in blocks]
    }
    if result.level >= 2:
        x2 = np.asarray(blocks[2])
        data['levy_area'] = (0.5 * (x2 - x2.T)).tolist()
    write_json_file(data, os.path.join(out_dir, const.FILE_SIGNATURE))
    return const.EXIT_OK


def _uniform_bound(config, phi):
    partitions = [config.schedule.base_for(phi)]
    partitions += [random_partition(phi.horizon, SWEEP_POINTS, config.schedule.sampler.seed + k)
                   for k in range(SWEEP_PARTITIONS)]
    return uniform_bound_sweep(phi, partitions, config.schedule.sampler)


def cmd_solve(config, out_dir):
    if config.scheme not in (const.SCHEME_YOUNG, const.SCHEME_ROUGH):
        raise ConfigError('solve needs the young or rough scheme', {'scheme': config.scheme})
    phi = config.build_flow()
    approx = sew(phi, config.schedule, check=config.check)
    r = float(config.solve.get('r', 0.0))
    a = config.solve.get('a')
    a = config.start_state(phi) if a is None else phi.space.coerce(a)
    y = flow_to_solution(approx, r, a, config.solve_grid())
    y.to_csv(os.path.join(out_dir, const.FILE_SOLUTION))

    report = davie_defect(y, phi)
    write_json_file(dict(report.to_dict(), experiment=config.name, flow=phi.name, converged=approx.converged,
                         final_gap=approx.final_gap, uniform_bound=_uniform_bound(config, phi)),
                    os.path.join(out_dir, const.FILE_DEFECT))
    if not approx.converged:
        logging.error('Sewing %s did not converge, the solution is the last level iterate', phi.name)
        return const.EXIT_FAILED
    return const.EXIT_OK


COMMANDS = {
    'validate': cmd_validate,
    'sew': cmd_sew,
    'signature': cmd_signature,
    'solve': cmd_solve
}


def _attach_log_file(out_dir):
    handler = logging.FileHandler(os.path.join(out_dir, const.FILE_LOG), mode='w', encoding='utf8')
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, LOG_DATEFMT))
    root = logging.getLogger()
    root.addHandler(handler)
    if root.level > logging.DEBUG:
        root.setLevel(logging.DEBUG)
        for other in root.handlers:
            if other is not handler and other.level == logging.NOTSET:
                other.setLevel(logging.INFO)
    return handler


def cli_main(argv=None):
    args = _parser().parse_args(sys.argv[1:] if argv is None else argv)
    try:
        config = ExperimentConfig.from_file(args.config, seed=args.seed)
    except ConfigError as e:
        logging.error('Invalid experiment config: %s', e)
        return const.EXIT_USAGE

    out_dir = get_absolute_path(args.out)
    os.makedirs(out_dir, exist_ok=True)
    handler = _attach_log_file(out_dir)
    started = arrow.now()
    logging.info('Run %s on %s started at %s', args.command, config.name, started.isoformat())
    try:
        code = COMMANDS[args.command](config, out_dir)
    except ConfigError as e:
        logging.error('Invalid experiment config: %s', e)
        code = const.EXIT_USAGE
    except SewflowError as e:
        logging.error('Run %s failed: %s', args.command, e)
        code = const.EXIT_FAILED
    finally:
        logging.info('Run %s finished in %.3fs', args.command, (arrow.now() - started).total_seconds())
        logging.getLogger().removeHandler(handler)
        handler.close()
    return code


def main():
    sys.exit(cli_main())


if __name__ == '__main__':
    main()
