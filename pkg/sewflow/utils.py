#!/usr/bin/env python
# _*_ coding:utf-8 _*_
import csv
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from sewflow import const


def get_absolute_path(path):
    """
        Return the absolute path of a file

        If path contains a start point (eg Unix '/') then use the specified start point
        instead of the current working directory. The starting point of the file path is
        allowed to begin with a tilde "~", which will be replaced with the user's home directory.
    """
    fp, fn = os.path.split(path)
    if not fp:
        fp = os.getcwd()
    fp = os.path.abspath(os.path.expanduser(fp))
    return os.path.join(fp, fn)


def thread_count():
    """Number of worker threads allowed by SEWFLOW_THREADS (at least 1)"""
    value = os.environ.get(const.ENV_THREADS, '1')
    try:
        count = int(value)
    except ValueError:
        logging.warning('Ignoring invalid %s value: %s', const.ENV_THREADS, value)
        count = 1
    return max(1, count)


def parallel_map(func, items):
    """Map `func` over `items`, keeping the input order; threads are used only when SEWFLOW_THREADS > 1"""
    items = list(items)
    workers = thread_count()
    if workers == 1 or len(items) < 2:
        return [func(item) for item in items]

    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


def to_jsonable(value):
    """Convert numpy scalars/arrays (and nested containers of them) to plain python values"""
    if hasattr(value, 'to_dict'):
        return value.to_dict()
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()] if value.ndim else to_jsonable(value.item())
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def write_json_file(data, json_file):
    """Write `data` to a json file, replacing any previous file"""
    json_file = get_absolute_path(json_file)
    if os.path.exists(json_file):
        os.remove(json_file)

    with open(json_file, 'w', encoding='utf8') as f:
        f.write(json.dumps(to_jsonable(data), indent=4, separators=(',', ': '), ensure_ascii=False))
        f.write('\n')
    logging.info('Write json file(%s) successfully!', json_file)
    return json_file


def read_json_file(json_file):
    json_file = get_absolute_path(json_file)
    with open(json_file, 'r', encoding='utf8') as f:
        return json.load(f)


def write_csv_file(rows, csv_file, fileheader=None):
    """Write rows (header first when given) to a csv file, replacing any previous file"""
    csv_file = get_absolute_path(csv_file)
    if os.path.exists(csv_file):
        os.remove(csv_file)

    with open(csv_file, 'w', newline='', encoding='utf8') as f:
        writer = csv.writer(f)
        if fileheader:
            writer.writerow(fileheader)
        writer.writerows([[format_cell(cell) for cell in row] for row in rows])
    logging.info('Write csv file(%s) successfully!', csv_file)
    return csv_file


def read_csv_file(csv_file):
    """Read a numeric csv file with a header row; returns (header, float array of rows), empty cells as nan"""
    csv_file = get_absolute_path(csv_file)
    with open(csv_file, 'r', newline='', encoding='utf8') as f:
        reader = csv.reader(f)
        rows = [row for row in reader if row]

    if not rows:
        return [], np.zeros((0, 0))
    header = rows[0]
    data = np.array([[float(cell) if cell != '' else np.nan for cell in row] for row in rows[1:]], dtype=float)
    return header, data.reshape(len(rows) - 1, len(header))


def format_cell(cell):
    if isinstance(cell, (float, np.floating)):
        return repr(float(cell))
    if isinstance(cell, np.integer):
        return int(cell)
    return cell
