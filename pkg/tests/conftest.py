#!/usr/bin/env python
# _*_ coding:utf-8 _*_
import os

import pytest

from sewflow.almostflow import SamplerSpec

CONFIG_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'sewflow', 'configs')


@pytest.fixture
def config_dir():
    return CONFIG_DIR


@pytest.fixture
def sampler():
    return SamplerSpec(seed=7, n_times=8, n_states=3)


@pytest.fixture
def end_pairs_sampler():
    """Two fixed pairs, one state at the origin"""
    return SamplerSpec(seed=7, pairs=[[0.0, 1.0], [0.25, 0.75]], states=[[0.0]])


@pytest.fixture(autouse=True)
def single_thread(monkeypatch):
    monkeypatch.setenv('SEWFLOW_THREADS', '1')
