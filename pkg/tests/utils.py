# -*- coding: utf-8 -*-
import os

from twinkernel.model.config import RunConfig

RESOURCES_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), 'resources'))
DATA_DIR = os.path.join(RESOURCES_DIR, 'data')


def load_test_config(name='config.json', **overrides):
    """
    The small test config with top level fields replaced by overrides
    """
    with open(os.path.join(RESOURCES_DIR, name)) as f:
        config = RunConfig.new_from_file(f)
    if overrides:
        d = config.as_dict()
        d.update(overrides)
        config = RunConfig(**d)
    return config


def data_file(name):
    return os.path.join(DATA_DIR, name)


def read_csv(path):
    """
    :return: (header comment, column names, rows of strings)
    """
    with open(path) as f:
        lines = f.read().splitlines()
    return lines[0], lines[1].split(','), [line.split(',') for line in lines[2:]]
