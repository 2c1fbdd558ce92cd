# -*- coding: utf-8 -*-
from importlib.metadata import version, PackageNotFoundError

__author__ = "B23"

try:
    __version__ = version('b23-twinkernel')
except PackageNotFoundError:
    # package is not installed
    __version__ = 'unknown'
