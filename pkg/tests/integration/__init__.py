# -*- coding: utf-8 -*-
import os
import tempfile
import time
import unittest
from contextlib import contextmanager

from twinkernel.model.config import RunConfig


@contextmanager
def tmp_out_dir():
    """
    Returns the path to a new output dir which will be cleaned up after the test case executes
    """
    with tempfile.TemporaryDirectory() as tmp_dir:
        yield os.path.join(tmp_dir, 'out')


class ITestBase(unittest.TestCase):
    """
    Acceptance scale runs of the library, slow by construction
    """

    def __init__(self, threads=1, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.threads = threads

    def config(self, **kwargs):
        """
        A RunConfig writing to the case's output dir with the requested thread count
        """
        kwargs.setdefault('out', self.out_dir)
        kwargs.setdefault('threads', self.threads)
        return RunConfig(**kwargs)

    @contextmanager
    def assertFasterThan(self, seconds):
        start = time.monotonic()
        yield
        elapsed = time.monotonic() - start
        self.assertLess(elapsed, seconds, msg="{} took {:.1f}s".format(type(self).__name__, elapsed))

    def run(self, result=None):
        with tmp_out_dir() as out_dir:
            self.out_dir = out_dir
            super(ITestBase, self).run(result)
