# -*- coding: utf-8 -*-
import json
import math
import os
import tempfile
import unittest

import numpy as np

import twinkernel
from twinkernel.model.report import CheckResult, ExperimentReport
from twinkernel.output import OutputWriter, format_value
from tests import utils


class TestFormatValue(unittest.TestCase):

    def test_floats_round_trip(self):
        for v in (0.1, 1.0 / 3.0, math.pi, 1e-300, -2.5e17):
            self.assertEqual(float(format_value(v)), v)
        self.assertEqual(format_value(np.float64(0.1)), '0.10000000000000001')

    def test_special_values(self):
        self.assertEqual(format_value(math.nan), 'nan')
        self.assertEqual(format_value(math.inf), 'inf')
        self.assertEqual(format_value(-math.inf), '-inf')
        self.assertEqual(format_value(True), 'true')
        self.assertEqual(format_value(np.bool_(False)), 'false')
        self.assertEqual(format_value(None), '')

    def test_integers_and_strings(self):
        self.assertEqual(format_value(np.int64(7)), '7')
        self.assertEqual(format_value(400), '400')
        self.assertEqual(format_value('translation_b2'), 'translation_b2')


class TestOutputWriter(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = os.path.join(self.tmp.name, 'nested', 'out')
        self.writer = OutputWriter(self.out, 'abcdef0123456789', 42)

    def tearDown(self):
        self.tmp.cleanup()

    def test_creates_directory(self):
        self.assertTrue(os.path.isdir(self.out))

    def test_csv_header(self):
        path = self.writer.write_csv('table', ['x', 'f_hat'], [[0.5, 1.0 / 3.0], [1, None]])
        header, columns, rows = utils.read_csv(path)
        self.assertEqual(header, '# twinkernel {} config=abcdef0123456789 seed=42'.format(twinkernel.__version__))
        self.assertEqual(columns, ['x', 'f_hat'])
        self.assertEqual(rows, [['0.5', '0.33333333333333331'], ['1', '']])

    def test_json_provenance(self):
        path = self.writer.write_json('estimate', {'coefficients': np.array([1.0, 0.5]), 'n': np.int64(3)})
        with open(path) as f:
            d = json.load(f)
        self.assertEqual(d['provenance'], {'version': twinkernel.__version__, 'config': 'abcdef0123456789', 'seed': 42})
        self.assertEqual(d['coefficients'], [1.0, 0.5])
        self.assertEqual(d['n'], 3)

    def test_write_table(self):
        self.writer.write_table('checks', CheckResult.COLUMNS, [CheckResult('mass', 'hermite', 0.0, 1e-12).row()],
                                payload={'passed': True})
        self.assertTrue(os.path.exists(os.path.join(self.out, 'checks.csv')))
        with open(os.path.join(self.out, 'checks.json')) as f:
            d = json.load(f)
        self.assertTrue(d['passed'])
        self.assertEqual(d['columns'], CheckResult.COLUMNS)
        self.assertEqual(d['rows'][0][:2], ['mass', 'hermite'])

    def test_write_report(self):
        report = ExperimentReport('rates', ['K', 'slope'], [[2, -0.5]], summary={'dropped': []})
        path = self.writer.write_report(report)
        self.assertEqual(path, os.path.join(self.out, 'rates.json'))
        _, columns, rows = utils.read_csv(os.path.join(self.out, 'rates.csv'))
        self.assertEqual(columns, ['K', 'slope'])
        self.assertEqual(rows, [['2', '-0.5']])
        self.writer.write_report(report, name='renamed')
        self.assertTrue(os.path.exists(os.path.join(self.out, 'renamed.csv')))
