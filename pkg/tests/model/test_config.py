# -*- coding: utf-8 -*-
import io
import os
import unittest

from twinkernel.cli import TwinKernelCLI
from twinkernel.exceptions import ConfigException
from twinkernel.model.config import ExperimentConfig, RunConfig
from twinkernel.orthopoly import LEGENDRE
from twinkernel.transport import GroupElement

from tests import utils


class TestRunConfig(unittest.TestCase):

    def test_defaults(self):
        config = RunConfig()
        for k in RunConfig.DEFAULTS:
            self.assertEqual(RunConfig.DEFAULTS[k], getattr(config, k))
        self.assertIsNone(config.data)
        self.assertIsNone(config.command)

    def test_new_from_file(self):
        config = utils.load_test_config()
        self.assertEqual(config.basis, 'hermite')
        self.assertEqual(config.out, 'twinkernel-test-out')
        self.assertEqual(config.estimate['K'], 2)
        # unset keys of a section keep their defaults
        self.assertEqual(config.estimate['centers'], [-2.0, 2.0])
        self.assertEqual(config.group_elements(), [GroupElement.identity(), GroupElement.translation(2.0),
                                                   GroupElement.dilation(0.8)])
        self.assertEqual(config.experiment().n_grid, [100, 200, 400, 800])

    def test_new_from_yaml(self):
        config = utils.load_test_config('config.yml')
        self.assertEqual(config.basis_object(), LEGENDRE)
        self.assertEqual(config.profile_object().k_spec, 200)
        self.assertEqual(config.group_elements()[1], GroupElement.affine(0.5, 0.25))

    def test_empty_file(self):
        config = RunConfig.new_from_file(io.StringIO(''), name='empty.json')
        self.assertEqual(config.as_dict(), RunConfig().as_dict())

    def test_unparsable_file(self):
        self.assertRaisesRegex(ConfigException, "Unable to parse config file broken.json", RunConfig.new_from_file,
                               io.StringIO('{"basis": '), 'broken.json')
        self.assertRaisesRegex(ConfigException, "must hold a mapping", RunConfig.new_from_file,
                               io.StringIO('[1, 2]'), 'list.json')

    def test_unknown_fields(self):
        self.assertRaisesRegex(ConfigException, r"Unknown config fields \['kernel'\]", RunConfig, kernel='mehler')
        self.assertRaisesRegex(ConfigException, r"Unknown config fields estimate\.\['bandwidth'\]", RunConfig,
                               estimate={'bandwidth': 0.5})

    def test_section_must_be_mapping(self):
        self.assertRaisesRegex(ConfigException, "must be a mapping", RunConfig, quadrature=64)

    def test_invalid_values(self):
        self.assertRaisesRegex(ConfigException, "Unknown estimate method", RunConfig, estimate={'method': 'histogram'})
        self.assertRaisesRegex(ConfigException, "Unknown simulate preset", RunConfig, simulate={'preset': 'everything'})
        self.assertRaisesRegex(ConfigException, "Seed must be", RunConfig, seed=-1)
        self.assertRaisesRegex(ConfigException, "Seed must be", RunConfig, seed=1 << 64)
        self.assertRaisesRegex(ConfigException, "Thread count", RunConfig, threads=0)
        self.assertRaisesRegex(ConfigException, "n grid must be", RunConfig, simulate={'n_grid': [200, 100]})
        self.assertRaisesRegex(ConfigException, "Invalid evaluation grid", RunConfig,
                               kernel_table={'grid': {'lo': 1.0, 'hi': -1.0, 'points': 5}})
        self.assertRaisesRegex(ConfigException, "k_check", RunConfig, k_check=61)
        self.assertRaisesRegex(ConfigException, "Invalid configuration", RunConfig, basis='laguerre')

    def test_unsupported_group(self):
        self.assertRaisesRegex(ConfigException, "Unsupported pair", RunConfig,
                               groups=[{'variant': 'translation', 'b': 1.0}], basis='legendre')
        self.assertRaisesRegex(ConfigException, "does not fit target", RunConfig,
                               simulate={'groups': [{'variant': 'translation', 'b': 1.0}]})

    def test_config_hash(self):
        config = utils.load_test_config()
        self.assertEqual(len(config.config_hash()), 16)
        self.assertEqual(config.config_hash(), utils.load_test_config(out='elsewhere', threads=4).config_hash())
        self.assertNotEqual(config.config_hash(), utils.load_test_config(seed=7).config_hash())

    def test_with_flag_overrides(self):
        config = utils.load_test_config()
        out_override = os.path.join('some', 'other', 'dir')
        args = ['estimate', '--seed', '0x10', '--out', out_override, '--threads', '3', '--data', 'samples.txt']
        cli = TwinKernelCLI(args=args, file_config=config)
        self.assertIs(cli.config, config)
        self.assertEqual(config.seed, 16)
        self.assertEqual(config.out, out_override)
        self.assertEqual(config.threads, 3)
        self.assertEqual(config.data, 'samples.txt')
        self.assertEqual(config.command, 'estimate')
        self.assertEqual(config.experiment().threads, 3)

    def test_unset_flags_keep_file_values(self):
        config = utils.load_test_config()
        TwinKernelCLI(args=['verify'], file_config=config)
        self.assertEqual(config.seed, 42)
        self.assertEqual(config.out, 'twinkernel-test-out')
        self.assertIsNone(config.data)


class TestExperimentConfig(unittest.TestCase):

    def test_defaults(self):
        config = RunConfig().experiment()
        self.assertIsInstance(config, ExperimentConfig)
        self.assertEqual(config.n_grid, [250, 500, 1000, 2000, 4000, 8000, 16000])
        self.assertEqual(config.replicates, 200)
        self.assertEqual(config.seed, 42)

    def test_invalid(self):
        target = RunConfig().experiment().target
        self.assertRaisesRegex(ConfigException, "Replicate count", ExperimentConfig, target, replicates=0)
        self.assertRaisesRegex(ConfigException, "Unknown K rule", ExperimentConfig, target, k_rule='adaptive')
        self.assertRaisesRegex(ConfigException, "strictly increasing", ExperimentConfig, target, n_grid=[100, 100])
