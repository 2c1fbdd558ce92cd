# -*- coding: utf-8 -*-
import argparse

import twinkernel
from twinkernel.model.config import RunConfig

COMMANDS = ('verify', 'estimate', 'simulate', 'transport', 'kernel-table')


def _seed(value):
    """
    Unsigned 64 bit integer
    """
    try:
        seed = int(value, 0)
    except ValueError:
        raise argparse.ArgumentTypeError("invalid seed: '{}'".format(value))
    if seed < 0 or seed >= 1 << 64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2^64), found {}".format(value))
    return seed


def _threads(value):
    try:
        threads = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError("invalid thread count: '{}'".format(value))
    if threads < 1:
        raise argparse.ArgumentTypeError("thread count must be positive, found {}".format(value))
    return threads


class TwinKernelCLI:
    def __init__(self, args=None, file_config=None):
        """
        Parse provided CLI flags with optional RunConfig defaults
        :param args: The argument list, sys.argv by default
        :param file_config: The config read from --config, TWINKERNEL_CFG or .twinkernel.json
        :type file_config: RunConfig
        """
        self.parser = argparse.ArgumentParser(prog="twinkernel",
                                              description="Group transported Mercer kernels, orthogonal series "
                                                          "estimators and their verification")

        self.parser.add_argument('--version',
                                 action='version',
                                 version='%(prog)s {}'.format(twinkernel.__version__)
                                 )

        common = argparse.ArgumentParser(add_help=False)
        common.add_argument('--config',
                            type=str,
                            help='A JSON (or .yml/.yaml) run config, defaults to $TWINKERNEL_CFG or {}'.format(RunConfig.DEFAULT_CFG)
                            )
        common.add_argument('--seed',
                            type=_seed,
                            help='The master seed (unsigned 64 bit)'
                            )
        common.add_argument('--out',
                            type=str,
                            help='The output directory for CSV and JSON reports'
                            )
        common.add_argument('--threads',
                            type=_threads,
                            help='Worker threads for Monte Carlo replicates, defaults to $TWINKERNEL_THREADS or 1'
                            )

        subparsers = self.parser.add_subparsers(dest='command', metavar='{}'.format('|'.join(COMMANDS)))
        subparsers.required = True
        subparsers.add_parser('verify', parents=[common],
                              help='Run the unitarity, spectral equivariance and estimator equivariance checks')
        estimate = subparsers.add_parser('estimate', parents=[common],
                                         help='Fit the configured density estimator to a data file')
        estimate.add_argument('--data',
                              type=str,
                              required=True,
                              help='A data file holding one real observation per line'
                              )
        subparsers.add_parser('simulate', parents=[common],
                              help='Run the configured Monte Carlo preset')
        subparsers.add_parser('transport', parents=[common],
                              help='Dump transported basis functions on the configured grid')
        subparsers.add_parser('kernel-table', parents=[common],
                              help='Dump base and transported kernels on the configured grid')

        self.args = self.parser.parse_args(args=args)
        if not file_config:
            file_config = RunConfig()
        self.config = file_config.with_flag_overrides(self.args)
