#!/usr/bin/env python3
# -*- coding: utf-8 -*-
import argparse
import os
import sys

from tabulate import tabulate

import twinkernel.api
from twinkernel.cli import TwinKernelCLI
from twinkernel.exceptions import ConfigException, TwinKernelException, VerificationException
from twinkernel.logger import log
from twinkernel.model.config import RunConfig
from twinkernel.model.report import CheckResult

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_ERROR = 2


def _config_path(args):
    """
    --config, else $TWINKERNEL_CFG, else .twinkernel.json when present
    """
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument('--config', type=str)
    known, _ = pre.parse_known_args(args)
    if known.config:
        return known.config
    path = os.getenv('TWINKERNEL_CFG', RunConfig.DEFAULT_CFG)
    if os.getenv('TWINKERNEL_CFG') or (os.path.exists(path) and os.path.isfile(path)):
        return path
    return None


def load_config(args):
    """
    :return: RunConfig from the located config file or the defaults, with TWINKERNEL_THREADS applied
    """
    path = _config_path(args)
    if path:
        try:
            with open(path) as f:
                config = RunConfig.new_from_file(f)
        except OSError as e:
            raise ConfigException("Unable to read config file {}: {}".format(path, e))
    else:
        config = RunConfig()
    threads = os.getenv('TWINKERNEL_THREADS')
    if threads:
        try:
            config.threads = int(threads)
        except ValueError:
            raise ConfigException("TWINKERNEL_THREADS must be a positive integer, found '{}'".format(threads))
        config.validate()
    return config


def _print_checks(checks):
    print(tabulate([c.row() for c in checks], headers=CheckResult.COLUMNS, floatfmt='.3e', tablefmt="psql"))


def run(args=None):
    """
    Parse args, dispatch the subcommand and map failures onto exit codes
    :return: 0 on success, 1 when verification fails, 2 on any other error
    """
    args = sys.argv[1:] if args is None else list(args)
    try:
        cli = TwinKernelCLI(args=args, file_config=load_config(args))
        command = cli.args.command
        if command == 'verify':
            summary = twinkernel.api.cmd_verify(cli.config)
            _print_checks(summary.checks)
        elif command == 'estimate':
            fitted = twinkernel.api.cmd_estimate(cli.config)
            print(tabulate([[k, v] for k, v in fitted.as_dict().items() if k != 'coefficients'],
                           headers=['Field', 'Value'], tablefmt="psql"))
        elif command == 'simulate':
            for report in twinkernel.api.cmd_simulate(cli.config):
                print(report.name)
                print(tabulate(report.rows(), headers=report.columns, floatfmt='.4g', tablefmt="psql"))
        elif command == 'transport':
            print('\n'.join(twinkernel.api.cmd_transport(cli.config)))
        elif command == 'kernel-table':
            print('\n'.join(twinkernel.api.cmd_kernel_table(cli.config)))
        else:
            cli.parser.print_usage()
            return EXIT_ERROR
    except VerificationException as e:
        _print_checks(e.failed)
        print(e, file=sys.stderr)
        return EXIT_VERIFICATION
    except TwinKernelException as e:
        log.error(e)
        print("twinkernel: error: {}".format(e), file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
