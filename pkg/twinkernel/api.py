# -*- coding: utf-8 -*-
import numpy as np

import twinkernel.experiments.studies
import twinkernel.verify
from twinkernel.estimators import (KernelEstimate, Sample, multimodal_estimator, series_estimator, soft_filter_estimate,
                                   transported_series_estimator)
from twinkernel.exceptions import ConfigException, DataException, TwinKernelException, VerificationException
from twinkernel.experiments.targets import BimodalGaussian
from twinkernel.kernels import TransportedKernel
from twinkernel.logger import log
from twinkernel.model.config import ExperimentConfig
from twinkernel.model.report import CheckResult
from twinkernel.orthopoly import Family, HERMITE, hermite_dilation_expansion
from twinkernel.output import OutputWriter
from twinkernel.quadrature import gauss_rule
from twinkernel.transport import (GroupElement, Variant, alternative_form_deviation, induced_rule, transported_basis_at,
                                  transported_domain)

PRESET_STUDIES = {
    'bias-variance': twinkernel.experiments.studies.bias_variance_sweep,
    'rates': twinkernel.experiments.studies.rate_study,
    'equivariance': twinkernel.experiments.studies.equivariance_error_identity,
    'multimodal': twinkernel.experiments.studies.multimodal_comparison
}


def _writer(config):
    return OutputWriter(config.out, config.config_hash(), config.seed)


def _grid(grid):
    return np.linspace(float(grid['lo']), float(grid['hi']), int(grid['points']))


def _restrict(grid, g, basis):
    """
    Keep the grid points where transported functions of the basis are defined
    """
    if basis.family != Family.LEGENDRE_UNIFORM:
        return grid
    lo, hi = transported_domain(g, basis)
    kept = grid[(grid >= lo) & (grid <= hi)]
    if kept.size == 0:
        raise ConfigException("Evaluation grid [{}, {}] misses the domain [{}, {}] of {}".format(grid[0], grid[-1], lo, hi, g.tag))
    return kept


def load_sample(path):
    """
    One real per line, blank lines ignored
    :param path: The data file
    :type path: str
    :return: Sample
    :raises: DataException naming the first unparsable line, or an empty file
    """
    values = list()
    try:
        with open(path, 'r') as f:
            for lineno, line in enumerate(f, start=1):
                text = line.strip()
                if not text:
                    continue
                try:
                    values.append(float(text))
                except ValueError:
                    raise DataException("Unable to parse line {} of {}: '{}'".format(lineno, path, text))
    except OSError as e:
        raise DataException("Unable to read data file {}: {}".format(path, e))
    if not values:
        raise DataException("Data file {} holds no observations".format(path))
    if not np.all(np.isfinite(values)):
        raise DataException("Data file {} holds non-finite observations".format(path))
    return Sample(values, provenance={'data': path})


def cmd_verify(config):
    """
    Run the verification suite and write checks.csv plus one equivariance table per group element
    :type config: RunConfig
    :return: VerificationSummary
    :raises: VerificationException after all files are written when a tolerance is violated
    """
    log.info("Verifying {} kernels with profile {} for {}".format(config.basis, config.profile, [d.get('variant') for d in config.groups]))
    try:
        summary = twinkernel.verify.run_checks(config)
        writer = _writer(config)
        writer.write_table('checks', CheckResult.COLUMNS, summary.rows(),
                           payload={'passed': summary.passed})
        for report in summary.reports:
            writer.write_report(report, name='equivariance_{}'.format(report.g.tag))
    except TwinKernelException as e:
        log.error(e)
        raise
    if not summary.passed:
        names = ', '.join('{}[{}]'.format(c.name, c.subject) for c in summary.failed)
        log.error("Verification failed: {}".format(names))
        raise VerificationException("Verification failed: {}".format(names), failed=summary.failed)
    return summary


def estimate(config, sample):
    """
    :type config: RunConfig
    :type sample: Sample
    :return: The configured estimate
    """
    e = config.estimate
    basis = config.basis_object()
    method = e['method']
    if method == 'series':
        return series_estimator(sample, basis, e['K'])
    elif method == 'series-transported':
        return transported_series_estimator(sample, basis, e['K'], config.estimate_group())
    elif method == 'parzen':
        return KernelEstimate(sample, e['h'])
    elif method == 'soft':
        return soft_filter_estimate(sample, basis, e['h'], e['c'], e['K'])
    if basis != HERMITE:
        raise ConfigException("The multimodal estimator is built on the Hermite basis, found basis '{}'".format(config.basis))
    return multimodal_estimator(sample, e['centers'], e['K'], epsilon=e['epsilon'])


def cmd_estimate(config):
    """
    Fit the configured estimator to config.data and write estimate.json and an (x, f_hat) grid in estimate.csv
    :type config: RunConfig
    """
    if not config.data:
        raise ConfigException("The estimate command requires a data file (--data)")
    log.info("Estimating with method {} from {}".format(config.estimate['method'], config.data))
    try:
        sample = load_sample(config.data)
        fitted = estimate(config, sample)
        grid = _grid(config.estimate['grid'])
        if config.estimate['method'] in ('series', 'series-transported', 'soft'):
            grid = _restrict(grid, fitted.g, config.basis_object())
        values = fitted.evaluate(grid)

        writer = _writer(config)
        payload = fitted.as_dict()
        payload.update({'n': sample.n, 'data': config.data})
        writer.write_json('estimate', payload)
        writer.write_csv('estimate', ['x', 'f_hat'], list(zip(grid, np.atleast_1d(values))))
    except TwinKernelException as e:
        log.error(e)
        raise
    return fitted


def _study_config(experiment, name, preset):
    """
    Under the all preset the multimodal comparison runs on the default bimodal target
    """
    if preset != 'all' or name != 'multimodal' or isinstance(experiment.target, BimodalGaussian):
        return experiment
    return ExperimentConfig(BimodalGaussian(), groups=[GroupElement.identity()], n_grid=experiment.n_grid,
                            k_rule=experiment.k_rule, K=experiment.K, ks=experiment.ks, replicates=experiment.replicates,
                            seed=experiment.seed, out=experiment.out, threads=experiment.threads, n=experiment.n,
                            dims=experiment.dims)


def cmd_simulate(config):
    """
    Run the configured simulation preset, every study for 'all'
    :type config: RunConfig
    :return: list(ExperimentReport)
    """
    preset = config.simulate['preset']
    experiment = config.experiment()
    names = list(PRESET_STUDIES) if preset == 'all' else [preset]
    log.info("Simulating {} with seed {} on {} threads".format(names, config.seed, config.threads))
    reports = list()
    try:
        writer = _writer(config)
        for name in names:
            report = PRESET_STUDIES[name](_study_config(experiment, name, preset))
            writer.write_report(report)
            reports.append(report)
    except TwinKernelException as e:
        log.error(e)
        raise
    return reports


def cmd_transport(config):
    """
    Write transport_<g>.csv with (U_g P_k)(x) for k <= k_max per configured group element, and for Hermite dilations
      the deviation of the alternative closed forms and the dilation expansion diagnostic
    :type config: RunConfig
    :return: list of written CSV paths
    """
    basis = config.basis_object()
    k_max = int(config.transport['k_max'])
    columns = ['x'] + ['P{}'.format(k) for k in range(k_max + 1)]
    paths = list()
    try:
        writer = _writer(config)
        for g in config.group_elements():
            grid = _restrict(_grid(config.transport['grid']), g, basis)
            values = transported_basis_at(g, basis, k_max, grid)
            paths.append(writer.write_csv('transport_{}'.format(g.tag), columns, np.column_stack([grid, values.T]).tolist()))
            if basis.family == Family.HERMITE_PROBABILIST and g.variant == Variant.DILATION and not g.is_identity:
                rule = induced_rule(g, basis, config.quadrature['forward_m'])
                payload = {
                    'alternative_forms': alternative_form_deviation(g.alpha, basis, k_max, rule),
                    'dilation_expansion': hermite_dilation_expansion(
                        g.alpha, k_max, gauss_rule(basis, config.quadrature['base_m']))
                }
                writer.write_json('transport_{}_forms'.format(g.tag), payload)
    except TwinKernelException as e:
        log.error(e)
        raise
    return paths


def cmd_kernel_table(config):
    """
    Write kernel_<g>.csv holding K_e(x, y) and K_g(x, y) over the configured grid
    :type config: RunConfig
    """
    basis = config.basis_object()
    kernel = twinkernel.verify.build_kernel(config)
    paths = list()
    try:
        writer = _writer(config)
        for g in config.group_elements():
            grid = _restrict(_grid(config.kernel_table['grid']), g, basis)
            x, y = np.meshgrid(grid, grid, indexing='ij')
            k_e = kernel.evaluate(x, y)
            k_g = TransportedKernel(kernel, g).evaluate(x, y)
            rows = np.column_stack([x.ravel(), y.ravel(), np.ravel(k_e), np.ravel(k_g)]).tolist()
            paths.append(writer.write_csv('kernel_{}'.format(g.tag), ['x', 'y', 'k_e', 'k_g'], rows))
    except TwinKernelException as e:
        log.error(e)
        raise
    return paths
