# -*- coding: utf-8 -*-
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.stats import iqr, linregress

from twinkernel.estimators import (multimodal_estimator, population_multimodal_fit, empirical_coefficients,
                                   SeriesEstimate)
from twinkernel.exceptions import ExperimentException
from twinkernel.experiments.targets import BimodalGaussian
from twinkernel.logger import log
from twinkernel.model.report import ExperimentReport
from twinkernel.orthopoly import LEGENDRE
from twinkernel.quadrature import gauss_rule, lebesgue_rule
from twinkernel.transport import GroupElement, pullback_inner_product

_MASK = (1 << 64) - 1

# Rule used for L^2(mu) errors, exact for squared differences up to degree 191
ERROR_RULE_SIZE = 96
# Wide Lebesgue rule for integrated squared errors of mixture fits
ISE_INTERVAL = (-10.0, 10.0)
ISE_RULE_SIZE = 200
MIN_RATE_POINTS = 4
MISPLACED_CENTERS = (0.0, 0.1)


def splitmix64(z):
    z = (z + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def stream_seed(master, *keys):
    """
    A 64 bit stream seed folded from the master seed and integer keys with the SplitMix64 finalizer
    :param master: The run seed
    :param keys: e.g. (cell, replicate)
    """
    state = splitmix64(int(master) & _MASK)
    for key in keys:
        state = splitmix64(state ^ (int(key) & _MASK))
    return state


def run_replicates(fn, count, threads=1):
    """
    [fn(0), .., fn(count - 1)] in index order whatever the thread count
    """
    if threads is None or threads <= 1:
        return [fn(r) for r in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(fn, range(count)))


def truncation_level(config, n):
    """
    K = round(n^{1/(2t+1)}) under the scaling rule, the configured K otherwise
    """
    if config.k_rule == 'scaling':
        t = getattr(config.target, 't', 1.0)
        return max(1, int(round(n ** (1.0 / (2.0 * t + 1.0)))))
    return config.K


def l2_error(estimate, target, g, rule):
    """
    ||f_{g,K} - U_g f||_{L^2(mu)} computed after pulling both back to base coordinates
    """
    truth = target.transported(g)

    def difference(x):
        return estimate.evaluate(x) - truth(x)

    return math.sqrt(max(pullback_inner_product(g, difference, difference, rule), 0.0))


def _mean_se(values):
    values = np.asarray(values, dtype=float)
    se = float(np.std(values, ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    return float(np.mean(values)), se


def bias_variance_sweep(config):
    """
    Analytic squared bias, empirical variance of the coefficients and directly measured MSE per (n, K, g)
    :type config: ExperimentConfig
    :return: ExperimentReport with columns n, K, g, bias2, var_emp, mse, se, var_ratio
    """
    target = config.target
    basis = target.basis
    rule = gauss_rule(basis, ERROR_RULE_SIZE)
    k_max = max(config.ks)
    if target.kind == 'bimodal':
        raise ExperimentException("The bias-variance sweep needs a target with finitely many coefficients")
    log.info("Running bias-variance sweep for {} over n={} K={}".format(target, config.n_grid, config.ks))

    rows = list()
    for n in config.n_grid:
        def replicate(r):
            sample = target.sample(n, stream_seed(config.seed, n, r))
            theta = empirical_coefficients(sample, basis, k_max)
            errors = {(K, g): l2_error(SeriesEstimate(theta[:K + 1], basis, g=g), target, g, rule) ** 2
                      for K in config.ks for g in config.groups}
            return theta, errors

        results = run_replicates(replicate, config.replicates, config.threads)
        thetas = np.array([theta for theta, _ in results])
        for K in config.ks:
            variance = float(np.sum(np.var(thetas[:, :K + 1], axis=0, ddof=1))) if config.replicates > 1 else 0.0
            bias2 = target.bias2(K)
            for g in config.groups:
                mse, se = _mean_se([errors[(K, g)] for _, errors in results])
                rows.append([n, K, g.tag, bias2, variance, mse, se, variance / (K / n)])
    return ExperimentReport('bias_variance', ['n', 'K', 'g', 'bias2', 'var_emp', 'mse', 'se', 'var_ratio'], rows,
                            summary={'target': target.as_dict(), 'replicates': config.replicates})


def _fit_slope(ns, mses, ses):
    """
    OLS slope of log MSE on log n, dropping the smallest n when its MSE is within 2 SE of the next one
    """
    dropped = None
    if len(ns) > 2 and abs(mses[0] - mses[1]) <= 2.0 * math.hypot(ses[0], ses[1]):
        dropped = ns[0]
        ns, mses = ns[1:], mses[1:]
    fit = linregress(np.log(ns), np.log(mses))
    return float(fit.slope), float(fit.stderr), dropped, ns


def rate_study(config):
    """
    MSE per n with K growing as n^{1/(2t+1)} and the fitted log-log slope per group element.
      Replicates share their sample across group elements
    :return: ExperimentReport with columns g, slope, slope_se, n_min, n_max
    """
    if len(config.n_grid) < MIN_RATE_POINTS:
        raise ExperimentException("A rate study needs at least {} sample sizes, found {}".format(MIN_RATE_POINTS, len(config.n_grid)))
    target = config.target
    basis = target.basis
    rule = gauss_rule(basis, ERROR_RULE_SIZE)
    log.info("Running rate study for {} over n={} with {} replicates".format(target, config.n_grid, config.replicates))

    cells = {g: list() for g in config.groups}
    per_replicate = dict()
    for n in config.n_grid:
        K = truncation_level(config, n)

        def replicate(r):
            sample = target.sample(n, stream_seed(config.seed, n, r))
            theta = empirical_coefficients(sample, basis, K)
            return [l2_error(SeriesEstimate(theta, basis, g=g), target, g, rule) ** 2 for g in config.groups]

        errors = np.array(run_replicates(replicate, config.replicates, config.threads))
        per_replicate[n] = errors
        for i, g in enumerate(config.groups):
            mse, se = _mean_se(errors[:, i])
            cells[g].append((n, K, mse, se))

    rows = list()
    fits = dict()
    summary = {'target': target.as_dict(), 'expected_slope': -2.0 * getattr(target, 't', 1.0) / (2.0 * getattr(target, 't', 1.0) + 1.0),
               'dropped': dict(), 'cells': list()}
    for g in config.groups:
        ns = [c[0] for c in cells[g]]
        slope, slope_se, dropped, used = _fit_slope(ns, [c[2] for c in cells[g]], [c[3] for c in cells[g]])
        if dropped is not None:
            log.debug("Rate study {}: dropped n={} as pre-asymptotic".format(g.tag, dropped))
        fits[g] = (slope, slope_se)
        summary['dropped'][g.tag] = dropped
        summary['cells'].extend({'g': g.tag, 'n': n, 'K': K, 'mse': mse, 'se': se} for n, K, mse, se in cells[g])
        rows.append([g.tag, slope, slope_se, used[0], used[-1]])

    if config.groups:
        slopes = [fits[g][0] for g in config.groups]
        summary['max_slope_difference'] = float(max(slopes) - min(slopes))
        base_slope, base_se = fits[config.groups[0]]
        summary['slopes_agree'] = all(abs(s - base_slope) <= 2.0 * math.hypot(se, base_se) + 1e-12 for s, se in fits.values())
        # per replicate errors coincide across g up to quadrature
        summary['max_replicate_relative_difference'] = float(max(
            np.max(np.abs(e - e[:, :1]) / np.maximum(e[:, :1], np.finfo(float).tiny)) for e in per_replicate.values()))
    return ExperimentReport('rates', ['g', 'slope', 'slope_se', 'n_min', 'n_max'], rows, summary=summary)


def equivariance_error_identity(config):
    """
    Per replicate ||f_{g,K} - U_g f|| against ||f_{e,K} - f||, both by pull-back quadrature
    :return: ExperimentReport with columns g, replicates, max_rel_diff
    """
    target = config.target
    basis = target.basis
    rule = gauss_rule(basis, ERROR_RULE_SIZE)
    n = config.n
    K = truncation_level(config, n)
    identity = GroupElement.identity()
    log.info("Running error identity check for {} at n={} K={}".format(target, n, K))

    def replicate(r):
        sample = target.sample(n, stream_seed(config.seed, n, r))
        theta = empirical_coefficients(sample, basis, K)
        base = l2_error(SeriesEstimate(theta, basis), target, identity, rule)
        return [abs(l2_error(SeriesEstimate(theta, basis, g=g), target, g, rule) - base) / base for g in config.groups]

    diffs = np.array(run_replicates(replicate, config.replicates, config.threads)).reshape(config.replicates, len(config.groups))
    rows = [[g.tag, config.replicates, float(np.max(diffs[:, i]))] for i, g in enumerate(config.groups)]
    return ExperimentReport('equivariance_error', ['g', 'replicates', 'max_rel_diff'], rows,
                            summary={'n': n, 'K': K, 'max_rel_diff': float(np.max(diffs)) if diffs.size else 0.0})


def _schemes(target, dimension):
    if dimension % 2:
        raise ExperimentException("Multimodal dimensions must be even, found {}".format(dimension))
    half = dimension // 2 - 1
    return [
        ('single_center', [0.0], dimension - 1),
        ('two_center', target.centers.tolist(), half),
        ('misplaced', list(MISPLACED_CENTERS), half)
    ]


def _lebesgue_ise(fit, target, rule):
    residual = fit.lebesgue_density(rule.nodes) - target.lebesgue_density(rule.nodes)
    return float(np.dot(rule.weights, residual * residual))


def multimodal_comparison(config):
    """
    Lebesgue ISE of single center, two center and misplaced multi-center fits at equal total dimension,
      median and IQR over replicates, plus the deterministic population fits
    :return: ExperimentReport with columns scheme, dimension, ise_median, ise_iqr
    """
    target = config.target
    if not isinstance(target, BimodalGaussian):
        raise ExperimentException("The multimodal comparison needs the bimodal target, found {}".format(target))
    rule = lebesgue_rule(LEGENDRE, ISE_INTERVAL[0], ISE_INTERVAL[1], ISE_RULE_SIZE)
    n = config.n
    log.info("Running multimodal comparison at n={} for dimensions {}".format(n, config.dims))

    schemes = [(d, name, centers, K) for d in config.dims for name, centers, K in _schemes(target, d)]

    def replicate(r):
        sample = target.sample(n, stream_seed(config.seed, n, r))
        return [_lebesgue_ise(multimodal_estimator(sample, centers, K), target, rule) for _, _, centers, K in schemes]

    ises = np.array(run_replicates(replicate, config.replicates, config.threads))
    rows = list()
    population = dict()
    for i, (d, name, centers, K) in enumerate(schemes):
        rows.append([name, d, float(np.median(ises[:, i])), float(iqr(ises[:, i]))])
    for d, name, centers, K in schemes:
        fit = population_multimodal_fit(target, centers, K)
        rows.append([name + '_population', d, _lebesgue_ise(fit, target, rule), 0.0])
        population['{}_{}'.format(name, d)] = fit.approximation_error
    return ExperimentReport('multimodal', ['scheme', 'dimension', 'ise_median', 'ise_iqr'], rows,
                            summary={'n': n, 'replicates': config.replicates, 'population_l2_gamma_error': population})
