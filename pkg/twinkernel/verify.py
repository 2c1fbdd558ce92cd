# -*- coding: utf-8 -*-
import numpy as np

from twinkernel.estimators import Sample, SeriesEstimate, empirical_coefficients, projection_coefficients
from twinkernel.kernels import (ProfileKind, SpectralKernel, TransportedKernel,
                                filter_commutation_residual, mehler_kernel, min_gram_eigenvalue,
                                verify_spectral_equivariance)
from twinkernel.logger import log
from twinkernel.model.report import CheckResult
from twinkernel.orthopoly import Family, eval_basis
from twinkernel.quadrature import gauss_rule, gram_matrix
from twinkernel.transport import (GroupElement, JacobianFn, induced_rule, transport, transported_basis_values,
                                  transported_domain)

UNITARITY_TOLERANCE = 1e-6
UNITARITY_K = 10
ORTHONORMALITY_TOLERANCE = 1e-10
ORTHONORMALITY_K = 30
MASS_TOLERANCE = 1e-12
HOMOMORPHISM_TOLERANCE = 1e-12
NORM_TOLERANCE = 1e-6
NORM_K = 5
SPECTRUM_TOLERANCE = 1e-6
ALIGNMENT_FLOOR = 0.999
CONJUGATION_SLACK = 1e-8
FILTER_TOLERANCE = 1e-10
ESTIMATOR_TOLERANCE = 1e-12
MEHLER_TOLERANCE = 1e-8
PSD_FLOOR = -1e-10
PROJECTION_TOLERANCE = 1e-10

ESTIMATOR_SAMPLES = 20
ESTIMATOR_SAMPLE_SIZE = 50
ESTIMATOR_POINTS = 100
ESTIMATOR_K = 8
GRID_POINTS = 21


class VerificationSummary:

    def __init__(self):
        self.checks = list()
        self.reports = list()

    def add(self, check):
        log.debug(check)
        self.checks.append(check)

    @property
    def failed(self):
        return [c for c in self.checks if not c.passed]

    @property
    def passed(self):
        return not self.failed

    def rows(self):
        return [c.row() for c in self.checks]


def build_kernel(config):
    """
    The configured base kernel, evaluated in closed form for the Hermite geometric (Mehler) case
    """
    basis = config.basis_object()
    profile = config.profile_object()
    closed_form = None
    if basis.family == Family.HERMITE_PROBABILIST and profile.kind == ProfileKind.GEOMETRIC:
        closed_form = 'mehler'
    return SpectralKernel(profile, basis, closed_form=closed_form)


def check_grid(g, basis, points=GRID_POINTS):
    lo, hi = transported_domain(g, basis)
    if basis.family == Family.LEGENDRE_UNIFORM:
        pad = 1e-3 * (hi - lo)
        lo, hi = lo + pad, hi - pad
    return np.linspace(lo, hi, points)


def _relative(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b)))) if a.size else 0.0


def check_base(config, summary):
    """
    Checks of the untransported objects: rule mass, orthonormality, projection, kernel positivity, Mehler and
      the Nystrom spectrum of the base operator
    """
    basis = config.basis_object()
    kernel = build_kernel(config)
    rule = gauss_rule(basis, config.quadrature['base_m'])

    summary.add(CheckResult('quadrature_mass', basis.family.value, abs(float(np.sum(rule.weights)) - 1.0), MASS_TOLERANCE))

    k = min(ORTHONORMALITY_K, rule.exact_degree // 2)
    gram = gram_matrix(eval_basis(basis, k, rule.nodes), rule)
    summary.add(CheckResult('orthonormality', basis.family.value, float(np.max(np.abs(gram - np.eye(k + 1)))), ORTHONORMALITY_TOLERANCE))

    # a non polynomial function given on the grid: the residual of its projection is orthogonal to the span
    values = np.cos(rule.nodes) + 0.5 * np.abs(rule.nodes)
    theta = projection_coefficients(values, basis, config.k_check, rule)
    residual = values - np.tensordot(theta, eval_basis(basis, config.k_check, rule.nodes), axes=1)
    p = eval_basis(basis, config.k_check, rule.nodes)
    orthogonality = np.abs(p @ (rule.weights * residual))
    summary.add(CheckResult('projection', basis.family.value, float(np.max(orthogonality)), PROJECTION_TOLERANCE))

    grid = check_grid(GroupElement.identity(), basis)
    summary.add(CheckResult('psd', 'identity', min_gram_eigenvalue(kernel, grid), PSD_FLOOR, comparison='>='))

    if basis.family == Family.HERMITE_PROBABILIST and kernel.profile.kind == ProfileKind.GEOMETRIC:
        x, y = grid[:, None], grid[None, :]
        deviation = float(np.max(np.abs(mehler_kernel(kernel.profile.rho, x, y) - kernel.spectral_evaluate(x, y))))
        summary.add(CheckResult('mehler', 'identity', deviation, MEHLER_TOLERANCE))

    if not any(g.is_identity for g in config.group_elements()):
        _check_spectrum(config, kernel, GroupElement.identity(), summary)


def _check_spectrum(config, kernel, g, summary, jacobian_fn=None):
    rule = induced_rule(g, kernel.basis, config.quadrature['forward_m'])
    report = verify_spectral_equivariance(kernel, g, rule, config.k_check, grid=check_grid(g, kernel.basis), jacobian_fn=jacobian_fn)
    summary.reports.append(report)
    summary.add(CheckResult('spectrum', g.tag, report.max_rel_err, SPECTRUM_TOLERANCE))
    summary.add(CheckResult('alignment', g.tag, report.min_alignment, ALIGNMENT_FLOOR, comparison='>='))
    summary.add(CheckResult('conjugation', g.tag, report.max_expansion_residual, report.tail_bound + CONJUGATION_SLACK))
    return report


def _random_points(rng, g, basis, count):
    lo, hi = transported_domain(g, basis, base_interval=(-3.0, 3.0))
    if basis.family == Family.LEGENDRE_UNIFORM:
        pad = 1e-6 * (hi - lo)
        lo, hi = lo + pad, hi - pad
    return rng.uniform(lo, hi, count)


def _base_draws(rng, basis, n):
    if basis.family == Family.LEGENDRE_UNIFORM:
        return rng.uniform(-1.0, 1.0, n)
    return rng.standard_normal(n)


def check_group_element(config, g, summary, rng):
    """
    Checks of one transport: unitarity first, then the group law, norm preservation, spectral equivariance,
      filter commutation, positivity of the transported kernel and estimator equivariance
    """
    basis = config.basis_object()
    kernel = build_kernel(config)
    corrupt = bool(config.debug.get('corrupt_jacobian'))
    jacobian_fn = JacobianFn(g, basis.measure, corrupt_sign=corrupt)
    forward = induced_rule(g, basis, config.quadrature['forward_m'])
    base = gauss_rule(basis, config.quadrature['base_m'])

    rows = transported_basis_values(g, basis, UNITARITY_K, forward, jacobian_fn=jacobian_fn)
    gram = gram_matrix(rows, forward)
    summary.add(CheckResult('unitarity', g.tag, float(np.max(np.abs(gram - np.eye(UNITARITY_K + 1)))), UNITARITY_TOLERANCE))

    x = _random_points(rng, g, basis, ESTIMATOR_POINTS)
    axiom = float(np.max(np.abs(g.compose(g.inverse()).act(x) - x)))
    summary.add(CheckResult('group_axioms', g.tag, axiom, HOMOMORPHISM_TOLERANCE))

    gg = g.compose(g)
    if basis.family != Family.LEGENDRE_UNIFORM or gg.a + abs(gg.b) <= 1.0:
        f = basis.function(3, extrapolate=True)
        xs = _random_points(rng, gg, basis, ESTIMATOR_POINTS)
        once = transport(gg, f, basis.measure)(xs)
        twice = transport(g, transport(g, f, basis.measure), basis.measure)(xs)
        summary.add(CheckResult('homomorphism', g.tag, _relative(twice, once), HOMOMORPHISM_TOLERANCE))

    coefficients = np.linspace(1.0, 0.5, NORM_K + 1)
    transported = np.tensordot(coefficients, transported_basis_values(g, basis, NORM_K, forward, jacobian_fn=jacobian_fn), axes=1)
    plain = np.tensordot(coefficients, eval_basis(basis, NORM_K, base.nodes), axes=1)
    live = forward.weights > 0
    norm_g = np.sqrt(np.dot(forward.weights[live], transported[live] ** 2))
    norm_e = np.sqrt(np.dot(base.weights, plain ** 2))
    summary.add(CheckResult('norm_preservation', g.tag, abs(norm_g - norm_e), NORM_TOLERANCE))

    _check_spectrum(config, kernel, g, summary, jacobian_fn=jacobian_fn if corrupt else None)

    grid = check_grid(g, basis)
    summary.add(CheckResult('filter_commutation', g.tag, filter_commutation_residual(kernel, g, config.k_check, grid), FILTER_TOLERANCE))
    summary.add(CheckResult('psd', g.tag, min_gram_eigenvalue(TransportedKernel(kernel, g), grid), PSD_FLOOR, comparison='>='))

    worst = 0.0
    inverse = g.inverse()
    for _ in range(ESTIMATOR_SAMPLES):
        sample = Sample(_base_draws(rng, basis, ESTIMATOR_SAMPLE_SIZE))
        theta = empirical_coefficients(sample, basis, ESTIMATOR_K)
        base_estimate = SeriesEstimate(theta, basis)
        twin = SeriesEstimate(theta, basis, g=g)
        xs = _random_points(rng, g, basis, ESTIMATOR_POINTS)
        lo, hi = basis.measure.support
        expected = np.sqrt(JacobianFn(g, basis.measure)(xs)) * base_estimate.evaluate(np.clip(inverse.act(xs), lo, hi))
        worst = max(worst, _relative(twin.evaluate(xs), expected))
    summary.add(CheckResult('estimator_equivariance', g.tag, worst, ESTIMATOR_TOLERANCE))


def run_checks(config):
    """
    The full verification suite for the configured basis, profile and group elements
    :type config: RunConfig
    :return: VerificationSummary
    """
    summary = VerificationSummary()
    rng = np.random.default_rng(config.seed)
    check_base(config, summary)
    for g in config.group_elements():
        log.info("Verifying transport by {}".format(g.tag))
        check_group_element(config, g, summary, rng)
    return summary
