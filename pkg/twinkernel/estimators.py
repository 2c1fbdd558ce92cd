# -*- coding: utf-8 -*-
import numpy as np

from twinkernel.exceptions import EstimationException
from twinkernel.kernels import SoftFilter, TranslationKernel, TransportedKernel
from twinkernel.logger import log
from twinkernel.orthopoly import HERMITE, eval_basis
from twinkernel.quadrature import FORWARD_RULE_SIZE, gauss_rule, gram_matrix
from twinkernel.transport import GroupElement, JacobianFn, transported_basis_at, transported_basis_values

# Ridge added to the Gram matrix of a multi-center system
MULTIMODAL_EPSILON = 1e-10
# Condition number of the regularized Gram matrix beyond which a fit is refused
MAX_CONDITION = 1e14


class Sample:

    def __init__(self, values, seed=None, provenance=None):
        """
        i.i.d. observations X_1 .. X_n
        :param values: The observations
        :type values: list(float) or np.ndarray
        :param seed: The stream seed the sample was drawn with, None for data files
        :type seed: int
        :param provenance: Free form origin record (target name, data file path)
        :type provenance: dict
        """
        values = np.array(values, dtype=float).ravel()
        if values.size == 0:
            raise EstimationException("A sample requires at least one observation")
        if not np.all(np.isfinite(values)):
            raise EstimationException("Sample contains non-finite values at positions {}".format(np.flatnonzero(~np.isfinite(values))[:5].tolist()))
        values.setflags(write=False)
        self.values = values
        self.seed = seed
        self.provenance = provenance or dict()

    @property
    def n(self):
        return self.values.size

    def __len__(self):
        return self.n

    def __repr__(self):
        return "Sample(n={}, seed={})".format(self.n, self.seed)


def empirical_coefficients(sample, basis, K):
    """
    theta_k = (1/n) sum_i P_k(X_i) for k = 0..K
    :type sample: Sample
    :type basis: OrthonormalBasis
    :type K: int
    :raises: DomainException for Legendre observations outside [-1, 1]
    """
    if K < 0:
        raise EstimationException("Truncation level must be nonnegative, found {}".format(K))
    return np.mean(eval_basis(basis, K, sample.values), axis=1)


def projection_coefficients(values, basis, K, rule):
    """
    <f, P_k> for a function given at the rule nodes, the L^2(mu) projection onto span{P_0..P_K}
    """
    values = np.asarray(values, dtype=float)
    live = rule.weights > 0
    p = eval_basis(basis, K, rule.nodes[live])
    return p @ (rule.weights[live] * values[live])


class SeriesEstimate:

    def __init__(self, coefficients, basis, g=None, attenuation=None, jacobian_fn=None):
        """
        f(x) = sum_{k <= K} theta_k P_k^(g)(x), a density with respect to the basis measure
        :param coefficients: theta_0 .. theta_K
        :type basis: OrthonormalBasis
        :param g: Transporting group element, identity for the base estimator
        :type g: GroupElement
        :param attenuation: Soft cutoff factors already applied to the coefficients
        """
        self.coefficients = np.asarray(coefficients, dtype=float)
        self.basis = basis
        self.g = g or GroupElement.identity()
        self.attenuation = attenuation
        self.jacobian_fn = jacobian_fn or JacobianFn(self.g, basis.measure)

    @property
    def K(self):
        return len(self.coefficients) - 1

    @property
    def measure(self):
        return self.basis.measure

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        if self.g.is_identity:
            values = eval_basis(self.basis, self.K, x)
        else:
            values = transported_basis_at(self.g, self.basis, self.K, x, jacobian_fn=self.jacobian_fn)
        out = np.tensordot(self.coefficients, values, axes=1)
        return out if out.ndim else float(out)

    def lebesgue_density(self, x):
        return self.evaluate(x) * self.measure.density(x)

    def positive_part(self, rule):
        """
        max(f, 0) renormalized to mass 1 under the rule
        :return: PositivePart
        """
        return PositivePart(self, rule)

    def as_dict(self):
        return {
            'method': 'series' if self.attenuation is None else 'soft',
            'basis': self.basis.family.value,
            'g': self.g.as_dict(),
            'K': self.K,
            'coefficients': self.coefficients.tolist(),
            'attenuation': None if self.attenuation is None else np.asarray(self.attenuation).tolist()
        }

    def __repr__(self):
        return "SeriesEstimate({}, K={}, g={})".format(self.basis.family.value, self.K, self.g.tag)


class PositivePart:

    def __init__(self, estimate, rule):
        self.estimate = estimate
        clipped = np.maximum(estimate.evaluate(rule.nodes), 0.0)
        live = rule.weights > 0
        self.mass = float(np.dot(rule.weights[live], clipped[live]))
        if not self.mass > 0:
            raise EstimationException("Positive part of {} has no mass".format(estimate))

    @property
    def measure(self):
        return self.estimate.measure

    def evaluate(self, x):
        return np.maximum(self.estimate.evaluate(x), 0.0) / self.mass

    def lebesgue_density(self, x):
        return self.evaluate(x) * self.measure.density(x)

    def as_dict(self):
        d = self.estimate.as_dict()
        d.update({'positive_part': True, 'mass_before_renormalization': self.mass})
        return d


def evaluate_series(estimate, x):
    return estimate.evaluate(x)


def series_estimator(sample, basis, K):
    return SeriesEstimate(empirical_coefficients(sample, basis, K), basis)


def transported_series_estimator(sample, basis, K, g):
    """
    The base coefficients carried by the transported basis U_g P_k
    :type g: GroupElement
    """
    return SeriesEstimate(empirical_coefficients(sample, basis, K), basis, g=g)


def soft_filter_estimate(sample, basis, h, c_k, K):
    """
    Empirical coefficients attenuated by exp(-c_k h^2)
    :param c_k: Rates as a callable, an array, or None for c_k = k
    """
    factors = SoftFilter(h, c_k).attenuation(K)
    theta = empirical_coefficients(sample, basis, K)
    return SeriesEstimate(theta * factors, basis, attenuation=factors)


class KernelEstimate:

    def __init__(self, sample, h, kernel=None):
        """
        f_h(x) = (1/n) sum_i K_h(x, X_i) with K_h the base kernel transported by the bandwidth dilation
        :type sample: Sample
        :param h: Bandwidth h > 0
        :param kernel: Base kernel on Lebesgue measure, the Gaussian translation kernel by default
        """
        if not h > 0:
            raise EstimationException("Bandwidth must be positive, found {}".format(h))
        self.sample = sample
        self.h = float(h)
        self.kernel = kernel or TranslationKernel()
        self.transported = TransportedKernel(self.kernel, GroupElement.bandwidth(self.h))

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        values = self.transported.evaluate(x[..., None], self.sample.values)
        out = np.mean(values, axis=-1)
        return out if out.ndim else float(out)

    def lebesgue_density(self, x):
        return self.evaluate(x)

    def as_dict(self):
        return {
            'method': 'parzen',
            'h': self.h,
            'n': self.sample.n,
            'kernel': self.kernel.as_dict()
        }

    def __repr__(self):
        return "KernelEstimate(h={}, n={})".format(self.h, self.sample.n)


def parzen_rosenblatt(sample, h, x):
    return KernelEstimate(sample, h).evaluate(x)


class MultimodalEstimate:

    def __init__(self, centers, coefficients, condition, epsilon, approximation_error=None):
        """
        f(x) = sum_c sum_k theta_{c,k} (U_{g_c} H_k)(x) with g_c the translation to center c
        :param centers: Translation targets, one per component
        :param coefficients: Array of shape (len(centers), K + 1)
        :param condition: Condition number of the regularized Gram matrix
        :param approximation_error: Squared L^2(gamma) error of a population fit, None for sample fits
        """
        self.centers = [float(c) for c in centers]
        self.coefficients = np.asarray(coefficients, dtype=float)
        self.condition = float(condition)
        self.epsilon = epsilon
        self.approximation_error = approximation_error
        self.elements = [GroupElement.translation(c) for c in self.centers]

    @property
    def K(self):
        return self.coefficients.shape[1] - 1

    @property
    def dimension(self):
        return self.coefficients.size

    @property
    def measure(self):
        return HERMITE.measure

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for g, theta in zip(self.elements, self.coefficients):
            out = out + np.tensordot(theta, transported_basis_at(g, HERMITE, self.K, x), axes=1)
        return out if out.ndim else float(out)

    def lebesgue_density(self, x):
        return self.evaluate(x) * self.measure.density(x)

    def as_dict(self):
        return {
            'method': 'multimodal',
            'basis': HERMITE.family.value,
            'centers': self.centers,
            'K': self.K,
            'coefficients': self.coefficients.tolist(),
            'condition': self.condition,
            'epsilon': self.epsilon,
            'approximation_error': self.approximation_error
        }

    def __repr__(self):
        return "MultimodalEstimate(centers={}, K={})".format(self.centers, self.K)


def _combined_system(centers, K, rule):
    """
    Rows (c, k) of U_{g_c} H_k at the rule nodes, ordered by center then degree
    """
    if len(centers) < 1:
        raise EstimationException("A multimodal fit needs at least one center")
    if K < 0:
        raise EstimationException("Truncation level must be nonnegative, found {}".format(K))
    return np.vstack([transported_basis_values(GroupElement.translation(c), HERMITE, K, rule) for c in centers])


def _solve(gram, beta, centers, K, epsilon):
    regularized = gram + epsilon * np.eye(gram.shape[0])
    condition = float(np.linalg.cond(regularized))
    log.debug("Multimodal Gram for centers {} K={}: condition {:.3e}".format(centers, K, condition))
    if not condition < MAX_CONDITION:
        raise EstimationException("Gram matrix of centers {} with K={} is numerically singular (condition {:.3e}, epsilon {})".format(centers, K, condition, epsilon))
    theta = np.linalg.solve(regularized, beta)
    return theta.reshape(len(centers), K + 1), condition


def multimodal_estimator(sample, centers, K, epsilon=MULTIMODAL_EPSILON, rule=None):
    """
    Regularized least squares fit (G + eps I) theta = beta in L^2(gamma) over the combined system
      {U_{g_c} H_k}, beta_j the empirical coefficients against each combined basis function
    :type sample: Sample
    :param centers: Component centers
    :type centers: list(float)
    :param K: Degree per center
    :param rule: Forward rule for the Gram matrix, the oversized Hermite rule by default
    :return: MultimodalEstimate
    """
    rule = rule or gauss_rule(HERMITE, FORWARD_RULE_SIZE)
    gram = gram_matrix(_combined_system(centers, K, rule), rule)
    beta = np.concatenate([
        np.mean(transported_basis_at(GroupElement.translation(c), HERMITE, K, sample.values), axis=1) for c in centers
    ])
    theta, condition = _solve(gram, beta, centers, K, epsilon)
    return MultimodalEstimate(centers, theta, condition, epsilon)


def population_multimodal_fit(target, centers, K, epsilon=MULTIMODAL_EPSILON, rule=None):
    """
    The same least squares fit with exact population moments beta_j = <f, B_j> by quadrature
    :param target: A target with a base_density(x) (density with respect to the standard Gaussian)
    :return: MultimodalEstimate carrying its squared L^2(gamma) approximation error
    """
    rule = rule or gauss_rule(HERMITE, FORWARD_RULE_SIZE)
    rows = _combined_system(centers, K, rule)
    gram = gram_matrix(rows, rule)
    live = rule.weights > 0
    f = np.zeros(rule.size)
    f[live] = target.base_density(rule.nodes[live])
    beta = rows[:, live] @ (rule.weights[live] * f[live])
    theta, condition = _solve(gram, beta, centers, K, epsilon)
    fit = MultimodalEstimate(centers, theta, condition, epsilon)
    residual = f[live] - fit.evaluate(rule.nodes[live])
    fit.approximation_error = float(np.dot(rule.weights[live], residual * residual))
    return fit
