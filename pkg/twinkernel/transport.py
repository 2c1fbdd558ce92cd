# -*- coding: utf-8 -*-
import enum
import math

import numpy as np

from twinkernel.exceptions import TransportException
from twinkernel.logger import log
from twinkernel.orthopoly import Family, eval_basis
from twinkernel.quadrature import (FORWARD_RULE_SIZE, MeasureKind, gauss_rule, interval_rule)


class Variant(enum.Enum):
    AFFINE = 'affine'
    DILATION = 'dilation'
    TRANSLATION = 'translation'


class GroupElement:

    def __init__(self, variant, a=1.0, b=0.0, alpha=1.0):
        """
        An element of the affine, dilation or translation group acting on the real line
        :param variant: Which group the element belongs to
        :type variant: Variant or str
        :param a: Affine scale (a > 0)
        :param b: Affine or translation shift
        :param alpha: Dilation factor (alpha > 0)
        """
        self.variant = Variant(variant)
        self.a = float(a) if self.variant == Variant.AFFINE else 1.0
        self.b = float(b) if self.variant in (Variant.AFFINE, Variant.TRANSLATION) else 0.0
        self.alpha = float(alpha) if self.variant == Variant.DILATION else 1.0
        if not (self.a > 0 and self.alpha > 0) or not all(map(math.isfinite, (self.a, self.b, self.alpha))):
            raise TransportException("Invalid group element {}: a and alpha must be finite and positive".format(self))

    @staticmethod
    def affine(a, b):
        return GroupElement(Variant.AFFINE, a=a, b=b)

    @staticmethod
    def dilation(alpha):
        return GroupElement(Variant.DILATION, alpha=alpha)

    @staticmethod
    def translation(b):
        return GroupElement(Variant.TRANSLATION, b=b)

    @staticmethod
    def identity(variant=Variant.TRANSLATION):
        return GroupElement(variant)

    @staticmethod
    def bandwidth(h):
        """
        The dilation carrying a base kernel to its bandwidth-h version h^-1 K_e(x/h, y/h)
        """
        if not h > 0:
            raise TransportException("Bandwidth must be positive, found {}".format(h))
        return GroupElement.dilation(h)

    @property
    def scale(self):
        return self.a if self.variant == Variant.AFFINE else self.alpha

    @property
    def shift(self):
        return self.b

    @property
    def is_identity(self):
        return self.scale == 1.0 and self.shift == 0.0

    def act(self, x):
        """
        g . x
        """
        return self.scale * np.asarray(x, dtype=float) + self.shift

    def inverse(self):
        if self.variant == Variant.AFFINE:
            return GroupElement.affine(1.0 / self.a, -self.b / self.a)
        elif self.variant == Variant.DILATION:
            return GroupElement.dilation(1.0 / self.alpha)
        return GroupElement.translation(-self.b)

    def compose(self, other):
        """
        The element acting as x -> self . (other . x)
        :type other: GroupElement
        """
        if other.is_identity:
            return self
        if self.is_identity:
            return other
        if self.variant != other.variant:
            raise TransportException("Cannot compose a {} element with a {} element, convert both with to_affine()".format(self.variant.value, other.variant.value))
        if self.variant == Variant.AFFINE:
            return GroupElement.affine(self.a * other.a, self.a * other.b + self.b)
        elif self.variant == Variant.DILATION:
            return GroupElement.dilation(self.alpha * other.alpha)
        return GroupElement.translation(self.b + other.b)

    def to_affine(self):
        return GroupElement.affine(self.scale, self.shift)

    @property
    def tag(self):
        """
        A file name safe label, e.g. translation_b2 or dilation_alpha0.8
        """
        if self.is_identity:
            return 'identity'
        if self.variant == Variant.AFFINE:
            return 'affine_a{:g}_b{:g}'.format(self.a, self.b)
        elif self.variant == Variant.DILATION:
            return 'dilation_alpha{:g}'.format(self.alpha)
        return 'translation_b{:g}'.format(self.b)

    def as_dict(self):
        if self.is_identity:
            return {'variant': 'identity'}
        if self.variant == Variant.AFFINE:
            return {'variant': self.variant.value, 'a': self.a, 'b': self.b}
        elif self.variant == Variant.DILATION:
            return {'variant': self.variant.value, 'alpha': self.alpha}
        return {'variant': self.variant.value, 'b': self.b}

    @staticmethod
    def from_dict(d):
        """
        :param d: {'variant': 'identity' | 'affine' | 'dilation' | 'translation', ...parameters}
        :type d: dict
        """
        if not isinstance(d, dict) or 'variant' not in d:
            raise TransportException("A group element requires a dict with a 'variant' field, found {}".format(d))
        d = dict(d)
        variant = d.pop('variant')
        allowed = {'identity': set(), 'affine': {'a', 'b'}, 'dilation': {'alpha'}, 'translation': {'b'}}
        if variant not in allowed:
            raise TransportException("Unknown group variant '{}', must be one of {}".format(variant, sorted(allowed)))
        unknown = set(d) - allowed[variant]
        if unknown:
            raise TransportException("Unknown parameters {} for a {} element".format(sorted(unknown), variant))
        if variant == 'identity':
            return GroupElement.identity()
        return GroupElement(variant, **d)

    def __eq__(self, other):
        return isinstance(other, GroupElement) and (self.variant, self.a, self.b, self.alpha) == (other.variant, other.a, other.b, other.alpha)

    def __hash__(self):
        return hash((self.variant, self.a, self.b, self.alpha))

    def __repr__(self):
        return "GroupElement({})".format(', '.join('{}={}'.format(k, v) for k, v in self.as_dict().items()))


SUPPORTED_PAIRS = {
    (MeasureKind.GAUSSIAN_STD, Variant.TRANSLATION),
    (MeasureKind.GAUSSIAN_STD, Variant.DILATION),
    (MeasureKind.LEBESGUE_R, Variant.DILATION),
    (MeasureKind.UNIFORM_PM1, Variant.AFFINE)
}


def check_supported(g, measure):
    """
    :raises: TransportException when no closed form Jacobian exists for the (g, measure) pair
    """
    if g.is_identity:
        return
    if (measure.kind, g.variant) not in SUPPORTED_PAIRS:
        raise TransportException("Unsupported pair ({}, {}): supported pairs are {}".format(
            g.variant.value, measure.kind.value, sorted('({}, {})'.format(v.value, m.value) for m, v in SUPPORTED_PAIRS)))
    if measure.kind == MeasureKind.UNIFORM_PM1 and g.a + abs(g.b) > 1.0 + 1e-15:
        raise TransportException("Affine element {} does not map [-1, 1] into itself (a + |b| > 1)".format(g))


class JacobianFn:

    def __init__(self, g, measure, corrupt_sign=False):
        """
        The Radon-Nikodym derivative J_g = d(mu o tau_g^-1)/dmu
        :type g: GroupElement
        :type measure: Measure
        :param corrupt_sign: Negative control for the verification suite, flips the exponent sign
          (or inverts the constant) so that unitarity breaks
        :type corrupt_sign: bool
        """
        check_supported(g, measure)
        self.g = g
        self.measure = measure
        self.corrupt_sign = corrupt_sign

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        g = self.g
        sign = -1.0 if self.corrupt_sign else 1.0
        if g.is_identity:
            # zero off the support, as for every other element
            return np.where(self.measure.contains(x), 1.0, 0.0)

        kind = self.measure.kind
        if kind == MeasureKind.GAUSSIAN_STD and g.variant == Variant.TRANSLATION:
            return np.exp(sign * (g.b * x - 0.5 * g.b * g.b))
        elif kind == MeasureKind.GAUSSIAN_STD and g.variant == Variant.DILATION:
            return np.exp(sign * (0.5 * (1.0 - g.alpha ** -2) * x * x - math.log(g.alpha)))
        elif kind == MeasureKind.LEBESGUE_R:
            return np.full_like(x, g.alpha ** (-sign))
        # uniform dx/2 with an affine element: constant on the transported interval [b - a, b + a]
        inside = np.abs(x - g.b) <= g.a
        return np.where(inside, g.a ** (-sign), 0.0)


def jacobian(g, measure, x):
    """
    J_g(x) in closed form
    :type g: GroupElement
    :type measure: Measure
    """
    j = JacobianFn(g, measure)(x)
    return j if j.ndim else float(j)


class TransportedFunction:

    def __init__(self, f, g, measure, jacobian_fn=None):
        """
        (U_g f)(x) = J_g(x)^{1/2} f(g^-1 . x)
        :param f: A vectorised callable on the base space
        :type g: GroupElement
        :type measure: Measure
        :param jacobian_fn: Overrides the closed form Jacobian (negative controls)
        :type jacobian_fn: JacobianFn
        """
        self.f = f
        self.g = g
        self.measure = measure
        self.jacobian_fn = jacobian_fn or JacobianFn(g, measure)
        self._inverse = g.inverse()

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        j = self.jacobian_fn(x)
        out = np.zeros(np.broadcast(x, j).shape)
        live = j > 0
        if np.any(live):
            lo, hi = self.measure.support
            y = np.clip(self._inverse.act(x), lo, hi)
            out[live] = np.sqrt(j[live]) * np.asarray(self.f(y[live]), dtype=float)
        return out if out.ndim else float(out)


def transport(g, f, measure, jacobian_fn=None):
    """
    :returns: TransportedFunction U_g f
    """
    return TransportedFunction(f, g, measure, jacobian_fn=jacobian_fn)


def transported_basis_values(g, basis, k_max, rule, jacobian_fn=None):
    """
    Rows k = 0..k_max hold (U_g P_k)(x_i) at the rule nodes
    :return: np.ndarray of shape (k_max + 1, m)
    """
    jacobian_fn = jacobian_fn or JacobianFn(g, basis.measure)
    return _transported_values(g, basis, k_max, rule.nodes, jacobian_fn)


def _transported_values(g, basis, k_max, x, jacobian_fn):
    x = np.asarray(x, dtype=float)
    j = jacobian_fn(x)
    out = np.zeros((k_max + 1,) + x.shape)
    live = j > 0
    if np.any(live):
        y = g.inverse().act(x[live])
        # J vanishes off the transported interval, so y leaves the basis support only by rounding
        out[:, live] = np.sqrt(j[live]) * eval_basis(basis, k_max, y, extrapolate=True)
    return out


def transported_basis_at(g, basis, k_max, x, jacobian_fn=None):
    """
    Rows k = 0..k_max hold (U_g P_k)(x) at arbitrary points
    """
    jacobian_fn = jacobian_fn or JacobianFn(g, basis.measure)
    return _transported_values(g, basis, k_max, x, jacobian_fn)


def pullback(g, F, measure, jacobian_fn=None):
    """
    (U_g^-1 F)(y) = J_g(g . y)^{-1/2} F(g . y)
    """
    jacobian_fn = jacobian_fn or JacobianFn(g, measure)

    def pulled(y):
        x = g.act(y)
        return np.asarray(F(x), dtype=float) / np.sqrt(jacobian_fn(x))

    return pulled


def pullback_inner_product(g, F, H, rule, jacobian_fn=None):
    """
    <F, H> in L^2(mu) for functions living on the transported side, integrated after substituting
      x = g . y so that transported polynomials become polynomials under the base rule
    """
    pf = pullback(g, F, rule.measure, jacobian_fn)(rule.nodes)
    ph = pullback(g, H, rule.measure, jacobian_fn)(rule.nodes)
    live = rule.weights > 0
    return float(np.dot(rule.weights[live], pf[live] * ph[live]))


def pullback_norm(g, F, rule, jacobian_fn=None):
    return math.sqrt(max(pullback_inner_product(g, F, F, rule, jacobian_fn), 0.0))


def induced_rule(g, basis, m=FORWARD_RULE_SIZE):
    """
    The forward rule used to integrate products of transported basis functions directly:
      the oversized base rule for Gaussian transports, the interval rule on [b - a, b + a] for
      affine Legendre transports
    """
    check_supported(g, basis.measure)
    if basis.family == Family.LEGENDRE_UNIFORM and not g.is_identity:
        return interval_rule(basis, g.b - g.a, g.b + g.a, m)
    return gauss_rule(basis, m)


def transported_domain(g, basis, base_interval=(-2.0, 2.0)):
    """
    Interval on which transported functions are finite and nonzero, for evaluation grids
    """
    if basis.family == Family.LEGENDRE_UNIFORM:
        if g.is_identity:
            return (-1.0, 1.0)
        return (g.b - g.a, g.b + g.a)
    return base_interval


def alternative_form_deviation(alpha, basis, k_max, rule):
    """
    Compare U_g H_k for a Gaussian dilation with the two alternative closed forms
      alpha^{-1/2} H_k(x / alpha) and exp((1 - alpha^2) x^2 / 4) H_k(x / alpha)
    :returns: dict with max pointwise deviations and Gram deviations from the identity for each form
    """
    g = GroupElement.dilation(alpha)
    exact = transported_basis_values(g, basis, k_max, rule)
    plain = eval_basis(basis, k_max, rule.nodes / alpha)
    forms = {
        'prefactor': alpha ** -0.5 * plain,
        'gaussian_factor': np.exp(0.25 * (1.0 - alpha * alpha) * rule.nodes ** 2) * plain
    }
    live = rule.weights > 0
    report = {'alpha': alpha, 'k_max': k_max, 'rule_size': rule.size}
    for name, values in forms.items():
        scaled = values[:, live] * np.sqrt(rule.weights[live])
        gram = scaled @ scaled.T
        report[name] = {
            'max_weighted_deviation': float(np.max(np.abs((values - exact)[:, live] * np.sqrt(rule.weights[live])))),
            'gram_deviation': float(np.max(np.abs(gram - np.eye(k_max + 1))))
        }
    log.debug("Alternative closed forms for dilation {}: {}".format(alpha, report))
    return report
