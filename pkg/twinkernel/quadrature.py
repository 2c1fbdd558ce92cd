# -*- coding: utf-8 -*-
import enum
import functools
import math

import numpy as np

from twinkernel.exceptions import QuadratureException
from twinkernel.logger import log

# Deflation tolerance (relative) and sweep limit for the implicit QL iteration
QL_TOLERANCE = 1e-14
QL_MAX_SWEEPS = 50

# Rule size used when an integrand carries an exponential Jacobian factor
FORWARD_RULE_SIZE = 400

_RESCALE = 1e100


class MeasureKind(enum.Enum):
    GAUSSIAN_STD = 'gaussian'
    UNIFORM_PM1 = 'uniform'
    LEBESGUE_R = 'lebesgue'


class Measure:

    def __init__(self, kind):
        """
        A base measure on the real line
        :param kind: One of the supported measure kinds
        :type kind: MeasureKind
        """
        self.kind = MeasureKind(kind)

    @property
    def support(self):
        if self.kind == MeasureKind.UNIFORM_PM1:
            return (-1.0, 1.0)
        return (-math.inf, math.inf)

    @property
    def total_mass(self):
        if self.kind == MeasureKind.LEBESGUE_R:
            return math.inf
        return 1.0

    @property
    def is_probability(self):
        return self.kind != MeasureKind.LEBESGUE_R

    def density(self, x):
        """
        Density of the measure relative to Lebesgue measure
        """
        x = np.asarray(x, dtype=float)
        if self.kind == MeasureKind.GAUSSIAN_STD:
            return np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        elif self.kind == MeasureKind.UNIFORM_PM1:
            return np.where(np.abs(x) <= 1.0, 0.5, 0.0)
        return np.ones_like(x)

    def contains(self, x):
        lo, hi = self.support
        x = np.asarray(x, dtype=float)
        return (x >= lo) & (x <= hi)

    def __eq__(self, other):
        return isinstance(other, Measure) and self.kind == other.kind

    def __hash__(self):
        return hash(self.kind)

    def __repr__(self):
        return "Measure({})".format(self.kind.value)


GAUSSIAN_STD = Measure(MeasureKind.GAUSSIAN_STD)
UNIFORM_PM1 = Measure(MeasureKind.UNIFORM_PM1)
LEBESGUE_R = Measure(MeasureKind.LEBESGUE_R)


class QuadratureRule:

    def __init__(self, nodes, weights, exact_degree, measure, first_components=None, label=None):
        """
        A quadrature rule sum_i w_i f(x_i) for integrals against a measure
        :param nodes: Abscissae, ascending
        :type nodes: np.ndarray
        :param weights: Nonnegative weights. Far tail weights of large Gaussian rules underflow to 0
        :type weights: np.ndarray
        :param exact_degree: Polynomials up to this degree are integrated exactly (2m-1 for Gauss rules)
        :type exact_degree: int
        :param measure: The measure the weights integrate against
        :type measure: Measure
        :param first_components: Squared first eigenvector components times the mass (Golub-Welsch weights)
        :type first_components: np.ndarray
        :param label: A short description used in logs and reports
        :type label: str
        """
        nodes = np.array(nodes, dtype=float)
        weights = np.array(weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise QuadratureException("Rule nodes and weights must be vectors of equal length, found {} and {}".format(nodes.shape, weights.shape))
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise QuadratureException("Rule weights must be finite and nonnegative ({})".format(label))

        nodes.setflags(write=False)
        weights.setflags(write=False)
        self.nodes = nodes
        self.weights = weights
        self.exact_degree = exact_degree
        self.measure = measure
        self.first_components = first_components
        self.label = label or 'rule'

    @property
    def size(self):
        return len(self.nodes)

    @property
    def sqrt_weights(self):
        return np.sqrt(self.weights)

    def __repr__(self):
        return "QuadratureRule({}, m={}, exact_degree={})".format(self.label, self.size, self.exact_degree)


def raw_moment(measure, k):
    """
    Independent moment oracle: int x^k dmu computed by the moment recursion
    :type measure: Measure
    :type k: int
    """
    if k % 2 == 1:
        return 0.0
    if measure.kind == MeasureKind.GAUSSIAN_STD:
        m = 1.0
        for j in range(2, k + 1, 2):
            m *= (j - 1)
        return m
    elif measure.kind == MeasureKind.UNIFORM_PM1:
        return 1.0 / (k + 1)
    raise QuadratureException("Moments of {} are not finite".format(measure))


def tridiagonal_ql(diagonal, offdiagonal, tolerance=QL_TOLERANCE, max_sweeps=QL_MAX_SWEEPS):
    """
    Eigenvalues and first eigenvector components of a symmetric tridiagonal matrix by the implicit QL method
    :param diagonal: The diagonal entries (length n)
    :param offdiagonal: The subdiagonal entries (length n-1)
    :returns: (eigenvalues ascending, first components) as np.ndarray
    :raises: QuadratureException if an eigenvalue does not converge within max_sweeps
    """
    d = [float(v) for v in diagonal]
    n = len(d)
    e = [float(v) for v in offdiagonal] + [0.0]
    z = [0.0] * n
    z[0] = 1.0
    if n == 1:
        return np.array(d), np.array(z)

    for l in range(n):
        sweeps = 0
        while True:
            # look for a negligible subdiagonal element
            mm = l
            while mm < n - 1:
                if abs(e[mm]) <= tolerance * (abs(d[mm]) + abs(d[mm + 1])):
                    break
                mm += 1
            if mm == l:
                break
            if sweeps == max_sweeps:
                raise QuadratureException("QL iteration did not converge for eigenvalue {} after {} sweeps".format(l, max_sweeps))
            sweeps += 1

            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[mm] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            for i in range(mm - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                if abs(f) < abs(g):
                    c = g / f
                    r = math.hypot(c, 1.0)
                    e[i + 1] = f * r
                    s = 1.0 / r
                    c *= s
                else:
                    s = f / g
                    r = math.hypot(s, 1.0)
                    e[i + 1] = g * r
                    c = 1.0 / r
                    s *= c
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b

                f = z[i + 1]
                z[i + 1] = s * z[i] + c * f
                z[i] = c * z[i] - s * f

            d[l] -= p
            e[l] = g
            e[mm] = 0.0

    order = np.argsort(d, kind='stable')
    return np.array(d)[order], np.array(z)[order]


def christoffel_weights(basis, nodes, m):
    """
    Gauss weights as Christoffel numbers mass / sum_{k<m} P_k(x)^2, accumulated with running rescaling
      so far tail nodes of large Gaussian rules keep their relative accuracy (or underflow to 0)
    """
    x = np.asarray(nodes, dtype=float)
    p_prev = np.zeros_like(x)
    p_cur = np.ones_like(x)
    total = np.ones_like(x)
    log_scale = np.zeros_like(x)
    for k in range(m - 1):
        a_k, b_k = basis.recurrence(k)
        _, b_next = basis.recurrence(k + 1)
        p_next = ((x - a_k) * p_cur - b_k * p_prev) / b_next
        p_prev, p_cur = p_cur, p_next
        total = total + p_cur * p_cur
        big = np.abs(p_cur) > _RESCALE
        if np.any(big):
            p_prev = np.where(big, p_prev / _RESCALE, p_prev)
            p_cur = np.where(big, p_cur / _RESCALE, p_cur)
            total = np.where(big, total / (_RESCALE * _RESCALE), total)
            log_scale = np.where(big, log_scale + math.log(_RESCALE), log_scale)

    return basis.measure.total_mass * np.exp(-np.log(total) - 2.0 * log_scale)


@functools.lru_cache(maxsize=64)
def _cached_gauss_rule(basis, m):
    diagonal = [basis.recurrence(k)[0] for k in range(m)]
    offdiagonal = [basis.recurrence(k)[1] for k in range(1, m)]
    try:
        nodes, first = tridiagonal_ql(diagonal, offdiagonal)
    except QuadratureException as e:
        raise QuadratureException("Gauss rule for {} with m={} failed: {}".format(basis.family.value, m, e))

    weights = christoffel_weights(basis, nodes, m)
    underflow = int(np.sum(weights == 0.0))
    if underflow:
        log.debug("Gauss rule {} m={}: {} tail weights underflow to 0".format(basis.family.value, m, underflow))
    return QuadratureRule(nodes, weights, 2 * m - 1, basis.measure,
                          first_components=basis.measure.total_mass * first * first,
                          label="{}-{}".format(basis.family.value, m))


def gauss_rule(basis, m):
    """
    The m-node Gauss rule for the measure of an orthonormal basis (Golub-Welsch)
    :param basis: An orthonormal polynomial basis providing its recurrence coefficients
    :type basis: OrthonormalBasis
    :param m: Number of nodes
    :type m: int
    :return: QuadratureRule exact for polynomials of degree <= 2m-1
    """
    if int(m) != m or m < 1:
        raise QuadratureException("Gauss rule size must be a positive integer, found {}".format(m))
    return _cached_gauss_rule(basis, int(m))


def interval_rule(basis, lo, hi, m):
    """
    Gauss-Legendre rule on a subinterval [lo, hi] of [-1, 1] carrying uniform dx/2 weights
    :type basis: OrthonormalBasis (Legendre)
    """
    if not -1.0 <= lo < hi <= 1.0:
        raise QuadratureException("Interval [{}, {}] is not a subinterval of [-1, 1]".format(lo, hi))
    base = gauss_rule(basis, m)
    half = 0.5 * (hi - lo)
    return QuadratureRule(half * base.nodes + 0.5 * (hi + lo), half * base.weights, base.exact_degree, base.measure,
                          label="{}-[{:g},{:g}]".format(base.label, lo, hi))


def lebesgue_rule(basis, lo, hi, m):
    """
    Gauss-Legendre rule on [lo, hi] integrating against Lebesgue measure
    :type basis: OrthonormalBasis (Legendre)
    """
    if not lo < hi:
        raise QuadratureException("Invalid interval [{}, {}]".format(lo, hi))
    base = gauss_rule(basis, m)
    half = 0.5 * (hi - lo)
    return QuadratureRule(half * base.nodes + 0.5 * (hi + lo), (hi - lo) * base.weights, base.exact_degree, LEBESGUE_R,
                          label="lebesgue-[{:g},{:g}]-{}".format(lo, hi, m))


def _check_length(values, rule):
    values = np.asarray(values, dtype=float)
    if values.shape != (rule.size,):
        raise QuadratureException("Expected {} values at the rule nodes, found shape {}".format(rule.size, values.shape))
    return values


def integrate(values, rule):
    """
    sum_i w_i f(x_i). Nodes with zero weight contribute nothing
    :param values: f sampled at the rule nodes
    :type rule: QuadratureRule
    """
    values = _check_length(values, rule)
    live = rule.weights > 0
    return float(np.dot(rule.weights[live], values[live]))


def inner_product(f_values, g_values, rule):
    """
    sum_i w_i f(x_i) g(x_i)
    """
    f_values = _check_length(f_values, rule)
    g_values = _check_length(g_values, rule)
    live = rule.weights > 0
    return float(np.dot(rule.weights[live], f_values[live] * g_values[live]))


def gram_matrix(rows, rule):
    """
    Gram matrix of functions given as rows of node samples
    :param rows: shape (k, m)
    """
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != rule.size:
        raise QuadratureException("Expected rows of {} node values, found shape {}".format(rule.size, rows.shape))
    live = rule.weights > 0
    scaled = rows[:, live] * rule.sqrt_weights[live]
    return scaled @ scaled.T
