# -*- coding: utf-8 -*-
import enum
import functools
import math

import numpy as np
from scipy.special import comb

from twinkernel.exceptions import DomainException
from twinkernel.quadrature import GAUSSIAN_STD, UNIFORM_PM1


class Family(enum.Enum):
    HERMITE_PROBABILIST = 'hermite'
    LEGENDRE_UNIFORM = 'legendre'


def recurrence_coeffs(family, k):
    """
    Coefficients (a_k, b_k) of the normalized recurrence x P_k = b_{k+1} P_{k+1} + a_k P_k + b_k P_{k-1}
    :type family: Family
    :type k: int
    """
    family = Family(family)
    if k < 0:
        raise DomainException("Recurrence index must be nonnegative, found {}".format(k))
    if family == Family.HERMITE_PROBABILIST:
        return 0.0, math.sqrt(k)
    if k == 0:
        return 0.0, 0.0
    return 0.0, k / math.sqrt((2.0 * k - 1.0) * (2.0 * k + 1.0))


class OrthonormalBasis:

    MEASURES = {
        Family.HERMITE_PROBABILIST: GAUSSIAN_STD,
        Family.LEGENDRE_UNIFORM: UNIFORM_PM1
    }

    def __init__(self, family):
        """
        Orthonormal polynomials P_0, P_1, ... for a probability measure
        :param family: hermite (standard Gaussian) or legendre (uniform dx/2 on [-1, 1])
        :type family: Family or str
        """
        self.family = Family(family)
        self.measure = OrthonormalBasis.MEASURES[self.family]

    def recurrence(self, k):
        return recurrence_coeffs(self.family, k)

    def evaluate(self, k_max, x, extrapolate=False):
        return eval_basis(self, k_max, x, extrapolate=extrapolate)

    def function(self, k, extrapolate=False):
        """
        A vectorised handle x -> P_k(x)
        """
        return functools.partial(_basis_function, self, k, extrapolate)

    def __eq__(self, other):
        return isinstance(other, OrthonormalBasis) and self.family == other.family

    def __hash__(self):
        return hash(self.family)

    def __repr__(self):
        return "OrthonormalBasis({})".format(self.family.value)


def _basis_function(basis, k, extrapolate, x):
    return eval_basis(basis, k, x, extrapolate=extrapolate)[k]


HERMITE = OrthonormalBasis(Family.HERMITE_PROBABILIST)
LEGENDRE = OrthonormalBasis(Family.LEGENDRE_UNIFORM)


def eval_basis(basis, k_max, x, extrapolate=False):
    """
    Evaluate P_0..P_{k_max} by forward recurrence. Accurate for k <= ~100 and |x| <= 12
    :type basis: OrthonormalBasis
    :param k_max: Highest degree
    :type k_max: int
    :param x: A point or an array of points
    :param extrapolate: Allow Legendre evaluation outside [-1, 1]
    :return: np.ndarray of shape (k_max + 1,) + shape(x)
    """
    if k_max < 0:
        raise DomainException("k_max must be nonnegative, found {}".format(k_max))
    x = np.asarray(x, dtype=float)
    if not extrapolate and basis.family == Family.LEGENDRE_UNIFORM and np.any(np.abs(x) > 1.0):
        raise DomainException("Legendre basis evaluated outside [-1, 1] at {}".format(x[np.abs(x) > 1.0].ravel()[:5]))

    out = np.empty((k_max + 1,) + x.shape)
    out[0] = 1.0
    if k_max >= 1:
        a_0, _ = basis.recurrence(0)
        _, b_1 = basis.recurrence(1)
        out[1] = (x - a_0) / b_1
    for k in range(1, k_max):
        a_k, b_k = basis.recurrence(k)
        _, b_next = basis.recurrence(k + 1)
        out[k + 1] = ((x - a_k) * out[k] - b_k * out[k - 1]) / b_next
    return out


def basis_from_tag(tag):
    """
    :param tag: 'hermite' or 'legendre'
    """
    return OrthonormalBasis(Family(tag))


def hermite_dilation_expansion(alpha, k, rule):
    """
    Expand He_k(x / alpha) in the monic Hermite polynomials He_j by quadrature and compare with the binomial
      identity alpha^{-k} sum_j C(k, 2j) (1 - alpha^2)^j He_{k-2j}(x)
    :param rule: A Hermite Gauss rule with at least k + 1 nodes
    :returns: dict with the quadrature coefficients, the identity coefficients and their max deviation
    """
    nodes = rule.nodes
    # orthonormal P_j = He_j / sqrt(j!)
    p = eval_basis(HERMITE, k, nodes)
    scaled = eval_basis(HERMITE, k, nodes / alpha)[k] * math.sqrt(math.factorial(k))
    live = rule.weights > 0
    measured = np.array([np.dot(rule.weights[live], scaled[live] * p[j][live]) / math.sqrt(math.factorial(j))
                         for j in range(k + 1)])
    identity = np.zeros(k + 1)
    for j in range(k // 2 + 1):
        identity[k - 2 * j] = alpha ** (-k) * comb(k, 2 * j) * (1.0 - alpha * alpha) ** j
    return {
        'alpha': alpha,
        'k': k,
        'quadrature_coefficients': measured.tolist(),
        'identity_coefficients': identity.tolist(),
        'max_deviation': float(np.max(np.abs(measured - identity)))
    }
