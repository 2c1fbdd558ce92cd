# -*- coding: utf-8 -*-
import math

import numpy as np

from twinkernel.estimators import Sample
from twinkernel.exceptions import ExperimentException
from twinkernel.orthopoly import HERMITE, LEGENDRE, Family, basis_from_tag, eval_basis
from twinkernel.quadrature import gauss_rule, integrate
from twinkernel.transport import transport

# Points of the grid used for positivity checks and the rejection envelope
CHECK_GRID_POINTS = 2001
# Half width of the check grid for targets on the whole line
LINE_GRID_HALF_WIDTH = 8.0
MIN_ACCEPTANCE = 0.01
# Terms summed for the bias of targets with infinitely many coefficients
INFINITE_SERIES_TERMS = 200


class TargetDensity:
    """
    A density with respect to the measure of its basis, with exact coefficients theta_k = <f, P_k>
    """
    kind = None

    def __init__(self, basis):
        self.basis = basis

    @property
    def measure(self):
        return self.basis.measure

    def check_grid(self):
        if self.basis.family == Family.LEGENDRE_UNIFORM:
            return np.linspace(-1.0, 1.0, CHECK_GRID_POINTS)
        return np.linspace(-LINE_GRID_HALF_WIDTH, LINE_GRID_HALF_WIDTH, CHECK_GRID_POINTS)

    def base_density(self, x):
        raise NotImplementedError

    def lebesgue_density(self, x):
        return self.base_density(x) * self.measure.density(x)

    def coefficients(self, K):
        raise NotImplementedError

    def bias2(self, K):
        """
        sum_{k > K} theta_k^2, the squared bias of the truncated series estimator
        """
        raise NotImplementedError

    def sample(self, n, seed):
        raise NotImplementedError

    def transported(self, g):
        """
        The transported truth U_g f as a vectorised callable
        """
        return transport(g, self.base_density, self.measure)

    def validate(self, rule_size=64):
        """
        :raises: ExperimentException if the density is negative on the check grid or its mass is not 1
        """
        values = self.base_density(self.check_grid())
        if np.min(values) < 0:
            raise ExperimentException("Target {} is negative on its check grid (min {:.3e})".format(self, np.min(values)))
        rule = gauss_rule(self.basis, rule_size)
        mass = integrate(self.base_density(rule.nodes), rule)
        if abs(mass - 1.0) > 1e-8:
            raise ExperimentException("Target {} integrates to {} instead of 1".format(self, mass))
        return self

    def as_dict(self):
        return {'kind': self.kind, 'basis': self.basis.family.value}

    def __repr__(self):
        return "{}({})".format(type(self).__name__, self.as_dict())


class SobolevSeries(TargetDensity):
    kind = 'sobolev'

    def __init__(self, t=1.0, scale=0.3, k_max=40, radius=1.5, basis=LEGENDRE):
        """
        f = 1 + sum_{1 <= k <= k_max} scale (k+1)^-(t+1/2) (-1)^k P_k
        :param t: Smoothness, the class F_t(R) with lambda_k = (k+1)^-2
        :param radius: R, the declared bound sum_k theta_k^2 (k+1)^{2t} <= R^2
        :raises: ExperimentException when the density is negative, has the wrong mass or exceeds R
        """
        super().__init__(basis)
        self.t = float(t)
        self.scale = float(scale)
        self.k_max = int(k_max)
        self.radius = float(radius)
        k = np.arange(self.k_max + 1, dtype=float)
        theta = self.scale * (k + 1.0) ** -(self.t + 0.5) * (-1.0) ** k
        theta[0] = 1.0
        self.theta = theta
        if self.sobolev_norm2 > self.radius ** 2:
            raise ExperimentException("Sobolev norm {:.4f} of {} exceeds R^2 = {}".format(self.sobolev_norm2, self, self.radius ** 2))
        self.validate()
        grid = self.check_grid()
        self.envelope = float(np.max(self.base_density(grid)))

    @property
    def sobolev_norm2(self):
        k = np.arange(self.k_max + 1, dtype=float)
        return float(np.sum(self.theta ** 2 * (k + 1.0) ** (2.0 * self.t)))

    def base_density(self, x):
        out = np.tensordot(self.theta, eval_basis(self.basis, self.k_max, x), axes=1)
        return out if out.ndim else float(out)

    def coefficients(self, K):
        out = np.zeros(K + 1)
        m = min(K, self.k_max)
        out[:m + 1] = self.theta[:m + 1]
        return out

    def bias2(self, K):
        if K >= self.k_max:
            return 0.0
        return float(np.sum(self.theta[K + 1:] ** 2))

    def sample(self, n, seed):
        """
        Rejection sampling against the base measure with envelope M = max of f on the check grid
        """
        if n < 1:
            raise ExperimentException("Sample size must be positive, found {}".format(n))
        acceptance = 1.0 / self.envelope
        if acceptance < MIN_ACCEPTANCE:
            raise ExperimentException("Rejection acceptance rate {:.4f} below {} for {}, use a smaller scale".format(acceptance, MIN_ACCEPTANCE, self))
        rng = np.random.default_rng(seed)
        accepted = list()
        count = 0
        while count < n:
            batch = int(math.ceil(1.2 * (n - count) * self.envelope)) + 16
            if self.basis.family == Family.LEGENDRE_UNIFORM:
                proposal = rng.uniform(-1.0, 1.0, batch)
            else:
                proposal = rng.standard_normal(batch)
            keep = proposal[rng.uniform(0.0, self.envelope, batch) <= self.base_density(proposal)]
            accepted.append(keep)
            count += keep.size
        return Sample(np.concatenate(accepted)[:n], seed=seed, provenance={'target': self.kind})

    def as_dict(self):
        d = super().as_dict()
        d.update({'t': self.t, 'scale': self.scale, 'k_max': self.k_max, 'radius': self.radius})
        return d


class BimodalGaussian(TargetDensity):
    kind = 'bimodal'

    def __init__(self, centers=(-2.0, 2.0), weights=(0.5, 0.5)):
        """
        Mixture sum_j w_j N(c_j, 1), represented by its density with respect to the standard Gaussian
        """
        super().__init__(HERMITE)
        if len(centers) != len(weights) or not centers:
            raise ExperimentException("Bimodal target needs matching centers and weights, found {} and {}".format(centers, weights))
        if abs(sum(weights) - 1.0) > 1e-12 or min(weights) < 0:
            raise ExperimentException("Mixture weights must be nonnegative and sum to 1, found {}".format(weights))
        self.centers = np.array(centers, dtype=float)
        self.weights = np.array(weights, dtype=float)

    def base_density(self, x):
        x = np.asarray(x, dtype=float)
        # phi(x - c) / phi(x) = exp(c x - c^2 / 2)
        out = sum(w * np.exp(c * x - 0.5 * c * c) for c, w in zip(self.centers, self.weights))
        return out if np.ndim(out) else float(out)

    def lebesgue_density(self, x):
        x = np.asarray(x, dtype=float)
        out = sum(w * np.exp(-0.5 * (x - c) ** 2) for c, w in zip(self.centers, self.weights)) / math.sqrt(2.0 * math.pi)
        return out if np.ndim(out) else float(out)

    def _theta(self, k):
        # E He_k(Z + c) = c^k
        return sum(w * _signed_power_over_root_factorial(c, k) for c, w in zip(self.centers, self.weights))

    def coefficients(self, K):
        return np.array([self._theta(k) for k in range(K + 1)])

    def bias2(self, K):
        return float(sum(self._theta(k) ** 2 for k in range(K + 1, INFINITE_SERIES_TERMS + 1)))

    def sample(self, n, seed):
        """
        Component first, then a unit normal around its center
        """
        if n < 1:
            raise ExperimentException("Sample size must be positive, found {}".format(n))
        rng = np.random.default_rng(seed)
        component = rng.choice(len(self.centers), size=n, p=self.weights)
        values = self.centers[component] + rng.standard_normal(n)
        return Sample(values, seed=seed, provenance={'target': self.kind})

    def as_dict(self):
        d = super().as_dict()
        d.update({'centers': self.centers.tolist(), 'weights': self.weights.tolist()})
        return d


def _signed_power_over_root_factorial(c, k):
    """
    c^k / sqrt(k!) without overflow
    """
    if c == 0.0:
        return 1.0 if k == 0 else 0.0
    magnitude = math.exp(k * math.log(abs(c)) - 0.5 * math.lgamma(k + 1.0))
    return magnitude if c > 0 or k % 2 == 0 else -magnitude


class BaseMeasureItself(TargetDensity):
    kind = 'base'

    def __init__(self, basis=HERMITE):
        """
        The base measure itself, f = 1 with respect to mu
        """
        super().__init__(basis)

    def base_density(self, x):
        x = np.asarray(x, dtype=float)
        out = np.ones_like(x)
        return out if out.ndim else float(out)

    def coefficients(self, K):
        out = np.zeros(K + 1)
        out[0] = 1.0
        return out

    def bias2(self, K):
        return 0.0

    def sample(self, n, seed):
        if n < 1:
            raise ExperimentException("Sample size must be positive, found {}".format(n))
        rng = np.random.default_rng(seed)
        if self.basis.family == Family.LEGENDRE_UNIFORM:
            values = rng.uniform(-1.0, 1.0, n)
        else:
            values = rng.standard_normal(n)
        return Sample(values, seed=seed, provenance={'target': self.kind})


def sample_target(target, n, seed):
    """
    n i.i.d. draws, deterministic given the stream seed
    :type target: TargetDensity
    :return: Sample
    """
    return target.sample(n, seed)


def target_from_dict(d):
    """
    :param d: {'kind': 'sobolev' | 'bimodal' | 'base', ...parameters}
    """
    d = dict(d)
    kind = d.pop('kind', 'sobolev')
    basis = basis_from_tag(d.pop('basis')) if 'basis' in d else None
    try:
        if kind == SobolevSeries.kind:
            return SobolevSeries(basis=basis or LEGENDRE, **d)
        elif kind == BimodalGaussian.kind:
            if basis is not None and basis != HERMITE:
                raise ExperimentException("The bimodal target lives on the Hermite basis")
            return BimodalGaussian(**d)
        elif kind == BaseMeasureItself.kind:
            return BaseMeasureItself(basis or HERMITE)
    except TypeError as e:
        raise ExperimentException("Invalid parameters for a {} target: {}".format(kind, e))
    raise ExperimentException("Unknown target kind '{}', must be one of sobolev, bimodal, base".format(kind))
