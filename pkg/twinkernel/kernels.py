# -*- coding: utf-8 -*-
import enum
import math

import numpy as np
from scipy.linalg import LinAlgError, eigh, subspace_angles
from scipy.special import gamma, gammaincc, zeta
from scipy.stats import norm

from twinkernel.exceptions import SpectralException
from twinkernel.logger import log
from twinkernel.model.report import EquivarianceReport
from twinkernel.orthopoly import Family, eval_basis
from twinkernel.quadrature import LEBESGUE_R
from twinkernel.transport import JacobianFn, transported_basis_at, transported_domain

# Eigenvalue ratio below which neighbouring eigenvectors are compared as a subspace
DEGENERACY_RATIO = 1.0 + 1e-6


class ProfileKind(enum.Enum):
    GEOMETRIC = 'geometric'
    POLYNOMIAL = 'polynomial'
    EXPONENTIAL = 'exponential'


class EigenvalueProfile:

    DEFAULT_K_SPEC = {
        ProfileKind.GEOMETRIC: 60,
        ProfileKind.POLYNOMIAL: 200,
        ProfileKind.EXPONENTIAL: 60
    }

    def __init__(self, kind, rho=0.5, s=1.0, c=1.0, a=1.0, k_spec=None):
        """
        A summable positive nonincreasing eigenvalue sequence
          geometric: rho^k, polynomial: (k+1)^(-2s), exponential: exp(-c k^a)
        :type kind: ProfileKind or str
        :param k_spec: Series cutoff used for evaluation, defaults per kind
        :type k_spec: int
        """
        self.kind = ProfileKind(kind)
        self.rho = float(rho)
        self.s = float(s)
        self.c = float(c)
        self.a = float(a)
        self.k_spec = int(k_spec) if k_spec is not None else EigenvalueProfile.DEFAULT_K_SPEC[self.kind]

        if self.kind == ProfileKind.GEOMETRIC and not 0.0 < self.rho < 1.0:
            raise SpectralException("Geometric profile requires 0 < rho < 1, found {}".format(self.rho))
        if self.kind == ProfileKind.POLYNOMIAL and not self.s > 0.5:
            raise SpectralException("Polynomial profile requires s > 1/2, found {}".format(self.s))
        if self.kind == ProfileKind.EXPONENTIAL and not (self.c > 0 and self.a > 0):
            raise SpectralException("Exponential profile requires c > 0 and a > 0, found c={} a={}".format(self.c, self.a))
        if self.k_spec < 0:
            raise SpectralException("k_spec must be nonnegative, found {}".format(self.k_spec))

    def values(self, k_max=None):
        """
        lambda_0 .. lambda_{k_max}
        """
        k = np.arange((self.k_spec if k_max is None else k_max) + 1, dtype=float)
        if self.kind == ProfileKind.GEOMETRIC:
            return self.rho ** k
        elif self.kind == ProfileKind.POLYNOMIAL:
            return (k + 1.0) ** (-2.0 * self.s)
        return np.exp(-self.c * k ** self.a)

    def tail_bound(self, k=None):
        """
        Upper bound on sum_{j > k} lambda_j (exact for the geometric and polynomial kinds)
        """
        k = self.k_spec if k is None else k
        if self.kind == ProfileKind.GEOMETRIC:
            return self.rho ** (k + 1) / (1.0 - self.rho)
        elif self.kind == ProfileKind.POLYNOMIAL:
            # Hurwitz zeta: sum_{j >= k+2} j^(-2s)
            return float(zeta(2.0 * self.s, k + 2.0))
        # decreasing summand: sum_{j > k} f(j) <= int_k^inf exp(-c t^a) dt
        shape = 1.0 / self.a
        return float(gamma(shape) * gammaincc(shape, self.c * k ** self.a) / (self.a * self.c ** shape))

    def as_dict(self):
        d = {'kind': self.kind.value, 'k_spec': self.k_spec}
        if self.kind == ProfileKind.GEOMETRIC:
            d['rho'] = self.rho
        elif self.kind == ProfileKind.POLYNOMIAL:
            d['s'] = self.s
        else:
            d.update({'c': self.c, 'a': self.a})
        return d

    @staticmethod
    def from_dict(d):
        return EigenvalueProfile(**d)

    def __repr__(self):
        return "EigenvalueProfile({})".format(self.as_dict())


class HardFilter:
    def __init__(self, K):
        if K < 0:
            raise SpectralException("Hard cutoff requires K >= 0, found {}".format(K))
        self.K = int(K)

    def attenuation(self, k_spec):
        return (np.arange(k_spec + 1) <= self.K).astype(float)

    def __repr__(self):
        return "HardFilter(K={})".format(self.K)


class SoftFilter:
    def __init__(self, h, c=None):
        """
        Attenuation exp(-c_k h^2)
        :param h: Smoothing level h >= 0 (math.inf allowed)
        :param c: Rates c_k, a callable k -> c_k or an array; defaults to c_k = k
        """
        if not h >= 0:
            raise SpectralException("Soft cutoff requires h >= 0, found {}".format(h))
        self.h = float(h)
        self.c = c

    def rates(self, k_max):
        k = np.arange(k_max + 1, dtype=float)
        if self.c is None:
            return k
        elif callable(self.c):
            return np.asarray(self.c(k), dtype=float)
        c = np.asarray(self.c, dtype=float)
        if len(c) < k_max + 1:
            raise SpectralException("Soft cutoff needs {} rates, found {}".format(k_max + 1, len(c)))
        return c[:k_max + 1]

    def attenuation(self, k_spec):
        c = self.rates(k_spec)
        if np.any(c < 0):
            raise SpectralException("Soft cutoff rates must be nonnegative")
        if self.h == 0.0:
            return np.ones_like(c)
        # c_k = 0 modes survive any h, including h = inf
        with np.errstate(invalid='ignore'):
            return np.where(c == 0.0, 1.0, np.exp(-c * self.h * self.h))

    def __repr__(self):
        return "SoftFilter(h={})".format(self.h)


class SpectralKernel:

    def __init__(self, profile, basis, eigenvalues=None, tail=None, closed_form=None, description=None):
        """
        K_e(x, y) = sum_{k <= K_spec} lambda_k P_k(x) P_k(y)
        :type profile: EigenvalueProfile
        :type basis: OrthonormalBasis
        :param eigenvalues: Overrides the profile values (filtered kernels)
        :param tail: Overrides the profile tail bound
        :param closed_form: 'mehler' evaluates the untruncated Hermite geometric kernel in closed form
        """
        self.profile = profile
        self.basis = basis
        self.eigenvalues = np.asarray(profile.values() if eigenvalues is None else eigenvalues, dtype=float)
        self.tail_bound = profile.tail_bound() if tail is None else float(tail)
        if closed_form not in (None, 'mehler'):
            raise SpectralException("Unknown closed form '{}'".format(closed_form))
        if closed_form == 'mehler' and (basis.family != Family.HERMITE_PROBABILIST or profile.kind != ProfileKind.GEOMETRIC):
            raise SpectralException("The Mehler closed form requires a Hermite basis with a geometric profile")
        self.closed_form = closed_form
        self.description = description or "{}-{}".format(basis.family.value, profile.kind.value)

    @property
    def measure(self):
        return self.basis.measure

    @property
    def k_spec(self):
        return len(self.eigenvalues) - 1

    def evaluate(self, x, y):
        if self.closed_form == 'mehler':
            return mehler_kernel(self.profile.rho, x, y)
        return self.spectral_evaluate(x, y)

    def spectral_evaluate(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        px = eval_basis(self.basis, self.k_spec, x)
        py = eval_basis(self.basis, self.k_spec, y)
        return np.tensordot(self.eigenvalues, px * py, axes=1)

    def weighted_features(self, rule):
        """
        Rows k hold sqrt(w_i) P_k(x_i), zero at nodes with zero weight
        """
        live = rule.weights > 0
        features = np.zeros((self.k_spec + 1, rule.size))
        features[:, live] = eval_basis(self.basis, self.k_spec, rule.nodes[live]) * rule.sqrt_weights[live]
        return features

    def matrix(self, points):
        p = np.asarray(points, dtype=float)
        return self.evaluate(p[:, None], p[None, :])

    def as_dict(self):
        return {
            'kernel': 'spectral',
            'basis': self.basis.family.value,
            'profile': self.profile.as_dict(),
            'closed_form': self.closed_form,
            'description': self.description,
            'tail_bound': self.tail_bound
        }

    def __repr__(self):
        return "SpectralKernel({})".format(self.description)


class TranslationKernel:

    def __init__(self, bump=None):
        """
        A translation invariant kernel kappa(x - y) on Lebesgue measure, the standard Gaussian bump by default
        :param bump: A vectorised density on the real line
        """
        self.bump = bump or norm.pdf
        self.measure = LEBESGUE_R
        self.description = 'translation-gaussian' if bump is None else 'translation'

    def evaluate(self, x, y):
        return self.bump(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))

    def matrix(self, points):
        p = np.asarray(points, dtype=float)
        return self.evaluate(p[:, None], p[None, :])

    def as_dict(self):
        return {'kernel': 'translation', 'description': self.description}

    def __repr__(self):
        return "TranslationKernel({})".format(self.description)


class TransportedKernel:

    def __init__(self, kernel, g, jacobian_fn=None):
        """
        K_g(x, y) = J_g(x)^{1/2} J_g(y)^{1/2} K_e(g^-1 . x, g^-1 . y)
        :type kernel: SpectralKernel or TranslationKernel
        :type g: GroupElement
        """
        self.kernel = kernel
        self.g = g
        self.jacobian_fn = jacobian_fn or JacobianFn(g, kernel.measure)
        self._inverse = g.inverse()

    @property
    def measure(self):
        return self.kernel.measure

    @property
    def eigenvalues(self):
        return self.kernel.eigenvalues

    @property
    def tail_bound(self):
        return self.kernel.tail_bound

    def evaluate(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        jx = self.jacobian_fn(x)
        jy = self.jacobian_fn(y)
        out = np.zeros(x.shape)
        live = (jx > 0) & (jy > 0)
        if np.any(live):
            lo, hi = self.measure.support
            # J > 0 keeps g^-1 . x inside the support up to rounding
            u = np.clip(self._inverse.act(x[live]), lo, hi)
            v = np.clip(self._inverse.act(y[live]), lo, hi)
            base = self.kernel.evaluate(u, v)
            out[live] = np.sqrt(jx[live] * jy[live]) * base
        return out if out.ndim else float(out)

    def _transported_basis(self, x):
        if not isinstance(self.kernel, SpectralKernel):
            raise SpectralException("{} has no spectral representation".format(self.kernel))
        return transported_basis_at(self.g, self.kernel.basis, self.kernel.k_spec, x, jacobian_fn=self.jacobian_fn)

    def spectral_evaluate(self, x, y):
        """
        sum_k lambda_k (U_g P_k)(x) (U_g P_k)(y)
        """
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return np.tensordot(self.kernel.eigenvalues, self._transported_basis(x) * self._transported_basis(y), axes=1)

    def weighted_features(self, rule):
        """
        Rows k hold sqrt(w_i) (U_g P_k)(x_i), zero at nodes with zero weight
        """
        live = rule.weights > 0
        features = np.zeros((self.kernel.k_spec + 1, rule.size))
        features[:, live] = self._transported_basis(rule.nodes[live]) * rule.sqrt_weights[live]
        return features

    def matrix(self, points):
        p = np.asarray(points, dtype=float)
        return self.evaluate(p[:, None], p[None, :])

    def as_dict(self):
        return {'kernel': 'transported', 'base': self.kernel.as_dict(), 'g': self.g.as_dict()}

    def __repr__(self):
        return "TransportedKernel({}, {})".format(self.kernel, self.g.tag)


class OperatorMatrix:

    def __init__(self, matrix, rule, descriptor):
        """
        Nystrom discretization M_ij = sqrt(w_i) K(x_i, x_j) sqrt(w_j)
        :type matrix: np.ndarray
        :type rule: QuadratureRule
        :param descriptor: The discretized kernel's as_dict()
        :type descriptor: dict
        """
        self.matrix = matrix
        self.rule = rule
        self.descriptor = descriptor

    @property
    def asymmetry(self):
        return float(np.max(np.abs(self.matrix - self.matrix.T))) if self.matrix.size else 0.0

    def __repr__(self):
        return "OperatorMatrix({}, rule={})".format(self.matrix.shape, self.rule.label)


def mehler_kernel(rho, x, y):
    """
    sum_k rho^k P_k(x) P_k(y) for the orthonormal probabilists' Hermite polynomials in closed form
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r2 = rho * rho
    return (1.0 - r2) ** -0.5 * np.exp(-(r2 * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * (1.0 - r2)))


def kernel_eval(kernel, x, y, with_tail=False):
    """
    :type kernel: SpectralKernel or TranslationKernel
    :param with_tail: Also return the analytic eigenvalue tail bound of the truncated sum
    """
    value = kernel.evaluate(x, y)
    value = value if np.ndim(value) else float(value)
    if with_tail:
        return value, getattr(kernel, 'tail_bound', 0.0)
    return value


def transported_kernel_eval(kernel, g, x, y, jacobian_fn=None):
    return TransportedKernel(kernel, g, jacobian_fn=jacobian_fn).evaluate(x, y)


def _has_features(kernel):
    return isinstance(kernel, SpectralKernel) or (isinstance(kernel, TransportedKernel) and isinstance(kernel.kernel, SpectralKernel))


def nystrom_matrix(kernel, rule):
    """
    :param kernel: A spectral, translation or transported kernel on the rule's measure
    :type rule: QuadratureRule
    :return: OperatorMatrix
    """
    if kernel.measure != rule.measure:
        raise SpectralException("Kernel on {} discretized with a rule on {}".format(kernel.measure, rule.measure))
    # a closed form kernel is discretized pointwise, untruncated
    if _has_features(kernel) and getattr(kernel, 'closed_form', None) is None:
        # factored assembly F^T diag(lambda) F keeps exponential Jacobian factors finite
        features = kernel.weighted_features(rule)
        m = features.T @ (kernel.eigenvalues[:, None] * features)
    else:
        live = rule.weights > 0
        m = np.zeros((rule.size, rule.size))
        nodes = rule.nodes[live]
        sw = rule.sqrt_weights[live]
        m[np.ix_(live, live)] = sw[:, None] * kernel.evaluate(nodes[:, None], nodes[None, :]) * sw[None, :]
    m = 0.5 * (m + m.T)
    log.debug("Nystrom matrix for {} on {}".format(kernel, rule))
    return OperatorMatrix(m, rule, kernel.as_dict())


def _orient(vectors):
    """
    Flip columns so the largest magnitude component is positive
    """
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eig_sym(m):
    """
    Eigen decomposition of a symmetric matrix
    :param m: An OperatorMatrix or a symmetric np.ndarray
    :returns: (eigenvalues descending, orthonormal eigenvectors as columns)
    :raises: SpectralException when the solver fails
    """
    matrix = m.matrix if isinstance(m, OperatorMatrix) else np.asarray(m, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise SpectralException("eig_sym requires a square matrix, found shape {}".format(matrix.shape))
    try:
        values, vectors = eigh(matrix)
    except LinAlgError as e:
        raise SpectralException("Symmetric eigensolver failed for a {0}x{0} matrix: {1}".format(matrix.shape[0], e))
    order = np.argsort(values)[::-1]
    return values[order], _orient(vectors[:, order])


def spectral_filter(kernel, spectral_filter_):
    """
    :type kernel: SpectralKernel
    :type spectral_filter_: HardFilter or SoftFilter
    :return: A new SpectralKernel with attenuated eigenvalues
    """
    factors = spectral_filter_.attenuation(kernel.k_spec)
    tail = kernel.tail_bound
    if isinstance(spectral_filter_, HardFilter) and spectral_filter_.K <= kernel.k_spec:
        tail = 0.0
    return SpectralKernel(kernel.profile, kernel.basis, eigenvalues=kernel.eigenvalues * factors, tail=tail,
                          description="{}|{}".format(kernel.description, spectral_filter_))


def _grid_pairs(grid):
    grid = np.asarray(grid, dtype=float)
    return grid[:, None], grid[None, :]


def conjugation_residual(transported_kernel, grid):
    """
    max over the grid of |K_g(x, y) - sum_k lambda_k (U_g P_k)(x) (U_g P_k)(y)|
    """
    x, y = _grid_pairs(grid)
    return float(np.max(np.abs(transported_kernel.evaluate(x, y) - transported_kernel.spectral_evaluate(x, y))))


def filter_commutation_residual(kernel, g, K, grid):
    """
    Compare transport of the hard-filtered kernel with the hard filter applied to the transported expansion
    """
    x, y = _grid_pairs(grid)
    filtered_then_transported = TransportedKernel(spectral_filter(kernel, HardFilter(K)), g).evaluate(x, y)
    transported = TransportedKernel(kernel, g)
    k_keep = min(K, kernel.k_spec)
    bx = transported._transported_basis(np.broadcast_to(x, np.broadcast(x, y).shape))[:k_keep + 1]
    by = transported._transported_basis(np.broadcast_to(y, np.broadcast(x, y).shape))[:k_keep + 1]
    transported_then_filtered = np.tensordot(kernel.eigenvalues[:k_keep + 1], bx * by, axes=1)
    return float(np.max(np.abs(filtered_then_transported - transported_then_filtered)))


def min_gram_eigenvalue(kernel, points):
    """
    Smallest eigenvalue of [K(x_i, x_j)]
    """
    values = eigh(kernel.matrix(points), eigvals_only=True)
    return float(np.min(values))


def _alignments(values, v, u, k_check):
    """
    |<v_k, u_k>| per index, cosines of the largest principal angle inside near degenerate clusters
    """
    alignment = np.abs(np.sum(v[:, :k_check + 1] * u[:, :k_check + 1], axis=0))
    method = 'vector'
    k = 0
    while k <= k_check:
        j = k
        while j + 1 < len(values) and values[j + 1] > 0 and values[j] / values[j + 1] < DEGENERACY_RATIO:
            j += 1
        if j > k:
            method = 'subspace'
            cosine = math.cos(float(np.max(subspace_angles(v[:, k:j + 1], u[:, k:j + 1]))))
            alignment[k:min(j, k_check) + 1] = cosine
        k = j + 1
    return alignment, method


def verify_spectral_equivariance(kernel, g, rule, k_check, grid=None, jacobian_fn=None):
    """
    Discretize T_g on the rule and compare its top spectrum and eigenvectors with lambda_k and U_g P_k
    :type kernel: SpectralKernel
    :type g: GroupElement
    :param rule: A rule on the kernel measure, oversized for exponential Jacobians
    :type rule: QuadratureRule
    :param k_check: Highest checked index, at most K_spec
    :type k_check: int
    :param grid: Test points for the expansion residual, 21 points on the transported domain by default
    :return: EquivarianceReport
    """
    if k_check > kernel.k_spec:
        raise SpectralException("k_check {} exceeds K_spec {}".format(k_check, kernel.k_spec))
    log.info("Verifying spectral equivariance for {} under {} on {}".format(kernel, g.tag, rule.label))

    transported = TransportedKernel(kernel, g, jacobian_fn=jacobian_fn)
    mu, v = eig_sym(nystrom_matrix(transported, rule))

    features = transported.weighted_features(rule)[:k_check + 1].T
    norms = np.linalg.norm(features, axis=0)
    norms[norms == 0] = 1.0
    u = _orient(features / norms)
    alignment, method = _alignments(kernel.eigenvalues, v, u, k_check)

    rows = list()
    for k in range(k_check + 1):
        lam = float(kernel.eigenvalues[k])
        rows.append({
            'k': k,
            'lambda_true': lam,
            'mu_nystrom': float(mu[k]),
            'rel_err': abs(float(mu[k]) - lam) / lam if lam > 0 else abs(float(mu[k])),
            'alignment': float(alignment[k])
        })

    if grid is None:
        grid = _default_grid(g, kernel.basis)
    residual = conjugation_residual(transported, grid)
    log.debug("Spectral equivariance {}: max rel err {:.3e}, alignment method {}, expansion residual {:.3e}".format(
        g.tag, max(r['rel_err'] for r in rows), method, residual))
    return EquivarianceReport(g, rule.label, rows, residual, kernel.tail_bound, alignment_method=method)


def _default_grid(g, basis, points=21):
    lo, hi = transported_domain(g, basis)
    if basis.family == Family.LEGENDRE_UNIFORM:
        # interior points only, J jumps at the interval ends
        pad = 1e-3 * (hi - lo)
        lo, hi = lo + pad, hi - pad
    return np.linspace(lo, hi, points)
