# -*- coding: utf-8 -*-
import math
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from twinkernel.exceptions import QuadratureException
from twinkernel.orthopoly import HERMITE, LEGENDRE, eval_basis
from twinkernel.quadrature import (GAUSSIAN_STD, LEBESGUE_R, UNIFORM_PM1, christoffel_weights, gauss_rule, gram_matrix,
                                   inner_product, integrate, interval_rule, lebesgue_rule, raw_moment,
                                   tridiagonal_ql)


class TestGaussRule(unittest.TestCase):

    def test_hermite_single_node(self):
        rule = gauss_rule(HERMITE, 1)
        np.testing.assert_allclose(rule.nodes, [0.0], atol=1e-15)
        np.testing.assert_allclose(rule.weights, [1.0], rtol=1e-15)
        self.assertEqual(rule.exact_degree, 1)

    def test_hermite_two_nodes(self):
        rule = gauss_rule(HERMITE, 2)
        np.testing.assert_allclose(rule.nodes, [-1.0, 1.0], rtol=1e-14)
        np.testing.assert_allclose(rule.weights, [0.5, 0.5], rtol=1e-14)

    def test_legendre_two_nodes(self):
        rule = gauss_rule(LEGENDRE, 2)
        r = 1.0 / math.sqrt(3.0)
        np.testing.assert_allclose(rule.nodes, [-r, r], rtol=1e-14)
        np.testing.assert_allclose(rule.weights, [0.5, 0.5], rtol=1e-14)
        self.assertEqual(rule.measure, UNIFORM_PM1)

    def test_nodes_ascending(self):
        for basis in (HERMITE, LEGENDRE):
            rule = gauss_rule(basis, 40)
            self.assertTrue(np.all(np.diff(rule.nodes) > 0))

    def test_mass(self):
        for basis in (HERMITE, LEGENDRE):
            for m in (1, 5, 64, 128):
                rule = gauss_rule(basis, m)
                self.assertAlmostEqual(np.sum(rule.weights), 1.0, delta=1e-12)

    def test_moments_against_oracle(self):
        rule = gauss_rule(HERMITE, 10)
        for k in range(20):
            self.assertAlmostEqual(integrate(rule.nodes ** k, rule), raw_moment(GAUSSIAN_STD, k),
                                   delta=1e-10 * max(1.0, raw_moment(GAUSSIAN_STD, k)))
        rule = gauss_rule(LEGENDRE, 10)
        for k in range(20):
            self.assertAlmostEqual(integrate(rule.nodes ** k, rule), raw_moment(UNIFORM_PM1, k), delta=1e-13)

    def test_orthonormality(self):
        for basis in (HERMITE, LEGENDRE):
            rule = gauss_rule(basis, 64)
            gram = gram_matrix(eval_basis(basis, 30, rule.nodes), rule)
            self.assertLessEqual(np.max(np.abs(gram - np.eye(31))), 1e-10)

    def test_christoffel_weights_match_first_components(self):
        rule = gauss_rule(LEGENDRE, 20)
        np.testing.assert_allclose(rule.weights, rule.first_components, rtol=1e-10)

    def test_christoffel_weights_three_nodes(self):
        r = math.sqrt(3.0)
        np.testing.assert_allclose(christoffel_weights(HERMITE, [-r, 0.0, r], 3), [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], rtol=1e-14)

    def test_large_rule_underflow_is_harmless(self):
        rule = gauss_rule(HERMITE, 400)
        self.assertTrue(np.all(rule.weights >= 0))
        self.assertAlmostEqual(integrate(np.ones(rule.size), rule), 1.0, delta=1e-10)

    def test_invalid_size(self):
        self.assertRaisesRegex(QuadratureException, "positive integer", gauss_rule, HERMITE, 0)
        self.assertRaisesRegex(QuadratureException, "positive integer", gauss_rule, HERMITE, 2.5)

    def test_rules_are_cached(self):
        self.assertIs(gauss_rule(HERMITE, 12), gauss_rule(HERMITE, 12))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=1, max_value=30), st.integers(min_value=0, max_value=59))
    def test_exact_degree(self, m, k):
        rule = gauss_rule(LEGENDRE, m)
        if k <= rule.exact_degree:
            self.assertAlmostEqual(integrate(rule.nodes ** k, rule), raw_moment(UNIFORM_PM1, k), delta=1e-12)


class TestIntegrate(unittest.TestCase):

    def test_constant(self):
        rule = gauss_rule(HERMITE, 8)
        self.assertAlmostEqual(integrate(np.ones(8), rule), 1.0, delta=1e-14)

    def test_second_moment(self):
        rule = gauss_rule(HERMITE, 2)
        self.assertAlmostEqual(integrate(rule.nodes ** 2, rule), 1.0, delta=1e-14)

    def test_odd_symmetry(self):
        rule = gauss_rule(LEGENDRE, 1)
        self.assertAlmostEqual(integrate(rule.nodes, rule), 0.0, delta=1e-15)

    def test_length_mismatch(self):
        rule = gauss_rule(HERMITE, 4)
        self.assertRaisesRegex(QuadratureException, "Expected 4 values", integrate, np.ones(3), rule)
        self.assertRaisesRegex(QuadratureException, "Expected 4 values", inner_product, np.ones(4), np.ones(5), rule)

    def test_inner_product(self):
        rule = gauss_rule(HERMITE, 6)
        p = eval_basis(HERMITE, 3, rule.nodes)
        self.assertAlmostEqual(inner_product(p[2], p[2], rule), 1.0, delta=1e-13)
        self.assertAlmostEqual(inner_product(p[1], p[3], rule), 0.0, delta=1e-13)

    def test_gram_shape_mismatch(self):
        rule = gauss_rule(HERMITE, 4)
        self.assertRaisesRegex(QuadratureException, "rows of 4", gram_matrix, np.ones((2, 3)), rule)


class TestDerivedRules(unittest.TestCase):

    def test_interval_rule(self):
        rule = interval_rule(LEGENDRE, -0.25, 0.75, 10)
        # int_{-1/4}^{3/4} dx / 2
        self.assertAlmostEqual(np.sum(rule.weights), 0.5, delta=1e-14)
        self.assertAlmostEqual(integrate(rule.nodes, rule), (0.75 ** 2 - 0.25 ** 2) / 4.0, delta=1e-14)

    def test_interval_rule_outside(self):
        self.assertRaisesRegex(QuadratureException, "not a subinterval", interval_rule, LEGENDRE, -2.0, 0.0, 4)

    def test_lebesgue_rule(self):
        rule = lebesgue_rule(LEGENDRE, -10.0, 10.0, 200)
        self.assertEqual(rule.measure, LEBESGUE_R)
        density = np.exp(-0.5 * rule.nodes ** 2) / math.sqrt(2.0 * math.pi)
        self.assertAlmostEqual(integrate(density, rule), 1.0, delta=1e-12)

    def test_raw_moment_lebesgue(self):
        self.assertRaisesRegex(QuadratureException, "not finite", raw_moment, LEBESGUE_R, 2)


class TestTridiagonalQL(unittest.TestCase):

    def test_against_dense_solver(self):
        rng = np.random.default_rng(3)
        d = rng.normal(size=12)
        e = rng.normal(size=11)
        values, first = tridiagonal_ql(d, e)
        dense = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
        expected, vectors = np.linalg.eigh(dense)
        np.testing.assert_allclose(values, expected, atol=1e-12)
        np.testing.assert_allclose(first ** 2, vectors[0] ** 2, atol=1e-12)

    def test_non_convergence(self):
        self.assertRaisesRegex(QuadratureException, "did not converge", tridiagonal_ql, [0.0, 1.0, 2.0], [1.0, 1.0], max_sweeps=0)
