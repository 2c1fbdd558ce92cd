# -*- coding: utf-8 -*-
import math
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from twinkernel.exceptions import TransportException
from twinkernel.orthopoly import HERMITE, LEGENDRE, eval_basis
from twinkernel.quadrature import GAUSSIAN_STD, LEBESGUE_R, UNIFORM_PM1, gauss_rule, gram_matrix
from twinkernel.transport import (GroupElement, JacobianFn, Variant, alternative_form_deviation, check_supported,
                                  induced_rule, jacobian, pullback_inner_product, pullback_norm, transport,
                                  transported_basis_at, transported_basis_values, transported_domain)


class TestGroupElement(unittest.TestCase):

    def test_action_and_inverse(self):
        g = GroupElement.affine(0.5, 0.25)
        self.assertAlmostEqual(g.act(1.0), 0.75)
        self.assertAlmostEqual(g.inverse().act(0.75), 1.0)
        self.assertEqual(GroupElement.dilation(2.0).inverse(), GroupElement.dilation(0.5))
        self.assertEqual(GroupElement.translation(2.0).inverse(), GroupElement.translation(-2.0))

    def test_compose(self):
        g = GroupElement.affine(0.5, 0.25)
        h = GroupElement.affine(2.0, -1.0)
        x = np.linspace(-3, 3, 11)
        np.testing.assert_allclose(g.compose(h).act(x), g.act(h.act(x)))
        self.assertEqual(GroupElement.translation(1.0).compose(GroupElement.translation(2.0)), GroupElement.translation(3.0))

    def test_compose_with_identity(self):
        identity = GroupElement.identity()
        for g in (GroupElement.dilation(2.0), GroupElement.affine(0.5, 0.25), GroupElement.translation(-1.0)):
            self.assertEqual(identity.compose(g), g)
            self.assertEqual(g.compose(identity), g)
        self.assertTrue(identity.compose(identity).is_identity)

    def test_compose_mixed_variants(self):
        self.assertRaisesRegex(TransportException, "Cannot compose", GroupElement.translation(1.0).compose,
                               GroupElement.dilation(2.0))
        g = GroupElement.translation(1.0).to_affine().compose(GroupElement.dilation(2.0).to_affine())
        self.assertEqual(g, GroupElement.affine(2.0, 1.0))

    def test_invalid_parameters(self):
        self.assertRaisesRegex(TransportException, "finite and positive", GroupElement.dilation, 0.0)
        self.assertRaisesRegex(TransportException, "finite and positive", GroupElement.affine, -1.0, 0.0)
        self.assertRaisesRegex(TransportException, "Bandwidth must be positive", GroupElement.bandwidth, 0.0)

    def test_tags(self):
        self.assertEqual(GroupElement.identity().tag, 'identity')
        self.assertEqual(GroupElement.translation(2.0).tag, 'translation_b2')
        self.assertEqual(GroupElement.dilation(0.8).tag, 'dilation_alpha0.8')
        self.assertEqual(GroupElement.affine(0.5, 0.25).tag, 'affine_a0.5_b0.25')

    def test_from_dict(self):
        self.assertEqual(GroupElement.from_dict({'variant': 'translation', 'b': 2}), GroupElement.translation(2.0))
        self.assertTrue(GroupElement.from_dict({'variant': 'identity'}).is_identity)
        self.assertRaisesRegex(TransportException, "Unknown group variant", GroupElement.from_dict, {'variant': 'rotation'})
        self.assertRaisesRegex(TransportException, "Unknown parameters", GroupElement.from_dict, {'variant': 'dilation', 'b': 1})
        self.assertRaisesRegex(TransportException, "'variant' field", GroupElement.from_dict, {'a': 1})

    def test_identity_as_dict(self):
        self.assertEqual(GroupElement.identity().as_dict(), {'variant': 'identity'})
        self.assertEqual(GroupElement.translation(0.0).as_dict(), {'variant': 'identity'})
        self.assertEqual(GroupElement.from_dict(GroupElement.identity().as_dict()), GroupElement.identity())

    def test_as_dict_round_trip(self):
        g = GroupElement.affine(0.5, -0.25)
        self.assertEqual(GroupElement.from_dict(g.as_dict()), g)


class TestJacobian(unittest.TestCase):

    def test_translation(self):
        x = np.array([-1.0, 0.0, 1.5])
        np.testing.assert_allclose(jacobian(GroupElement.translation(2.0), GAUSSIAN_STD, x), np.exp(2.0 * x - 2.0))

    def test_dilation_gaussian(self):
        alpha = 0.8
        x = np.array([0.0, 1.0])
        expected = np.exp(0.5 * (1.0 - alpha ** -2) * x * x) / alpha
        np.testing.assert_allclose(jacobian(GroupElement.dilation(alpha), GAUSSIAN_STD, x), expected)

    def test_dilation_lebesgue(self):
        self.assertAlmostEqual(jacobian(GroupElement.dilation(2.0), LEBESGUE_R, 3.0), 0.5)

    def test_affine_uniform(self):
        g = GroupElement.affine(0.5, 0.25)
        np.testing.assert_allclose(jacobian(g, UNIFORM_PM1, np.array([-0.5, 0.0, 0.5, 0.9])), [0.0, 2.0, 2.0, 0.0])

    def test_jacobian_is_a_density(self):
        # int J_g dmu = 1
        rule = gauss_rule(HERMITE, 400)
        for g in (GroupElement.translation(2.0), GroupElement.dilation(0.8), GroupElement.dilation(1.25)):
            j = jacobian(g, GAUSSIAN_STD, rule.nodes)
            live = rule.weights > 0
            self.assertAlmostEqual(np.dot(rule.weights[live], j[live]), 1.0, delta=1e-10)

    def test_unsupported_pairs(self):
        self.assertRaisesRegex(TransportException, "Unsupported pair", check_supported, GroupElement.affine(0.5, 0.1), GAUSSIAN_STD)
        self.assertRaisesRegex(TransportException, "Unsupported pair", check_supported, GroupElement.translation(1.0), UNIFORM_PM1)
        self.assertRaisesRegex(TransportException, r"a \+ \|b\| > 1", check_supported, GroupElement.affine(0.8, 0.5), UNIFORM_PM1)

    def test_identity_is_always_supported(self):
        for measure in (GAUSSIAN_STD, UNIFORM_PM1, LEBESGUE_R):
            check_supported(GroupElement.identity(), measure)
            self.assertEqual(jacobian(GroupElement.identity(), measure, 0.3), 1.0)

    def test_corrupt_sign(self):
        g = GroupElement.translation(2.0)
        x = np.array([0.5])
        np.testing.assert_allclose(JacobianFn(g, GAUSSIAN_STD, corrupt_sign=True)(x), np.exp(-(2.0 * x - 2.0)))
        np.testing.assert_allclose(JacobianFn(GroupElement.identity(), GAUSSIAN_STD, corrupt_sign=True)(x), [1.0])


class TestTransport(unittest.TestCase):

    def test_transport_of_constant(self):
        g = GroupElement.translation(2.0)
        f = transport(g, lambda y: np.ones_like(y), GAUSSIAN_STD)
        x = np.array([0.0, 1.0])
        np.testing.assert_allclose(f(x), np.exp(0.5 * (2.0 * x - 2.0)))

    def test_unitarity(self):
        for g, basis in ((GroupElement.translation(2.0), HERMITE), (GroupElement.translation(-2.0), HERMITE),
                         (GroupElement.dilation(0.8), HERMITE), (GroupElement.dilation(1.25), HERMITE),
                         (GroupElement.affine(0.5, 0.25), LEGENDRE)):
            rule = induced_rule(g, basis, 400)
            gram = gram_matrix(transported_basis_values(g, basis, 10, rule), rule)
            self.assertLessEqual(np.max(np.abs(gram - np.eye(11))), 1e-6, msg=g.tag)

    def test_corrupt_jacobian_breaks_unitarity(self):
        g = GroupElement.translation(2.0)
        rule = induced_rule(g, HERMITE, 400)
        rows = transported_basis_values(g, HERMITE, 4, rule, jacobian_fn=JacobianFn(g, GAUSSIAN_STD, corrupt_sign=True))
        self.assertGreater(np.max(np.abs(gram_matrix(rows, rule) - np.eye(5))), 1e-2)

    def test_legendre_support(self):
        g = GroupElement.affine(0.5, 0.25)
        values = transported_basis_at(g, LEGENDRE, 2, np.array([-0.5, 0.25, 0.9]))
        np.testing.assert_allclose(values[:, 0], 0.0)
        np.testing.assert_allclose(values[:, 2], 0.0)
        np.testing.assert_allclose(values[:, 1], math.sqrt(2.0) * eval_basis(LEGENDRE, 2, 0.0))

    def test_identity_vanishes_outside_support(self):
        x = np.array([1.5, -2.0, 0.5])
        f = transport(GroupElement.identity(), lambda y: np.ones_like(y), UNIFORM_PM1)
        np.testing.assert_array_equal(f(x), [0.0, 0.0, 1.0])
        values = transported_basis_at(GroupElement.identity(), LEGENDRE, 3, x)
        np.testing.assert_array_equal(values[:, :2], 0.0)
        np.testing.assert_allclose(values[:, 2], eval_basis(LEGENDRE, 3, 0.5))
        np.testing.assert_array_equal(jacobian(GroupElement.identity(), UNIFORM_PM1, x), [0.0, 0.0, 1.0])

    def test_pullback_inner_product(self):
        g = GroupElement.translation(2.0)
        rule = gauss_rule(HERMITE, 40)
        f2 = transport(g, HERMITE.function(2), GAUSSIAN_STD)
        f3 = transport(g, HERMITE.function(3), GAUSSIAN_STD)
        self.assertAlmostEqual(pullback_inner_product(g, f2, f2, rule), 1.0, delta=1e-12)
        self.assertAlmostEqual(pullback_inner_product(g, f2, f3, rule), 0.0, delta=1e-12)
        self.assertAlmostEqual(pullback_norm(g, f3, rule), 1.0, delta=1e-12)

    def test_transported_domain(self):
        self.assertEqual(transported_domain(GroupElement.affine(0.5, 0.25), LEGENDRE), (-0.25, 0.75))
        self.assertEqual(transported_domain(GroupElement.identity(), LEGENDRE), (-1.0, 1.0))
        self.assertEqual(transported_domain(GroupElement.dilation(0.8), HERMITE), (-2.0, 2.0))

    def test_alternative_forms(self):
        report = alternative_form_deviation(0.8, HERMITE, 5, gauss_rule(HERMITE, 400))
        self.assertIn('prefactor', report)
        self.assertIn('gaussian_factor', report)
        # neither form carries the full Jacobian factor, so both lose orthonormality (1/alpha = 1.25 at k = 0)
        for form in ('prefactor', 'gaussian_factor'):
            self.assertGreater(report[form]['max_weighted_deviation'], 1e-3)
            self.assertGreater(report[form]['gram_deviation'], 0.2)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(min_value=0.2, max_value=0.9), st.floats(min_value=-0.1, max_value=0.1),
           st.floats(min_value=0.5, max_value=2.0), st.floats(min_value=-1.0, max_value=1.0))
    def test_homomorphism(self, a, b, a2, b2):
        g = GroupElement.affine(a, b)
        h = GroupElement.affine(a2, b2)
        x = np.linspace(-2, 2, 9)
        np.testing.assert_allclose(g.compose(h).act(x), g.act(h.act(x)), rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(g.compose(g.inverse()).act(x), x, atol=1e-12)

    def test_variant_enum(self):
        self.assertEqual(Variant('affine'), Variant.AFFINE)
