"""This module manages the tests for the coupling app."""
import dataclasses
import math

import numpy as np
from django.test import SimpleTestCase

from coupling.exceptions import RegimeMismatch
from coupling.integrals import (
    coupling_constants, g_function, inner_constant, inner_integral, outer_constant, outer_integral, sine_defect,
    tail_amplitude, truncated_integrals
)
from params.exceptions import DegenerateRegime
from params.parameters import ModelParams, Regime, degenerate_dimension
from profiles.harmonic_map import solve_profile
from spectral.basis import build_basis

PROFILES = {}


def profile_and_basis(d, k, max_n=3):
    """Return a cached profile with a fresh basis."""
    params = ModelParams(d, k)
    if params not in PROFILES:
        PROFILES[params] = solve_profile(params)
    return PROFILES[params], build_basis(params, max_n)


class GFunctionTestCase(SimpleTestCase):
    """This class defines the tests for the coupling function g."""

    @classmethod
    def setUpClass(cls):
        """Solve the profile shared by the tests."""
        super().setUpClass()
        cls.profile, _ = profile_and_basis(7, 1)

    def test_origin(self):
        """Check g(0) = k(d+k-2) pi/2."""
        self.assertAlmostEqual(g_function(self.profile, 0.0), 3.0 * math.pi, places=12)
        self.assertAlmostEqual(g_function(self.profile, 1e-9), 3.0 * math.pi, places=6)

    def test_positive(self):
        """Check g > 0 on (0, inf)."""
        values = g_function(self.profile, np.logspace(-8, 14, 400))
        self.assertTrue(np.all(values > 0.0))

    def test_tail(self):
        """Check xi^(3 gamma) g(xi) tends to 2k(d+k-2)h^3/3."""
        gamma = self.profile.constants.gamma
        amplitude = tail_amplitude(self.profile)
        for x in (self.profile.x_switch - 1.0, self.profile.x_switch + 5.0):
            xi = math.exp(x)
            self.assertLess(abs(xi ** (3.0 * gamma) * g_function(self.profile, xi) / amplitude - 1.0), 1e-6)

    def test_sine_defect_series(self):
        """Check the small-argument branch joins the direct one."""
        v = np.array([-0.0099999, -0.0100001])
        direct = np.sin(v) - v
        self.assertTrue(np.allclose(sine_defect(v), direct, rtol=1e-9, atol=0.0))
        self.assertAlmostEqual(float(sine_defect(np.array([-1e-8]))[0]) / (1e-24 / 6.0), 1.0, places=12)


class InnerConstantTestCase(SimpleTestCase):
    """This class defines the tests for the inner-dominated constants."""

    @classmethod
    def setUpClass(cls):
        """Solve the profile and the basis shared by the tests."""
        super().setUpClass()
        cls.profile, cls.basis = profile_and_basis(7, 1)

    def test_positive_and_schemes_agree(self):
        """Check D_1 with two independent quadratures."""
        adaptive = inner_constant(self.profile, self.basis, 1)
        simpson = inner_constant(self.profile, self.basis, 1, method='simpson')
        self.assertGreater(adaptive, 0.0)
        self.assertLess(abs(simpson / adaptive - 1.0), 1e-6)

    def test_tail_cut_consistency(self):
        """Check moving the closed-form tail cutoff keeps the integral."""
        reference = inner_integral(self.profile)
        halved = inner_integral(self.profile, x_cut=0.5 * self.profile.x_switch)
        self.assertLess(abs(halved / reference - 1.0), 1e-8)

    def test_linear_in_origin_coefficient(self):
        """Check the constant scales with c_n."""
        scaled = dataclasses.replace(self.basis, c_origin=2.0 * self.basis.c_origin)
        self.assertAlmostEqual(inner_constant(self.profile, scaled, 1) / inner_constant(self.profile, self.basis, 1),
                               2.0, places=12)

    def test_wrong_regime(self):
        """Check the outer constant is refused at d=7."""
        with self.assertRaises(RegimeMismatch):
            outer_constant(self.profile, self.basis, 1, 1)
        with self.assertRaises(RegimeMismatch):
            outer_integral(self.basis, 1, 1)


class OuterConstantTestCase(SimpleTestCase):
    """This class defines the tests for the outer-dominated constants."""

    @classmethod
    def setUpClass(cls):
        """Solve the profile and the basis shared by the tests."""
        super().setUpClass()
        cls.profile, cls.basis = profile_and_basis(9, 1)

    def test_positive_and_schemes_agree(self):
        """Check D_1 at d=9 against power-law subtraction."""
        gauss = outer_constant(self.profile, self.basis, 1, 1)
        subtraction = outer_constant(self.profile, self.basis, 1, 1, method='subtraction')
        self.assertGreater(gauss, 0.0)
        self.assertLess(abs(subtraction / gauss - 1.0), 1e-6)

    def test_node_doubling(self):
        """Check the Gauss value is stable under node doubling."""
        base = outer_integral(self.basis, 1, 1)
        doubled = outer_integral(self.basis, 1, 1, nodes=2 * self.basis.nodes)
        self.assertLess(abs(doubled / base - 1.0), 1e-8)

    def test_linear_in_projected_function(self):
        """Check the constant scales with phi_n for n != N."""
        norm = self.basis.norm.copy()
        norm[2] *= 2.0
        scaled = dataclasses.replace(self.basis, norm=norm)
        ratio = outer_integral(scaled, 1, 2) / outer_integral(self.basis, 1, 2)
        self.assertAlmostEqual(ratio, 2.0, places=10)

    def test_wrong_regime(self):
        """Check the inner constant is refused at d=9."""
        with self.assertRaises(RegimeMismatch):
            inner_constant(self.profile, self.basis, 1)


class CouplingConstantsTestCase(SimpleTestCase):
    """This class defines the tests for the regime dispatch."""

    def test_positive_leading_constant(self):
        """Check D_N > 0 at the reference constructions."""
        for d, k, index in ((7, 1, 1), (8, 1, 1), (9, 1, 1), (12, 2, 2)):
            profile, basis = profile_and_basis(d, k)
            constants = coupling_constants(profile, basis, index)
            self.assertGreater(constants.d_index, 0.0)
            self.assertEqual(constants.delta, profile.constants.delta)

    def test_dispatch(self):
        """Check the regime follows omega against 2 gamma."""
        profile, basis = profile_and_basis(8, 1)
        constants = coupling_constants(profile, basis, 1)
        self.assertEqual(constants.regime, Regime.INNER_DOMINATED)
        self.assertIsNotNone(constants.diagnostics['inner_integral'])
        profile, basis = profile_and_basis(9, 1)
        constants = coupling_constants(profile, basis, 1)
        self.assertEqual(constants.regime, Regime.OUTER_DOMINATED)
        self.assertIsNotNone(constants.diagnostics['outer_integral'])

    def test_seven_dimensions_exponent(self):
        """Check delta = 1 at d=7."""
        profile, basis = profile_and_basis(7, 1)
        self.assertAlmostEqual(coupling_constants(profile, basis, 1).delta, 1.0, places=14)

    def test_degenerate(self):
        """Check the degenerate dimension is refused."""
        with self.assertRaises(DegenerateRegime):
            solve_profile(ModelParams(degenerate_dimension(1), 1))


class DominanceTestCase(SimpleTestCase):
    """This class defines the tests for the crossover dominance check."""

    def test_inner_dominates_at_seven(self):
        """Check I_out / I_inn shrinks with epsilon at d=7."""
        profile, basis = profile_and_basis(7, 1)
        ratios = []
        for epsilon in (1e-2, 1e-3, 1e-4):
            values = truncated_integrals(profile, basis, 1, 1, epsilon)
            ratios.append(abs(values['outer'] / values['inner']))
        self.assertTrue(ratios[0] > ratios[1] > ratios[2])

    def test_outer_dominates_at_nine(self):
        """Check I_inn / I_out shrinks with epsilon at d=9."""
        profile, basis = profile_and_basis(9, 1)
        ratios = []
        for epsilon in (1e-2, 1e-3, 1e-4):
            values = truncated_integrals(profile, basis, 1, 1, epsilon)
            ratios.append(abs(values['inner'] / values['outer']))
        self.assertTrue(ratios[0] > ratios[1] > ratios[2])
