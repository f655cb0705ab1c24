"""This module manages the tests for the params app."""
import math

import numpy as np
from django.test import SimpleTestCase

from params.exceptions import DegenerateRegime, InvalidParameters, SubcriticalDimension
from params.parameters import (
    ModelParams, Regime, beta_curve, classify, critical_dimension, degenerate_dimension, derive, eigenvalue
)


class DeriveTestCase(SimpleTestCase):
    """This class defines the tests for the derived constants."""

    def test_seven_dimensions(self):
        """Check the closed forms at d=7, k=1."""
        constants = derive(ModelParams(7, 1))
        self.assertAlmostEqual(constants.omega, 1.0, places=14)
        self.assertAlmostEqual(constants.gamma, 2.0, places=14)
        self.assertAlmostEqual(constants.delta, 1.0, places=14)
        self.assertEqual(constants.regime, Regime.INNER_DOMINATED)
        self.assertEqual(constants.mu_plus, -constants.gamma)
        self.assertAlmostEqual(constants.mu_minus, -3.0, places=14)

    def test_twelve_dimensions_degree_two(self):
        """Check the closed forms at d=12, k=2."""
        constants = derive(ModelParams(12, 2))
        self.assertAlmostEqual(constants.omega, 2.0, places=14)
        self.assertAlmostEqual(constants.gamma, 4.0, places=14)
        self.assertAlmostEqual(constants.delta, 2.0, places=14)
        self.assertEqual(constants.regime, Regime.INNER_DOMINATED)

    def test_nine_dimensions_is_outer_dominated(self):
        """Check that d=9, k=1 falls in the outer regime."""
        constants = derive(ModelParams(9, 1))
        self.assertAlmostEqual(constants.omega, math.sqrt(17.0), places=13)
        self.assertAlmostEqual(constants.gamma, 1.4384471871911697, places=13)
        self.assertAlmostEqual(constants.delta, 2.0 * constants.gamma, places=14)
        self.assertEqual(constants.regime, Regime.OUTER_DOMINATED)

    def test_eight_dimensions_is_inner_dominated(self):
        """Check that omega = 2 sqrt 2 < 2 gamma at d=8."""
        constants = derive(ModelParams(8, 1))
        self.assertAlmostEqual(constants.omega, 2.0 * math.sqrt(2.0), places=13)
        self.assertEqual(constants.regime, Regime.INNER_DOMINATED)

    def test_subcritical_dimension(self):
        """Check that d <= d* is rejected."""
        with self.assertRaises(SubcriticalDimension):
            derive(ModelParams(6, 1))
        with self.assertRaises(SubcriticalDimension):
            derive(ModelParams(critical_dimension(1), 1))

    def test_degenerate_dimension(self):
        """Check the degenerate point is rejected unless requested."""
        d = degenerate_dimension(1)
        self.assertAlmostEqual(d, 2.0 * (7.0 + 2.0 * math.sqrt(7.0)) / 3.0, places=12)
        with self.assertRaises(DegenerateRegime):
            derive(ModelParams(d, 1))
        self.assertEqual(derive(ModelParams(d, 1), allow_degenerate=True).regime, Regime.DEGENERATE)

    def test_identity_on_grid(self):
        """Check d-2-gamma = gamma+omega across a grid of (d, k)."""
        for k in (1, 2, 3, 4):
            for d in np.linspace(critical_dimension(k) + 1e-3, critical_dimension(k) + 40.0, 25):
                constants = derive(ModelParams(float(d), k), allow_degenerate=True)
                lhs = d - 2.0 - constants.gamma
                rhs = constants.gamma + constants.omega
                self.assertLessEqual(abs(lhs - rhs), 1e-14 * max(1.0, abs(lhs)))
                self.assertGreater(constants.gamma, 0.0)
                self.assertGreater(constants.delta, 0.0)

    def test_stability_bound_on_grid(self):
        """Check (d-2-omega)/4 > k/2 above the critical dimension."""
        for k in range(1, 6):
            for d in np.linspace(critical_dimension(k) + 1e-6, 200.0, 40):
                constants = derive(ModelParams(float(d), k), allow_degenerate=True)
                self.assertGreater((d - 2.0 - constants.omega) / 4.0, k / 2.0)

    def test_limits(self):
        """Check omega vanishes at d* and omega/d tends to one."""
        near = derive(ModelParams(critical_dimension(1) + 1e-10, 1))
        self.assertLess(near.omega, 1e-3)
        self.assertAlmostEqual(near.gamma, (critical_dimension(1) - 2.0) / 2.0, places=3)
        far = derive(ModelParams(1e6, 1))
        self.assertAlmostEqual(far.omega / 1e6, 1.0, places=5)

    def test_invalid_parameters(self):
        """Check malformed parameter points."""
        with self.assertRaises(InvalidParameters):
            ModelParams(7, 0)
        with self.assertRaises(InvalidParameters):
            ModelParams(7, 1, -1)
        with self.assertRaises(ValueError):
            ModelParams(float('nan'), 1)


class SpectrumTestCase(SimpleTestCase):
    """This class defines the tests for the eigenvalues."""

    def test_seven_dimensions(self):
        """Check lambda_0 and lambda_1 at d=7."""
        params = ModelParams(7, 1)
        self.assertAlmostEqual(eigenvalue(params, 0).eigenvalue, -1.0, places=14)
        first = eigenvalue(params, 1)
        self.assertAlmostEqual(first.eigenvalue, 0.0, places=14)
        self.assertAlmostEqual(first.beta, 0.0, places=14)

    def test_eight_dimensions(self):
        """Check beta_1 at d=8."""
        beta = eigenvalue(ModelParams(8, 1), 1).beta
        self.assertAlmostEqual(beta, -0.5 + 2.0 / (6.0 - 2.0 * math.sqrt(2.0)), places=13)
        self.assertAlmostEqual(beta, 0.1306019, places=7)

    def test_nine_dimensions(self):
        """Check beta_1 at d=9."""
        self.assertAlmostEqual(eigenvalue(ModelParams(9, 1), 1).beta, -0.5 + 2.0 / (7.0 - math.sqrt(17.0)), places=12)
        self.assertAlmostEqual(eigenvalue(ModelParams(9, 1), 1).beta, 0.195194, places=5)

    def test_beta_is_eigenvalue_over_gamma(self):
        """Check beta_n = lambda_n / gamma and the unit spacing."""
        for d in (7.5, 8.0, 9.0, 11.3):
            params = ModelParams(d, 1)
            gamma = derive(params).gamma
            previous = None
            for n in range(6):
                entry = eigenvalue(params, n)
                self.assertAlmostEqual(entry.beta, entry.eigenvalue / gamma, places=12)
                if previous is not None:
                    self.assertAlmostEqual(entry.eigenvalue - previous.eigenvalue, 1.0, places=12)
                previous = entry

    def test_sign_of_beta(self):
        """Check beta_N > 0 exactly when N > (d-2-omega)/4."""
        params = ModelParams(8, 1)
        n0 = (8.0 - 2.0 - derive(params).omega) / 4.0
        for n in range(4):
            self.assertEqual(eigenvalue(params, n).beta > 0, n > n0)

    def test_beta_curve_skips_subcritical(self):
        """Check the sweep only reports supercritical dimensions."""
        curve = beta_curve(1, 1, [6.0, 7.0, 8.0])
        self.assertEqual([d for d, _ in curve], [7.0, 8.0])
        self.assertAlmostEqual(curve[0][1], 0.0, places=14)


class ClassifyTestCase(SimpleTestCase):
    """This class defines the tests for the index classification."""

    def test_seven_dimensions(self):
        """Check the neutral index at d=7."""
        ledger = classify(ModelParams(7, 1), index=1)
        self.assertEqual(ledger.neutral_index, 1)
        self.assertEqual(ledger.min_admissible_index, 1)
        self.assertEqual(ledger.unstable_directions, 0)
        self.assertEqual(ledger.stability_bound, 0.5)

    def test_twelve_dimensions_degree_two(self):
        """Check the neutral index at d=12, k=2."""
        ledger = classify(ModelParams(12, 2, 2))
        self.assertEqual(ledger.neutral_index, 2)
        self.assertEqual(ledger.unstable_directions, 1)

    def test_eight_dimensions(self):
        """Check the absence of a neutral index at d=8."""
        ledger = classify(ModelParams(8, 1))
        self.assertIsNone(ledger.neutral_index)
        self.assertEqual(ledger.min_admissible_index, 1)
        self.assertIsNone(ledger.unstable_directions)

    def test_minimal_index_exceeds_bound(self):
        """Check the smallest admissible N is above k/2."""
        for k in (1, 2, 3):
            for d in np.linspace(critical_dimension(k) + 0.01, critical_dimension(k) + 30.0, 20):
                ledger = classify(ModelParams(float(d), k))
                self.assertGreater(ledger.min_admissible_index, ledger.stability_bound)
