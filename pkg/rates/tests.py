"""This module manages the tests for the rates app."""
import math

import numpy as np
from django.test import SimpleTestCase, TestCase
from rest_framework import status
from rest_framework.test import APIClient

from coupling.integrals import coupling_constants
from params.exceptions import InvalidParameters, SubcriticalDimension
from params.parameters import ModelParams, classify
from profiles.harmonic_map import HALF_PI, solve_profile
from rates.dynamics import (
    RateKind, ReducedConstants, assemble_ansatz, closed_form_epsilon, codimension, coefficient_flow,
    gauge_shift, matching_requirement, predict_rate, solve_epsilon
)
from rates.exceptions import BlowupOfEpsilon, NegativeEigenvalue
from rates.pipeline import constants_table, predict
from spectral.basis import build_basis

STAGES = {}


def stages(d, k, index, max_n=3):
    """Return a cached profile, basis and coupling for (d, k, N)."""
    key = (d, k, index, max_n)
    if key not in STAGES:
        params = ModelParams(d, k)
        profile = solve_profile(params)
        basis = build_basis(params, max_n)
        STAGES[key] = (profile, basis, coupling_constants(profile, basis, index))
    return STAGES[key]


def synthetic(eigenvalues, d_values, index=1, gamma=2.0, delta=1.0, h=1.0, c_values=(0.5, 0.6, 0.7, 0.8)):
    """Build reduced constants without running the upstream stages."""
    return ReducedConstants(
        params=ModelParams(7, 1),
        index=index,
        gamma=gamma,
        delta=delta,
        h=h,
        eigenvalues=np.array(eigenvalues, dtype=float),
        d_values=np.array(d_values, dtype=float),
        c_values=np.array(c_values, dtype=float),
    )


class SolveEpsilonTestCase(SimpleTestCase):
    """This class defines the tests for the boundary-layer scale."""

    def test_linear_decay(self):
        """Check eps = eps0 exp(-lambda s / gamma) without coupling."""
        constants = synthetic([-1.0, 0.5, 1.5, 2.5], [0.0, 0.0, 0.0, 0.0])
        trajectory = solve_epsilon(constants, 0.05)
        expected = 0.05 * np.exp(-0.5 * trajectory.s / 2.0)
        self.assertLess(np.max(np.abs(trajectory.epsilon / expected - 1.0)), 1e-9)

    def test_power_against_closed_form(self):
        """Check the numerical trajectory against the Bernoulli solution for lambda_N > 0."""
        constants = synthetic([-0.79, 0.207, 1.207, 2.207], [0.3, 1.2, 0.9, 0.7], gamma=1.586, delta=2.828)
        trajectory = solve_epsilon(constants, 0.05)
        window = (trajectory.s >= 5.0) & (trajectory.s <= 50.0)
        exact = closed_form_epsilon(constants, 0.05, trajectory.s[window])
        self.assertLess(np.max(np.abs(trajectory.epsilon[window] / exact - 1.0)), 1e-6)
        self.assertLess(abs(trajectory.slope + 0.207 / 1.586), 1e-4)
        self.assertIsNone(trajectory.s0)

    def test_neutral_against_closed_form(self):
        """Check the numerical trajectory against the Bernoulli solution for lambda_N = 0."""
        constants = synthetic([-1.0, 0.0, 1.0, 2.0], [0.4, 5.0, 0.8, 1.0])
        trajectory = solve_epsilon(constants, 0.1)
        window = (trajectory.s >= 5.0) & (trajectory.s <= 50.0)
        exact = closed_form_epsilon(constants, 0.1, trajectory.s[window])
        self.assertLess(np.max(np.abs(trajectory.epsilon[window] / exact - 1.0)), 1e-6)

    def test_neutral_asymptotics(self):
        """Check eps^-delta grows with slope 1/C_N^delta from the fitted s0."""
        constants = synthetic([-1.0, 0.0, 1.0, 2.0], [0.4, 5.0, 0.8, 1.0])
        trajectory = solve_epsilon(constants, 0.1)
        scale = constants.scale
        self.assertAlmostEqual(scale, (1.0 * 2.0 / (0.6 * 5.0 * 1.0)) ** 1.0, places=12)
        self.assertLess(abs(trajectory.slope * scale ** constants.delta - 1.0), 1e-6)
        expected_s0 = -constants.gamma * 0.1 ** -constants.delta / (constants.delta * constants.coefficient)
        self.assertLess(abs(trajectory.s0 / expected_s0 - 1.0), 1e-6)
        late = trajectory.s[-1]
        self.assertAlmostEqual(trajectory.epsilon[-1] / (scale * (late - trajectory.s0) ** -1.0), 1.0, places=6)

    def test_strictly_decreasing(self):
        """Check eps decreases and stays positive."""
        constants = synthetic([-1.0, 0.0, 1.0, 2.0], [0.4, 5.0, 0.8, 1.0])
        trajectory = solve_epsilon(constants, 0.1)
        self.assertTrue(np.all(trajectory.epsilon > 0.0))
        self.assertTrue(np.all(np.diff(trajectory.epsilon) < 0.0))

    def test_negative_eigenvalue(self):
        """Check lambda_N < 0 is rejected."""
        constants = synthetic([-1.0, 0.0, 1.0, 2.0], [0.4, 5.0, 0.8, 1.0], index=0)
        with self.assertRaises(NegativeEigenvalue):
            solve_epsilon(constants, 0.01)

    def test_growth(self):
        """Check a negative coupling makes eps grow."""
        constants = synthetic([-1.0, 0.0, 1.0, 2.0], [0.4, -5.0, 0.8, 1.0])
        with self.assertRaises(BlowupOfEpsilon):
            solve_epsilon(constants, 0.1)

    def test_initial_scale_range(self):
        """Check eps0 outside (0, 0.1] is rejected."""
        constants = synthetic([-1.0, 0.0, 1.0, 2.0], [0.4, 5.0, 0.8, 1.0])
        for epsilon0 in (0.0, 0.5):
            with self.assertRaises(InvalidParameters):
                solve_epsilon(constants, epsilon0)


class CoefficientFlowTestCase(SimpleTestCase):
    """This class defines the tests for the outer coefficients."""

    def setUp(self):
        """Integrate the trajectory shared by the tests."""
        self.constants = synthetic([-1.0, 0.0, 1.0, 2.0], [0.4, 5.0, 0.8, 1.0])
        self.trajectory = solve_epsilon(self.constants, 0.1)

    def test_free_decay(self):
        """Check a_n = exp(-lambda_n s) without forcing."""
        constants = synthetic([-1.0, 0.0, 1.0, 2.0], [0.4, 5.0, 0.0, 1.0])
        flow = coefficient_flow(constants, self.trajectory, {2: 1.0}, n_range=[2])
        self.assertTrue(np.allclose(flow.values[2], np.exp(-self.trajectory.s), rtol=1e-9, atol=0.0))

    def test_higher_modes_vanish(self):
        """Check a_n / a_N decreases for n > N past the transient."""
        flow = coefficient_flow(self.constants, self.trajectory, {2: 1.0, 3: -2.0}, n_range=[2, 3])
        late = self.trajectory.s >= 10.0
        for n in (2, 3):
            ratio = np.abs(flow.ratio(n))
            self.assertTrue(np.all(np.diff(ratio[late]) < 0.0))
            self.assertLess(ratio[-1], 0.05)

    def test_lower_mode_with_requirement(self):
        """Check a_0 / a_N vanishes only from the matching value."""
        requirement = matching_requirement(self.constants, self.trajectory, 0)
        self.assertLess(requirement, 0.0)
        flow = coefficient_flow(self.constants, self.trajectory, {0: requirement}, n_range=[0])
        self.assertAlmostEqual(flow.requirements[0], requirement, places=14)
        ratio = np.abs(flow.ratio(0))
        after = self.trajectory.s >= 5.0
        self.assertTrue(np.all(np.diff(ratio[after]) < 0.0))
        self.assertLess(ratio[-1], 0.25 * ratio[after][0])

        detuned = coefficient_flow(self.constants, self.trajectory, {0: requirement + 1e-3}, n_range=[0])
        self.assertGreater(abs(detuned.ratio(0)[-1]), 1.0)

    def test_requirement_needs_growing_mode(self):
        """Check the matching value is refused for lambda_n >= 0."""
        with self.assertRaises(InvalidParameters):
            matching_requirement(self.constants, self.trajectory, 2)

    def test_matched_amplitude(self):
        """Check c_N a_N + h eps^gamma = 0."""
        flow = coefficient_flow(self.constants, self.trajectory, {}, n_range=[1])
        residual = self.constants.c_index * flow.matched + self.constants.h * self.trajectory.epsilon ** 2.0
        self.assertTrue(np.allclose(residual, 0.0, atol=1e-16))


class PredictRateTestCase(SimpleTestCase):
    """This class defines the tests for the rate laws."""

    def test_power_at_eight(self):
        """Check the d=8 law is a power with exponent 1/2 + beta_1."""
        profile, basis, coupling = stages(8, 1, 1)
        law = predict_rate(ModelParams(8, 1), 1, profile, basis, coupling)
        self.assertIs(law.kind, RateKind.POWER)
        self.assertAlmostEqual(law.exponent, 0.6306019, places=6)
        self.assertEqual(law.prefactor, profile.cs)
        self.assertEqual(law.free_parameter, 'epsilon0')
        self.assertGreater(law.prefactor, 0.0)

    def test_logarithmic_at_seven(self):
        """Check the d=7 law is logarithmic with exponent 1/delta = 1."""
        profile, basis, coupling = stages(7, 1, 1)
        law = predict_rate(ModelParams(7, 1), 1, profile, basis, coupling)
        self.assertIs(law.kind, RateKind.LOGARITHMIC)
        self.assertAlmostEqual(law.exponent, 1.0, places=14)
        scale = profile.h * 2.0 / (basis.c_origin[1] * coupling.values[1] * 1.0)
        self.assertAlmostEqual(law.constants['CN'] / scale, 1.0, places=12)
        self.assertAlmostEqual(law.prefactor, profile.cs * scale, places=12)
        self.assertGreater(law.prefactor, 0.0)

    def test_rate_evaluation(self):
        """Check R(t) follows the law's shape."""
        profile, basis, coupling = stages(7, 1, 1)
        law = predict_rate(ModelParams(7, 1), 1, profile, basis, coupling)
        tau = math.exp(-20.0)
        self.assertAlmostEqual(law.evaluate(tau, -0.5) / (law.prefactor * math.sqrt(tau) / 20.5), 1.0, places=12)

    def test_negative_eigenvalue(self):
        """Check N=0 at d=7 is rejected."""
        with self.assertRaises(NegativeEigenvalue):
            predict(7, 1, 0)
        profile, basis, coupling = stages(7, 1, 0)
        with self.assertRaises(NegativeEigenvalue):
            predict_rate(ModelParams(7, 1), 0, profile, basis, coupling)

    def test_subcritical(self):
        """Check d=6 is rejected before any integration."""
        with self.assertRaises(SubcriticalDimension):
            predict(6, 1, 1)

    def test_pipeline_table(self):
        """Check the constants table of a full prediction."""
        prediction = predict(7, 1, 1)
        table = constants_table(prediction)
        self.assertEqual(table['lambda_n'], [-1.0, 0.0, 1.0, 2.0])
        self.assertEqual(table['gamma'], 2.0)
        self.assertEqual(table['delta'], 1.0)
        self.assertGreater(table['DN'], 0.0)
        self.assertGreater(table['CN'], 0.0)

    def test_power_table_without_scale(self):
        """Check C_N is left out of the table of a power law."""
        table = constants_table(predict(8, 1, 1))
        self.assertIsNone(table['CN'])
        self.assertGreater(table['Cs'], 0.0)

    def test_trajectory_from_pipeline(self):
        """Check the d=7 reduced dynamics against the closed form."""
        prediction = predict(7, 1, 1)
        trajectory = solve_epsilon(prediction.reduced, 0.05)
        window = (trajectory.s >= 5.0) & (trajectory.s <= 50.0)
        exact = closed_form_epsilon(prediction.reduced, 0.05, trajectory.s[window])
        self.assertLess(np.max(np.abs(trajectory.epsilon[window] / exact - 1.0)), 1e-6)


class CodimensionTestCase(SimpleTestCase):
    """This class defines the tests for the stability ledger."""

    def test_counts(self):
        """Check the constraint counts."""
        self.assertEqual(codimension(ModelParams(7, 1), 1).effective_unstable, 0)
        ledger = codimension(ModelParams(12, 2), 2)
        self.assertEqual(ledger.constraints, 2)
        self.assertEqual(ledger.effective_unstable, 1)

    def test_higher_degree_unstable(self):
        """Check the smallest admissible N is unstable for k >= 2."""
        for d, k in ((12, 2), (15, 2), (17, 3), (30, 3)):
            minimum = classify(ModelParams(d, k)).min_admissible_index
            self.assertGreaterEqual(codimension(ModelParams(d, k), minimum).effective_unstable, 1)

    def test_negative_eigenvalue(self):
        """Check N=0 has no ledger."""
        with self.assertRaises(NegativeEigenvalue):
            codimension(ModelParams(7, 1), 0)

class GaugeShiftTestCase(SimpleTestCase):
    """This class defines the tests for the blow-up-time gauge."""

    @classmethod
    def setUpClass(cls):
        """Build the basis shared by the tests."""
        super().setUpClass()
        cls.basis = build_basis(ModelParams(8, 1), 3)

    def test_time_derivative_part(self):
        """Check a pure d_s psi projects like psi."""
        one = lambda y: np.ones_like(y)
        zero = lambda y: np.zeros_like(y)
        expected = self.basis.project(one)
        for n in range(4):
            self.assertAlmostEqual(gauge_shift(self.basis, one, zero, n), expected[n], places=10)

    def test_dilation_part(self):
        """Check d_y psi enters through (y/2) d_y psi."""
        one = lambda y: np.ones_like(y)
        zero = lambda y: np.zeros_like(y)
        for n in range(4):
            self.assertAlmostEqual(gauge_shift(self.basis, zero, lambda y: 2.0 / y, n),
                                   gauge_shift(self.basis, one, zero, n), places=10)


class AssembleAnsatzTestCase(SimpleTestCase):
    """This class defines the tests for the global approximate solution."""

    @classmethod
    def setUpClass(cls):
        """Solve the stages shared by the tests."""
        super().setUpClass()
        cls.profile, cls.basis, _ = stages(7, 1, 1)

    def test_origin(self):
        """Check f_N(0) = 0."""
        snapshot = assemble_ansatz(self.profile, self.basis, 1, 1e-2)
        self.assertEqual(snapshot.values[0], 0.0)
        self.assertIn(snapshot.crossover, snapshot.y)
        self.assertTrue(np.all(snapshot.values < HALF_PI + 1e-2))

    def test_jump_shrinks(self):
        """Check the mismatch at K vanishes with eps and stays under its bound."""
        jumps = []
        for epsilon in (1e-2, 1e-3, 1e-4):
            snapshot = assemble_ansatz(self.profile, self.basis, 1, epsilon)
            self.assertLessEqual(snapshot.jump, snapshot.bound + 1e-15)
            self.assertAlmostEqual(snapshot.crossover, math.sqrt(epsilon), places=15)
            jumps.append(snapshot.jump)
        self.assertTrue(jumps[0] > jumps[1] > jumps[2])

    def test_scale_range(self):
        """Check eps outside (0, 0.1] is rejected."""
        with self.assertRaises(InvalidParameters):
            assemble_ansatz(self.profile, self.basis, 1, 0.5)


class PredictionViewTestCase(TestCase):
    """This class defines the tests for the prediction endpoint."""

    def setUp(self):
        """Create the client."""
        self.client = APIClient()

    def test_power(self):
        """Check the d=8 prediction."""
        response = self.client.get('/rates/', {'d': 8, 'k': 1, 'N': 1})
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['rate_law']['kind'], 'power')
        self.assertEqual(response.data['rate_law']['N'], 1)
        self.assertAlmostEqual(response.data['rate_law']['exponent'], 0.6306019, places=6)
        self.assertEqual(response.data['regime'], 'inner')

    def test_domain_error(self):
        """Check a subcritical dimension answers 400 with the message."""
        response = self.client.get('/rates/', {'d': 6, 'k': 1, 'N': 1})
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('d*', response.data['detail'])

    def test_malformed_query(self):
        """Check a missing degree answers 400."""
        response = self.client.get('/rates/', {'d': 8, 'N': 1})
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
