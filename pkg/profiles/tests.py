"""This module manages the tests for the profiles app."""
import csv
import math
import os
import tempfile

import numpy as np
from django.test import SimpleTestCase

from params.exceptions import SubcriticalDimension
from params.parameters import ModelParams, derive
from profiles.exceptions import TailFitIllConditioned
from profiles.harmonic_map import (
    HALF_PI, boundary_fluxes, check_trapping, eval_u, export_orbit_csv, extract_tail, fit_tail,
    local_decay_rate, pendulum_acceleration, series_start, slope_normalization, solve_profile
)


def rk4_orbit(params, x_start, x_end, step):
    """Integrate the pendulum form with a fixed-step fourth order scheme."""
    def field(state):
        return np.array([state[1], pendulum_acceleration(params, state[0], state[1])])

    state = np.array(series_start(params, x_start))
    count = int(round((x_end - x_start) / step))
    for _ in range(count):
        k1 = field(state)
        k2 = field(state + 0.5 * step * k1)
        k3 = field(state + 0.5 * step * k2)
        k4 = field(state + step * k3)
        state = state + step * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    return state


class SolveProfileTestCase(SimpleTestCase):
    """This class defines the tests for the profile orbit."""

    @classmethod
    def setUpClass(cls):
        """Solve the profiles shared by the tests."""
        super().setUpClass()
        cls.seven = solve_profile(ModelParams(7, 1))
        cls.eight = solve_profile(ModelParams(8, 1))

    def test_series_start(self):
        """Check the orbit leaves the saddle along 2 exp(kx)."""
        sol = self.seven
        self.assertEqual(sol.x_min, -12.0)
        self.assertLess(abs((sol.v[0] + math.pi) / (2.0 * math.exp(sol.x_min)) - 1.0), 1e-10)

    def test_orbit_interior(self):
        """Check -pi < v < 0 and v' > 0 on the grid."""
        for sol in (self.seven, self.eight):
            self.assertTrue(np.all(sol.v > -math.pi))
            self.assertTrue(np.all(sol.v < 0.0))
            self.assertTrue(np.all(sol.v_prime > 0.0))

    def test_trapping_region(self):
        """Check the orbit stays inside the trapping region at d=8."""
        report = check_trapping(self.eight)
        self.assertLessEqual(report.worst, self.eight.tolerance)
        looser = solve_profile(ModelParams(8, 1), tolerance=1e-9)
        self.assertLessEqual(check_trapping(looser).worst, looser.tolerance)

    def test_tail_amplitude_positive(self):
        """Check h > 0 across parameter points."""
        for params in (ModelParams(7, 1), ModelParams(9, 1), ModelParams(12, 2), ModelParams(7.5, 1)):
            sol = self.seven if params == ModelParams(7, 1) else solve_profile(params)
            self.assertGreater(sol.h, 0.0)

    def test_tail_independent_of_range(self):
        """Check h does not depend on x_max."""
        doubled = solve_profile(ModelParams(7, 1), x_max=2.0 * self.seven.x_max)
        self.assertLess(abs(doubled.h / self.seven.h - 1.0), 1e-8)

    def test_three_term_refit(self):
        """Check a refit with an extra exp(-(gamma+2)x) term keeps h."""
        gamma = self.seven.constants.gamma
        refit = extract_tail(self.seven, extra_exponents=(gamma + 2.0,))
        self.assertLess(abs(refit.h / self.seven.h - 1.0), 1e-6)

    def test_self_convergence(self):
        """Check h and C_s under tolerance tightening."""
        coarse = solve_profile(ModelParams(8, 1), tolerance=1e-9)
        self.assertLess(abs(coarse.h / self.eight.h - 1.0), 1e-6)
        self.assertLess(abs(coarse.cs / self.eight.cs - 1.0), 1e-6)

    def test_local_decay_rate(self):
        """Check -v''/v' tends to gamma along the tail."""
        rates = local_decay_rate(self.seven)[self.seven.grid >= self.seven.x_switch]
        self.assertLess(np.max(np.abs(rates - self.seven.constants.gamma)), 1e-5)

    def test_fixed_step_oracle(self):
        """Check the orbit against a fixed-step integrator."""
        state = rk4_orbit(ModelParams(7, 1), -12.0, 4.0, 2.5e-3)
        self.assertAlmostEqual(float(self.seven.v_interpolant(4.0)), state[0], delta=1e-8)
        self.assertAlmostEqual(float(self.seven.v_prime_interpolant(4.0)), state[1], delta=1e-8)

    def test_subcritical(self):
        """Check d=6 is rejected."""
        with self.assertRaises(SubcriticalDimension):
            solve_profile(ModelParams(6, 1))

    def test_ill_conditioned_fit(self):
        """Check a collinear tail model is rejected."""
        sol = self.seven
        with self.assertRaises(TailFitIllConditioned):
            fit_tail(sol.constants, sol.grid, sol.v, sol.x_switch, max_condition=1.0)
        with self.assertRaises(TailFitIllConditioned):
            fit_tail(sol.constants, sol.grid, sol.v, sol.x_max)


class EvalUTestCase(SimpleTestCase):
    """This class defines the tests for the profile evaluation."""

    @classmethod
    def setUpClass(cls):
        """Solve the profile shared by the tests."""
        super().setUpClass()
        cls.sol = solve_profile(ModelParams(7, 1))

    def test_origin(self):
        """Check U*(0) = 0 and U*(xi)/xi -> 1."""
        self.assertEqual(eval_u(self.sol, 0.0), 0.0)
        self.assertAlmostEqual(eval_u(self.sol, 1e-8) / 1e-8, 1.0, places=10)
        self.assertAlmostEqual(eval_u(self.sol, 1e-3) / 1e-3, 1.0, places=5)

    def test_monotone_and_bounded(self):
        """Check U* increases from 0 toward pi/2 without reaching it."""
        values = eval_u(self.sol, np.logspace(-6, 6, 200))
        self.assertTrue(np.all(np.diff(values) > 0.0))
        self.assertTrue(np.all(values < HALF_PI))
        self.assertTrue(np.all(values > 0.0))

    def test_tail_limit(self):
        """Check xi^gamma (pi/2 - U*) tends to h."""
        xi = math.exp(10.0)
        gamma = self.sol.constants.gamma
        estimate = xi ** gamma * (HALF_PI - eval_u(self.sol, xi))
        self.assertLess(abs(estimate / self.sol.h - 1.0), 1e-2)

    def test_switch_continuity(self):
        """Check the tail formula joins the interpolant."""
        x = self.sol.x_switch
        inner = eval_u(self.sol, math.exp(x))
        outer = eval_u(self.sol, math.exp(x + 1e-9))
        self.assertAlmostEqual(inner, outer, places=12)


class SlopeTestCase(SimpleTestCase):
    """This class defines the tests for the slope normalization."""

    def test_degree_one(self):
        """Check 0 < C_s <= 1 for k=1, the origin slope being 1."""
        for d in (7, 8, 9):
            cs = solve_profile(ModelParams(d, 1)).cs
            self.assertGreater(cs, 0.0)
            self.assertLessEqual(cs, 1.0 + 1e-12)

    def test_step_convergence(self):
        """Check halving the grid step keeps C_s at k=2."""
        sol = solve_profile(ModelParams(12, 2))
        finer = solve_profile(ModelParams(12, 2), step=0.5 * 5e-3)
        self.assertGreater(sol.cs, 0.0)
        self.assertLess(abs(finer.cs - sol.cs), 1e-8)
        self.assertEqual(slope_normalization(sol), sol.cs)


class TrappingFluxTestCase(SimpleTestCase):
    """This class defines the tests for the trapping-region fluxes."""

    def setUp(self):
        """Build the parameter point."""
        self.params = ModelParams(8, 1)
        self.constants = derive(self.params)

    def test_fluxes_at_quarter_turn(self):
        """Check the fluxes at v = -pi/2."""
        fluxes = boundary_fluxes(self.params, self.constants, -0.5 * math.pi)
        self.assertAlmostEqual(float(fluxes['lower']), 1.0, places=14)
        self.assertAlmostEqual(float(fluxes['upper']), self.constants.gamma ** 2, places=13)

    def test_fluxes_vanish_at_ends(self):
        """Check both fluxes vanish at the stationary points."""
        fluxes = boundary_fluxes(self.params, self.constants, np.array([-math.pi + 1e-9, -1e-9]))
        for name in ('lower', 'upper'):
            self.assertTrue(np.all(np.abs(fluxes[name]) < 1e-8))

    def test_fluxes_match_direct_product(self):
        """Check the closed forms against the field dotted with the inward normals."""
        report = check_trapping(solve_profile(self.params), samples=32)
        self.assertEqual(len(report.boundary_flux_samples), 32)
        for sample in report.boundary_flux_samples:
            self.assertGreater(sample['lower'], 0.0)
            self.assertGreater(sample['upper'], 0.0)
            self.assertAlmostEqual(sample['lower'], sample['lower_dot'], places=10)
            self.assertAlmostEqual(sample['upper'], sample['upper_dot'], places=10)


class ExportTestCase(SimpleTestCase):
    """This class defines the tests for the orbit export."""

    def test_export(self):
        """Check the csv header and row count."""
        sol = solve_profile(ModelParams(8, 1))
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'orbit.csv')
            export_orbit_csv(sol, path)
            with open(path, newline='') as handle:
                rows = list(csv.reader(handle))
        self.assertEqual(rows[0], ['x', 'v', 'vPrime'])
        self.assertEqual(len(rows), sol.grid.size + 1)
