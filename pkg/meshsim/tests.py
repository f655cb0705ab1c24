"""This module manages the tests for the meshsim app."""
import math
import os
import tempfile
import unittest
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, override_settings, tag
from rest_framework.exceptions import ValidationError

from meshsim.config import SimConfig
from meshsim.discretization import (
    energy, equidistribute, gradient, jacobian_pattern, origin_slope, physical_rate, smooth
)
from meshsim.exceptions import BadInitialData, NoBlowup, WindowTooShort
from meshsim.fitting import FitKind, fit_log, fit_power, fit_trace, rate_curve
from meshsim.selfsimilar import compare_ansatz, epsilon_from_gradient, project_snapshot, to_self_similar
from meshsim.serializers import SimConfigSerializer
from meshsim.solver import MeshState, MovingMeshSolver, RunTrace, initialize, run
from meshsim.storage import RunDirectory, load_config, write_json
from params.exceptions import InvalidParameters
from profiles.harmonic_map import HALF_PI
from rates.dynamics import assemble_ansatz
from rates.pipeline import cached_prediction
from spectral.basis import default_y_max

SLOW = bool(os.environ.get('BLOWUPLAB_SLOW_TESTS'))

POWER_EXPONENT = 0.6306
LOG_C, LOG_S0, LOG_T = 0.225, -0.436, 0.229


def synthetic_trace(remaining, gradient_values, blowup_time, config=None):
    """Build a trace from T - t samples without running the solver."""
    remaining = np.asarray(remaining, dtype=float)
    size = remaining.size
    return RunTrace(
        config=config,
        t=blowup_time - remaining,
        lag=remaining - remaining[-1],
        dr_u0=np.asarray(gradient_values, dtype=float),
        sup_grad=np.asarray(gradient_values, dtype=float),
        energy=np.zeros(size),
        min_dx=np.ones(size),
        layer_nodes=np.full(size, 201),
        status='blowup',
    )


def power_trace(size=2000):
    """Return R^-1 = (T-t)^-0.6306 with T = 0.25."""
    remaining = np.geomspace(0.25, 0.25e-6, size)
    return synthetic_trace(remaining, remaining ** -POWER_EXPONENT, 0.25)


def log_trace(config=None):
    """Return R^-1 = C (-log(T-t) - s0) / sqrt(T-t) with T = 0.229."""
    remaining = np.geomspace(0.2, math.exp(-14.0), 3000)
    values = LOG_C * (-np.log(remaining) - LOG_S0) / np.sqrt(remaining)
    return synthetic_trace(remaining, values, LOG_T, config=config)


class SimConfigTestCase(SimpleTestCase):
    """This class defines the tests for the simulation configuration."""

    def test_invariants(self):
        """Check the rejected configurations."""
        with self.assertRaises(InvalidParameters):
            SimConfig(d=8.0, k=1, length=0.0)
        with self.assertRaises(InvalidParameters):
            SimConfig(d=8.0, k=1, nodes=32)
        with self.assertRaises(InvalidParameters):
            SimConfig(d=8.0, k=1, max_gradient=1e5)
        with self.assertRaises(InvalidParameters):
            SimConfig(d=8.0, k=1, initial='cos(r)')
        with self.assertRaises(InvalidParameters):
            SimConfig(d=8.0, k=1, initial='tabulated')

    def test_digest(self):
        """Check that the hash follows the content only."""
        self.assertEqual(SimConfig(d=8.0, k=1).digest(), SimConfig(d=8.0, k=1).digest())
        self.assertNotEqual(SimConfig(d=8.0, k=1).digest(), SimConfig(d=8.0, k=1, nodes=401).digest())

    def test_snapshot_levels(self):
        """Check one level per decade by default."""
        self.assertEqual(SimConfig(d=8.0, k=1).snapshot_levels(), tuple(10.0 ** n for n in range(2, 9)))
        self.assertEqual(SimConfig(d=8.0, k=1, snapshot_gradients=(1e4, 1e3)).snapshot_levels(), (1e3, 1e4))

    def test_tabulated_origin(self):
        """Check that tabulated data must vanish at the origin."""
        config = SimConfig(d=8.0, k=1, initial='tabulated', table=((0.0, 0.1), (1.0, 0.5), (2.0, 1.0)))
        with self.assertRaises(BadInitialData):
            config.initial_profile()
        with self.assertRaises(BadInitialData):
            initialize(config)

    def test_tabulated_cover(self):
        """Check that tabulated data must cover the domain."""
        config = SimConfig(d=8.0, k=1, initial='tabulated', table=((0.0, 0.0), (1.0, 0.5)))
        with self.assertRaises(BadInitialData):
            config.initial_profile()


class SimConfigSerializerTestCase(SimpleTestCase):
    """This class defines the tests for the configuration file validation."""

    def test_defaults(self):
        """Check that omitted fields come from the settings."""
        serializer = SimConfigSerializer(data={'d': 8, 'k': 1})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        config = serializer.save()
        self.assertEqual(config.nodes, 201)
        self.assertEqual(config.length, 2.0)
        self.assertEqual(config.initial, 'r')

    @override_settings(BLOWUPLAB={'MESHSIM': {
        'LENGTH': 3.0, 'NODES': 129, 'MONITOR_FLOOR': 1.0, 'UNIFORM_FRACTION': 0.2, 'SMOOTHING_PASSES': 1,
        'MESH_RELAXATION': 0.1, 'RTOL': 1e-5, 'ATOL': 1e-8, 'MAX_GRADIENT': 1e6, 'T_MAX': 0.5,
        'ENERGY_TOLERANCE': 1e-6, 'MAX_RESTARTS': 2,
    }})
    def test_overridden_defaults(self):
        """Check that the defaults are read at validation time."""
        serializer = SimConfigSerializer(data={'d': 8, 'k': 1})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data['nodes'], 129)
        self.assertEqual(serializer.validated_data['length'], 3.0)

    def test_invalid(self):
        """Check the rejected files."""
        self.assertFalse(SimConfigSerializer(data={'d': 8, 'k': 1, 'nodes': 10}).is_valid())
        self.assertFalse(SimConfigSerializer(data={'d': 8, 'k': 1, 'initial': 'cos(r)'}).is_valid())
        self.assertFalse(SimConfigSerializer(data={'d': 8}).is_valid())
        self.assertFalse(SimConfigSerializer(data={'d': 8, 'k': 1, 'table': [[0.0, 0.0, 1.0]]}).is_valid())

    def test_table(self):
        """Check that a table becomes nested tuples."""
        serializer = SimConfigSerializer(data={'d': 8, 'k': 1, 'initial': 'tabulated',
                                               'table': [[0.0, 0.0], [2.0, 1.0]]})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.save().table, ((0.0, 0.0), (2.0, 1.0)))

    def test_table_initial_data(self):
        """Check that a table not vanishing at the origin or too short is rejected."""
        serializer = SimConfigSerializer(data={'d': 8, 'k': 1, 'initial': 'tabulated',
                                               'table': [[0.0, 0.1], [2.0, 1.0]]})
        self.assertFalse(serializer.is_valid())
        self.assertIn('u(0) must vanish', str(serializer.errors))
        serializer = SimConfigSerializer(data={'d': 8, 'k': 1, 'initial': 'tabulated',
                                               'table': [[0.0, 0.0], [1.0, 1.0]]})
        self.assertFalse(serializer.is_valid())


class DiscretizationTestCase(SimpleTestCase):
    """This class defines the tests for the finite differences on a moving mesh."""

    def test_quadratic_exact(self):
        """Check that u_r and u_rr are exact for quadratics on a nonuniform mesh."""
        r = np.linspace(0.0, 1.0, 41) ** 1.5
        u = 3.0 * r ** 2 - r
        slopes = gradient(r, u, 2)
        np.testing.assert_allclose(slopes[1:], 6.0 * r[1:] - 1.0, atol=1e-10)

    def test_origin_slope(self):
        """Check the odd fit through the first nodes."""
        r = np.linspace(0.0, 0.1, 5)
        self.assertAlmostEqual(origin_slope(r, 2.0 * r - r ** 3, 1), 2.0, places=12)
        self.assertEqual(origin_slope(r, r ** 2, 2), 0.0)

    def test_regular_rate_at_origin(self):
        """Check that u = r is nearly stationary near the origin when d-1 = k(d+k-2)."""
        r = np.linspace(0.0, 0.05, 11)
        u_t, _ = physical_rate(r, r.copy(), 8.0, 7.0)
        self.assertLess(np.max(np.abs(u_t)), 0.25)

    def test_equidistribute(self):
        """Check that a constant monitor gives a uniform mesh."""
        r = np.linspace(0.0, 2.0, 401)
        np.testing.assert_allclose(equidistribute(r, np.ones_like(r), 65), np.linspace(0.0, 2.0, 65), atol=1e-12)

    def test_smooth_preserves_constants(self):
        """Check the filter on a constant."""
        np.testing.assert_allclose(smooth(np.full(10, 2.5), 3), 2.5)

    def test_energy_of_equator_free_map(self):
        """Check E for u = 0, which has no energy."""
        r = np.linspace(0.0, 2.0, 101)
        self.assertEqual(energy(r, np.zeros_like(r), 8.0, 7.0), 0.0)

    def test_jacobian_pattern(self):
        """Check the shape and the band of the pattern."""
        pattern = jacobian_pattern(10, 2).toarray()
        self.assertEqual(pattern.shape, (20, 20))
        self.assertEqual(pattern[0, 4], 1.0)
        self.assertEqual(pattern[0, 5], 0.0)
        self.assertEqual(pattern[0, 14], 1.0)


class SolverTestCase(SimpleTestCase):
    """This class defines the tests for the moving-mesh integrator."""

    def test_initialize_identity(self):
        """Check the initial state of u = r."""
        state = initialize(SimConfig(d=8.0, k=1, length=2.0, nodes=201))
        self.assertEqual(state.r.size, 201)
        self.assertEqual(state.r[0], 0.0)
        self.assertEqual(state.r[-1], 2.0)
        self.assertTrue(np.all(np.diff(state.r) > 0.0))
        np.testing.assert_allclose(state.u, state.r, atol=1e-14)

    def test_initialize_family(self):
        """Check the initial state of u = r + sin(r)."""
        state = initialize(SimConfig(d=7.0, k=1, initial='r+sin(r)'))
        np.testing.assert_allclose(state.u, state.r + np.sin(state.r), atol=1e-14)
        self.assertEqual(state.u[0], 0.0)

    def test_zero_stays_zero(self):
        """Check that u = 0 is a fixed point."""
        config = SimConfig(d=8.0, k=1, initial='tabulated', table=((0.0, 0.0), (2.0, 0.0)), t_max=1e-2)
        solver = MovingMeshSolver(config)
        solver.initialize()
        for _ in range(5):
            if solver.finished:
                break
            state, _ = solver.step()
            self.assertLess(np.max(np.abs(state.u)), 1e-12)
            self.assertTrue(np.all(np.diff(state.r) > 0.0))

    def test_energy_decreases(self):
        """Check the energy over the first steps of u = r."""
        trace = run(SimConfig(d=8.0, k=1, t_max=1e-3))
        self.assertEqual(trace.status, 'no_blowup')
        self.assertGreater(trace.t.size, 2)
        self.assertAlmostEqual(trace.t[-1], 1e-3, places=12)
        self.assertLess(trace.energy[-1], trace.energy[0])
        self.assertEqual(trace.energy_violations, 0)
        self.assertEqual(trace.lag[-1], 0.0)
        self.assertAlmostEqual(trace.lag[0], trace.t[-1] - trace.t[0], places=12)

    def test_no_blowup(self):
        """Check that a tiny final time ends without blow-up and cannot be fitted."""
        trace = run(SimConfig(d=8.0, k=1, t_max=1e-6))
        self.assertFalse(trace.blew_up)
        with self.assertRaises(NoBlowup):
            fit_power(trace)
        with self.assertRaises(NoBlowup):
            fit_log(trace, delta=1.0)


class FitTestCase(SimpleTestCase):
    """This class defines the tests for the rate fits."""

    def test_power_recovers_generator(self):
        """Check T and beta on (T-t)^-0.6306."""
        result = fit_power(power_trace())
        self.assertIs(result.kind, FitKind.POWER)
        self.assertAlmostEqual(result.beta, POWER_EXPONENT - 0.5, delta=1e-3)
        self.assertAlmostEqual(result.blowup_time, 0.25, delta=1e-6)
        self.assertGreater(result.blowup_time, result.window_end)
        self.assertGreater(result.samples, 10)
        self.assertIn('beta', result.uncertainty)

    def test_power_window_too_short(self):
        """Check the sample count guard."""
        with self.assertRaises(WindowTooShort):
            fit_power(power_trace(size=8))

    def test_log_recovers_generator(self):
        """Check T, C and s0 on the neutral law."""
        result = fit_log(log_trace(), delta=1.0)
        self.assertIs(result.kind, FitKind.LOG)
        self.assertAlmostEqual(result.C, LOG_C, delta=1e-3)
        self.assertAlmostEqual(result.s0, LOG_S0, delta=1e-3)
        self.assertAlmostEqual(result.blowup_time, LOG_T, delta=1e-3)
        self.assertGreater(result.r_squared, 0.999999)
        self.assertEqual(result.exponent, 1.0)

    def test_dispatch(self):
        """Check that d=7 is fitted with the log model."""
        result = fit_trace(log_trace(config=SimConfig(d=7.0, k=1)))
        self.assertIs(result.kind, FitKind.LOG)
        x, y = rate_curve(log_trace(), result)
        np.testing.assert_allclose(y, LOG_C * (x - LOG_S0), rtol=1e-4)


class SelfSimilarTestCase(SimpleTestCase):
    """This class defines the tests for the self-similar variables."""

    def test_time(self):
        """Check s = 13 at t = T - exp(-13)."""
        r = np.linspace(0.0, 2.0, 101)
        snapshot = to_self_similar(MeshState(t=0.2, r=r, u=r.copy()), remaining_time=math.exp(-13.0))
        self.assertAlmostEqual(snapshot.s, 13.0, places=12)
        self.assertAlmostEqual(snapshot.y[-1], 2.0 * math.exp(6.5), places=6)
        self.assertAlmostEqual(float(snapshot(snapshot.y[50])), r[50], places=12)

    def test_after_blowup(self):
        """Check that a state at or after T is rejected."""
        r = np.linspace(0.0, 2.0, 101)
        with self.assertRaises(InvalidParameters):
            to_self_similar(MeshState(t=0.3, r=r, u=r), blowup_time=0.25)

    def test_epsilon(self):
        """Check eps = 1 / (C_s sqrt(T-t) u_r(0, t))."""
        self.assertAlmostEqual(epsilon_from_gradient(1.0, 1e-4, 1e3), 0.1)
        self.assertAlmostEqual(epsilon_from_gradient(2.0, 1e-4, -1e3), 0.05)

    def test_ansatz_overlay(self):
        """Check that a state sampled from f_1 lies on the ansatz."""
        prediction = cached_prediction(8.0, 1, 1)
        epsilon = 1e-3
        y = np.concatenate([[0.0], np.geomspace(1e-6, 1.0, 4000), np.linspace(1.0, 20.0, 500)[1:]])
        values = assemble_ansatz(prediction.profile, prediction.basis, 1, epsilon, y=y).values
        snapshot = to_self_similar(MeshState(t=0.0, r=y, u=values), remaining_time=1.0)
        overlay = compare_ansatz(snapshot, prediction.profile, prediction.basis, 1, epsilon)
        self.assertLess(overlay.distance, 1e-4)
        self.assertTrue(np.all(overlay.y >= 2.0 * epsilon * (1.0 - 1e-12)))
        self.assertLessEqual(overlay.y[-1], 1.0)

    def test_ansatz_overlay_needs_room(self):
        """Check that eps too large for [2 eps, 1] is rejected."""
        prediction = cached_prediction(8.0, 1, 1)
        r = np.linspace(0.0, 2.0, 101)
        snapshot = to_self_similar(MeshState(t=0.0, r=r, u=r), remaining_time=1.0)
        with self.assertRaises(InvalidParameters):
            compare_ansatz(snapshot, prediction.profile, prediction.basis, 1, 0.6)

    def test_projection(self):
        """Check that projecting a resampled state matches the projection of the function."""
        basis = cached_prediction(8.0, 1, 1).basis
        y = np.linspace(0.0, 30.0, 30001)
        snapshot = to_self_similar(MeshState(t=0.0, r=y, u=HALF_PI - np.exp(-y ** 2)), remaining_time=1.0)
        coefficients = project_snapshot(snapshot, basis, max_index=2)
        expected = basis.project(lambda z: -math.exp(-z * z), y_max=default_y_max(basis.params), max_index=2)
        np.testing.assert_allclose(coefficients, expected, rtol=1e-5, atol=1e-8)


class StorageTestCase(SimpleTestCase):
    """This class defines the tests for the run directories."""

    def test_trace_and_fit(self):
        """Check the layout and the stored values."""
        config = SimConfig(d=8.0, k=1, label='synthetic power')
        trace = power_trace(size=400)
        trace.config = config
        result = fit_power(trace)
        with tempfile.TemporaryDirectory() as root:
            directory = RunDirectory.create(config, root=root)
            directory.write_trace(trace)
            directory.write_fit(result)
            self.assertTrue(directory.path.name.startswith('synthetic-power-d8-k1-'))
            self.assertEqual(directory.artifacts(), ['config.json', 'fit.json', 'summary.json', 'trace.csv'])
            stored = directory.read_trace()
            np.testing.assert_array_equal(stored.lag, trace.lag)
            self.assertEqual(stored.config.digest(), config.digest())
            self.assertEqual(stored.status, 'blowup')
            self.assertEqual(directory.read_fit(), result)

    def test_malformed_config(self):
        """Check that an invalid file does not validate."""
        with tempfile.TemporaryDirectory() as root:
            path = Path(root) / 'config.json'
            write_json(path, {'d': 8, 'k': 1, 'nodes': 3})
            with self.assertRaises(ValidationError):
                load_config(path)


@tag('slow')
@unittest.skipUnless(SLOW, "set BLOWUPLAB_SLOW_TESTS to run the blow-up simulations")
class BlowupTestCase(SimpleTestCase):
    """This class defines the blow-up simulations."""

    def check_run(self, trace):
        """Check the invariants every blow-up run must keep."""
        self.assertTrue(trace.blew_up)
        self.assertEqual(trace.energy_violations, 0)
        self.assertGreaterEqual(int(np.min(trace.layer_nodes)), 20)
        for snapshot in trace.snapshots:
            self.assertGreater(snapshot.origin_ratio, 0.99)

    def test_power_rate_d8(self):
        """Check beta_1 at d=8 against the analytic value."""
        trace = run(SimConfig(d=8.0, k=1))
        self.check_run(trace)
        result = fit_power(trace)
        self.assertLess(abs(result.beta / 0.1306019 - 1.0), 0.05)

    def test_power_rate_d9(self):
        """Check beta_1 at d=9 against the analytic value."""
        trace = run(SimConfig(d=9.0, k=1))
        self.check_run(trace)
        self.assertLess(abs(fit_power(trace).beta / 0.195194 - 1.0), 0.05)

    def test_log_rate_d7(self):
        """Check C at d=7 for two initial data."""
        fits = []
        for initial in ('r', 'r-sin(r)'):
            trace = run(SimConfig(d=7.0, k=1, initial=initial))
            self.check_run(trace)
            result = fit_log(trace)
            x, _ = rate_curve(trace, result)
            self.assertGreaterEqual(x[-1] - x[0], 8.0)
            self.assertGreaterEqual(result.r_squared, 0.999)
            fits.append(result)
        self.assertLess(abs(fits[0].C / 0.2250 - 1.0), 0.05)
        self.assertLess(abs(fits[1].C / fits[0].C - 1.0), 0.01)

    def test_log_rate_matches_prediction_d7(self):
        """Check the fitted C at d=7 against 1 / (C_s C_N)."""
        trace = run(SimConfig(d=7.0, k=1))
        self.check_run(trace)
        predicted = 1.0 / cached_prediction(7.0, 1, 1).rate_law.prefactor
        self.assertLess(abs(fit_log(trace).C / predicted - 1.0), 0.15)

    def test_power_rate_mesh_doubling(self):
        """Check beta_1 at d=8 moves less than its fit uncertainty when the mesh is doubled."""
        coarse = fit_power(run(SimConfig(d=8.0, k=1, nodes=201)))
        fine = fit_power(run(SimConfig(d=8.0, k=1, nodes=401)))
        spread = math.hypot(coarse.uncertainty['beta'], fine.uncertainty['beta'])
        self.assertLessEqual(abs(coarse.beta - fine.beta), 2.0 * spread)

    def test_ansatz_overlay_d8(self):
        """Check that the snapshots approach f_1 as s grows."""
        trace = run(SimConfig(d=8.0, k=1))
        result = fit_power(trace)
        prediction = cached_prediction(8.0, 1, 1)
        distances, times = [], []
        for snapshot in trace.snapshots:
            remaining = trace.lag[snapshot.index] + result.remaining_time
            epsilon = epsilon_from_gradient(prediction.profile.cs, remaining, snapshot.dr_u0)
            if 2.0 * epsilon >= 0.5 or epsilon > 0.1:
                continue
            scaled = to_self_similar(snapshot.state, remaining_time=remaining)
            overlay = compare_ansatz(scaled, prediction.profile, prediction.basis, 1, epsilon)
            distances.append(overlay.distance)
            times.append(overlay.s)
        self.assertGreaterEqual(len(distances), 3)
        self.assertTrue(np.all(np.diff(times) > 0.0))
        self.assertTrue(np.all(np.diff(distances) < 0.0), distances)
