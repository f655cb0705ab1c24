"""This module manages the tests for the runs app."""
import csv
import json
import math
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase, override_settings
from rest_framework import status
from rest_framework.test import APIClient

from meshsim.config import SimConfig
from meshsim.solver import RunTrace
from meshsim.storage import RunDirectory, read_json, write_json
from rates.pipeline import cached_prediction
from runs.comparison import agreement
from runs.manifest import combined_hash, jsonable
from runs.models import RunManifest


def stored_run(root, config, remaining, values, blowup_time, status_name='blowup'):
    """Store a trace sampled at the given T - t without running the solver."""
    trace = RunTrace(config=config, t=blowup_time - remaining, lag=remaining - remaining[-1], dr_u0=values,
                     sup_grad=values, energy=np.zeros(remaining.size), min_dx=np.ones(remaining.size),
                     layer_nodes=np.full(remaining.size, 201), status=status_name)
    directory = RunDirectory.create(config, root=root)
    directory.write_trace(trace)
    return directory


def power_run(root, status_name='blowup', label='power'):
    """Store a d=8 run whose gradient grows like (T-t)^-0.6306 with T = 0.25."""
    remaining = np.geomspace(0.25, 0.25e-6, 600)
    return stored_run(root, SimConfig(d=8.0, k=1, label=label), remaining, remaining ** -0.6306, 0.25,
                      status_name=status_name)


def log_run(root, s0, label, blowup_time=0.229):
    """Store a d=7 run following sqrt(T-t) u_r(0, t) = C (-log(T-t) - s0) with the predicted C."""
    slope = 1.0 / cached_prediction(7.0, 1, 1).rate_law.prefactor
    remaining = np.geomspace(0.2, math.exp(-14.0), 3000)
    values = slope * (-np.log(remaining) - s0) / np.sqrt(remaining)
    return stored_run(root, SimConfig(d=7.0, k=1, label=label), remaining, values, blowup_time)


class CommandTestCase(TestCase):
    """This class defines the shared output root of the command tests."""

    def setUp(self):
        """Send every output to a temporary root."""
        temporary = tempfile.TemporaryDirectory()
        self.addCleanup(temporary.cleanup)
        self.root = Path(temporary.name)
        override = override_settings(BLOWUPLAB=dict(settings.BLOWUPLAB, OUTPUT_ROOT=self.root))
        override.enable()
        self.addCleanup(override.disable)
        self.out = StringIO()


class PredictCommandTestCase(CommandTestCase):
    """This class defines the tests for the predict command."""

    def test_power(self):
        """Check the d=8 exponent and the manifest."""
        call_command('predict', d=8.0, k=1, N=1, json=True, stdout=self.out)
        payload = json.loads(self.out.getvalue())
        self.assertEqual(payload['rate_law']['kind'], 'power')
        self.assertAlmostEqual(payload['rate_law']['exponent'], 0.6306019, places=6)
        self.assertTrue((self.root / 'predictions' / 'prediction-d8-k1-N1.json').exists())
        manifest = RunManifest.objects.get()  # pylint: disable=no-member
        self.assertEqual(manifest.command, 'predict')
        self.assertEqual(manifest.status, RunManifest.SUCCEEDED)
        self.assertIn('prediction-d8-k1-N1.json', manifest.artifacts)
        self.assertIn('scipy', manifest.versions)
        self.assertTrue((self.root / 'predictions' / 'manifest.json').exists())

    def test_logarithmic(self):
        """Check the d=7 law is logarithmic with exponent 1."""
        call_command('predict', d=7.0, k=1, N=1, json=True, stdout=self.out)
        law = json.loads(self.out.getvalue())['rate_law']
        self.assertEqual(law['kind'], 'logarithmic')
        self.assertAlmostEqual(law['exponent'], 1.0, places=10)

    def test_subcritical(self):
        """Check a subcritical dimension fails with its message and a failed manifest."""
        with self.assertRaisesMessage(CommandError, 'is not above d*'):
            call_command('predict', d=6.0, k=1, N=1, stdout=self.out)
        manifest = RunManifest.objects.get()  # pylint: disable=no-member
        self.assertEqual(manifest.status, RunManifest.FAILED)
        self.assertIn('d*', manifest.message)

    def test_sweep(self):
        """Check the beta curve table."""
        call_command('predict', k=1, N=1, sweep_d=[8.0, 10.0, 1.0], stdout=self.out)
        with open(self.root / 'predictions' / 'beta_curve-k1-N1.csv', newline='') as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(rows[0], ['d', 'beta'])
        self.assertEqual(len(rows), 4)


class SimulateCommandTestCase(CommandTestCase):
    """This class defines the tests for the simulate command."""

    def test_malformed_config(self):
        """Check an invalid file ends with exit code 2."""
        path = self.root / 'bad.json'
        write_json(path, {'d': 8, 'k': 1, 'nodes': 3})
        with self.assertRaises(CommandError) as context:
            call_command('simulate', str(path), stdout=self.out)
        self.assertEqual(context.exception.returncode, 2)

    def test_irregular_initial_data(self):
        """Check tabulated data with u(0) != 0 ends with exit code 2 before any run."""
        path = self.root / 'irregular.json'
        write_json(path, {'d': 8, 'k': 1, 'initial': 'tabulated', 'table': [[0.0, 0.1], [2.0, 1.0]]})
        with self.assertRaisesMessage(CommandError, 'u(0) must vanish') as context:
            call_command('simulate', str(path), stdout=self.out)
        self.assertEqual(context.exception.returncode, 2)
        self.assertEqual(list(self.root.glob('*-d8-k1-*')), [])

    def test_missing_config(self):
        """Check a missing file ends with exit code 2."""
        with self.assertRaises(CommandError) as context:
            call_command('simulate', str(self.root / 'missing.json'), stdout=self.out)
        self.assertEqual(context.exception.returncode, 2)

    def test_short_run(self):
        """Check a run that stops at t_max writes its directory without a fit."""
        path = self.root / 'short.json'
        write_json(path, {'d': 8, 'k': 1, 't_max': 1e-6, 'label': 'short'})
        call_command('simulate', str(path), stdout=self.out)
        self.assertIn('no_blowup', self.out.getvalue())
        directory = RunDirectory(next(self.root.glob('short-d8-k1-*')))
        self.assertEqual(directory.read_trace().status, 'no_blowup')
        self.assertIsNone(directory.read_fit())
        manifest = RunManifest.objects.get()  # pylint: disable=no-member
        self.assertEqual(manifest.config_hash, directory.read_config().digest())


class FitCommandTestCase(CommandTestCase):
    """This class defines the tests for the fit command."""

    def test_power(self):
        """Check the fitted exponent of a stored power-law run."""
        directory = power_run(self.root)
        call_command('fit', str(directory.path), stdout=self.out)
        payload = json.loads(self.out.getvalue())
        self.assertEqual(payload['kind'], 'power')
        self.assertAlmostEqual(payload['blowup_time'], 0.25, places=6)
        self.assertAlmostEqual(directory.read_fit().beta, 0.1306, places=3)

    def test_missing_trace(self):
        """Check a directory without trace fails."""
        with self.assertRaises(CommandError):
            call_command('fit', str(self.root), stdout=self.out)

    def test_no_blowup(self):
        """Check a run without blow-up cannot be fitted."""
        directory = power_run(self.root, status_name='no_blowup')
        with self.assertRaisesMessage(CommandError, 'nothing to fit'):
            call_command('fit', str(directory.path), stdout=self.out)


class CompareCommandTestCase(CommandTestCase):
    """This class defines the tests for the compare command."""

    def test_power(self):
        """Check the fitted beta against beta_1 at d=8 and the written files."""
        directory = power_run(self.root)
        call_command('compare', str(directory.path), stdout=self.out)
        report = json.loads(self.out.getvalue())['runs'][0]
        self.assertEqual(report['quantity'], 'beta')
        self.assertAlmostEqual(report['predicted'], 0.1306019, places=6)
        self.assertLess(report['relative_error'], 1e-2)
        self.assertEqual(report['overlays'], [])
        self.assertTrue((directory.path / 'compare' / 'rate_curve.csv').exists())
        self.assertEqual(read_json(directory.path / 'compare' / 'report.json')['quantity'], 'beta')

    def test_logarithmic(self):
        """Check the fitted C at d=7 against 1 / (C_s C_N)."""
        directory = log_run(self.root, -0.436, 'neutral')
        call_command('compare', str(directory.path), stdout=self.out)
        report = json.loads(self.out.getvalue())['runs'][0]
        self.assertEqual(report['quantity'], 'C')
        self.assertEqual(report['fit']['kind'], 'log')
        predicted = 1.0 / cached_prediction(7.0, 1, 1).rate_law.prefactor
        self.assertAlmostEqual(report['predicted'], predicted, places=12)
        self.assertAlmostEqual(report['ratio'], 1.0, delta=1e-2)
        self.assertLess(report['relative_error'], 1e-2)
        with open(directory.path / 'compare' / 'rate_curve.csv', newline='') as handle:
            self.assertEqual(next(csv.reader(handle)), ['minus_log_remaining', 'scaled_gradient'])

    def test_logarithmic_pair(self):
        """Check two d=7 runs with different s0 agree on C."""
        first = log_run(self.root, -0.436, 'first')
        second = log_run(self.root, 0.5, 'second', blowup_time=0.31)
        call_command('compare', str(first.path), str(second.path), stdout=self.out)
        payload = json.loads(self.out.getvalue())
        self.assertEqual([report['quantity'] for report in payload['runs']], ['C', 'C'])
        groups = payload['agreement']['groups']
        self.assertEqual(len(groups), 1)
        self.assertEqual(groups[0]['quantity'], 'C')
        self.assertLess(groups[0]['spread'], 1e-2)

    def test_no_blowup(self):
        """Check a run without blow-up is reported and fails the command."""
        directory = power_run(self.root, status_name='no_blowup', label='short')
        with self.assertRaisesMessage(CommandError, 'no blow-up'):
            call_command('compare', str(directory.path), stdout=self.out)
        report = json.loads(self.out.getvalue())['runs'][0]
        self.assertTrue(report['error'].startswith('NoBlowup'))

    def test_agreement(self):
        """Check the spread among runs of the same point."""
        reports = [
            {'d': 7.0, 'k': 1, 'quantity': 'C', 'fitted': 0.2},
            {'d': 7.0, 'k': 1, 'quantity': 'C', 'fitted': 0.21},
            {'d': 8.0, 'k': 1, 'quantity': 'beta', 'fitted': 0.13},
            {'d': 7.0, 'k': 1, 'error': 'NoBlowup: nothing to fit'},
        ]
        groups = agreement(reports)['groups']
        self.assertEqual(len(groups), 1)
        self.assertAlmostEqual(groups[0]['spread'], 0.05)


class DumpCommandTestCase(CommandTestCase):
    """This class defines the tests for the profile and basis dumps."""

    def test_profile(self):
        """Check the orbit file and the printed constants."""
        call_command('profile_dump', d=8.0, k=1, stdout=self.out)
        self.assertIn('Cs = ', self.out.getvalue())
        with open(self.root / 'profiles' / 'orbit-d8-k1.csv', newline='') as handle:
            self.assertEqual(next(csv.reader(handle)), ['x', 'v', 'vPrime'])

    def test_basis(self):
        """Check the basis file header."""
        call_command('basis_dump', d=8.0, k=1, max_n=2, stdout=self.out)
        with open(self.root / 'bases' / 'basis-d8-k1-n2.csv', newline='') as handle:
            self.assertEqual(next(csv.reader(handle)), ['y', 'phi0', 'phi1', 'phi2'])


class ManifestTestCase(TestCase):
    """This class defines the tests for the manifest helpers and endpoints."""

    def setUp(self):
        """Create the client and two manifests."""
        self.client = APIClient()
        self.first = RunManifest.objects.create(  # pylint: disable=no-member
            command='predict', arguments={'d': 8.0}, status=RunManifest.SUCCEEDED)
        self.second = RunManifest.objects.create(  # pylint: disable=no-member
            command='simulate', arguments={'configs': ['a.json']}, status=RunManifest.FAILED, message='boom')

    def test_list(self):
        """Check the newest manifest comes first."""
        response = self.client.get('/runs/')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual([item['command'] for item in response.data], ['simulate', 'predict'])

    def test_detail(self):
        """Check one manifest and a missing one."""
        response = self.client.get(f'/runs/{self.second.pk}')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['message'], 'boom')
        response = self.client.get(f'/runs/{self.second.pk + 100}')
        self.assertEqual(response.status_code, status.HTTP_404_NOT_FOUND)

    def test_combined_hash(self):
        """Check the hash of several configurations ignores their order."""
        self.assertEqual(combined_hash(['a']), 'a')
        self.assertEqual(combined_hash(['a', 'b']), combined_hash(['b', 'a']))
        self.assertEqual(len(combined_hash(['a', 'b'])), 64)

    def test_jsonable(self):
        """Check the common options are dropped and paths become strings."""
        data = jsonable({'verbosity': 1, 'configs': [Path('a.json')], 'output': Path('out'), 'sweep': False})
        self.assertEqual(data, {'configs': ['a.json'], 'output': 'out', 'sweep': False})
