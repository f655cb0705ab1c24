"""This module manages the tests for the spectral app."""
import csv
import math
import os
import tempfile

import numpy as np
from django.test import SimpleTestCase
from scipy.special import gammaln

from params.parameters import ModelParams, derive
from spectral.basis import (
    build_basis, closed_form_norm, closed_form_origin, default_y_max, export_basis_csv, inner_product
)
from spectral.exceptions import DivergentIntegrand, QuadratureNotConverged

POINTS = (ModelParams(7, 1), ModelParams(8, 1), ModelParams(9, 1), ModelParams(12, 2))


class BuildBasisTestCase(SimpleTestCase):
    """This class defines the tests for the basis construction."""

    @classmethod
    def setUpClass(cls):
        """Build the bases shared by the tests."""
        super().setUpClass()
        cls.bases = {params: build_basis(params, 8) for params in POINTS}

    def test_orthonormality(self):
        """Check |G - I| <= 1e-8 for n, m <= 8."""
        for basis in self.bases.values():
            self.assertLessEqual(basis.orthonormality_residual, 1e-8)
            finer = basis.gram(nodes=2 * basis.nodes)
            self.assertLessEqual(np.max(np.abs(finer - np.eye(9))), 1e-8)

    def test_first_pair_orthogonal(self):
        """Check <phi_0, phi_1> vanishes."""
        basis = self.bases[ModelParams(7, 1)]
        gamma = basis.constants.gamma
        value = basis.inner(lambda y: basis.phi(0, y), lambda y: basis.phi(1, y), exponent=-2.0 * gamma)
        self.assertLess(abs(value), 1e-10)

    def test_eigenvalues(self):
        """Check lambda_n at d=7."""
        basis = self.bases[ModelParams(7, 1)]
        self.assertEqual([basis.eigenvalue(n) for n in range(3)], [-1.0, 0.0, 1.0])

    def test_eigen_residual(self):
        """Check <A phi_n - lambda_n phi_n, phi_m> for n, m <= 4."""
        for basis in self.bases.values():
            gamma = basis.constants.gamma
            for n in range(5):
                for m in range(5):
                    value = basis.inner(
                        lambda y, n=n: basis.apply_operator(n, y) - basis.eigenvalue(n) * basis.phi(n, y),
                        lambda y, m=m: basis.phi(m, y),
                        exponent=-2.0 * gamma,
                    )
                    self.assertLess(abs(value), 1e-6)

    def test_origin_coefficients(self):
        """Check c_n against its Gamma closed form after rescaling."""
        for params, basis in self.bases.items():
            omega = derive(params).omega
            alpha = 0.5 * omega
            for n in range(9):
                expected = math.exp(-0.5 * (omega + 1.0) * math.log(2.0)
                                    + 0.5 * (gammaln(n + 1.0 + alpha) - gammaln(n + 1.0)) - gammaln(1.0 + alpha))
                self.assertLess(abs(basis.c_origin[n] / expected - 1.0), 1e-10)
                self.assertLess(abs(basis.c_origin[n] / closed_form_origin(params, n) - math.sqrt(2.0)), 1e-10)
            self.assertTrue(np.all(np.diff(basis.c_origin) > 0.0))
            self.assertTrue(np.all(basis.c_origin > 0.0))

    def test_closed_form_at_seven(self):
        """Check the unrescaled c_0 at d=7."""
        params = ModelParams(7, 1)
        self.assertAlmostEqual(closed_form_origin(params, 0), 0.375563, places=6)
        self.assertAlmostEqual(closed_form_norm(params, 0), 0.375563, places=6)
        self.assertAlmostEqual(self.bases[params].c_origin[0], 0.375563 * math.sqrt(2.0), places=5)

    def test_origin_behavior(self):
        """Check y^gamma phi_n(y) -> c_n with a quadratic correction."""
        basis = self.bases[ModelParams(8, 1)]
        gamma = basis.constants.gamma
        for n in range(1, 5):
            errors = [abs(y ** gamma * basis.phi(n, y) - basis.c_origin[n]) for y in (1e-2, 1e-3)]
            self.assertLess(errors[1], 1e-5 * basis.c_origin[n])
            self.assertAlmostEqual(errors[0] / errors[1], 100.0, delta=1.0)

    def test_no_convergence(self):
        """Check an unreachable residual target raises."""
        with self.assertRaises(QuadratureNotConverged):
            build_basis(ModelParams(7, 1), 2, nodes=1600, tolerance=-1.0)


class InnerProductTestCase(SimpleTestCase):
    """This class defines the tests for the weighted inner product."""

    @classmethod
    def setUpClass(cls):
        """Build the basis shared by the tests."""
        super().setUpClass()
        cls.basis = build_basis(ModelParams(7, 1), 4)

    def test_gaussian_moment(self):
        """Check <1, 1> = 2^(d-1) Gamma(d/2)."""
        for d in (7.0, 8.0, 9.5):
            params = ModelParams(d, 1)
            expected = 2.0 ** (d - 1.0) * math.gamma(0.5 * d)
            one = lambda y: np.ones_like(y)
            self.assertAlmostEqual(inner_product(params, one, one) / expected, 1.0, places=12)
            self.assertAlmostEqual(inner_product(params, one, one, method='adaptive') / expected, 1.0, places=8)

    def test_normalization(self):
        """Check <phi_n, phi_n> = 1."""
        gamma = self.basis.constants.gamma
        for n in range(5):
            phi = lambda y, n=n: self.basis.phi(n, y)
            self.assertAlmostEqual(self.basis.inner(phi, phi, exponent=-2.0 * gamma), 1.0, places=8)

    def test_second_moment_against_adaptive(self):
        """Check <phi_0, y^2 phi_0> against brute-force quadrature."""
        gamma = self.basis.constants.gamma
        phi = lambda y: self.basis.phi(0, y)
        moment = lambda y: y * y * self.basis.phi(0, y)
        gauss = self.basis.inner(phi, moment, exponent=2.0 - 2.0 * gamma)
        adaptive = self.basis.inner(phi, moment, exponent=2.0 - 2.0 * gamma, method='adaptive')
        self.assertGreater(gauss, 0.0)
        self.assertLess(abs(gauss / adaptive - 1.0), 1e-8)

    def test_divergent(self):
        """Check a non-integrable declared exponent raises."""
        with self.assertRaises(DivergentIntegrand):
            self.basis.inner(lambda y: y ** -7.0, lambda y: np.ones_like(y), exponent=-7.0)


class ProjectTestCase(SimpleTestCase):
    """This class defines the tests for the projection."""

    @classmethod
    def setUpClass(cls):
        """Build the basis shared by the tests."""
        super().setUpClass()
        cls.basis = build_basis(ModelParams(8, 1), 4)

    def test_project_eigenfunction(self):
        """Check the projection of phi_2 is the unit vector."""
        phi = lambda y: self.basis.phi(2, y)
        gamma = self.basis.constants.gamma
        expected = np.eye(5)[2]
        self.assertLess(np.max(np.abs(self.basis.project(phi, exponent=-gamma) - expected)), 1e-8)
        y_max = default_y_max(self.basis.params, degree=8)
        self.assertLess(np.max(np.abs(self.basis.project(phi, y_max=y_max, exponent=-gamma) - expected)), 1e-8)

    def test_project_zero(self):
        """Check the projection of zero vanishes."""
        coefficients = self.basis.project(lambda y: np.zeros_like(y))
        self.assertTrue(np.all(coefficients == 0.0))


class ExportTestCase(SimpleTestCase):
    """This class defines the tests for the basis export."""

    def test_export(self):
        """Check the csv header."""
        basis = build_basis(ModelParams(7, 1), 3)
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'basis.csv')
            export_basis_csv(basis, path)
            with open(path, newline='') as handle:
                rows = list(csv.reader(handle))
        self.assertEqual(rows[0], ['y', 'phi0', 'phi1', 'phi2', 'phi3'])
        self.assertEqual(len(rows), 241)
