"""
This module builds the Laguerre eigenbasis of the flow linearized around the equatorial map.

With z = y^2/4 the eigenfunctions are phi_n(y) = N_n y^-gamma L_n^(omega/2)(z), orthonormal for
the weight rho(y) = y^(d-1) exp(-y^2/4) on (0, inf).
"""
import csv
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from django.conf import settings
from scipy.integrate import quad
from scipy.special import eval_genlaguerre, gammaln, roots_genlaguerre

from params.exceptions import InvalidParameters
from params.parameters import DerivedConstants, ModelParams, derive
from spectral.exceptions import DivergentIntegrand, QuadratureNotConverged

logger = logging.getLogger(__name__)


@lru_cache(maxsize=64)
def gauss_rule(nodes: int, alpha: float):
    """Return the generalized Gauss-Laguerre nodes and weights for z^alpha exp(-z)."""
    return roots_genlaguerre(nodes, alpha)


def default_y_max(params: ModelParams, degree: int = 0, tolerance: Optional[float] = None) -> float:
    """Return a cutoff beyond which rho times a degree-z polynomial carries less than tolerance."""
    tolerance = settings.BLOWUPLAB['SPECTRAL']['TAIL_TOLERANCE'] if tolerance is None else tolerance
    z_cut = 2.0 * (0.5 * params.d + degree + 1.0) + math.log(1.0 / tolerance) + 10.0
    return 2.0 * math.sqrt(z_cut)


def inner_product(params: ModelParams, f: Callable, g: Callable, exponent: float = 0.0, method: str = 'gauss',
                  y_max: Optional[float] = None, nodes: Optional[int] = None) -> float:
    """
    Compute the weighted inner product of two functions.

    Args:
        params (ModelParams): The parameter point, which fixes the weight y^(d-1) exp(-y^2/4).
        f (callable): The first function of y.
        g (callable): The second function of y.
        exponent (float): The declared power p with f g ~ y^p at y=0.
        method (str): 'gauss' for the Gauss rule in z over (0, inf), 'adaptive' for quad on (0, y_max].
        y_max (float): The truncation of the adaptive rule.
        nodes (int): The size of the Gauss rule.

    Returns:
        float: The integral of f g rho.

    Raises:
        DivergentIntegrand: d-1+p <= -1.
    """
    d = float(params.d)
    if d - 1.0 + exponent <= -1.0:
        raise DivergentIntegrand(f"integrand behaves like y^{d - 1.0 + exponent:g} at y=0")

    if method == 'gauss':
        nodes = settings.BLOWUPLAB['SPECTRAL']['NODES'] if nodes is None else nodes
        z, weights = gauss_rule(nodes, 0.5 * (d - 2.0 + exponent))
        y = 2.0 * np.sqrt(z)
        values = f(y) * g(y) * y ** (-exponent)
        return float(2.0 ** (d - 1.0 + exponent) * np.dot(weights, values))

    if method == 'adaptive':
        y_max = default_y_max(params) if y_max is None else y_max
        limit = settings.BLOWUPLAB['SPECTRAL']['QUAD_LIMIT']
        split = min(1.0, y_max)
        near, _ = quad(lambda y: f(y) * g(y) * y ** (-exponent) * math.exp(-0.25 * y * y), 0.0, split,
                       weight='alg', wvar=(d - 1.0 + exponent, 0.0), limit=limit, epsabs=0.0, epsrel=1e-12)
        far = 0.0
        if y_max > split:
            far, _ = quad(lambda y: f(y) * g(y) * y ** (d - 1.0) * math.exp(-0.25 * y * y), split, y_max,
                          limit=limit, epsabs=0.0, epsrel=1e-12)
        return float(near + far)

    raise InvalidParameters(f"unknown quadrature method {method!r}")


def closed_form_norm(params: ModelParams, n: int) -> float:
    """Return 2^(-1-omega/2) sqrt(n!/Gamma(n+1+omega/2)), which normalizes phi_n to 1/2."""
    alpha = 0.5 * derive(params, allow_degenerate=True).omega
    return math.exp(-(1.0 + alpha) * math.log(2.0) + 0.5 * (gammaln(n + 1.0) - gammaln(n + 1.0 + alpha)))


def laguerre_at_origin(alpha: float, n) -> np.ndarray:
    """Return L_n^(alpha)(0) = Gamma(n+1+alpha) / (n! Gamma(1+alpha))."""
    n = np.asarray(n, dtype=float)
    return np.exp(gammaln(n + 1.0 + alpha) - gammaln(n + 1.0) - gammaln(1.0 + alpha))


def closed_form_origin(params: ModelParams, n: int) -> float:
    """Return the origin coefficient c_n built from the unrescaled closed-form norm."""
    alpha = 0.5 * derive(params, allow_degenerate=True).omega
    return closed_form_norm(params, n) * float(laguerre_at_origin(alpha, n))


@dataclass(frozen=True, eq=False)
class EigenBasis:
    """
    This class defines the eigenbasis up to a maximal index.

    Attributes:
        params (ModelParams): The parameter point.
        constants (DerivedConstants): The derived constants.
        max_n (int): The highest index built.
        norm (ndarray): The normalization constants N_n after rescaling.
        c_origin (ndarray): The origin coefficients c_n = lim y^gamma phi_n(y).
        nodes (int): The size of the Gauss rule that met the orthonormality target.
        orthonormality_residual (float): max |G - I| for the rescaled basis.
    """

    params: ModelParams
    constants: DerivedConstants
    max_n: int
    norm: np.ndarray
    c_origin: np.ndarray
    nodes: int
    orthonormality_residual: float

    @property
    def alpha(self) -> float:
        """Return the Laguerre parameter omega/2."""
        return 0.5 * self.constants.omega

    def eigenvalue(self, n: int) -> float:
        """Return lambda_n = -gamma/2 + n."""
        return -0.5 * self.constants.gamma + n

    def _laguerre(self, n: int, shift: int, z):
        if n < shift:
            return np.zeros_like(z)
        return eval_genlaguerre(n - shift, self.alpha + shift, z)

    def phi(self, n: int, y):
        """Return phi_n(y)."""
        y = np.asarray(y, dtype=float)
        return self.norm[n] * y ** (-self.constants.gamma) * self._laguerre(n, 0, 0.25 * y * y)

    def origin_profile(self, n: int, y):
        """Return y^gamma phi_n(y), which equals c_n at y=0."""
        y = np.asarray(y, dtype=float)
        return self.norm[n] * self._laguerre(n, 0, 0.25 * y * y)

    def phi_prime(self, n: int, y):
        """Return d phi_n / dy."""
        y = np.asarray(y, dtype=float)
        gamma, z = self.constants.gamma, 0.25 * y * y
        value = -gamma * y ** (-gamma - 1.0) * self._laguerre(n, 0, z) \
            - 0.5 * y ** (1.0 - gamma) * self._laguerre(n, 1, z)
        return self.norm[n] * value

    def phi_second(self, n: int, y):
        """Return d^2 phi_n / dy^2 through the Laguerre derivative identities."""
        y = np.asarray(y, dtype=float)
        gamma, z = self.constants.gamma, 0.25 * y * y
        value = gamma * (gamma + 1.0) * y ** (-gamma - 2.0) * self._laguerre(n, 0, z) \
            - 0.5 * (1.0 - 2.0 * gamma) * y ** (-gamma) * self._laguerre(n, 1, z) \
            + 0.25 * y ** (2.0 - gamma) * self._laguerre(n, 2, z)
        return self.norm[n] * value

    def apply_operator(self, n: int, y):
        """
        Apply the linearized operator to phi_n.

        The operator is A = -(d^2/dy^2 + ((d-1)/y - y/2) d/dy + k(d+k-2)/y^2), so that
        perturbations of the equatorial map evolve by d_s psi = -A psi and A phi_n = lambda_n phi_n.
        """
        y = np.asarray(y, dtype=float)
        drift = (self.params.d - 1.0) / y - 0.5 * y
        return -(self.phi_second(n, y) + drift * self.phi_prime(n, y)
                 + self.params.angular_density * self.phi(n, y) / (y * y))

    def inner(self, f: Callable, g: Callable, exponent: float = 0.0, method: str = 'gauss',
              y_max: Optional[float] = None) -> float:
        """Return the weighted inner product with this basis' quadrature."""
        return inner_product(self.params, f, g, exponent=exponent, method=method, y_max=y_max, nodes=self.nodes)

    def project(self, psi: Callable, y_max: Optional[float] = None, exponent: float = 0.0,
                max_index: Optional[int] = None) -> np.ndarray:
        """
        Project a function of y on the basis.

        Args:
            psi (callable): The function, psi ~ y^exponent at y=0.
            y_max (float): Truncate the integral at y_max, the Gauss rule over (0, inf) is used when None.
            exponent (float): The small-y power of psi.
            max_index (int): The highest coefficient returned, max_n by default.

        Returns:
            ndarray: The coefficients a_n = <psi, phi_n>.
        """
        max_index = self.max_n if max_index is None else max_index
        method = 'gauss' if y_max is None else 'adaptive'
        return np.array([
            self.inner(psi, lambda y, n=n: self.phi(n, y), exponent=exponent - self.constants.gamma,
                       method=method, y_max=y_max)
            for n in range(max_index + 1)
        ])

    def gram(self, nodes: Optional[int] = None) -> np.ndarray:
        """Return the Gram matrix of the basis."""
        return _gram(self.params, self.constants, self.norm, nodes or self.nodes)


def _gram(params: ModelParams, constants: DerivedConstants, norm: np.ndarray, nodes: int) -> np.ndarray:
    alpha = 0.5 * constants.omega
    z, weights = gauss_rule(nodes, alpha)
    laguerre = np.array([eval_genlaguerre(n, alpha, z) for n in range(norm.size)]) * norm[:, None]
    return 2.0 ** (constants.omega + 1.0) * (laguerre * weights) @ laguerre.T


def build_basis(params: ModelParams, max_n: int, nodes: Optional[int] = None,
                tolerance: Optional[float] = None) -> EigenBasis:
    """
    Build the orthonormal eigenbasis phi_0..phi_max_n.

    The closed-form norms are rescaled so that <phi_n, phi_n> = 1 under the Gauss rule, whose size
    is doubled until the orthonormality residual meets the target.

    Raises:
        QuadratureNotConverged: The residual target is missed at the largest rule.
    """
    config = settings.BLOWUPLAB['SPECTRAL']
    nodes = config['NODES'] if nodes is None else nodes
    tolerance = config['ORTHONORMALITY_TOLERANCE'] if tolerance is None else tolerance
    if max_n < 0:
        raise InvalidParameters(f"max_n must be non-negative, got {max_n}")
    constants = derive(params, allow_degenerate=True)
    initial = np.array([closed_form_norm(params, n) for n in range(max_n + 1)])

    while True:
        gram = _gram(params, constants, initial, nodes)
        scale = 1.0 / np.sqrt(np.diag(gram))
        residual = float(np.max(np.abs(gram * np.outer(scale, scale) - np.eye(max_n + 1))))
        if residual <= tolerance:
            break
        if 2 * nodes > config['MAX_NODES']:
            raise QuadratureNotConverged(
                f"orthonormality residual {residual:.2e} above {tolerance:.0e} with {nodes} nodes"
            )
        logger.debug("orthonormality residual %.2e with %d nodes, doubling", residual, nodes)
        nodes *= 2

    norm = initial * scale
    c_origin = norm * laguerre_at_origin(0.5 * constants.omega, np.arange(max_n + 1))
    logger.info("basis d=%g k=%d built up to n=%d with %d nodes (residual %.1e)",
                params.d, params.k, max_n, nodes, residual)
    return EigenBasis(params=params, constants=constants, max_n=max_n, norm=norm, c_origin=c_origin,
                      nodes=nodes, orthonormality_residual=residual)


def export_basis_csv(basis: EigenBasis, path, y=None) -> None:
    """Write y, phi_0..phi_max_n on a diagnostic grid."""
    y = np.linspace(0.05, 12.0, 240) if y is None else np.asarray(y, dtype=float)
    columns = [basis.phi(n, y) for n in range(basis.max_n + 1)]
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle)
        writer.writerow(['y'] + [f'phi{n}' for n in range(basis.max_n + 1)])
        for i, value in enumerate(y):
            writer.writerow([repr(float(value))] + [repr(float(column[i])) for column in columns])
