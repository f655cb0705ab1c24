"""
This module computes the nonlinear coupling constants D_n.

Below the regime's crossover the nonlinearity is carried by the profile through
g(xi) = (k(d+k-2)/2)(sin v - v) with v = 2U*(xi) - pi; above it by the cubic Taylor term
of the outer expansion. Only the dominant part is kept, in its crossover-free limit.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from django.conf import settings
from scipy.integrate import quad, simpson
from scipy.special import gammaln

from coupling.exceptions import RegimeMismatch
from params.exceptions import DegenerateRegime, InvalidParameters
from params.parameters import Regime
from profiles.harmonic_map import ProfileSolution, series_coefficient
from spectral.basis import EigenBasis, default_y_max, inner_product

logger = logging.getLogger(__name__)

# Below this |v| the defect sin v - v is summed from its series.
SERIES_THRESHOLD = 1e-2


@dataclass(frozen=True, eq=False)
class CouplingConstants:
    """
    This class defines the coupling constants of a construction.

    Attributes:
        params (ModelParams): The parameter point.
        regime (Regime): The dominant part of the coupling.
        index (int): The selected eigen-index N.
        values (ndarray): D_n for n = 0..max_n.
        delta (float): The nonlinear exponent.
        diagnostics (dict): The raw integrals behind the constants.
    """

    params: object
    regime: Regime
    index: int
    values: np.ndarray
    delta: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def d_index(self) -> float:
        """Return D_N."""
        return float(self.values[self.index])


def sine_defect(v):
    """Return sin v - v without cancellation for small v."""
    v = np.asarray(v, dtype=float)
    result = np.sin(v) - v
    small = np.abs(v) < SERIES_THRESHOLD
    if np.any(small):
        w = v[small]
        w2 = w * w
        result[small] = w * w2 * (-1.0 / 6.0 + w2 * (1.0 / 120.0 + w2 * (-1.0 / 5040.0 + w2 / 362880.0)))
    return result


def tail_amplitude(profile: ProfileSolution) -> float:
    """Return A = 2k(d+k-2)h^3/3, the limit of xi^(3 gamma) g(xi)."""
    return 2.0 * profile.params.angular_density * profile.h ** 3 / 3.0


def g_of_x(profile: ProfileSolution, x):
    """Return g(exp(x)) from the origin series, the orbit or the tail model."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    params, constants = profile.params, profile.constants
    gamma, omega, k = constants.gamma, constants.omega, params.k
    values = np.empty_like(x)

    low = x < profile.x_min
    high = x > profile.x_switch
    mid = ~(low | high)

    v = np.empty_like(x)
    v[low] = -math.pi + 2.0 * np.exp(k * x[low]) + series_coefficient(params) * np.exp(3.0 * k * x[low])
    v[mid] = profile.v_interpolant(x[mid])
    values[~high] = 0.5 * params.angular_density * sine_defect(v[~high])

    ratio = profile.h_minus / profile.h
    values[high] = tail_amplitude(profile) * np.exp(-3.0 * gamma * x[high]) \
        * (1.0 - 3.0 * ratio * np.exp(-omega * x[high]))
    return values


def g_function(profile: ProfileSolution, xi):
    """
    Evaluate g(xi) = (k(d+k-2)/2)(sin(2U* - pi) - (2U* - pi)).

    Args:
        profile (ProfileSolution): The profile orbit.
        xi (float or ndarray): Non-negative abscissae.

    Returns:
        float or ndarray: g, equal to k(d+k-2) pi/2 at the origin.
    """
    scalar = np.isscalar(xi)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    values = np.full_like(xi, 0.5 * math.pi * profile.params.angular_density)
    positive = xi > 0.0
    values[positive] = g_of_x(profile, np.log(xi[positive]))
    return float(values[0]) if scalar else values


def _check_regime(profile: ProfileSolution, expected: Regime) -> None:
    regime = profile.constants.regime
    if regime is Regime.DEGENERATE:
        raise DegenerateRegime("omega = 2 gamma: both coupling integrals diverge logarithmically")
    if regime is not expected:
        raise RegimeMismatch(
            f"{expected.value} integral requested at d={profile.params.d:g}, k={profile.params.k} "
            f"where the coupling is {regime.value}-dominated"
        )


def _series_part(profile: ProfileSolution, x_low: float) -> float:
    """Return the integral of g(exp x) exp((gamma+omega)x) over (-inf, x_low] from the origin series."""
    p = profile.constants.gamma + profile.constants.omega
    k = profile.params.k
    half = 0.5 * profile.params.angular_density
    return half * (math.pi * math.exp(p * x_low) / p - 4.0 * math.exp((p + k) * x_low) / (p + k))


def _tail_part(profile: ProfileSolution, x_cut: float) -> float:
    """Return the integral of g(exp x) exp((gamma+omega)x) over [x_cut, inf) from the tail model."""
    gamma, omega = profile.constants.gamma, profile.constants.omega
    ratio = profile.h_minus / profile.h
    return tail_amplitude(profile) * (
        math.exp((omega - 2.0 * gamma) * x_cut) / (2.0 * gamma - omega)
        - 3.0 * ratio * math.exp(-2.0 * gamma * x_cut) / (2.0 * gamma)
    )


def _middle_part(profile: ProfileSolution, x_low: float, x_high: float) -> float:
    config = settings.BLOWUPLAB['COUPLING']
    p = profile.constants.gamma + profile.constants.omega
    value, _ = quad(lambda x: float(g_of_x(profile, x)[0]) * math.exp(p * x), x_low, x_high,
                    limit=config['QUAD_LIMIT'], epsabs=0.0, epsrel=config['RELATIVE_TOLERANCE'])
    return value


def inner_integral(profile: ProfileSolution, method: str = 'adaptive', x_cut: Optional[float] = None) -> float:
    """
    Compute the integral of g(xi) xi^(d-3-gamma) over (0, inf) in x = log(xi).

    Args:
        profile (ProfileSolution): The profile orbit.
        method (str): 'adaptive' for quad against the interpolant with the closed-form tail past x_cut,
            'simpson' for the composite rule on the stored orbit with a later cutoff.
        x_cut (float): The abscissa where the closed-form tail takes over, x_switch by default.

    Returns:
        float: The integral.

    Raises:
        RegimeMismatch: omega > 2 gamma, where the integral diverges.
    """
    _check_regime(profile, Regime.INNER_DOMINATED)
    x_low = profile.x_min

    if method == 'adaptive':
        x_cut = profile.x_switch if x_cut is None else x_cut
        return _series_part(profile, x_low) + _middle_part(profile, x_low, x_cut) + _tail_part(profile, x_cut)

    if method == 'simpson':
        x_cut = 0.5 * (profile.x_switch + profile.x_max) if x_cut is None else x_cut
        mask = profile.grid <= x_cut
        x = profile.grid[mask]
        p = profile.constants.gamma + profile.constants.omega
        integrand = 0.5 * profile.params.angular_density * sine_defect(profile.v[mask]) * np.exp(p * x)
        return _series_part(profile, x_low) + float(simpson(integrand, x=x)) + _tail_part(profile, float(x[-1]))

    raise InvalidParameters(f"unknown quadrature method {method!r}")


def inner_constant(profile: ProfileSolution, basis: EigenBasis, n: int, method: str = 'adaptive') -> float:
    """Return c_n times the inner integral."""
    return float(basis.c_origin[n]) * inner_integral(profile, method=method)


def outer_integral(basis: EigenBasis, index: int, n: int, method: str = 'gauss',
                   nodes: Optional[int] = None) -> float:
    """
    Compute the integral of phi_N^3 phi_n y^(d-3) exp(-y^2/4) over (0, inf).

    Args:
        basis (EigenBasis): The eigenbasis.
        index (int): N.
        n (int): n.
        method (str): 'gauss' for the Gauss rule fitted to the y^(omega-2gamma-1) singularity,
            'subtraction' for adaptive quadrature after removing the leading power law.
        nodes (int): The size of the Gauss rule.

    Returns:
        float: The integral.
    """
    constants = basis.constants
    if constants.omega <= 2.0 * constants.gamma:
        raise RegimeMismatch(
            f"outer integral requested at d={basis.params.d:g}, k={basis.params.k} where it diverges at y=0"
        )
    gamma = constants.gamma

    if method == 'gauss':
        return inner_product(
            basis.params,
            lambda y: basis.phi(index, y) ** 3 / (y * y),
            lambda y: basis.phi(n, y),
            exponent=-4.0 * gamma - 2.0,
            nodes=nodes or basis.nodes,
        )

    if method == 'subtraction':
        config = settings.BLOWUPLAB['COUPLING']
        a = constants.omega - 2.0 * gamma
        leading = basis.c_origin[index] ** 3 * basis.c_origin[n]
        exact = leading * math.exp((a - 1.0) * math.log(2.0) + gammaln(0.5 * a))

        def regular(y):
            return basis.origin_profile(index, y) ** 3 * basis.origin_profile(n, y) - leading

        near, _ = quad(lambda y: float(regular(y)) * math.exp(-0.25 * y * y), 0.0, 1.0,
                       weight='alg', wvar=(a - 1.0, 0.0), limit=config['QUAD_LIMIT'], epsabs=0.0, epsrel=1e-12)
        y_max = default_y_max(basis.params, degree=3 * index + n)
        far, _ = quad(lambda y: float(regular(y)) * y ** (a - 1.0) * math.exp(-0.25 * y * y), 1.0, y_max,
                      limit=config['QUAD_LIMIT'], epsabs=0.0, epsrel=1e-12)
        return float(exact + near + far)

    raise InvalidParameters(f"unknown quadrature method {method!r}")


def outer_constant(profile: ProfileSolution, basis: EigenBasis, index: int, n: int, method: str = 'gauss') -> float:
    """Return (2k(d+k-2)h^3 / (3c_N^3)) times the outer integral."""
    _check_regime(profile, Regime.OUTER_DOMINATED)
    prefactor = tail_amplitude(profile) / basis.c_origin[index] ** 3
    return float(prefactor * outer_integral(basis, index, n, method=method))


def coupling_constants(profile: ProfileSolution, basis: EigenBasis, index: int,
                       max_n: Optional[int] = None) -> CouplingConstants:
    """
    Compute D_n for n = 0..max_n with the regime's dominant integral.

    Raises:
        DegenerateRegime: omega = 2 gamma.
    """
    constants = profile.constants
    max_n = basis.max_n if max_n is None else max_n
    if index > max_n or max_n > basis.max_n:
        raise InvalidParameters(f"basis holds indices up to {basis.max_n}, N={index} and max_n={max_n} requested")

    diagnostics = {'regime': constants.regime.value, 'inner_integral': None, 'outer_integral': None,
                   'crossover_scale': None}
    if constants.regime is Regime.DEGENERATE:
        raise DegenerateRegime("omega = 2 gamma: both coupling integrals diverge logarithmically")
    if constants.regime is Regime.INNER_DOMINATED:
        integral = inner_integral(profile)
        diagnostics['inner_integral'] = integral
        values = basis.c_origin[:max_n + 1] * integral
    else:
        prefactor = tail_amplitude(profile) / basis.c_origin[index] ** 3
        outer = np.array([outer_integral(basis, index, n) for n in range(max_n + 1)])
        diagnostics['outer_integral'] = float(outer[index])
        values = prefactor * outer

    logger.info("coupling d=%g k=%d N=%d (%s): D_N=%.10g", profile.params.d, profile.params.k, index,
                constants.regime.value, values[index])
    return CouplingConstants(params=profile.params, regime=constants.regime, index=index, values=values,
                             delta=constants.delta, diagnostics=diagnostics)


def truncated_integrals(profile: ProfileSolution, basis: EigenBasis, index: int, n: int, epsilon: float,
                        crossover: Optional[float] = None) -> dict:
    """
    Evaluate both parts of the projected nonlinearity at finite epsilon.

    The inner part covers y <= K with the profile, the outer part y >= K with the cubic Taylor term.

    Args:
        profile (ProfileSolution): The profile orbit.
        basis (EigenBasis): The eigenbasis.
        index (int): N.
        n (int): The projected index.
        epsilon (float): The boundary-layer scale.
        crossover (float): K, sqrt(epsilon) by default.

    Returns:
        dict: epsilon, K, the inner and outer values.
    """
    crossover = math.sqrt(epsilon) if crossover is None else crossover
    constants = profile.constants
    gamma, omega = constants.gamma, constants.omega
    config = settings.BLOWUPLAB['COUPLING']

    x_high = math.log(crossover / epsilon)
    x_low = min(profile.x_min, x_high)
    inner_part = _series_part(profile, x_low) + _middle_part(profile, x_low, x_high)
    inner_value = float(basis.c_origin[n]) * epsilon ** (gamma + omega) * inner_part

    def outer_integrand(y):
        return basis.phi(index, y) ** 3 * basis.phi(n, y) * y ** (profile.params.d - 3.0) * math.exp(-0.25 * y * y)

    y_max = default_y_max(basis.params, degree=3 * index + n)
    near = 0.0
    if crossover < 1.0:
        near, _ = quad(lambda t: float(outer_integrand(math.exp(t))) * math.exp(t), math.log(crossover), 0.0,
                       limit=config['QUAD_LIMIT'], epsabs=0.0, epsrel=1e-10)
    far, _ = quad(lambda y: float(outer_integrand(y)), max(crossover, 1.0), y_max,
                  limit=config['QUAD_LIMIT'], epsabs=0.0, epsrel=1e-10)
    prefactor = tail_amplitude(profile) / basis.c_origin[index] ** 3
    outer_value = float(prefactor * epsilon ** (3.0 * gamma) * (near + far))
    return {'epsilon': epsilon, 'crossover': crossover, 'inner': inner_value, 'outer': outer_value}
