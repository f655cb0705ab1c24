"""
This module computes the boundary-layer harmonic map profile U*.

The profile equation is integrated in the pendulum form v'' + (d-2)v' + k(d+k-2) sin v = 0,
with x = log(xi) and v = 2U* - pi, along the orbit leaving the saddle (-pi, 0).
"""
import csv
import dataclasses
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np
from django.conf import settings
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import minimize_scalar

from params.exceptions import InvalidParameters
from params.parameters import DerivedConstants, ModelParams, derive
from profiles.exceptions import TailFitIllConditioned, TrappingViolation

logger = logging.getLogger(__name__)

HALF_PI = 0.5 * math.pi
# Largest double strictly below pi/2, the upper clip of U*.
BELOW_HALF_PI = float(np.nextafter(HALF_PI, 0.0))


@dataclass(frozen=True)
class TailFit:
    """
    This class defines the least-squares fit of the profile tail.

    Attributes:
        h (float): The tail amplitude -h_plus, positive.
        h_minus (float): The subdominant amplitude of exp(-(gamma+omega)x).
        fit_residual (float): The root mean square residual relative to h.
        window (tuple(float)): The fitted x-range.
        extra (tuple(float)): The amplitudes of the additional exponents, in the requested order.
    """

    h: float
    h_minus: float
    fit_residual: float
    window: Tuple[float, float]
    extra: Tuple[float, ...] = ()


@dataclass(frozen=True)
class TrappingReport:
    """
    This class defines the trapping-region diagnostic of an orbit.

    Attributes:
        max_lower_violation (float): The largest value of -k sin v - v' on the grid.
        max_upper_violation (float): The largest value of v' + gamma sin v on the grid.
        boundary_flux_samples (list(dict)): Inward fluxes on sampled boundary points.
    """

    max_lower_violation: float
    max_upper_violation: float
    boundary_flux_samples: List[dict]

    @property
    def worst(self) -> float:
        """Return the worst excursion out of the region."""
        return max(self.max_lower_violation, self.max_upper_violation)


@dataclass(frozen=True, eq=False)
class ProfileSolution:
    """
    This class defines a computed heteroclinic orbit and its constants.

    Attributes:
        params (ModelParams): The parameter point.
        constants (DerivedConstants): The derived constants of the point.
        grid (ndarray): Uniform samples of x = log(xi).
        v (ndarray): The values of v on the grid.
        v_prime (ndarray): The values of v' on the grid.
        h (float): The tail amplitude.
        h_minus (float): The subdominant tail amplitude.
        cs (float): The slope normalization 1/sup |dU*/dxi|.
        x_switch (float): The abscissa past which the tail formula is used.
        tolerance (float): The integrator tolerance.
        fit_residual (float): The tail fit residual.
    """

    params: ModelParams
    constants: DerivedConstants
    grid: np.ndarray
    v: np.ndarray
    v_prime: np.ndarray
    h: float
    h_minus: float
    cs: float
    x_switch: float
    tolerance: float
    fit_residual: float

    @property
    def x_min(self) -> float:
        """Return the first grid abscissa."""
        return float(self.grid[0])

    @property
    def x_max(self) -> float:
        """Return the last grid abscissa."""
        return float(self.grid[-1])

    @property
    def v_second(self) -> np.ndarray:
        """Return v'' on the grid from the equation itself."""
        return pendulum_acceleration(self.params, self.v, self.v_prime)

    @cached_property
    def v_interpolant(self) -> CubicHermiteSpline:
        """Return the Hermite interpolant of v built with the exact slopes."""
        return CubicHermiteSpline(self.grid, self.v, self.v_prime)

    @cached_property
    def v_prime_interpolant(self) -> CubicHermiteSpline:
        """Return the Hermite interpolant of v'."""
        return CubicHermiteSpline(self.grid, self.v_prime, self.v_second)


def pendulum_acceleration(params: ModelParams, v, v_prime):
    """Return v'' = -(d-2)v' - k(d+k-2) sin v."""
    return -(params.d - 2.0) * v_prime - params.angular_density * np.sin(v)


def series_coefficient(params: ModelParams) -> float:
    """Return the coefficient a of exp(3kx) in v = -pi + 2exp(kx) + a exp(3kx)."""
    d, k = params.d, params.k
    return -2.0 * (d + k - 2.0) / (3.0 * (d + 4.0 * k - 2.0))


def series_start(params: ModelParams, x: float) -> Tuple[float, float]:
    """Return (v, v') from the expansion at the saddle."""
    k = params.k
    a = series_coefficient(params)
    first, third = math.exp(k * x), math.exp(3.0 * k * x)
    return -math.pi + 2.0 * first + a * third, 2.0 * k * first + 3.0 * k * a * third


def default_x_max(constants: DerivedConstants, decay: float, window: float) -> float:
    """Return the x_max for which every neglected tail correction is below decay in the fit window."""
    x_max = math.log(1.0 / decay) / ((1.0 - window) * constants.delta)
    # exp(-gamma x) must stay a normal double.
    return min(x_max, 600.0 / constants.gamma)


def solve_profile(params: ModelParams, x_min: Optional[float] = None, x_max: Optional[float] = None,
                  tolerance: Optional[float] = None, step: Optional[float] = None) -> ProfileSolution:
    """
    Integrate the profile orbit out of the saddle.

    Args:
        params (ModelParams): The parameter point.
        x_min (float): The start abscissa, default -12/k or lower when the tolerance requires it.
        x_max (float): The end abscissa, default from the tail decay setting.
        tolerance (float): The relative tolerance of the integrator.
        step (float): The spacing of the stored grid.

    Returns:
        ProfileSolution: The orbit with the tail amplitude and the slope normalization.

    Raises:
        SubcriticalDimension: d <= d*.
        TrappingViolation: The computed orbit leaves the trapping region.
        TailFitIllConditioned: The tail window cannot separate the two exponentials.
    """
    config = settings.BLOWUPLAB['PROFILE']
    tolerance = config['TOLERANCE'] if tolerance is None else tolerance
    step = config['GRID_STEP'] if step is None else step
    constants = derive(params)
    k = params.k

    if x_min is None:
        # The series is truncated at O(exp(5kx)).
        x_min = min(-12.0 / k, math.log(tolerance) / (4.0 * k))
    if x_max is None:
        x_max = default_x_max(constants, config['TAIL_DECAY'], config['TAIL_WINDOW'])
    if x_max <= max(x_min, 0.0):
        raise InvalidParameters(f"x_max={x_max} must be positive and above x_min={x_min}")

    def field(_, state):
        return [state[1], pendulum_acceleration(params, state[0], state[1])]

    orbit = solve_ivp(field, (x_min, x_max), series_start(params, x_min), method='DOP853',
                      rtol=tolerance, atol=1e-300, dense_output=True)
    if not orbit.success:
        raise TrappingViolation(f"profile integration stopped at x={orbit.t[-1]:g}: {orbit.message}")

    count = int(math.ceil((x_max - x_min) / step))
    grid = np.linspace(x_min, x_max, count + 1)
    v, v_prime = orbit.sol(grid)

    x_switch = (1.0 - config['TAIL_WINDOW']) * x_max
    tail = fit_tail(constants, grid, v, x_switch, max_condition=config['MAX_CONDITION'])
    solution = ProfileSolution(
        params=params, constants=constants, grid=grid, v=v, v_prime=v_prime,
        h=tail.h, h_minus=tail.h_minus, cs=math.nan, x_switch=x_switch,
        tolerance=tolerance, fit_residual=tail.fit_residual,
    )

    report = check_trapping(solution, samples=0)
    if report.worst > 10.0 * tolerance:
        raise TrappingViolation(
            f"orbit leaves the trapping region by {report.worst:.3e} (tolerance {tolerance:.1e})"
        )

    solution = dataclasses.replace(solution, cs=slope_normalization(solution))
    logger.info("profile d=%g k=%d solved on [%g, %g]: h=%.12g Cs=%.12g residual=%.2e",
                params.d, k, x_min, x_max, solution.h, solution.cs, solution.fit_residual)
    return solution


def fit_tail(constants: DerivedConstants, grid: np.ndarray, v: np.ndarray, x_window: float,
             extra_exponents: Sequence[float] = (), max_condition: float = 1e8) -> TailFit:
    """
    Fit v = 2h_plus exp(-gamma x) + 2h_minus exp(-(gamma+omega)x) on the window x >= x_window.

    Additional decay exponents p add columns exp(-p x) to the model.
    """
    gamma, omega = constants.gamma, constants.omega
    mask = grid >= x_window
    x = grid[mask]
    rates = np.array([0.0, omega] + [p - gamma for p in extra_exponents])
    if x.size <= rates.size:
        raise TailFitIllConditioned(f"tail window [{x_window:g}, {grid[-1]:g}] holds only {x.size} samples")

    shifted = x - x_window
    target = 0.5 * v[mask] * np.exp(gamma * x)
    design = np.exp(-np.outer(shifted, rates))
    condition = np.linalg.cond(design)
    if condition > max_condition:
        raise TailFitIllConditioned(
            f"tail exponentials are collinear on [{x_window:g}, {grid[-1]:g}] (condition {condition:.2e})"
        )
    coefficients, *_ = np.linalg.lstsq(design, target, rcond=None)

    h_plus = float(coefficients[0])
    if h_plus >= 0.0:
        raise TailFitIllConditioned(f"fitted h_plus={h_plus:.3e} is not negative")
    residual = float(np.sqrt(np.mean((design @ coefficients - target) ** 2)) / abs(h_plus))

    if omega * x_window < 700.0:
        h_minus = float(coefficients[1]) * math.exp(omega * x_window)
    else:
        # The correction is below double precision past the window start.
        h_minus = 0.0
    extra = tuple(
        float(c) * math.exp(min((p - gamma) * x_window, 700.0)) for c, p in zip(coefficients[2:], extra_exponents)
    )
    return TailFit(h=-h_plus, h_minus=h_minus, fit_residual=residual, window=(x_window, float(grid[-1])),
                   extra=extra)


def extract_tail(sol: ProfileSolution, extra_exponents: Sequence[float] = (),
                 window: Optional[float] = None) -> TailFit:
    """
    Refit the tail of a computed orbit.

    Args:
        sol (ProfileSolution): The orbit.
        extra_exponents (list(float)): Additional decay exponents of the model.
        window (float): The fraction of [0, x_max] fitted, default from the settings.

    Returns:
        TailFit: The amplitudes and the residual.
    """
    config = settings.BLOWUPLAB['PROFILE']
    window = config['TAIL_WINDOW'] if window is None else window
    x_window = (1.0 - window) * sol.x_max
    return fit_tail(sol.constants, sol.grid, sol.v, x_window, extra_exponents, config['MAX_CONDITION'])


def eval_u(sol: ProfileSolution, xi):
    """
    Evaluate U*(xi) in [0, pi/2).

    The origin series is used below exp(x_min), the orbit interpolant up to exp(x_switch),
    and pi/2 - h xi^-gamma + h_minus xi^-(gamma+omega) beyond.
    """
    scalar = np.isscalar(xi)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    values = np.zeros_like(xi)
    positive = xi > 0.0
    x = np.full_like(xi, -np.inf)
    x[positive] = np.log(xi[positive])

    k = sol.params.k
    low = positive & (x < sol.x_min)
    mid = (x >= sol.x_min) & (x <= sol.x_switch)
    high = x > sol.x_switch

    values[low] = xi[low] ** k + 0.5 * series_coefficient(sol.params) * xi[low] ** (3 * k)
    values[mid] = 0.5 * (sol.v_interpolant(x[mid]) + math.pi)
    gamma, omega = sol.constants.gamma, sol.constants.omega
    values[high] = HALF_PI - sol.h * np.exp(-gamma * x[high]) + sol.h_minus * np.exp(-(gamma + omega) * x[high])

    values = np.clip(values, 0.0, BELOW_HALF_PI)
    return float(values[0]) if scalar else values


def slope(sol: ProfileSolution, x):
    """Return dU*/dxi = v'(x) exp(-x) / 2 from the interpolant."""
    return 0.5 * sol.v_prime_interpolant(x) * np.exp(-np.asarray(x, dtype=float))


def slope_normalization(sol: ProfileSolution) -> float:
    """
    Return C_s = 1 / sup |dU*/dxi|.

    The discrete maximum on the grid is refined by golden-section search. For k=1 the slope
    at the origin is 1 and takes part in the supremum.
    """
    x = sol.grid
    samples = 0.5 * sol.v_prime * np.exp(-x)
    i = int(np.argmax(samples))
    peak = float(samples[i])
    if 0 < i < x.size - 1:
        result = minimize_scalar(lambda t: -slope(sol, t), bracket=(x[i - 1], x[i], x[i + 1]), method='golden')
        peak = max(peak, float(-result.fun))
    origin = 1.0 if sol.params.k == 1 else 0.0
    return 1.0 / max(peak, origin)


def local_decay_rate(sol: ProfileSolution) -> np.ndarray:
    """Return -v''/v' on the grid, which tends to gamma along the tail."""
    return -sol.v_second / sol.v_prime


def boundary_fluxes(params: ModelParams, constants: DerivedConstants, v) -> dict:
    """
    Return the inward fluxes through both boundaries of the trapping region at v.

    The lower boundary is v' = -k sin v with inward normal (k cos v, 1) and the upper one is
    v' = -gamma sin v with inward normal (-gamma cos v, -1).
    """
    v = np.asarray(v, dtype=float)
    k, gamma = params.k, constants.gamma
    sin_v, cos_v = np.sin(v), np.cos(v)

    lower_p = -k * sin_v
    lower_dot = k * cos_v * lower_p + pendulum_acceleration(params, v, lower_p)
    upper_p = -gamma * sin_v
    upper_dot = -gamma * cos_v * upper_p - pendulum_acceleration(params, v, upper_p)
    return {
        'lower': -k * k * sin_v * (1.0 + cos_v),
        'upper': -gamma * gamma * sin_v * (1.0 - cos_v),
        'lower_dot': lower_dot,
        'upper_dot': upper_dot,
    }


def check_trapping(sol: ProfileSolution, samples: int = 64) -> TrappingReport:
    """
    Measure how far the orbit strays from the trapping region.

    Args:
        sol (ProfileSolution): The orbit.
        samples (int): The number of boundary points at which the fluxes are sampled.

    Returns:
        TrappingReport: The worst excursions and the flux samples.
    """
    k, gamma = sol.params.k, sol.constants.gamma
    sin_v = np.sin(sol.v)
    lower = float(np.max(-k * sin_v - sol.v_prime))
    upper = float(np.max(sol.v_prime + gamma * sin_v))

    flux_samples = []
    if samples > 0:
        points = np.linspace(-math.pi, 0.0, samples + 2)[1:-1]
        fluxes = boundary_fluxes(sol.params, sol.constants, points)
        flux_samples = [
            dict({name: float(values[i]) for name, values in fluxes.items()}, v=float(points[i]))
            for i in range(samples)
        ]
    return TrappingReport(max_lower_violation=lower, max_upper_violation=upper,
                          boundary_flux_samples=flux_samples)


def export_orbit_csv(sol: ProfileSolution, path) -> None:
    """Write the orbit as x, v, vPrime rows."""
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle)
        writer.writerow(['x', 'v', 'vPrime'])
        for row in zip(sol.grid, sol.v, sol.v_prime):
            writer.writerow([repr(float(value)) for value in row])
