"""
This module integrates the reduced dynamics of a blow-up construction.

The boundary-layer scale obeys gamma eps' = -lambda_N eps - (D_N c_N / h) eps^(1+delta),
the outer coefficients a_n follow linear equations forced by D_n eps^(gamma+delta), and the
rate R(t) = C_s sqrt(T-t) eps(-log(T-t)) turns into a power or a logarithmic law.
"""
import enum
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, Iterable, Mapping, Optional

import numpy as np
from django.conf import settings
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.stats import linregress

from coupling.integrals import CouplingConstants
from params.exceptions import InvalidParameters
from params.parameters import ModelParams, eigenvalue
from profiles.harmonic_map import HALF_PI, ProfileSolution, eval_u
from rates.exceptions import BlowupOfEpsilon, NegativeEigenvalue
from spectral.basis import EigenBasis

logger = logging.getLogger(__name__)


class RateKind(enum.Enum):
    """This class defines the two shapes of a predicted rate law."""

    POWER = 'power'
    LOGARITHMIC = 'logarithmic'


@dataclass(frozen=True)
class ReducedConstants:
    """
    This class defines the constants of the reduced dynamics.

    Attributes:
        params (ModelParams): The parameter point.
        index (int): N.
        gamma (float): The tail exponent.
        delta (float): The nonlinear exponent.
        h (float): The tail amplitude of the profile.
        eigenvalues (ndarray): lambda_n for n = 0..max_n.
        d_values (ndarray): D_n for n = 0..max_n.
        c_values (ndarray): c_n for n = 0..max_n.
    """

    params: ModelParams
    index: int
    gamma: float
    delta: float
    h: float
    eigenvalues: np.ndarray
    d_values: np.ndarray
    c_values: np.ndarray

    @property
    def eigenvalue(self) -> float:
        """Return lambda_N, snapped to zero inside the neutral tolerance."""
        value = float(self.eigenvalues[self.index])
        return 0.0 if abs(value) <= settings.BLOWUPLAB['NEUTRAL_TOLERANCE'] else value

    @property
    def d_index(self) -> float:
        """Return D_N."""
        return float(self.d_values[self.index])

    @property
    def c_index(self) -> float:
        """Return c_N."""
        return float(self.c_values[self.index])

    @property
    def coefficient(self) -> float:
        """Return B = D_N c_N / h."""
        return self.d_index * self.c_index / self.h

    @property
    def scale(self) -> Optional[float]:
        """Return C_N = (h gamma / (c_N D_N delta))^(1/delta), None without a positive coupling."""
        if self.coefficient <= 0.0:
            return None
        return (self.gamma / (self.coefficient * self.delta)) ** (1.0 / self.delta)


def reduced_constants(profile: ProfileSolution, basis: EigenBasis, coupling: CouplingConstants) -> ReducedConstants:
    """Collect the reduced constants from the upstream stages."""
    count = coupling.values.size
    return ReducedConstants(
        params=profile.params,
        index=coupling.index,
        gamma=profile.constants.gamma,
        delta=coupling.delta,
        h=profile.h,
        eigenvalues=np.array([basis.eigenvalue(n) for n in range(count)]),
        d_values=np.array(coupling.values, dtype=float),
        c_values=np.array(basis.c_origin[:count], dtype=float),
    )


def check_eigenvalue(value: float, index: int) -> None:
    """Reject lambda_N < 0 beyond the neutral tolerance."""
    if value < -settings.BLOWUPLAB['NEUTRAL_TOLERANCE']:
        raise NegativeEigenvalue(f"lambda_{index}={value:g} < 0: eps would grow along this mode")


@dataclass(frozen=True, eq=False)
class EpsilonTrajectory:
    """
    This class defines a sampled boundary-layer scale.

    Attributes:
        constants (ReducedConstants): The constants the trajectory was integrated with.
        epsilon0 (float): eps(0).
        s (ndarray): The sample times.
        epsilon (ndarray): eps(s).
        slope (float): The late-time slope, of log eps for lambda_N > 0 and of eps^(-delta) otherwise.
        s0 (float): The fitted shift of the logarithmic law, None for lambda_N > 0.
    """

    constants: ReducedConstants
    epsilon0: float
    s: np.ndarray
    epsilon: np.ndarray
    slope: float
    s0: Optional[float]

    @cached_property
    def log_interpolant(self) -> CubicSpline:
        """Return a spline of log eps against s."""
        return CubicSpline(self.s, np.log(self.epsilon))

    def at(self, s):
        """Evaluate eps between the samples."""
        return np.exp(self.log_interpolant(s))


def closed_form_epsilon(constants: ReducedConstants, epsilon0: float, s):
    """
    Evaluate the exact solution of the Bernoulli equation for eps.

    With u = eps^(-delta) the equation is linear: u' = (delta/gamma)(lambda_N u + B).

    Args:
        constants (ReducedConstants): The reduced constants.
        epsilon0 (float): eps(0).
        s (float or ndarray): The times.

    Returns:
        float or ndarray: eps(s).
    """
    s = np.asarray(s, dtype=float)
    lam, b = constants.eigenvalue, constants.coefficient
    gamma, delta = constants.gamma, constants.delta
    if b == 0.0:
        return epsilon0 * np.exp(-lam * s / gamma)
    u0 = epsilon0 ** -delta
    if lam > 0.0:
        u = (u0 + b / lam) * np.exp(delta * lam * s / gamma) - b / lam
    else:
        u = u0 + delta * b * s / gamma
    if np.any(u <= 0.0):
        raise BlowupOfEpsilon(f"eps reaches infinity before s={float(np.max(s)):g}: B={b:g}")
    return u ** (-1.0 / delta)


def solve_epsilon(constants: ReducedConstants, epsilon0: float, s_max: Optional[float] = None,
                  samples: Optional[int] = None, tolerance: Optional[float] = None) -> EpsilonTrajectory:
    """
    Integrate gamma eps' = -lambda_N eps - B eps^(1+delta) for log eps.

    Args:
        constants (ReducedConstants): The reduced constants.
        epsilon0 (float): eps(0), in (0, MAX_EPSILON0].
        s_max (float): The final time.
        samples (int): The number of stored samples.
        tolerance (float): The relative tolerance of the integrator.

    Returns:
        EpsilonTrajectory: The trajectory with its late-time fit.

    Raises:
        NegativeEigenvalue: lambda_N < 0.
        BlowupOfEpsilon: eps doubles.
    """
    config = settings.BLOWUPLAB['RATES']
    s_max = config['S_MAX'] if s_max is None else s_max
    samples = config['SAMPLES'] if samples is None else samples
    tolerance = config['TOLERANCE'] if tolerance is None else tolerance

    lam = constants.eigenvalue
    check_eigenvalue(lam, constants.index)
    if not 0.0 < epsilon0 <= config['MAX_EPSILON0']:
        raise InvalidParameters(f"eps0 must lie in (0, {config['MAX_EPSILON0']:g}], got {epsilon0!r}")
    b, gamma, delta = constants.coefficient, constants.gamma, constants.delta
    ceiling = math.log(2.0 * epsilon0)

    def field(_, state):
        return [(-lam - b * math.exp(delta * state[0])) / gamma]

    def doubled(_, state):
        return state[0] - ceiling

    doubled.terminal = True
    doubled.direction = 1

    s = np.linspace(0.0, s_max, samples)
    result = solve_ivp(field, (0.0, s_max), [math.log(epsilon0)], method='DOP853', t_eval=s, events=doubled,
                       rtol=tolerance, atol=1e-3 * tolerance)
    if result.status == 1:
        raise BlowupOfEpsilon(
            f"eps doubled by s={result.t_events[0][0]:.6g}: check the sign of D_N c_N / h = {b:g}"
        )
    if not result.success:
        raise BlowupOfEpsilon(f"eps integration failed: {result.message}")
    epsilon = np.exp(result.y[0])

    late = s >= 0.5 * s_max
    s0 = None
    if lam > 0.0:
        slope = linregress(s[late], np.log(epsilon[late])).slope
    else:
        fit = linregress(s[late], epsilon[late] ** -delta)
        slope = fit.slope
        s0 = -fit.intercept / fit.slope if fit.slope > 0.0 else None

    logger.debug("eps trajectory lambda=%g B=%g: eps(%g)=%.6e", lam, b, s_max, epsilon[-1])
    return EpsilonTrajectory(constants=constants, epsilon0=epsilon0, s=s, epsilon=epsilon, slope=float(slope),
                             s0=s0)


@dataclass(frozen=True)
class RateLaw:
    """
    This class defines a predicted blow-up rate.

    Power: R = prefactor * eps0 * (T-t)^exponent.
    Logarithmic: R = prefactor * sqrt(T-t) / (-log(T-t) - s0)^exponent.

    Attributes:
        kind (RateKind): The shape of the law.
        index (int): N.
        exponent (float): 1/2 + beta_N, or 1/delta.
        prefactor (float): C_s, or C = C_s C_N.
        free_parameter (str): The data-dependent constant, eps0 or s0.
        constants (dict): h, Cs, cN, DN, delta, gamma, omega and, for the logarithmic law, CN.
    """

    kind: RateKind
    index: int
    exponent: float
    prefactor: float
    free_parameter: str
    constants: Dict[str, float]

    def evaluate(self, remaining_time, free_value: float):
        """Return R at T - t = remaining_time for a value of the free parameter."""
        tau = np.asarray(remaining_time, dtype=float)
        if self.kind is RateKind.POWER:
            return self.prefactor * free_value * tau ** self.exponent
        return self.prefactor * np.sqrt(tau) / (-np.log(tau) - free_value) ** self.exponent


def predict_rate(params: ModelParams, index: int, profile: ProfileSolution, basis: EigenBasis,
                 coupling: CouplingConstants) -> RateLaw:
    """
    Turn the upstream constants into a rate law.

    Raises:
        NegativeEigenvalue: lambda_N < 0.
        BlowupOfEpsilon: lambda_N = 0 without a positive coupling.
    """
    entry = eigenvalue(params, index)
    check_eigenvalue(entry.eigenvalue, index)
    constants = profile.constants
    table = {
        'h': profile.h,
        'Cs': profile.cs,
        'cN': float(basis.c_origin[index]),
        'DN': float(coupling.values[index]),
        'delta': constants.delta,
        'gamma': constants.gamma,
        'omega': constants.omega,
    }
    if abs(entry.eigenvalue) > settings.BLOWUPLAB['NEUTRAL_TOLERANCE']:
        return RateLaw(kind=RateKind.POWER, index=index, exponent=0.5 + entry.beta, prefactor=profile.cs,
                       free_parameter='epsilon0', constants=table)

    reduced = reduced_constants(profile, basis, coupling)
    scale = reduced.scale
    if scale is None:
        raise BlowupOfEpsilon(f"D_N c_N / h = {reduced.coefficient:g} <= 0 at a neutral mode: eps does not decay")
    table['CN'] = scale
    return RateLaw(kind=RateKind.LOGARITHMIC, index=index, exponent=1.0 / constants.delta,
                   prefactor=profile.cs * scale, free_parameter='s0', constants=table)


@dataclass(frozen=True)
class Codimension:
    """
    This class defines the stability ledger of a construction.

    Attributes:
        constraints (int): The matching constraints on a_0..a_(N-1).
        effective_unstable (int): The constraints left after the blow-up-time gauge.
    """

    constraints: int
    effective_unstable: int


def codimension(params: ModelParams, index: int) -> Codimension:
    """Count the constraints initial data must meet to follow f_N."""
    entry = eigenvalue(params, index)
    check_eigenvalue(entry.eigenvalue, index)
    return Codimension(constraints=index, effective_unstable=index - 1)


@dataclass(frozen=True, eq=False)
class CoefficientFlow:
    """
    This class defines sampled outer coefficients.

    Attributes:
        s (ndarray): The sample times.
        values (dict): a_n(s) by index.
        matched (ndarray): a_N(s) = -(h/c_N) eps^gamma.
        requirements (dict): The matching values of a_n(0) for n < N.
    """

    s: np.ndarray
    values: Dict[int, np.ndarray]
    matched: np.ndarray
    requirements: Dict[int, float]

    def ratio(self, n: int) -> np.ndarray:
        """Return a_n / a_N."""
        return self.values[n] / self.matched


def _forcing(constants: ReducedConstants, trajectory: EpsilonTrajectory) -> Callable:
    power = constants.gamma + constants.delta
    return lambda s: math.exp(power * float(trajectory.log_interpolant(s)))


def _forward_kernel(constants: ReducedConstants, trajectory: EpsilonTrajectory, lam: float) -> np.ndarray:
    """Return the integral of eps^(gamma+delta)(q) exp(-lambda (s-q)) over [0, s]."""
    forcing = _forcing(constants, trajectory)
    tolerance = settings.BLOWUPLAB['RATES']['TOLERANCE']
    s = trajectory.s
    result = solve_ivp(lambda q, state: [-lam * state[0] + forcing(q)], (s[0], s[-1]), [0.0], method='DOP853',
                       t_eval=s, rtol=tolerance, atol=1e-30)
    return result.y[0]


def _backward_kernel(constants: ReducedConstants, trajectory: EpsilonTrajectory, lam: float) -> np.ndarray:
    """Return the integral of eps^(gamma+delta)(q) exp(lambda (q-s)) over [s, inf) for lambda < 0."""
    forcing = _forcing(constants, trajectory)
    tolerance = settings.BLOWUPLAB['RATES']['TOLERANCE']
    s = trajectory.s
    power = constants.gamma + constants.delta
    # Past s_max eps^(gamma+delta) decays at its local logarithmic rate.
    decay = -power * float(trajectory.log_interpolant(s[-1], 1))
    start = forcing(s[-1]) / (decay - lam)
    result = solve_ivp(lambda q, state: [-lam * state[0] - forcing(q)], (s[-1], s[0]), [start], method='DOP853',
                       t_eval=s[::-1], rtol=tolerance, atol=1e-30)
    return result.y[0][::-1]


def matching_requirement(constants: ReducedConstants, trajectory: EpsilonTrajectory, n: int) -> float:
    """Return the a_n(0) that removes the growing mode of a_n for lambda_n < 0."""
    lam = float(constants.eigenvalues[n])
    if lam >= 0.0:
        raise InvalidParameters(f"lambda_{n}={lam:g} is not a growing mode")
    return float(-constants.d_values[n] * _backward_kernel(constants, trajectory, lam)[0])


def coefficient_flow(constants: ReducedConstants, trajectory: EpsilonTrajectory, initial: Mapping[int, float],
                     n_range: Optional[Iterable[int]] = None) -> CoefficientFlow:
    """
    Evaluate the outer coefficients along an eps trajectory.

    Modes with n >= N use the forward solution. Modes with n < N are written around the matching
    value so that only a_n(0) minus that value multiplies the growing exponential.

    Args:
        constants (ReducedConstants): The reduced constants.
        trajectory (EpsilonTrajectory): eps on [0, s_max].
        initial (dict): a_n(0) by index, 0 when missing.
        n_range (iterable): The indices, every tabulated one by default.

    Returns:
        CoefficientFlow: a_n(s), the matched a_N and the matching values.
    """
    s = trajectory.s
    n_range = range(constants.eigenvalues.size) if n_range is None else n_range
    values, requirements = {}, {}
    for n in n_range:
        lam = float(constants.eigenvalues[n])
        start = float(initial.get(n, 0.0))
        d_n = float(constants.d_values[n])
        if n < constants.index and lam < 0.0:
            kernel = _backward_kernel(constants, trajectory, lam)
            requirement = -d_n * kernel[0]
            requirements[n] = requirement
            values[n] = np.exp(-lam * s) * (start - requirement) - d_n * kernel
        else:
            values[n] = start * np.exp(-lam * s) + d_n * _forward_kernel(constants, trajectory, lam)
    matched = -(constants.h / constants.c_index) * trajectory.epsilon ** constants.gamma
    return CoefficientFlow(s=s, values=values, matched=matched, requirements=requirements)


def gauge_shift(basis: EigenBasis, psi_s: Callable, psi_y: Callable, n: int, exponent: float = 0.0) -> float:
    """
    Return <d_s psi + (y/2) d_y psi, phi_n>.

    Shifting the blow-up time T to T + eta moves a_n(0) by -eta times this value to first order.
    The shifted function behaves like y^exponent at the origin.
    """
    return basis.inner(lambda y: psi_s(y) + 0.5 * y * psi_y(y), lambda y: basis.phi(n, y),
                       exponent=exponent - basis.constants.gamma)


@dataclass(frozen=True, eq=False)
class AnsatzSnapshot:
    """
    This class defines the global approximate solution at one time.

    Attributes:
        s (float): The self-similar time, None when unknown.
        epsilon (float): The boundary-layer scale.
        crossover (float): K = sqrt(eps).
        y (ndarray): The grid.
        values (ndarray): f_N on the grid.
        inner (ndarray): The mask of grid points on y <= K.
        jump (float): |f_inn(K) - f_out(K)|.
        bound (float): The neglected corrections of both branches at K.
    """

    s: Optional[float]
    epsilon: float
    crossover: float
    y: np.ndarray
    values: np.ndarray
    inner: np.ndarray
    jump: float
    bound: float


def _outer_branch(profile: ProfileSolution, basis: EigenBasis, index: int, epsilon: float, y):
    amplitude = profile.h / basis.c_origin[index] * epsilon ** profile.constants.gamma
    return HALF_PI - amplitude * basis.phi(index, y)


def assemble_ansatz(profile: ProfileSolution, basis: EigenBasis, index: int, epsilon: float, y=None,
                    s: Optional[float] = None) -> AnsatzSnapshot:
    """
    Glue U*(y/eps) below K = sqrt(eps) to pi/2 - (h/c_N) eps^gamma phi_N(y) above it.

    Args:
        profile (ProfileSolution): The profile orbit.
        basis (EigenBasis): The eigenbasis.
        index (int): N.
        epsilon (float): The boundary-layer scale in (0, 0.1].
        y (ndarray): The grid, [0, 10] with K inserted by default.
        s (float): The self-similar time recorded on the snapshot.

    Returns:
        AnsatzSnapshot: The values and the mismatch at K.
    """
    ceiling = settings.BLOWUPLAB['RATES']['MAX_EPSILON0']
    if not 0.0 < epsilon <= ceiling:
        raise InvalidParameters(f"eps must lie in (0, {ceiling:g}], got {epsilon!r}")
    crossover = math.sqrt(epsilon)
    if y is None:
        y = np.unique(np.append(np.linspace(0.0, 10.0, 1001), crossover))
    y = np.asarray(y, dtype=float)
    inner = y <= crossover
    values = np.empty_like(y)
    values[inner] = eval_u(profile, y[inner] / epsilon)
    outer = ~inner & (y > 0.0)
    values[outer] = _outer_branch(profile, basis, index, epsilon, y[outer])

    gamma = profile.constants.gamma
    leading = HALF_PI - profile.h * epsilon ** gamma * crossover ** -gamma
    inner_edge = eval_u(profile, crossover / epsilon)
    outer_edge = float(_outer_branch(profile, basis, index, epsilon, crossover))
    return AnsatzSnapshot(
        s=s,
        epsilon=epsilon,
        crossover=crossover,
        y=y,
        values=values,
        inner=inner,
        jump=abs(inner_edge - outer_edge),
        bound=abs(inner_edge - leading) + abs(outer_edge - leading),
    )
