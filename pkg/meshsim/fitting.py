"""
This module fits blow-up rates to a run trace.

Both fits work with the time left to the last sample, summed from the step sizes, so T - t
keeps its relative precision down to the last steps.
"""
import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
from django.conf import settings
from scipy.optimize import curve_fit, minimize_scalar
from scipy.stats import linregress

from meshsim.exceptions import DegenerateFit, NoBlowup, WindowTooShort
from meshsim.solver import RunTrace
from params.parameters import ModelParams, classify, derive

logger = logging.getLogger(__name__)

MIN_WINDOW_SAMPLES = 10


class FitKind(enum.Enum):
    """This class defines the two rate models."""

    POWER = 'power'
    LOG = 'log'


@dataclass(frozen=True)
class FitResult:
    """
    This class defines a fitted blow-up rate.

    Attributes:
        kind (FitKind): The model.
        blowup_time (float): T.
        remaining_time (float): T - t at the last sample.
        exponent (float): 1/2 + beta for the power model, 1/delta for the log model.
        beta (float): The power-law correction, None for the log model.
        C (float): The log-law prefactor, None for the power model.
        s0 (float): The log-law shift, None for the power model.
        residual (float): The RMS residual of the linearized model over the window.
        r_squared (float): The coefficient of determination of the linearized model.
        window_start (float): The first time of the window.
        window_end (float): The last time of the window.
        samples (int): The samples in the window.
        uncertainty (dict): One standard error per fitted quantity.
    """

    kind: FitKind
    blowup_time: float
    remaining_time: float
    exponent: float
    beta: Optional[float]
    C: Optional[float]  # pylint: disable=invalid-name
    s0: Optional[float]
    residual: float
    r_squared: float
    window_start: float
    window_end: float
    samples: int
    uncertainty: Dict[str, float] = field(default_factory=dict)


def _checked(trace: RunTrace):
    if not trace.blew_up:
        raise NoBlowup(f"the trace ends with status {trace.status!r}: nothing to fit")
    gradient = trace.rate_gradient
    keep = gradient > 0.0
    # lag - lag[-1] is t - t_last, exact to the step sizes.
    return -trace.lag[keep], gradient[keep], trace.t[keep]


def _window_check(count: int, span: float, unit: str):
    if count < MIN_WINDOW_SAMPLES:
        raise WindowTooShort(f"the fit window holds {count} samples, at least {MIN_WINDOW_SAMPLES} are needed")
    if span < 1.0:
        raise WindowTooShort(f"the fit window spans {span:.3g} {unit}, at least one is needed")


def fit_power(trace: RunTrace, decades: Optional[float] = None) -> FitResult:
    """
    Fit R(t)^-1 ~ (T-t)^-(1/2+beta).

    q = d log(R^-1)/dt equals (1/2+beta)/(T-t), so 1/q is a line in t with root T and slope
    -1/(1/2+beta). The window is the last decades of T-t, updated with the fitted T.

    Args:
        trace (RunTrace): A trace that reached the gradient limit.
        decades (float): The window in decades of T-t.

    Returns:
        FitResult: T, beta and their standard errors.

    Raises:
        NoBlowup: the trace did not reach the gradient limit.
        WindowTooShort: fewer than ten samples or less than one decade.
        DegenerateFit: the fitted exponent or T - t_last is not positive.
    """
    decades = settings.BLOWUPLAB['MESHSIM']['POWER_DECADES'] if decades is None else decades
    x, gradient, t = _checked(trace)
    inverse_rate = 1.0 / np.gradient(np.log(gradient), x, edge_order=2)

    window = np.arange(x.size) >= x.size // 2
    for _ in range(8):
        _window_check(int(np.count_nonzero(window)), math.inf, 'decades')
        fit = linregress(x[window], inverse_rate[window])
        if not fit.slope < 0.0 or not fit.intercept > 0.0:
            raise DegenerateFit(f"1/q has slope {fit.slope:.4g}, intercept {fit.intercept:.4g}: no root after t_last")
        remaining = -fit.intercept / fit.slope
        updated = (remaining - x) <= remaining * 10.0 ** decades
        if np.array_equal(updated, window):
            break
        window = updated

    span = math.log10((remaining - x[window][0]) / remaining)
    _window_check(int(np.count_nonzero(window)), span, 'decades')
    exponent = -1.0 / fit.slope
    residuals = inverse_rate[window] - (fit.intercept + fit.slope * x[window])
    relative_remaining = math.hypot(fit.intercept_stderr / fit.intercept, fit.stderr / fit.slope)
    result = FitResult(
        kind=FitKind.POWER,
        blowup_time=float(t[-1] + remaining),
        remaining_time=float(remaining),
        exponent=float(exponent),
        beta=float(exponent - 0.5),
        C=None,
        s0=None,
        residual=float(np.sqrt(np.mean(residuals ** 2))),
        r_squared=float(fit.rvalue ** 2),
        window_start=float(t[window][0]),
        window_end=float(t[-1]),
        samples=int(np.count_nonzero(window)),
        uncertainty={
            'beta': float(fit.stderr / fit.slope ** 2),
            'blowup_time': float(remaining * relative_remaining),
        },
    )
    logger.info("power fit: T=%.12g beta=%.6g +- %.2g over %.2f decades", result.blowup_time, result.beta,
                result.uncertainty['beta'], span)
    return result


def _log_regression(x: np.ndarray, gradient: np.ndarray, remaining: float, delta: float):
    tau = remaining - x
    abscissa = -np.log(tau)
    ordinate = (np.sqrt(tau) * gradient) ** delta
    fit = linregress(abscissa, ordinate)
    residuals = ordinate - (fit.intercept + fit.slope * abscissa)
    spread = np.sum((ordinate - np.mean(ordinate)) ** 2)
    return fit, residuals, float(np.sum(residuals ** 2) / spread)


def fit_log(trace: RunTrace, efoldings: Optional[float] = None, delta: Optional[float] = None) -> FitResult:
    """
    Fit R(t)^-1 ~ C (-log(T-t) - s0)^(1/delta) / sqrt(T-t).

    For fixed T, (sqrt(T-t) R^-1)^delta is a line in -log(T-t) with slope C^delta and root s0;
    T is found by a one-dimensional search on the unexplained variance of that line, then
    (T, C, s0) are polished together by nonlinear least squares.

    Args:
        trace (RunTrace): A trace that reached the gradient limit.
        efoldings (float): The window in e-foldings of T-t.
        delta (float): The nonlinear exponent, derived from (d, k) by default.

    Returns:
        FitResult: T, C, s0 and their standard errors.

    Raises:
        NoBlowup: the trace did not reach the gradient limit.
        WindowTooShort: fewer than ten samples or less than one e-folding.
        DegenerateFit: no line with positive slope, or the polish did not converge.
    """
    efoldings = settings.BLOWUPLAB['MESHSIM']['LOG_EFOLDINGS'] if efoldings is None else efoldings
    if delta is None:
        delta = derive(ModelParams(float(trace.config.d), trace.config.k)).delta
    x, gradient, t = _checked(trace)

    rate = np.gradient(np.log(gradient), x, edge_order=2)[-1]
    if not rate > 0.0:
        raise DegenerateFit(f"the gradient does not grow at the last sample (q={rate:.4g})")
    remaining = 0.5 / rate
    window = slice(0, x.size)

    def variance(z):
        return _log_regression(x[window], gradient[window], math.exp(z), delta)[2]

    for _ in range(2):
        window = (remaining - x) <= remaining * math.exp(efoldings)
        window = slice(int(np.argmax(window)), x.size)
        _window_check(x.size - window.start, math.log((remaining - x[window.start]) / remaining), 'e-foldings')
        grid = math.log(remaining) + np.linspace(-3.0, 3.0, 61)
        best = grid[int(np.argmin([variance(z) for z in grid]))]
        search = minimize_scalar(variance, bounds=(best - 0.1, best + 0.1), method='bounded',
                                 options={'xatol': 1e-10})
        remaining = math.exp(search.x)

    fit, residuals, unexplained = _log_regression(x[window], gradient[window], remaining, delta)
    if not fit.slope > 0.0:
        raise DegenerateFit(f"(sqrt(T-t) R^-1)^delta has slope {fit.slope:.4g} in -log(T-t)")
    prefactor = fit.slope ** (1.0 / delta)
    shift = -fit.intercept / fit.slope

    def model(lag, z, c, s0):
        tau = lag + np.exp(z)
        return c * np.clip(-np.log(tau) - s0, 0.0, None) ** (1.0 / delta) / np.sqrt(tau)

    lag = -x[window]
    try:
        values, covariance = curve_fit(model, lag, gradient[window], p0=(math.log(remaining), prefactor, shift),
                                       sigma=gradient[window], maxfev=2000)
    except RuntimeError as error:
        raise DegenerateFit(f"the log-law polish did not converge: {error}") from error
    z, prefactor, shift = (float(value) for value in values)
    if not prefactor > 0.0 or not math.isfinite(z):
        raise DegenerateFit(f"the log-law polish left C={prefactor:.4g}")
    remaining = math.exp(z)
    errors = np.sqrt(np.abs(np.diag(covariance)))
    samples = x.size - window.start
    result = FitResult(
        kind=FitKind.LOG,
        blowup_time=float(t[-1] + remaining),
        remaining_time=remaining,
        exponent=1.0 / delta,
        beta=None,
        C=prefactor,
        s0=shift,
        residual=float(np.sqrt(np.mean(residuals ** 2))),
        r_squared=1.0 - unexplained,
        window_start=float(t[window][0]),
        window_end=float(t[-1]),
        samples=samples,
        uncertainty={
            'blowup_time': float(remaining * errors[0]),
            'C': float(errors[1]),
            's0': float(errors[2]),
        },
    )
    logger.info("log fit: T=%.12g C=%.6g s0=%.6g R^2=%.8f over %d samples", result.blowup_time, result.C,
                result.s0, result.r_squared, samples)
    return result


def fit_trace(trace: RunTrace, decades: Optional[float] = None, efoldings: Optional[float] = None) -> FitResult:
    """Fit the model of the trace's regime: log at a neutral smallest admissible mode, power otherwise."""
    if classify(ModelParams(float(trace.config.d), trace.config.k)).neutral_index is not None:
        return fit_log(trace, efoldings=efoldings)
    return fit_power(trace, decades=decades)


def rate_curve(trace: RunTrace, result: FitResult):
    """
    Return the scaled rate against the self-similar time.

    Returns:
        tuple: -log(T-t) and sqrt(T-t) R(t)^-1 for the samples before T.
    """
    tau = trace.lag + result.remaining_time
    keep = tau > 0.0
    return -np.log(tau[keep]), np.sqrt(tau[keep]) * trace.rate_gradient[keep]
