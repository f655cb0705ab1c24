"""This module defines the parameter space (d, k, N) and its closed-form derived constants."""
import enum
import math
from dataclasses import dataclass
from typing import Optional

from django.conf import settings

from params.exceptions import DegenerateRegime, InvalidParameters, SubcriticalDimension

IDENTITY_TOLERANCE = 1e-14


class Regime(enum.Enum):
    """This class defines which part of the solution sets the nonlinear coupling."""

    INNER_DOMINATED = 'inner'
    OUTER_DOMINATED = 'outer'
    DEGENERATE = 'degenerate'


@dataclass(frozen=True)
class ModelParams:
    """
    This class defines a point of the parameter space.

    Attributes:
        d (float): The spatial dimension, real so that non-integer dimensions can be explored.
        k (int): The corotational degree.
        index (int): The selected eigen-index N, None until a construction is chosen.
    """

    d: float
    k: int
    index: Optional[int] = None

    def __post_init__(self):
        """Check the integer fields."""
        if isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 1:
            raise InvalidParameters(f"k must be a positive integer, got {self.k!r}")
        if self.index is not None and (not isinstance(self.index, int) or self.index < 0):
            raise InvalidParameters(f"N must be a non-negative integer, got {self.index!r}")
        if not math.isfinite(self.d):
            raise InvalidParameters(f"d must be finite, got {self.d!r}")

    @property
    def angular_density(self) -> float:
        """Return k(d+k-2), the energy density of the equatorial harmonic map."""
        return self.k * (self.d + self.k - 2)

    @property
    def is_geometric(self) -> bool:
        """Return whether d is an integer dimension."""
        return float(self.d).is_integer()

    def with_index(self, index: int) -> 'ModelParams':
        """Return a copy with the eigen-index set."""
        return ModelParams(self.d, self.k, index)


@dataclass(frozen=True)
class DerivedConstants:
    """
    This class defines the constants derived from (d, k).

    Attributes:
        omega (float): The gap between the two decay exponents of the profile tail.
        gamma (float): The leading decay exponent of the profile tail.
        d_star (float): The critical dimension 2+k(2+2 sqrt 2).
        delta (float): The nonlinear exponent min(omega, 2 gamma).
        mu_plus (float): The slow eigenvalue -gamma of the linearized pendulum.
        mu_minus (float): The fast eigenvalue -gamma-omega.
        regime (Regime): The dominant part of the coupling integral.
    """

    omega: float
    gamma: float
    d_star: float
    delta: float
    mu_plus: float
    mu_minus: float
    regime: Regime


@dataclass(frozen=True)
class SpectrumEntry:
    """
    This class defines one eigenvalue of the linearization around the equatorial map.

    Attributes:
        n (int): The index.
        eigenvalue (float): lambda_n = -gamma/2 + n.
        beta (float): The rate exponent correction beta_n = lambda_n / gamma.
    """

    n: int
    eigenvalue: float
    beta: float


@dataclass(frozen=True)
class Classification:
    """
    This class defines the admissibility ledger of a parameter point.

    Attributes:
        neutral_index (int): N0 = (d-2-omega)/4 when it is an integer, else None.
        min_admissible_index (int): The smallest N with lambda_N >= 0.
        stability_bound (float): k/2, which every admissible N exceeds.
        unstable_directions (int): N-1 for the chosen N, None when no N was chosen.
    """

    neutral_index: Optional[int]
    min_admissible_index: int
    stability_bound: float
    unstable_directions: Optional[int]


def critical_dimension(k: int) -> float:
    """Return d* = 2+k(2+2 sqrt 2), the onset of the non-oscillatory profile tail."""
    return 2.0 + k * (2.0 + 2.0 * math.sqrt(2.0))


def degenerate_dimension(k: int) -> float:
    """
    Return the dimension above d* where omega = 2 gamma.

    The condition 2 omega = d-2 reduces to 3d^2 - (16k+12)d + (12+32k-16k^2) = 0,
    whose larger root is the one above d*.
    """
    b = 16.0 * k + 12.0
    c = 12.0 + 32.0 * k - 16.0 * k * k
    return (b + math.sqrt(b * b - 12.0 * c)) / 6.0


def derive(params: ModelParams, allow_degenerate: bool = False) -> DerivedConstants:
    """
    Compute the derived constants of a parameter point.

    Args:
        params (ModelParams): The parameter point.
        allow_degenerate (bool): Return the degenerate point instead of raising.

    Returns:
        DerivedConstants: The constants, with d-2-gamma = gamma+omega checked.

    Raises:
        SubcriticalDimension: d <= d*.
        DegenerateRegime: omega = 2 gamma and allow_degenerate is false.
    """
    d, k = float(params.d), params.k
    d_star = critical_dimension(k)
    if d <= d_star:
        raise SubcriticalDimension(
            f"d={d:g} is not above d*={d_star:.6f} for k={k}: the profile tail oscillates"
        )
    omega = math.sqrt((d - 2.0 * (k + 1)) ** 2 - 8.0 * k * k)
    gamma = 0.5 * (d - 2.0 - omega)
    if abs((d - 2.0 - gamma) - (gamma + omega)) > IDENTITY_TOLERANCE * max(1.0, d):
        raise ArithmeticError(f"d-2-gamma != gamma+omega at d={d!r}, k={k}")

    if math.isclose(omega, 2.0 * gamma, rel_tol=1e-12):
        if not allow_degenerate:
            raise DegenerateRegime(
                f"omega = 2 gamma at d={d:g}, k={k}: both coupling integrals diverge logarithmically"
            )
        regime = Regime.DEGENERATE
    elif omega < 2.0 * gamma:
        regime = Regime.INNER_DOMINATED
    else:
        regime = Regime.OUTER_DOMINATED

    return DerivedConstants(
        omega=omega,
        gamma=gamma,
        d_star=d_star,
        delta=min(omega, 2.0 * gamma),
        mu_plus=-gamma,
        mu_minus=-gamma - omega,
        regime=regime,
    )


def eigenvalue(params: ModelParams, n: int) -> SpectrumEntry:
    """Return lambda_n and beta_n for the parameter point."""
    if n < 0:
        raise InvalidParameters(f"eigen-index must be non-negative, got {n}")
    constants = derive(params, allow_degenerate=True)
    d_minus = params.d - 2.0 - constants.omega
    return SpectrumEntry(
        n=n,
        eigenvalue=-0.5 * constants.gamma + n,
        beta=-0.5 + 2.0 * n / d_minus,
    )


def neutral_index(constants: DerivedConstants) -> Optional[int]:
    """Return N0 = gamma/2 when it is an integer within the neutral tolerance."""
    n0 = 0.5 * constants.gamma
    nearest = round(n0)
    if abs(n0 - nearest) <= settings.BLOWUPLAB['NEUTRAL_TOLERANCE']:
        return int(nearest)
    return None


def is_neutral(params: ModelParams, n: int) -> bool:
    """Return whether lambda_n vanishes."""
    return neutral_index(derive(params, allow_degenerate=True)) == n


def classify(params: ModelParams, index: Optional[int] = None) -> Classification:
    """
    Classify the admissible eigen-indices of a parameter point.

    Args:
        params (ModelParams): The parameter point, its own index is used when index is None.
        index (int): The chosen N.

    Returns:
        Classification: The neutral index, the smallest admissible N and the unstable count.
    """
    constants = derive(params, allow_degenerate=True)
    chosen = params.index if index is None else index
    n0 = neutral_index(constants)
    if n0 is not None:
        minimum = n0
    else:
        minimum = math.ceil(0.5 * constants.gamma)
    return Classification(
        neutral_index=n0,
        min_admissible_index=minimum,
        stability_bound=0.5 * params.k,
        unstable_directions=None if chosen is None else chosen - 1,
    )


def beta_curve(k: int, index: int, dimensions):
    """Return (d, beta_N(d)) pairs for the supercritical dimensions of a sweep."""
    d_star = critical_dimension(k)
    return [(d, eigenvalue(ModelParams(float(d), k), index).beta) for d in dimensions if d > d_star]
