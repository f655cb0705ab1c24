"""
This module maps PDE states to self-similar variables y = r / sqrt(T-t), s = -log(T-t).

The resampled snapshots feed the spectral projection and the comparison with the matched ansatz.
"""
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from meshsim.solver import MeshState
from params.exceptions import InvalidParameters
from profiles.harmonic_map import HALF_PI, ProfileSolution
from rates.dynamics import assemble_ansatz
from spectral.basis import EigenBasis, default_y_max

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SelfSimilarSnapshot:
    """
    This class defines a state in self-similar variables.

    Attributes:
        t (float): The physical time.
        tau (float): T - t.
        s (float): -log(T-t).
        y (ndarray): r / sqrt(T-t) at the nodes.
        f (ndarray): u at the nodes.
    """

    t: float
    tau: float
    s: float
    y: np.ndarray
    f: np.ndarray

    @cached_property
    def interpolant(self) -> PchipInterpolator:
        """Return the monotone-preserving interpolant of f."""
        return PchipInterpolator(self.y, self.f, extrapolate=False)

    def __call__(self, y):
        """Return f at y."""
        return self.interpolant(y)

    def resample(self, y) -> np.ndarray:
        """Return f on a new grid inside [0, y_max]."""
        y = np.asarray(y, dtype=float)
        if np.any(y < 0.0) or np.any(y > self.y[-1]):
            raise InvalidParameters(f"resampling grid leaves [0, {self.y[-1]:.6g}]")
        return self.interpolant(y)


def to_self_similar(state: MeshState, blowup_time: Optional[float] = None,
                    remaining_time: Optional[float] = None) -> SelfSimilarSnapshot:
    """
    Rescale a state to self-similar variables.

    Args:
        state (MeshState): The state.
        blowup_time (float): T.
        remaining_time (float): T - t, which overrides blowup_time when the difference is known more precisely.

    Returns:
        SelfSimilarSnapshot: The rescaled state.
    """
    if remaining_time is None:
        if blowup_time is None:
            raise InvalidParameters("either the blow-up time or the remaining time is needed")
        remaining_time = blowup_time - state.t
    if not remaining_time > 0.0:
        raise InvalidParameters(f"the state at t={state.t:.12g} is not before the blow-up time")
    return SelfSimilarSnapshot(
        t=state.t,
        tau=float(remaining_time),
        s=-math.log(remaining_time),
        y=state.r / math.sqrt(remaining_time),
        f=np.array(state.u, dtype=float),
    )


def epsilon_from_gradient(cs: float, remaining_time: float, dr_u0: float) -> float:
    """Return eps from R = C_s sqrt(T-t) eps and R = 1 / u_r(0, t)."""
    return 1.0 / (cs * math.sqrt(remaining_time) * abs(dr_u0))


@dataclass(frozen=True, eq=False)
class AnsatzOverlay:
    """
    This class defines a snapshot laid over the matched ansatz.

    Attributes:
        s (float): -log(T-t).
        epsilon (float): The boundary-layer scale inferred from u_r(0, t).
        y (ndarray): The comparison grid on [2 eps, 1].
        simulated (ndarray): f on the grid.
        ansatz (ndarray): f_N on the grid.
        distance (float): The sup-distance over the grid.
    """

    s: float
    epsilon: float
    y: np.ndarray
    simulated: np.ndarray
    ansatz: np.ndarray
    distance: float


def compare_ansatz(snapshot: SelfSimilarSnapshot, profile: ProfileSolution, basis: EigenBasis, index: int,
                   epsilon: float, points: int = 400) -> AnsatzOverlay:
    """
    Measure how far a snapshot is from f_N at the inferred eps.

    Args:
        snapshot (SelfSimilarSnapshot): The rescaled state.
        profile (ProfileSolution): The profile orbit.
        basis (EigenBasis): The eigenbasis.
        index (int): N.
        epsilon (float): The boundary-layer scale.
        points (int): The size of the geometric comparison grid.

    Returns:
        AnsatzOverlay: Both curves and their sup-distance over y in [2 eps, 1].
    """
    upper = min(1.0, float(snapshot.y[-1]))
    if not 2.0 * epsilon < upper:
        raise InvalidParameters(f"eps={epsilon:.4g} leaves no room for [2 eps, {upper:g}]")
    y = np.geomspace(2.0 * epsilon, upper, points)
    ansatz = assemble_ansatz(profile, basis, index, epsilon, y=y, s=snapshot.s)
    simulated = snapshot.resample(y)
    return AnsatzOverlay(
        s=snapshot.s,
        epsilon=epsilon,
        y=y,
        simulated=simulated,
        ansatz=ansatz.values,
        distance=float(np.max(np.abs(simulated - ansatz.values))),
    )


def project_snapshot(snapshot: SelfSimilarSnapshot, basis: EigenBasis, max_index: Optional[int] = None) -> np.ndarray:
    """
    Return a_n = <f - pi/2, phi_n> over the resolved part of the domain.

    The integral stops at the smaller of the rescaled domain edge and the point where the weight is negligible.
    """
    y_max = min(float(snapshot.y[-1]), default_y_max(basis.params))

    def psi(y):
        return float(snapshot.interpolant(y)) - HALF_PI

    coefficients = basis.project(psi, y_max=y_max, max_index=max_index)
    logger.debug("snapshot s=%.4f projected: %s", snapshot.s, np.array2string(coefficients, precision=4))
    return coefficients
