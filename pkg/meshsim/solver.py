"""
This module advances the radial flow on a moving mesh.

Nodes and values are integrated together by the BDF stepper with a banded Jacobian pattern.
The solver keeps a local clock restarted together with the integrator, so steps far below the
resolution of the absolute time stay representable; the time left to the last sample is
accumulated from the step sizes.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.integrate import BDF
from scipy.interpolate import PchipInterpolator

from meshsim.config import SimConfig
from meshsim.discretization import (
    energy, equidistribute, gradient, jacobian_pattern, mesh_velocity, monitor, physical_rate, uniform_share
)
from meshsim.exceptions import MeshTangling, StepSizeUnderflow

logger = logging.getLogger(__name__)

# The integrator restarts when the peak monitor leaves [REFERENCE_BAND^-1, REFERENCE_BAND] times its frozen value.
REFERENCE_BAND = 2.0

BLOWUP = 'blowup'
NO_BLOWUP = 'no_blowup'


@dataclass(frozen=True, eq=False)
class MeshState:
    """
    This class defines the solution at one time.

    Attributes:
        t (float): The time.
        r (ndarray): The nodes, 0 = r_0 < ... < r_(M-1) = L.
        u (ndarray): u at the nodes, u_0 = 0.
    """

    t: float
    r: np.ndarray
    u: np.ndarray


@dataclass(frozen=True, eq=False)
class Snapshot:
    """
    This class defines a kept state with its observables.

    Attributes:
        index (int): The position in the trace.
        level (float): The sup |u_r| level that triggered it.
        state (MeshState): The state.
        dr_u0 (float): u_r(0, t).
        sup_gradient (float): sup |u_r|.
        origin_ratio (float): |u_r(0, t)| / sup |u_r|, 1 when the supremum sits at the origin.
    """

    index: int
    level: float
    state: MeshState
    dr_u0: float
    sup_gradient: float
    origin_ratio: float


@dataclass(eq=False)
class RunTrace:
    """
    This class defines the observables of a run.

    Attributes:
        config (SimConfig): The configuration.
        t (ndarray): The accepted times.
        lag (ndarray): The time left to the last sample, summed from the step sizes.
        dr_u0 (ndarray): u_r(0, t).
        sup_grad (ndarray): sup |u_r|.
        energy (ndarray): E(u).
        min_dx (ndarray): The smallest mesh spacing.
        layer_nodes (ndarray): The nodes inside r <= 5 R(t), R = 1 / sup |u_r|.
        status (str): 'blowup' when the gradient limit was reached, 'no_blowup' otherwise.
        snapshots (list(Snapshot)): The kept states.
        restarts (int): The restarts after integrator failures or tangling.
        energy_violations (int): The steps where E grew beyond tolerance.
    """

    config: Optional[SimConfig]
    t: np.ndarray
    lag: np.ndarray
    dr_u0: np.ndarray
    sup_grad: np.ndarray
    energy: np.ndarray
    min_dx: np.ndarray
    layer_nodes: np.ndarray
    status: str
    snapshots: List[Snapshot] = field(default_factory=list)
    restarts: int = 0
    energy_violations: int = 0

    @property
    def blew_up(self) -> bool:
        """Return whether the gradient limit was reached."""
        return self.status == BLOWUP

    @property
    def rate_gradient(self) -> np.ndarray:
        """Return 1 / R(t): u_r(0, t) for k=1, sup |u_r| otherwise."""
        if self.config is not None and self.config.k != 1:
            return self.sup_grad
        return np.abs(self.dr_u0)


class MovingMeshSolver:
    """
    This class defines the stateful integrator of one run.

    The mesh obeys tau dr/dt = (M r_xi)_xi / M with tau = mesh_relaxation / M_ref^2, where M_ref is
    the peak monitor frozen at the last restart, so the relaxation follows the layer time R^2.
    """

    def __init__(self, config: SimConfig):
        """Prepare the run of a configuration."""
        self.config = config
        self.params = config.params
        self.angular_density = self.params.angular_density
        self.profile = config.initial_profile()
        self.boundary = config.boundary()
        self.state: Optional[MeshState] = None
        self.restarts = 0
        self._solver = None
        self._clock = 0.0
        self._theta = 0.0
        self._reference = 1.0
        self._rtol = config.rtol
        self._interior = config.nodes - 2
        self._pattern = jacobian_pattern(self._interior, config.smoothing_passes)

    def monitor(self, r: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Return the smoothed monitor without the uniform share."""
        config = self.config
        return monitor(r, u, self.params.k, config.monitor_floor, config.smoothing_passes)

    def initialize(self) -> MeshState:
        """
        Place the nodes by equidistributing the monitor of the initial data.

        Returns:
            MeshState: The state at t=0 with u_0 = 0 and u_(M-1) = u(L).
        """
        config = self.config
        fine = np.linspace(0.0, config.length, 20 * config.nodes)
        values = self._pinned(fine, self.profile(fine))
        weights = self.monitor(fine, values)
        weights = weights + uniform_share(fine, weights, config.uniform_fraction)
        r = equidistribute(fine, weights, config.nodes)
        self.state = MeshState(t=0.0, r=r, u=self._pinned(r, self.profile(r)))
        self.restarts = 0
        self._start(self.state, config.rtol)
        logger.debug("mesh initialized: %d nodes, min spacing %.3e", r.size, np.min(np.diff(r)))
        return self.state

    def _pinned(self, r: np.ndarray, u: np.ndarray) -> np.ndarray:
        u = np.array(u, dtype=float)
        u[0] = 0.0
        u[-1] = self.boundary
        return u

    def _unpack(self, y: np.ndarray):
        config = self.config
        n = self._interior
        r = np.empty(config.nodes)
        r[0], r[-1], r[1:-1] = 0.0, config.length, y[:n]
        u = np.empty(config.nodes)
        u[0], u[-1], u[1:-1] = 0.0, self.boundary, y[n:]
        return r, u

    def _start(self, state: MeshState, rtol: float) -> None:
        config = self.config
        weights = self.monitor(state.r, state.u)
        self._theta = uniform_share(state.r, weights, config.uniform_fraction)
        self._reference = float(np.max(weights + self._theta))
        self._clock = state.t
        self._rtol = rtol
        rate = self._reference ** 2 / config.mesh_relaxation
        theta = self._theta
        d, angular_density = float(self.params.d), self.angular_density

        def field(_, y):
            r, u = self._unpack(y)
            r_dot = mesh_velocity(r, self.monitor(r, u) + theta, rate)
            u_t, u_r = physical_rate(r, u, d, angular_density)
            return np.concatenate([r_dot, u_t + u_r * r_dot])

        n = self._interior
        spacing = float(np.min(np.diff(state.r)))
        atol = np.concatenate([np.full(n, config.atol * spacing), np.full(n, config.atol)])
        y0 = np.concatenate([state.r[1:-1], state.u[1:-1]])
        self._solver = BDF(field, 0.0, y0, config.t_max - state.t, rtol=rtol, atol=atol,
                           jac_sparsity=self._pattern)

    def _restart(self, reason: str, error) -> None:
        self.restarts += 1
        if self.restarts > self.config.max_restarts:
            raise error(f"{reason}; gave up after {self.config.max_restarts} restarts")
        state = self.state
        weights = self.monitor(state.r, state.u)
        r = equidistribute(state.r, weights + uniform_share(state.r, weights, self.config.uniform_fraction),
                           self.config.nodes)
        u = self._pinned(r, PchipInterpolator(state.r, state.u)(r))
        self.state = MeshState(t=state.t, r=r, u=u)
        logger.warning("restart %d at t=%.12g (%s): mesh re-equidistributed, rtol %.1e", self.restarts,
                       state.t, reason, 0.5 * self._rtol)
        self._start(self.state, 0.5 * self._rtol)

    @property
    def finished(self) -> bool:
        """Return whether t_max was reached."""
        return self._solver is not None and self._solver.status == 'finished'

    def step(self):
        """
        Advance by one accepted step.

        Returns:
            tuple: The new MeshState and the step size.

        Raises:
            StepSizeUnderflow: the integrator failed after every allowed restart.
            MeshTangling: the nodes crossed after every allowed restart.
        """
        while True:
            before = self._solver.t
            message = self._solver.step()
            if self._solver.status == 'failed':
                self._restart(f"integrator failed at t={self.state.t:.12g}: {message}", StepSizeUnderflow)
                continue
            r, u = self._unpack(self._solver.y)
            if np.any(np.diff(r) <= 0.0):
                self._restart(f"nodes crossed at t={self.state.t:.12g}", MeshTangling)
                continue
            break
        increment = self._solver.t - before
        self.state = MeshState(t=self._clock + self._solver.t, r=r, u=u)
        peak = float(np.max(self.monitor(r, u) + self._theta))
        if not 1.0 / REFERENCE_BAND <= peak / self._reference <= REFERENCE_BAND and not self.finished:
            self._start(self.state, self._rtol)
        return self.state, increment

    def observe(self, state: MeshState) -> dict:
        """Return the observables of a state."""
        slopes = gradient(state.r, state.u, self.params.k)
        sup = float(np.max(np.abs(slopes)))
        return {
            'dr_u0': float(slopes[0]),
            'sup_grad': sup,
            'energy': energy(state.r, state.u, float(self.params.d), self.angular_density),
            'min_dx': float(np.min(np.diff(state.r))),
            'layer_nodes': int(np.count_nonzero(state.r <= 5.0 / sup)) if sup > 0.0 else state.r.size,
        }

    def run(self) -> RunTrace:
        """
        Step until sup |u_r| reaches max_gradient or t reaches t_max.

        Returns:
            RunTrace: The observables, the snapshots and the status.
        """
        config = self.config
        state = self.initialize()
        levels = list(config.snapshot_levels())
        rows = {name: [] for name in ('t', 'dr_u0', 'sup_grad', 'energy', 'min_dx', 'layer_nodes')}
        increments, snapshots = [], []
        violations = 0

        def record(current):
            values = self.observe(current)
            rows['t'].append(current.t)
            for name, value in values.items():
                rows[name].append(value)
            while levels and values['sup_grad'] >= levels[0]:
                sup = values['sup_grad']
                snapshots.append(Snapshot(index=len(rows['t']) - 1, level=levels.pop(0), state=current,
                                          dr_u0=values['dr_u0'], sup_gradient=sup,
                                          origin_ratio=abs(values['dr_u0']) / sup))
            return values

        values = record(state)
        status = NO_BLOWUP
        while True:
            if values['sup_grad'] >= config.max_gradient:
                status = BLOWUP
                break
            if self.finished:
                break
            previous = values['energy']
            state, increment = self.step()
            increments.append(increment)
            values = record(state)
            if values['energy'] > previous + config.energy_tolerance * max(1.0, abs(previous)):
                violations += 1
                logger.warning("energy grew from %.12g to %.12g at t=%.12g", previous, values['energy'], state.t)
            logger.debug("t=%.15g dt=%.3e sup=%.6e layer=%d", state.t, increment, values['sup_grad'],
                         values['layer_nodes'])

        lag = np.concatenate([np.cumsum(np.asarray(increments[::-1], dtype=float))[::-1], [0.0]])
        logger.info("run %s d=%g k=%d: %s at t=%.12g after %d steps, sup|u_r|=%.4e", config.label or config.initial,
                    config.d, config.k, status, state.t, len(increments), values['sup_grad'])
        return RunTrace(
            config=config,
            t=np.array(rows['t']),
            lag=lag,
            dr_u0=np.array(rows['dr_u0']),
            sup_grad=np.array(rows['sup_grad']),
            energy=np.array(rows['energy']),
            min_dx=np.array(rows['min_dx']),
            layer_nodes=np.array(rows['layer_nodes'], dtype=int),
            status=status,
            snapshots=snapshots,
            restarts=self.restarts,
            energy_violations=violations,
        )


def initialize(config: SimConfig) -> MeshState:
    """Return the initial state of a configuration."""
    return MovingMeshSolver(config).initialize()


def run(config: SimConfig) -> RunTrace:
    """Run a configuration to blow-up or t_max."""
    return MovingMeshSolver(config).run()
