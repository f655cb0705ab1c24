"""This module defines the simulation configuration and the initial-data families."""
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.interpolate import PchipInterpolator

from meshsim.exceptions import BadInitialData
from params.exceptions import InvalidParameters
from params.parameters import ModelParams

# u(0) above this is not regular at the origin.
ORIGIN_TOLERANCE = 1e-12

FAMILIES = {
    'r': lambda r, k: r,
    'r+sin(r)': lambda r, k: r + np.sin(r),
    'r-sin(r)': lambda r, k: r - np.sin(r),
    'r^k': lambda r, k: r ** k,
}

TABULATED = 'tabulated'


def family_names():
    """Return every accepted initial-data name."""
    return sorted(FAMILIES) + [TABULATED]


@dataclass(frozen=True)
class SimConfig:
    """
    This class defines a simulation of the radial flow.

    Attributes:
        d (float): The dimension.
        k (int): The degree.
        initial (str): The initial-data family.
        table (tuple): (r, u) pairs of tabulated initial data.
        length (float): The domain [0, L].
        boundary_value (float): u(L, t), the initial value at L when None.
        nodes (int): The mesh size M.
        monitor_floor (float): alpha in sqrt(alpha + u_r^2).
        uniform_fraction (float): The share of nodes spread uniformly.
        smoothing_passes (int): The [1, 2, 1] filter passes on the monitor.
        mesh_relaxation (float): The relaxation time of the mesh equation, in units of the layer time.
        rtol (float): The relative tolerance of the stiff integrator.
        atol (float): The absolute tolerance of the stiff integrator.
        max_gradient (float): The stop criterion on sup |u_r|.
        t_max (float): The final time when no blow-up happens.
        energy_tolerance (float): The allowed relative energy increase per step.
        max_restarts (int): The integrator restarts allowed after a failure.
        snapshot_gradients (tuple): The sup |u_r| levels where a snapshot is kept.
        label (str): A free name for the run.
    """

    d: float
    k: int
    initial: str = 'r'
    table: Optional[Tuple[Tuple[float, float], ...]] = None
    length: float = 2.0
    boundary_value: Optional[float] = None
    nodes: int = 201
    monitor_floor: float = 1.0
    uniform_fraction: float = 0.1
    smoothing_passes: int = 2
    mesh_relaxation: float = 0.1
    rtol: float = 1e-6
    atol: float = 1e-9
    max_gradient: float = 1e8
    t_max: float = 1.0
    energy_tolerance: float = 1e-6
    max_restarts: int = 3
    snapshot_gradients: Tuple[float, ...] = field(default_factory=tuple)
    label: str = ''

    def __post_init__(self):
        if not self.length > 0.0:
            raise InvalidParameters(f"domain length must be positive, got {self.length!r}")
        if self.nodes < 64:
            raise InvalidParameters(f"at least 64 nodes are needed, got {self.nodes}")
        if self.max_gradient < 1e6:
            raise InvalidParameters(f"maxGradient must be at least 1e6, got {self.max_gradient:g}")
        if not 0.0 <= self.uniform_fraction < 1.0:
            raise InvalidParameters(f"uniform fraction must lie in [0, 1), got {self.uniform_fraction!r}")
        if self.initial not in FAMILIES and self.initial != TABULATED:
            raise InvalidParameters(f"unknown initial data {self.initial!r}, expected one of {family_names()}")
        if self.initial == TABULATED and not self.table:
            raise InvalidParameters("tabulated initial data needs a table of (r, u) pairs")

    @property
    def params(self) -> ModelParams:
        """Return the parameter point."""
        return ModelParams(self.d, self.k)

    def initial_profile(self) -> Callable:
        """
        Return u(r, 0) as a vectorized callable.

        Raises:
            BadInitialData: u(0) != 0, a table not covering [0, L] or non-finite values.
        """
        if self.initial == TABULATED:
            points = np.asarray(self.table, dtype=float)
            if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] < 2:
                raise BadInitialData("the table must hold at least two (r, u) pairs")
            r, u = points[:, 0], points[:, 1]
            if not np.all(np.isfinite(points)) or np.any(np.diff(r) <= 0.0):
                raise BadInitialData("tabulated r must be finite and strictly increasing")
            if r[0] != 0.0 or r[-1] < self.length:
                raise BadInitialData(f"the table must cover [0, {self.length:g}]")
            profile = PchipInterpolator(r, u)
        else:
            family = FAMILIES[self.initial]
            k = self.k

            def profile(r):
                return family(np.asarray(r, dtype=float), k)

        origin = float(profile(0.0))
        if not math.isfinite(origin) or abs(origin) > ORIGIN_TOLERANCE:
            raise BadInitialData(f"u(0) must vanish for a regular map, got {origin:g}")
        if not math.isfinite(float(profile(self.length))):
            raise BadInitialData(f"u({self.length:g}) is not finite")
        return profile

    def boundary(self) -> float:
        """Return the Dirichlet value at r=L."""
        if self.boundary_value is not None:
            return float(self.boundary_value)
        return float(self.initial_profile()(self.length))

    def as_dict(self) -> dict:
        """Return the configuration as JSON-ready data."""
        data = asdict(self)
        data['table'] = None if self.table is None else [list(pair) for pair in self.table]
        data['snapshot_gradients'] = list(self.snapshot_gradients)
        return data

    def digest(self) -> str:
        """Return the SHA-256 of the canonical JSON form."""
        canonical = json.dumps(self.as_dict(), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()

    def snapshot_levels(self) -> Tuple[float, ...]:
        """Return the snapshot levels, one per decade from 1e2 to max_gradient by default."""
        if self.snapshot_gradients:
            return tuple(sorted(self.snapshot_gradients))
        top = int(math.floor(math.log10(self.max_gradient)))
        return tuple(10.0 ** n for n in range(2, top + 1))
