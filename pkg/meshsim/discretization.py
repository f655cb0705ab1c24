"""
This module discretizes the radial flow on a nonuniform mesh.

u_t = u_rr + (d-1)/r u_r - k(d+k-2) sin(2u) / (2r^2) with u(0)=0, three-point differences
inside, and a mesh equation relaxing the nodes toward equidistribution of the monitor.
"""
import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid
from scipy.sparse import bmat, diags


def interior_derivatives(r: np.ndarray, u: np.ndarray):
    """Return u_r and u_rr at the interior nodes, second order on a nonuniform mesh."""
    h_minus = r[1:-1] - r[:-2]
    h_plus = r[2:] - r[1:-1]
    denominator = h_plus * h_minus * (h_plus + h_minus)
    first = (h_minus ** 2 * u[2:] - h_plus ** 2 * u[:-2] + (h_plus ** 2 - h_minus ** 2) * u[1:-1]) / denominator
    second = 2.0 * (h_minus * u[2:] - (h_plus + h_minus) * u[1:-1] + h_plus * u[:-2]) / denominator
    return first, second


def origin_slope(r: np.ndarray, u: np.ndarray, k: int) -> float:
    """
    Return u_r(0, t).

    For k=1 the odd expansion u = a r + b r^3 is fitted through the first two interior nodes;
    for k >= 2 the map leaves the origin like r^k and the slope vanishes.
    """
    if k != 1:
        return 0.0
    r1, r2 = r[1], r[2]
    return float((u[1] * r2 ** 3 - u[2] * r1 ** 3) / (r1 * r2 ** 3 - r2 * r1 ** 3))


def gradient(r: np.ndarray, u: np.ndarray, k: int) -> np.ndarray:
    """Return u_r at every node."""
    values = np.empty_like(u)
    values[1:-1], _ = interior_derivatives(r, u)
    values[0] = origin_slope(r, u, k)
    h1, h2 = r[-1] - r[-2], r[-2] - r[-3]
    values[-1] = ((2.0 * h1 + h2) / (h1 * (h1 + h2)) * u[-1] - (h1 + h2) / (h1 * h2) * u[-2]
                  + h1 / (h2 * (h1 + h2)) * u[-3])
    return values


def smooth(values: np.ndarray, passes: int) -> np.ndarray:
    """Apply the [1, 2, 1] / 4 filter."""
    values = values.copy()
    for _ in range(passes):
        inner = 0.25 * values[:-2] + 0.5 * values[1:-1] + 0.25 * values[2:]
        first, last = 0.5 * (values[0] + values[1]), 0.5 * (values[-1] + values[-2])
        values[1:-1] = inner
        values[0], values[-1] = first, last
    return values


def monitor(r: np.ndarray, u: np.ndarray, k: int, floor: float, passes: int) -> np.ndarray:
    """Return the smoothed arclength monitor sqrt(floor + u_r^2)."""
    return smooth(np.sqrt(floor + gradient(r, u, k) ** 2), passes)


def uniform_share(r: np.ndarray, values: np.ndarray, fraction: float) -> float:
    """Return the constant which, added to the monitor, spreads this fraction of the nodes uniformly."""
    return fraction / (1.0 - fraction) * trapezoid(values, r) / (r[-1] - r[0])


def equidistribute(r: np.ndarray, values: np.ndarray, nodes: int) -> np.ndarray:
    """Return the nodes splitting the integral of the monitor into equal parts."""
    cumulative = cumulative_trapezoid(values, r, initial=0.0)
    mesh = np.interp(np.linspace(0.0, cumulative[-1], nodes), cumulative, r)
    mesh[0], mesh[-1] = r[0], r[-1]
    return mesh


def energy(r: np.ndarray, u: np.ndarray, d: float, angular_density: float) -> float:
    """Return (1/2) times the integral of (u_r^2 + k(d+k-2) sin^2(u) / r^2) r^(d-1), cell midpoints."""
    width = np.diff(r)
    middle = 0.5 * (r[1:] + r[:-1])
    slope = np.diff(u) / width
    value = 0.5 * (u[1:] + u[:-1])
    density = slope ** 2 + angular_density * np.sin(value) ** 2 / middle ** 2
    return float(0.5 * np.sum(density * middle ** (d - 1.0) * width))


def mesh_velocity(r: np.ndarray, values: np.ndarray, rate: float) -> np.ndarray:
    """
    Return dr/dt at the interior nodes from the normalized mesh equation.

    tau dr/dt = (M r_xi)_xi / M on the uniform computational grid, with 1/tau = rate.
    """
    spacing = 1.0 / (r.size - 1)
    half = 0.5 * (values[1:] + values[:-1])
    flux = half * np.diff(r)
    return rate * (flux[1:] - flux[:-1]) / (spacing ** 2 * values[1:-1])


def physical_rate(r: np.ndarray, u: np.ndarray, d: float, angular_density: float):
    """Return u_t and u_r at the interior nodes."""
    first, second = interior_derivatives(r, u)
    radius = r[1:-1]
    u_t = second + (d - 1.0) * first / radius - angular_density * np.sin(2.0 * u[1:-1]) / (2.0 * radius ** 2)
    return u_t, first


def jacobian_pattern(interior: int, passes: int):
    """Return the sparsity of the coupled system ordered as (r_1..r_M-2, u_1..u_M-2)."""
    width = min(2 + passes, interior - 1)
    band = diags([np.ones(interior - abs(offset)) for offset in range(-width, width + 1)],
                 list(range(-width, width + 1)), shape=(interior, interior))
    return bmat([[band, band], [band, band]], format='csr')
