"""Linear transport of the slow combination sigma = delta T - beta R along the
composite velocity, recovery of (R, T) from (q, sigma), and the limiting
temperature equation that sigma approaches as the Mach scale vanishes.

The advected invariant is sigma - (beta/alpha) F, so the semi-Lagrangian
update is exact modulo interpolation: trace the characteristic foot backward,
interpolate the invariant, and add back the potential term at the arrival
point.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .field import Grid, ScalarField, VectorField
from .thermo import LinearizationCoefficients

__all__ = [
    "TransportState",
    "TemperatureTrajectory",
    "transport_step",
    "recover_RT",
    "limit_temperature_solve",
]


@dataclass
class TransportState:
    sigma: ScalarField
    coefficients: LinearizationCoefficients
    F: ScalarField
    time: float = 0.0
    boundary_clamped: int = 0  # feet clamped to the box on the last step

    @property
    def grid(self) -> Grid:
        return self.sigma.grid


def _fractional_index(grid: Grid, coords: list[np.ndarray]) -> list[np.ndarray]:
    return [coords[a] / grid.spacing[a] - 0.5 for a in range(grid.dim)]


def _interp(grid: Grid, values: np.ndarray, coords: list[np.ndarray]) -> np.ndarray:
    """Bilinear interpolation at physical coordinates; clamps outside the box."""
    idx = np.stack(_fractional_index(grid, coords))
    mode = "grid-wrap" if grid.boundary == "periodic" else "nearest"
    return ndimage.map_coordinates(values, idx, order=1, mode=mode)


def _trace_feet(grid: Grid, U: VectorField, dt: float):
    """Second-order backward characteristic feet X(-dt; x)."""
    mesh = [m.copy() for m in grid.meshgrid()]
    half = [mesh[a] - 0.5 * dt * U.values[a] for a in range(grid.dim)]
    u_mid = [_interp(grid, U.values[a], half) for a in range(grid.dim)]
    feet = [mesh[a] - dt * u_mid[a] for a in range(grid.dim)]
    clamped = 0
    if grid.boundary != "periodic":
        for a in range(grid.dim):
            lo, hi = 0.0, grid.extent[a]
            clamped += int(np.sum((feet[a] < lo) | (feet[a] > hi)))
    return feet, clamped


def transport_step(state: TransportState, U: VectorField, dt: float) -> TransportState:
    """Advance sigma by dt along U, carrying the potential source exactly.

    sigma(x, t+dt) = sigma(X, t) + (beta/alpha) [F(x) - F(X)] with X the
    backward characteristic foot.  Feet leaving the box read clamped boundary
    values and are counted in `boundary_clamped`.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    grid = state.grid
    if U.grid != grid:
        raise ValueError("velocity grid mismatch")
    coef = state.coefficients.beta / state.coefficients.alpha
    feet, clamped = _trace_feet(grid, U, dt)
    invariant = state.sigma.values - coef * state.F.values
    advected = _interp(grid, invariant, feet)
    sigma_new = advected + coef * state.F.values
    return TransportState(ScalarField(grid, sigma_new), state.coefficients,
                          state.F, state.time + dt, clamped)


def recover_RT(q: ScalarField, sigma: ScalarField,
               coeffs: LinearizationCoefficients) -> tuple[ScalarField, ScalarField]:
    """Invert q = alpha R + beta T, sigma = delta T - beta R exactly."""
    det = coeffs.recovery_det
    if det <= 0:
        raise ValueError(f"degenerate recovery determinant {det:.3e}")
    grid = q.grid
    if sigma.grid != grid:
        raise ValueError("grid mismatch")
    T = (coeffs.beta * q.values + coeffs.alpha * sigma.values) / det
    R = (coeffs.delta * q.values - coeffs.beta * sigma.values) / det
    return ScalarField(grid, R), ScalarField(grid, T)


@dataclass
class TemperatureTrajectory:
    times: list[float]
    fields: list[ScalarField]

    def at(self, t: float) -> ScalarField:
        i = int(np.argmin(np.abs(np.asarray(self.times) - t)))
        return self.fields[i]


def limit_temperature_solve(T0_eta: ScalarField, v, coeffs: LinearizationCoefficients,
                            F: ScalarField, horizon: float, dt: float,
                            store_every: int = 1) -> TemperatureTrajectory:
    """March the limiting temperature equation with the transport scheme.

    v: callable t -> VectorField, divergence-free at each time.
    The buoyant source theta_bar a v.grad(F) / c_p is integrated along the
    trajectory with a midpoint quadrature (arrival and foot values averaged),
    which differs from the exact potential-difference form of transport_step
    at discretization order.
    """
    grid = T0_eta.grid
    coef = coeffs.theta_bar * coeffs.a_exp / coeffs.c_p
    gradF = np.stack(_central_grad(grid, F.values))
    n_steps = int(round(horizon / dt))
    T = T0_eta.values.copy()
    times = [0.0]
    fields = [ScalarField(grid, T.copy())]
    t = 0.0
    for k in range(n_steps):
        U = v(t + 0.5 * dt)
        if U.grid != grid:
            raise ValueError("velocity grid mismatch")
        feet, _ = _trace_feet(grid, U, dt)
        T_foot = _interp(grid, T, feet)
        src_here = coef * sum(U.values[a] * gradF[a] for a in range(grid.dim))
        src_foot = _interp(grid, src_here, feet)
        T = T_foot + dt * 0.5 * (src_here + src_foot)
        t += dt
        if (k + 1) % store_every == 0 or k == n_steps - 1:
            times.append(t)
            fields.append(ScalarField(grid, T.copy()))
    return TemperatureTrajectory(times, fields)


def _central_grad(grid: Grid, arr: np.ndarray) -> list[np.ndarray]:
    mode = "wrap" if grid.boundary == "periodic" else "symmetric"
    padded = np.pad(arr, 1, mode=mode)
    out = []
    for axis in range(grid.dim):
        h = grid.spacing[axis]
        up = np.take(padded, np.arange(2, grid.points[axis] + 2), axis=axis)
        dn = np.take(padded, np.arange(0, grid.points[axis]), axis=axis)
        sl = [slice(1, grid.points[a] + 1) for a in range(grid.dim)]
        sl[axis] = slice(None)
        out.append((up[tuple(sl)] - dn[tuple(sl)]) / (2 * h))
    return out
