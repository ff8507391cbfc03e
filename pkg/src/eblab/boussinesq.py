"""Incompressible buoyancy-driven target solver in vorticity-streamfunction
form, with construction of its initial data from the primitive deviations.

On a periodic grid the streamfunction solve is a Fourier Poisson inversion;
on the slip box it is a Dirichlet (sine-basis) inversion, which enforces a
vanishing normal velocity at the walls exactly.  Advection is pseudospectral
and time stepping is strong-stability-preserving RK3, so a stationary vortex
stays stationary to roundoff.
"""

from dataclasses import dataclass

import numpy as np

from .field import (
    Grid, ScalarField, VectorField, PERIODIC,
    scalar_fwd, scalar_inv, vector_fwd, vector_inv,
    dirichlet_fwd, dirichlet_inv, dirichlet_eigenvalues,
    laplacian_eigenvalues, spectral_gradient_coeffs,
    _cos_to_sin_deriv, _sin_to_cos_deriv, _fft_wavenumbers, _axis_view,
    helmholtz_project,
)
from .thermo import LinearizationCoefficients

__all__ = [
    "BoussinesqState",
    "boussinesq_initial_data",
    "boussinesq_step",
    "boussinesq_energy",
    "compute_pressure",
    "grad_v_max",
    "velocity_from_vorticity",
    "vorticity",
]

CFL_LIMIT = 0.5


@dataclass
class BoussinesqState:
    v: VectorField
    theta: ScalarField
    coefficients: LinearizationCoefficients
    F: ScalarField
    gradF: VectorField
    time: float = 0.0
    Pi: ScalarField | None = None  # diagnostic, filled by compute_pressure

    @property
    def grid(self) -> Grid:
        return self.v.grid


def boussinesq_initial_data(rho1_0: ScalarField, theta1_0: ScalarField,
                            u0: VectorField, coeffs: LinearizationCoefficients
                            ) -> tuple[VectorField, ScalarField]:
    """v0 is the solenoidal part of u0; theta0 the entropy-weighted deviation.

    The density weight is -beta/rho_bar (the rho-derivative of entropy at the
    reference state, via the Maxwell relation) and the temperature weight
    delta/rho_bar.
    """
    grid = u0.grid
    if rho1_0.grid != grid or theta1_0.grid != grid:
        raise ValueError("initial data fields must share a grid")
    v0, _ = helmholtz_project(u0)
    s_rho = -coeffs.beta / coeffs.rho_bar
    s_theta = coeffs.delta / coeffs.rho_bar
    theta0 = (coeffs.theta_bar / coeffs.c_p) * (
        s_rho * rho1_0.values + s_theta * theta1_0.values)
    return v0, ScalarField(grid, theta0)


# ---------------------------------------------------------------------------
# spectral kernels, periodic (FFT) and slip box (sine/cosine)
# ---------------------------------------------------------------------------


def vorticity(v: VectorField) -> np.ndarray:
    """zeta = d(v_y)/dx - d(v_x)/dy, physical values."""
    grid = v.grid
    if grid.boundary == PERIODIC:
        cx = vector_fwd(grid, v.values[0], 0)
        cy = vector_fwd(grid, v.values[1], 1)
        ikx = 1j * _axis_view(_fft_wavenumbers(grid, 0), 0, 2)
        iky = 1j * _axis_view(_fft_wavenumbers(grid, 1), 1, 2)
        return scalar_inv(grid, ikx * cy - iky * cx)
    cx = vector_fwd(grid, v.values[0], 0)   # sin_x (x) cos_y
    cy = vector_fwd(grid, v.values[1], 1)   # cos_x (x) sin_y
    zh = _cos_to_sin_deriv(cy, grid, 0) - _cos_to_sin_deriv(cx, grid, 1)
    return dirichlet_inv(grid, zh)


def velocity_from_vorticity(grid: Grid, zeta: np.ndarray) -> VectorField:
    """Streamfunction inversion -Lap(psi) = zeta, then v = (psi_y, -psi_x)."""
    if grid.boundary == PERIODIC:
        zh = scalar_fwd(grid, zeta)
        lam = laplacian_eigenvalues(grid)
        ph = np.zeros_like(zh)
        nz = lam > 0
        ph[nz] = zh[nz] / lam[nz]
        ikx = 1j * _axis_view(_fft_wavenumbers(grid, 0), 0, 2)
        iky = 1j * _axis_view(_fft_wavenumbers(grid, 1), 1, 2)
        vx = scalar_inv(grid, iky * ph)
        vy = scalar_inv(grid, -ikx * ph)
        return VectorField.from_components(grid, vx, vy)
    zh = dirichlet_fwd(grid, zeta)
    ph = zh / dirichlet_eigenvalues(grid)
    vx = vector_inv(grid, _sin_to_cos_deriv(ph, grid, 1), 0)
    vy = vector_inv(grid, -_sin_to_cos_deriv(ph, grid, 0), 1)
    return VectorField.from_components(grid, vx, vy)


def _grad_dirichlet(grid: Grid, coeffs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    gx = vector_inv(grid, _sin_to_cos_deriv(coeffs, grid, 0), 1)
    gy = vector_inv(grid, _sin_to_cos_deriv(coeffs, grid, 1), 0)
    return gx, gy


def _grad_scalar(grid: Grid, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    comps = spectral_gradient_coeffs(grid, scalar_fwd(grid, values))
    return (vector_inv(grid, comps[0], 0), vector_inv(grid, comps[1], 1))


def _tendencies(grid: Grid, zeta: np.ndarray, theta: np.ndarray,
                coeffs: LinearizationCoefficients, gradF: np.ndarray):
    v = velocity_from_vorticity(grid, zeta)
    vx, vy = v.values
    if grid.boundary == PERIODIC:
        zx, zy = _grad_scalar(grid, zeta)
    else:
        zx, zy = _grad_dirichlet(grid, dirichlet_fwd(grid, zeta))
    tx, ty = _grad_scalar(grid, theta)
    a = coeffs.a_exp
    torque = -a * (tx * gradF[1] - ty * gradF[0])
    dzeta = -(vx * zx + vy * zy) + torque
    v_dot_gF = vx * gradF[0] + vy * gradF[1]
    dtheta = -(vx * tx + vy * ty) + (coeffs.theta_bar * a / coeffs.c_p) * v_dot_gF
    return dzeta, dtheta, v


def boussinesq_step(state: BoussinesqState, dt: float) -> BoussinesqState:
    """One SSP-RK3 step of the vorticity/temperature system."""
    grid = state.grid
    if grid.dim != 2:
        raise ValueError("the target solver is two-dimensional")
    h = grid.spacing
    cfl = dt * float(np.max(np.abs(state.v.values[0]) / h[0] +
                            np.abs(state.v.values[1]) / h[1]))
    if cfl > CFL_LIMIT + 1e-12:
        raise ValueError(f"advective CFL {cfl:.3f} exceeds {CFL_LIMIT}")

    gradF = state.gradF.values
    co = state.coefficients
    z0 = vorticity(state.v)
    t0 = state.theta.values

    dz1, dt1, _ = _tendencies(grid, z0, t0, co, gradF)
    z1 = z0 + dt * dz1
    t1 = t0 + dt * dt1
    dz2, dt2, _ = _tendencies(grid, z1, t1, co, gradF)
    z2 = 0.75 * z0 + 0.25 * (z1 + dt * dz2)
    t2 = 0.75 * t0 + 0.25 * (t1 + dt * dt2)
    dz3, dt3, _ = _tendencies(grid, z2, t2, co, gradF)
    z3 = z0 / 3.0 + 2.0 / 3.0 * (z2 + dt * dz3)
    t3 = t0 / 3.0 + 2.0 / 3.0 * (t2 + dt * dt3)

    v_new = velocity_from_vorticity(grid, z3)
    return BoussinesqState(v_new, ScalarField(grid, t3), co, state.F,
                           state.gradF, state.time + dt)


def boussinesq_energy(state: BoussinesqState) -> tuple[float, float, float]:
    """(kinetic, thermal, exchange rate).

    kinetic = int |v|^2/2, thermal = int (c_p/(2 theta_bar)) theta^2, and the
    buoyancy power exchange rate -a int theta v.grad(F); for the coupled
    system d/dt kinetic equals the exchange rate and kinetic+thermal is
    conserved by the continuous dynamics.
    """
    grid = state.grid
    vol = grid.cell_volume
    co = state.coefficients
    kinetic = 0.5 * float(np.sum(state.v.values**2)) * vol
    thermal = 0.5 * co.c_p / co.theta_bar * float(np.sum(state.theta.values**2)) * vol
    v_dot_gF = np.sum(state.v.values * state.gradF.values, axis=0)
    exchange = -co.a_exp * float(np.sum(state.theta.values * v_dot_gF)) * vol
    return kinetic, thermal, exchange


def compute_pressure(state: BoussinesqState) -> ScalarField:
    """Diagnostic multiplier from Lap(Pi) = -div(v.grad v + a theta grad F)."""
    grid = state.grid
    vx, vy = state.v.values
    gxx, gxy = _grad_scalar(grid, vx)
    gyx, gyy = _grad_scalar(grid, vy)
    ax = vx * gxx + vy * gxy + state.coefficients.a_exp * state.theta.values * state.gradF.values[0]
    ay = vx * gyx + vy * gyy + state.coefficients.a_exp * state.theta.values * state.gradF.values[1]
    dx, _ = _grad_scalar(grid, ax)
    _, dy = _grad_scalar(grid, ay)
    rhs = -(dx + dy)
    ch = scalar_fwd(grid, rhs)
    lam = laplacian_eigenvalues(grid)
    ph = np.zeros_like(ch)
    nz = lam > 0
    ph[nz] = -ch[nz] / lam[nz]
    return ScalarField(grid, scalar_inv(grid, ph))


def grad_v_max(state: BoussinesqState) -> float:
    """Sup norm of grad v: the blow-up proxy monitored during runs."""
    grid = state.grid
    out = 0.0
    for comp in state.v.values:
        gx, gy = _grad_scalar(grid, comp)
        out = max(out, float(np.max(np.abs(gx))), float(np.max(np.abs(gy))))
    return out
