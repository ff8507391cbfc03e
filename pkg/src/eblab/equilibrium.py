"""Gravitational potential from exterior point masses and the weakly
stratified static density profile balancing the scaled force."""

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .field import Grid, ScalarField, VectorField
from .thermo import GasModel, eval_state, _dH_drho

__all__ = [
    "MassDistribution",
    "EquilibriumProfile",
    "BoundsReport",
    "potential",
    "solve_equilibrium",
    "verify_stratification",
]


@dataclass(frozen=True)
class MassDistribution:
    """Point masses strictly outside the computational box, all masses >= 0."""

    masses: tuple[tuple[tuple[float, ...], float], ...]

    @classmethod
    def of(cls, *entries) -> "MassDistribution":
        return cls(tuple((tuple(map(float, pos)), float(m)) for pos, m in entries))

    def validate_outside(self, grid: Grid) -> None:
        for pos, m in self.masses:
            if m < 0:
                raise ValueError("masses must be nonnegative")
            if len(pos) != grid.dim:
                raise ValueError("mass position dimension mismatch")
            inside = all(0.0 < pos[a] < grid.extent[a] for a in range(grid.dim))
            if inside:
                raise ValueError(f"mass at {pos} lies inside the fluid box")


def potential(masses: MassDistribution, grid: Grid) -> tuple[ScalarField, VectorField]:
    """Newtonian potential F(x) = sum m_j / |x - x_j| with its analytic gradient."""
    masses.validate_outside(grid)
    mesh = grid.meshgrid()
    F = np.zeros(grid.shape)
    G = np.zeros((grid.dim,) + grid.shape)
    for pos, m in masses.masses:
        d2 = sum((mesh[a] - pos[a]) ** 2 for a in range(grid.dim))
        d = np.sqrt(d2)
        F += m / d
        for a in range(grid.dim):
            G[a] -= m * (mesh[a] - pos[a]) / d**3
    return ScalarField(grid, F), VectorField(grid, G)


@dataclass
class EquilibriumProfile:
    rho_eps: ScalarField
    theta_bar: float
    rho_bar: float
    eps: float
    F: ScalarField
    gradF: VectorField
    momentum_residual: float  # max norm of grad p - eps rho_eps grad F (central diffs)

    @property
    def grid(self) -> Grid:
        return self.rho_eps.grid


def _solve_nodes(model: GasModel, rho_bar, theta_bar, target, tol=1e-12, maxit=100):
    """Invert the strictly increasing map rho -> dH/drho at fixed theta_bar.

    Vectorized safeguarded Newton with a bracket widened on demand.
    """
    lo = np.full(target.shape, rho_bar / 10.0)
    hi = np.full(target.shape, rho_bar * 10.0)
    # widen bracket until it straddles the target everywhere
    for _ in range(60):
        glo = _dH_drho(model, theta_bar, lo, theta_bar)
        ghi = _dH_drho(model, theta_bar, hi, theta_bar)
        bad_lo = glo > target
        bad_hi = ghi < target
        if not (bad_lo.any() or bad_hi.any()):
            break
        lo = np.where(bad_lo, lo / 2.0, lo)
        hi = np.where(bad_hi, hi * 2.0, hi)
    else:
        raise RuntimeError("equilibrium bracket could not be widened to straddle target")

    ev_bar = eval_state(model, rho_bar, theta_bar)
    rho = rho_bar * (1.0 + 0.0 * target)
    rho = rho + target - _dH_drho(model, theta_bar, rho, theta_bar)  # cheap warm start
    rho = np.clip(rho, lo, hi)
    resid = _dH_drho(model, theta_bar, rho, theta_bar) - target
    for _ in range(maxit):
        if np.all(np.abs(resid) < tol):
            return rho
        ev = eval_state(model, rho, theta_bar)
        step = resid / (ev.dp_drho / rho)  # d/drho of dH/drho is p_rho/rho
        trial = rho - step
        outside = (trial <= lo) | (trial >= hi)
        trial = np.where(outside, 0.5 * (lo + hi), trial)
        resid_t = _dH_drho(model, theta_bar, trial, theta_bar) - target
        hi = np.where(resid_t > 0, trial, hi)
        lo = np.where(resid_t <= 0, trial, lo)
        rho, resid = trial, resid_t
    worst = np.unravel_index(np.argmax(np.abs(resid)), resid.shape)
    raise RuntimeError(
        f"equilibrium root-find did not converge at node {worst}: "
        f"residual {resid[worst]:.3e}")


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


def solve_equilibrium(model: GasModel, rho_bar: float, theta_bar: float,
                      eps: float, F: ScalarField,
                      grad_F: VectorField | None = None) -> EquilibriumProfile:
    """Pointwise inversion of dH/drho(rho, theta_bar) = eps F + dH/drho(rho_bar).

    For eps = 0 the profile is exactly the far-field density.  The residual of
    the hydrostatic momentum balance is measured with central differences and
    reported on the profile.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    grid = F.grid
    if grad_F is None:
        grad_F = VectorField(grid, np.stack(_central_grad(grid, F.values)))
    if eps == 0.0:
        rho = np.full(grid.shape, float(rho_bar))
    else:
        base = float(np.asarray(_dH_drho(model, theta_bar, rho_bar, theta_bar)))
        target = eps * F.values + base
        rho = _solve_nodes(model, rho_bar, theta_bar, target)

    p = eval_state(model, rho, theta_bar).p
    gp = _central_grad(grid, np.asarray(p))
    resid = 0.0
    for a in range(grid.dim):
        resid = max(resid, float(np.max(np.abs(
            gp[a][tuple(_interior(grid))] -
            (eps * rho * grad_F.values[a])[tuple(_interior(grid))]))))
    return EquilibriumProfile(ScalarField(grid, rho), theta_bar, rho_bar, eps,
                              F, grad_F, resid)


def _interior(grid: Grid):
    return [slice(1, n - 1) for n in grid.points]


@dataclass
class BoundsReport:
    """Fitted constants for the stratification bounds and their eps-stability."""

    c_density: float          # |rho_eps - rho_bar| / eps <= c F
    c_gradient: float         # |grad rho_eps| <= c' eps |grad F|
    sweep: dict = dataclass_field(default_factory=dict)  # eps -> (c, c')
    stable: bool = True

    def render(self) -> str:
        lines = [f"fitted c (density bound)  = {self.c_density:.6g}",
                 f"fitted c' (gradient bound) = {self.c_gradient:.6g}"]
        for e, (c, cp) in sorted(self.sweep.items(), reverse=True):
            lines.append(f"  eps={e:<8g} c={c:.6g}  c'={cp:.6g}")
        lines.append(f"stable within factor 2 across sweep: {self.stable}")
        return "\n".join(lines)


def _fit_constants(model: GasModel, prof: EquilibriumProfile) -> tuple[float, float]:
    rho = prof.rho_eps.values
    F = prof.F.values
    if prof.eps == 0.0:
        return 0.0, 0.0
    c = float(np.max(np.abs(rho - prof.rho_bar) / prof.eps / np.maximum(F, 1e-300)))
    # exact gradient of the profile: grad rho = eps rho grad F / p_rho(rho)
    p_rho = eval_state(model, rho, prof.theta_bar).dp_drho
    c_grad = float(np.max(rho / p_rho))
    return c, c_grad


def verify_stratification(profile: EquilibriumProfile, model: GasModel,
                          eps_sweep=(0.1, 0.05, 0.025)) -> BoundsReport:
    """Fit the smallest constants realizing the two stratification bounds and
    check their stability (within a factor 2) across an eps sweep."""
    c, cg = _fit_constants(model, profile)
    report = BoundsReport(c, cg)
    cs, cgs = [], []
    for e in eps_sweep:
        prof_e = solve_equilibrium(model, profile.rho_bar, profile.theta_bar,
                                   e, profile.F, profile.gradF)
        ce, cge = _fit_constants(model, prof_e)
        report.sweep[e] = (ce, cge)
        cs.append(ce)
        cgs.append(cge)
    for vals in (cs, cgs):
        lo, hi = min(vals), max(vals)
        if lo > 0 and hi / lo > 2.0:
            report.stable = False
    return report
