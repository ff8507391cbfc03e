"""Assembly of the comparison triple (density, temperature, velocity built
from the target flow plus wave correctors), the relative-entropy functional
between a compressible run and that triple, essential/residual splitting, and
the Mach-scale convergence sweep.
"""

import csv
import hashlib
import json
import time as _time
from dataclasses import dataclass, field as dataclass_field, asdict
from pathlib import Path

import numpy as np

from . import acoustic as ac
from . import boussinesq as bq
from . import transport as tr
from .equilibrium import MassDistribution, potential, solve_equilibrium, EquilibriumProfile
from .field import (
    Grid, ScalarField, VectorField, Regularizer,
    regularize, helmholtz_project, norm, gradient,
    scalar_fwd, scalar_inv, laplacian_eigenvalues,
    spectral_divergence_coeffs, vector_fwd,
)
from .nsf import (
    ScalingParams, FluidState, PrimitiveInitialData, NSFScheme, SpongeParams,
    build_initial_state, run_nsf, production_density,
)
from .thermo import (
    GasModel, default_gas_model, default_transport_laws,
    linearize, relative_entropy_density, LinearizationCoefficients,
)

__all__ = [
    "TestFunctionTriple",
    "EssResSplit",
    "SweepRecord",
    "SweepReport",
    "ExperimentConfig",
    "build_test_functions",
    "relative_entropy_functional",
    "ess_res_split",
    "convergence_sweep",
    "build_primitive_data",
    "regularized_acoustic_data",
]


# ---------------------------------------------------------------------------
# trajectories produced by the sub-solvers
# ---------------------------------------------------------------------------


@dataclass
class BoussinesqTrajectory:
    times: list[float]
    states: list[bq.BoussinesqState]

    def at(self, t: float) -> bq.BoussinesqState:
        i = int(np.argmin(np.abs(np.asarray(self.times) - t)))
        return self.states[i]

    def velocity(self, t: float) -> VectorField:
        """Linear interpolation between stored snapshots."""
        times = np.asarray(self.times)
        if t <= times[0]:
            return self.states[0].v
        if t >= times[-1]:
            return self.states[-1].v
        j = int(np.searchsorted(times, t))
        t0, t1 = times[j - 1], times[j]
        w = (t - t0) / (t1 - t0)
        vals = (1 - w) * self.states[j - 1].v.values + w * self.states[j].v.values
        return VectorField(self.states[0].v.grid, vals)


def run_boussinesq(v0: VectorField, theta0: ScalarField,
                   coeffs: LinearizationCoefficients, F: ScalarField,
                   gradF: VectorField, horizon: float, dt: float) -> BoussinesqTrajectory:
    state = bq.BoussinesqState(v0, theta0, coeffs, F, gradF, 0.0)
    traj = BoussinesqTrajectory([0.0], [state])
    n = max(1, int(round(horizon / dt)))
    dt = horizon / n
    for _ in range(n):
        state = bq.boussinesq_step(state, dt)
        traj.times.append(state.time)
        traj.states.append(state)
    return traj


def run_transport(sigma0: ScalarField, coeffs: LinearizationCoefficients,
                  F: ScalarField, bq_traj: BoussinesqTrajectory,
                  ac_state0: ac.AcousticState | None, horizon: float,
                  dt: float) -> tr.TemperatureTrajectory:
    """March sigma along the composite velocity, sampled at midpoints."""
    grid = sigma0.grid
    state = tr.TransportState(sigma0, coeffs, F, 0.0)
    times = [0.0]
    fields = [sigma0.copy()]
    n = max(1, int(round(horizon / dt)))
    dt = horizon / n
    for k in range(n):
        t_mid = (k + 0.5) * dt
        U = bq_traj.velocity(t_mid)
        if ac_state0 is not None:
            gp = ac.gradient_potential(ac.acoustic_propagate(ac_state0, t_mid))
            U = VectorField(grid, U.values + gp.values)
        state = tr.transport_step(state, U, dt)
        times.append(state.time)
        fields.append(state.sigma)
    return tr.TemperatureTrajectory(times, fields)


# ---------------------------------------------------------------------------
# the comparison triple
# ---------------------------------------------------------------------------


@dataclass
class TestFunctionTriple:
    r_eps: ScalarField
    Theta_eps: ScalarField
    U_eps: VectorField
    time: float


def build_test_functions(bq_traj: BoussinesqTrajectory,
                         ac_state0: ac.AcousticState,
                         tr_traj: tr.TemperatureTrajectory,
                         equilibrium: EquilibriumProfile,
                         coeffs: LinearizationCoefficients,
                         eps: float, t: float) -> TestFunctionTriple:
    """r = rho_eq + eps R, Theta = theta_bar + eps T, U = v + grad Phi at time t.

    R and T are recovered from the wave combination q and the transported
    combination sigma.
    """
    grid = equilibrium.grid
    ac_t = ac.acoustic_propagate(ac_state0, t)
    sigma_t = tr_traj.at(t)
    R, T = tr.recover_RT(ac_t.q, sigma_t, coeffs)
    r = equilibrium.rho_eps.values + eps * R.values
    Theta = equilibrium.theta_bar + eps * T.values
    if np.any(r <= 0) or np.any(Theta <= 0):
        raise ValueError("eps too large: comparison state loses positivity")
    v = bq_traj.velocity(t)
    U = VectorField(grid, v.values + ac.gradient_potential(ac_t).values)
    return TestFunctionTriple(ScalarField(grid, r), ScalarField(grid, Theta), U, t)


def relative_entropy_functional(state: FluidState, triple: TestFunctionTriple,
                                model: GasModel, eps: float) -> float:
    """Quadrature of the relative-entropy integrand over the whole box."""
    grid = state.grid
    dens = relative_entropy_density(
        model,
        (state.rho.values, state.theta.values, state.u.values),
        (triple.r_eps.values, triple.Theta_eps.values, triple.U_eps.values),
        eps)
    return float(np.sum(dens) * grid.cell_volume)


@dataclass
class EssResSplit:
    mask: np.ndarray                      # True where the state is near equilibrium
    ess: dict[str, np.ndarray]
    res: dict[str, np.ndarray]
    residual_volume: float


def ess_res_split(state: FluidState, rho_bar: float, theta_bar: float) -> EssResSplit:
    """Indicator split by the fixed neighborhood (rho_bar/2, 2 rho_bar) x
    (theta_bar/2, 2 theta_bar); parts reconstruct the fields exactly."""
    rho = state.rho.values
    th = state.theta.values
    mask = ((rho > rho_bar / 2) & (rho < 2 * rho_bar)
            & (th > theta_bar / 2) & (th < 2 * theta_bar))
    fields = {"rho": rho, "theta": th}
    for a in range(state.grid.dim):
        fields[f"u{a}"] = state.u.values[a]
    ess = {k: np.where(mask, v, 0.0) for k, v in fields.items()}
    res = {k: np.where(mask, 0.0, v) for k, v in fields.items()}
    vol = float(np.sum(~mask)) * state.grid.cell_volume
    return EssResSplit(mask, ess, res, vol)


# ---------------------------------------------------------------------------
# experiment configuration
# ---------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    points: int = 128
    extent: float = 16.0
    boundary: str = "neumann"
    rho_bar: float = 1.0
    theta_bar: float = 1.0
    radiation_const: float = 0.0
    entropy_offset: float = 0.0
    a_exp_visc: float = 1.0
    b_exp_heat: float = 1.0
    masses: list = dataclass_field(default_factory=lambda: [[[8.0, -12.0], 50.0]])
    eps_list: list = dataclass_field(default_factory=lambda: [0.2, 0.1, 0.05])
    eta: float = 0.25
    preset: str = "default"
    amp_theta: float = 0.3
    amp_detune: float = 0.05
    amp_vortex: float = 0.5
    amp_gradient: float = 0.02
    bump_width: float = 2.2
    seed: int = 0
    horizon: float = 0.4
    cadence: float = 0.04
    measure_from_fraction: float = 0.1
    window: list = dataclass_field(default_factory=lambda: [[5.0, 11.0], [5.0, 11.0]])
    sponge_width: float = 0.0
    sponge_rate: float = 0.0
    out_dir: str = "runs"

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return asdict(self)

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def grid(self) -> Grid:
        return Grid((self.points, self.points), (self.extent, self.extent),
                    self.boundary)

    def gas_model(self) -> GasModel:
        return default_gas_model(self.radiation_const, self.entropy_offset)

    def scaling(self, eps: float) -> ScalingParams:
        return ScalingParams(eps, self.a_exp_visc, self.b_exp_heat)

    def mass_distribution(self) -> MassDistribution:
        return MassDistribution.of(*[(pos, m) for pos, m in self.masses])

    def sponge(self) -> SpongeParams | None:
        if self.sponge_width > 0 and self.sponge_rate > 0:
            return SpongeParams(self.sponge_width, self.sponge_rate)
        return None

    def window_box(self):
        return tuple((lo, hi) for lo, hi in self.window)


def _gaussian(mesh, center, width):
    r2 = sum((m - c) ** 2 for m, c in zip(mesh, center))
    return np.exp(-0.5 * r2 / width**2)


def build_primitive_data(cfg: ExperimentConfig, grid: Grid,
                         coeffs: LinearizationCoefficients) -> PrimitiveInitialData:
    """Smooth deviation bumps and a velocity with solenoidal and gradient parts.

    The default preset keeps the bump pair on the wave-silent line
    alpha rho1 + beta theta1 = 0 up to a small detuning, plus a weak gradient
    seed, so the wave correctors are exercised at low amplitude while the
    convergence measurements stay clean of box reflections.
    """
    mesh = grid.meshgrid()
    c = grid.center
    w = cfg.bump_width
    rng = np.random.default_rng(cfg.seed)
    jitter = rng.uniform(-0.3, 0.3, size=6)

    dipole = (_gaussian(mesh, (c[0] - 0.9 * w + jitter[0], c[1] + jitter[1]), w)
              - _gaussian(mesh, (c[0] + 0.9 * w + jitter[2], c[1] + jitter[3]), w))
    dipole2 = (_gaussian(mesh, (c[0] + jitter[4], c[1] - 0.9 * w), w)
               - _gaussian(mesh, (c[0] + jitter[5], c[1] + 0.9 * w), w))

    if cfg.preset == "well-prepared":
        theta1 = np.zeros(grid.shape)
        rho1 = np.zeros(grid.shape)
        amp_grad = 0.0
    elif cfg.preset == "acoustic":
        theta1 = cfg.amp_theta * dipole
        rho1 = cfg.amp_theta * dipole2
        amp_grad = max(cfg.amp_gradient, 0.2)
    elif cfg.preset == "default":
        theta1 = cfg.amp_theta * dipole
        rho1 = (-coeffs.beta / coeffs.alpha) * theta1 + cfg.amp_detune * dipole2
        amp_grad = cfg.amp_gradient
    else:
        raise ValueError(f"unknown preset {cfg.preset!r}")

    psi = cfg.amp_vortex * w * _gaussian(mesh, c, 1.2 * w)
    gpsi = gradient(ScalarField(grid, psi)).values
    u = np.stack([gpsi[1], -gpsi[0]])
    if amp_grad > 0:
        chi = amp_grad * w * _gaussian(mesh, (c[0], c[1] + 0.5 * w), w)
        u = u + gradient(ScalarField(grid, chi)).values
    return PrimitiveInitialData(ScalarField(grid, rho1), ScalarField(grid, theta1),
                                VectorField(grid, u))


def regularized_acoustic_data(data: PrimitiveInitialData, reg: Regularizer,
                              coeffs: LinearizationCoefficients,
                              eps: float) -> tuple[ac.AcousticState, ScalarField]:
    """Band-limited wave data and the matching transported combination.

    The wave potential solves the Neumann Poisson problem for div(u0), so its
    gradient is the compressible part of the initial velocity.
    """
    grid = data.u0.grid
    R0 = regularize(data.rho1_0, reg)
    T0 = regularize(data.theta1_0, reg)
    comp = [vector_fwd(grid, data.u0.values[a], a) for a in range(grid.dim)]
    div_hat = spectral_divergence_coeffs(grid, comp)
    lam = laplacian_eigenvalues(grid)
    phi_hat = np.zeros_like(div_hat)
    nz = lam > 0
    phi_hat[nz] = -div_hat[nz] / lam[nz]
    Phi0 = regularize(ScalarField(grid, scalar_inv(grid, phi_hat)), reg)
    state = ac.acoustic_init(R0, T0, Phi0, coeffs, eps)
    sigma0 = ScalarField(grid, coeffs.delta * T0.values - coeffs.beta * R0.values)
    return state, sigma0


# ---------------------------------------------------------------------------
# the sweep
# ---------------------------------------------------------------------------


@dataclass
class SweepRecord:
    eps: float
    eta: float
    times: np.ndarray
    entropy: np.ndarray          # E_eps(t)
    density_l53: np.ndarray      # |rho - rho_bar|_{L^{5/3}(window)}
    momentum_l2: np.ndarray      # |sqrt(rho) u - sqrt(rho_bar) v|_{L^2(window)}
    theta_l2: np.ndarray         # |(theta - theta_bar)/eps - theta_target|_{L^2(window)}
    residual_volume: np.ndarray
    mass_drift: float
    min_production: float

    def measured(self, t_from: float):
        sel = self.times >= t_from - 1e-12
        return sel


@dataclass
class SweepReport:
    config: ExperimentConfig
    records: list[SweepRecord]
    orders: dict = dataclass_field(default_factory=dict)
    failures: dict = dataclass_field(default_factory=dict)

    def summary_rows(self):
        t_from = self.config.measure_from_fraction * self.config.horizon
        rows = []
        for r in self.records:
            sel = r.measured(t_from)
            rows.append({
                "eps": r.eps,
                "max_entropy": float(np.max(r.entropy)),
                "sup_density_l53": float(np.max(r.density_l53[sel])),
                "sup_momentum_l2": float(np.max(r.momentum_l2[sel])),
                "sup_theta_l2": float(np.max(r.theta_l2[sel])),
                "sup_residual_volume": float(np.max(r.residual_volume)),
                "mass_drift": r.mass_drift,
                "min_production": r.min_production,
            })
        return rows

    def render_orders(self) -> str:
        lines = ["quantity                 order      R^2"]
        for k, (slope, r2) in self.orders.items():
            lines.append(f"{k:<24s} {slope:+.3f}   {r2:.4f}")
        return "\n".join(lines)


def fit_order(eps_values, norms) -> tuple[float, float]:
    """Least-squares slope of log(norm) against log(eps), with R^2."""
    x = np.log(np.asarray(eps_values, dtype=float))
    y = np.log(np.asarray(norms, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2


def convergence_sweep(cfg: ExperimentConfig, progress=None) -> SweepReport:
    """Run the full comparison for each Mach scale and fit convergence orders.

    Per eps: stratified equilibrium, target run, wave + transported
    correctors with band-limited data, compressible run, then the
    relative-entropy functional and the window norms on the shared snapshot
    times.  Sub-run failures are recorded and the sweep continues.
    """
    grid = cfg.grid()
    model = cfg.gas_model()
    laws = default_transport_laws()
    coeffs = linearize(model, cfg.rho_bar, cfg.theta_bar)
    F, gradF = potential(cfg.mass_distribution(), grid)
    reg = Regularizer(cfg.eta)
    data = build_primitive_data(cfg, grid, coeffs)
    window = cfg.window_box()

    n_snap = max(2, int(round(cfg.horizon / cfg.cadence)))
    snap_times = np.linspace(0.0, cfg.horizon, n_snap + 1)

    # target run is eps-independent: do it once
    v0, theta0 = bq.boussinesq_initial_data(data.rho1_0, data.theta1_0, data.u0, coeffs)
    dt_bq = _bq_dt(cfg, v0)
    bq_traj = run_boussinesq(v0, theta0, coeffs, F, gradF, cfg.horizon, dt_bq)

    report = SweepReport(cfg, [])
    for eps in cfg.eps_list:
        if progress:
            progress(f"eps = {eps}")
        try:
            record = _run_single_eps(cfg, grid, model, laws, coeffs, F, gradF,
                                     reg, data, eps, snap_times, bq_traj, window)
            report.records.append(record)
        except Exception as exc:  # keep sweeping, record the failure
            report.failures[eps] = repr(exc)
    _fit_report_orders(report)
    return report


def _bq_dt(cfg: ExperimentConfig, v0: VectorField) -> float:
    grid = v0.grid
    h = min(grid.spacing)
    vmax = float(np.max(np.abs(v0.values))) + 1e-9
    dt_cfl = 0.3 * h / vmax
    n = max(1, int(np.ceil(cfg.cadence / dt_cfl)))
    return cfg.cadence / n


def _run_single_eps(cfg, grid, model, laws, coeffs, F, gradF, reg, data,
                    eps, snap_times, bq_traj, window) -> SweepRecord:
    profile = solve_equilibrium(model, cfg.rho_bar, cfg.theta_bar, eps, F, gradF)
    ac_state0, sigma0 = regularized_acoustic_data(data, reg, coeffs, eps)
    tr_traj = run_transport(sigma0, coeffs, F, bq_traj, ac_state0,
                            cfg.horizon, cfg.cadence)
    scaling = cfg.scaling(eps)
    state0 = build_initial_state(profile, eps, data)
    scheme = NSFScheme(model, laws, scaling, profile, cfg.sponge())
    dt = scheme.suggest_dt(state0)
    cadence_steps = max(1, int(np.ceil(cfg.cadence / dt)))
    dt = cfg.cadence / cadence_steps

    sq_rho_bar = np.sqrt(cfg.rho_bar)
    E_series, l53, mom, thl2, resvol = [], [], [], [], []
    min_prod = np.inf

    rho, m, E_dev = scheme.conservative(state0)
    theta_guess = state0.theta.values
    mass0 = float(np.sum(rho))
    mass_drift = 0.0
    state = state0
    for i, t in enumerate(snap_times):
        if i > 0:
            prev_mass = float(np.sum(rho))
            for _ in range(cadence_steps):
                rho, m, E_dev = scheme.step_conservative(rho, m, E_dev, dt, theta_guess)
                mass = float(np.sum(rho))
                mass_drift = max(mass_drift, abs(mass - prev_mass) / abs(mass0))
                prev_mass = mass
            state = scheme.primitive(rho, m, E_dev, float(t), theta_guess)
            theta_guess = state.theta.values
        triple = build_test_functions(bq_traj, ac_state0, tr_traj, profile,
                                      coeffs, eps, float(t))
        E_series.append(relative_entropy_functional(state, triple, model, eps))
        dens_dev = ScalarField(grid, state.rho.values - cfg.rho_bar)
        l53.append(norm(dens_dev, "l53", window))
        v = bq_traj.velocity(float(t))
        mom_dev = VectorField(grid, np.sqrt(state.rho.values) * state.u.values
                              - sq_rho_bar * v.values)
        mom.append(norm(mom_dev, "l2", window))
        th_target = bq_traj.at(float(t)).theta
        th_dev = ScalarField(grid, (state.theta.values - cfg.theta_bar) / eps
                             - th_target.values)
        thl2.append(norm(th_dev, "l2", window))
        resvol.append(ess_res_split(state, cfg.rho_bar, cfg.theta_bar).residual_volume)
        min_prod = min(min_prod, float(np.min(
            production_density(state, model, laws, scaling))))

    return SweepRecord(eps, cfg.eta, np.asarray(snap_times), np.asarray(E_series),
                       np.asarray(l53), np.asarray(mom), np.asarray(thl2),
                       np.asarray(resvol), mass_drift, min_prod)


def _fit_report_orders(report: SweepReport) -> None:
    if len(report.records) < 2:
        return
    rows = report.summary_rows()
    eps = [r["eps"] for r in rows]
    for key, label in [("sup_density_l53", "density_l53"),
                       ("sup_momentum_l2", "momentum_l2"),
                       ("sup_theta_l2", "theta_l2")]:
        vals = [r[key] for r in rows]
        if all(v > 0 for v in vals):
            report.orders[label] = fit_order(eps, vals)
    vols = [r["sup_residual_volume"] for r in rows]
    if all(v > 0 for v in vols):
        report.orders["residual_volume"] = fit_order(eps, vols)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def write_report(report: SweepReport, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "series.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["eps", "time", "entropy", "density_l53", "momentum_l2",
                    "theta_l2", "residual_volume"])
        for r in report.records:
            for i, t in enumerate(r.times):
                w.writerow([r.eps, f"{t:.6g}", f"{r.entropy[i]:.10g}",
                            f"{r.density_l53[i]:.10g}", f"{r.momentum_l2[i]:.10g}",
                            f"{r.theta_l2[i]:.10g}", f"{r.residual_volume[i]:.10g}"])
    with open(out / "summary.csv", "w", newline="") as fh:
        rows = report.summary_rows()
        if rows:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    with open(out / "orders.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["quantity", "order", "r2"])
        for k, (slope, r2) in report.orders.items():
            w.writerow([k, f"{slope:.6g}", f"{r2:.6g}"])
    manifest = {
        "config": report.config.to_dict(),
        "config_hash": report.config.config_hash(),
        "failures": {str(k): v for k, v in report.failures.items()},
        "created": _time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
    return out
