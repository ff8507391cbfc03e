"""Command-line entry point: per-subsystem pipelines and the full sweep."""

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import acoustic as ac
from . import boussinesq as bq
from .equilibrium import potential, solve_equilibrium, verify_stratification
from .field import Regularizer, ScalarField, VectorField, write_field, norm
from .limitlab import (
    ExperimentConfig, build_primitive_data, regularized_acoustic_data,
    run_boussinesq, run_transport, convergence_sweep, write_report,
)
from .nsf import build_initial_state, run_nsf, entropy_balance_check
from .thermo import check_hypotheses, default_gas_model, default_transport_laws, linearize


def _load_config(args) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.load(args.config)
    else:
        cfg = ExperimentConfig()
    if getattr(args, "eps_list", None):
        cfg.eps_list = [float(e) for e in args.eps_list.split(",")]
    if getattr(args, "eta", None) is not None:
        cfg.eta = args.eta
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "out", None):
        cfg.out_dir = args.out
    return cfg


def _outdir(cfg: ExperimentConfig, name: str) -> Path:
    out = Path(cfg.out_dir) / name
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(out: Path, cfg: ExperimentConfig) -> None:
    with open(out / "manifest.json", "w") as fh:
        json.dump({"config": cfg.to_dict(), "config_hash": cfg.config_hash()},
                  fh, indent=2)


def cmd_check_thermo(args) -> int:
    cfg = _load_config(args)
    model = cfg.gas_model()
    report = check_hypotheses(model)
    print(report.render())
    coeffs = linearize(model, cfg.rho_bar, cfg.theta_bar)
    print(f"\nlinearization at ({cfg.rho_bar}, {cfg.theta_bar}): "
          f"alpha={coeffs.alpha:.6g} beta={coeffs.beta:.6g} "
          f"delta={coeffs.delta:.6g} omega={coeffs.omega:.6g} "
          f"a_exp={coeffs.a_exp:.6g} c_p={coeffs.c_p:.6g}")
    return 0 if report.passed else 1


def cmd_equilibrium(args) -> int:
    cfg = _load_config(args)
    grid = cfg.grid()
    model = cfg.gas_model()
    F, gradF = potential(cfg.mass_distribution(), grid)
    eps = cfg.eps_list[0]
    profile = solve_equilibrium(model, cfg.rho_bar, cfg.theta_bar, eps, F, gradF)
    bounds = verify_stratification(profile, model)
    out = _outdir(cfg, "equilibrium")
    write_field(out / "rho_eps.ebf", profile.rho_eps)
    write_field(out / "potential.ebf", F)
    (out / "bounds.txt").write_text(bounds.render() + "\n")
    _write_manifest(out, cfg)
    print(bounds.render())
    print(f"momentum-balance residual: {profile.momentum_residual:.3e}")
    print(f"outputs in {out}")
    return 0


def cmd_acoustic(args) -> int:
    cfg = _load_config(args)
    grid = cfg.grid()
    model = cfg.gas_model()
    coeffs = linearize(model, cfg.rho_bar, cfg.theta_bar)
    data = build_primitive_data(cfg, grid, coeffs)
    eps = cfg.eps_list[0]
    state0, _ = regularized_acoustic_data(data, Regularizer(cfg.eta), coeffs, eps)
    speed = np.sqrt(coeffs.omega) / eps
    window = cfg.window_box()
    horizon = min(cfg.horizon, 0.9 * 2 * min(
        min(lo, grid.extent[a] - hi) for a, (lo, hi) in enumerate(window)) / speed)
    profile = ac.local_decay_profile(state0, window, horizon, 61)
    out = _outdir(cfg, "acoustic")
    profile.write_csv(out / "decay.csv")
    _write_manifest(out, cfg)
    print(f"energy at t0: {profile.energies[0]:.6e}, "
          f"decay integral: {profile.integral:.6e}, "
          f"reflection return time: {profile.reflection_time:.4g}"
          + ("  [horizon exceeds reflection]" if profile.horizon_exceeds_reflection else ""))
    print(f"outputs in {out}")
    return 0


def cmd_transport(args) -> int:
    cfg = _load_config(args)
    grid = cfg.grid()
    model = cfg.gas_model()
    coeffs = linearize(model, cfg.rho_bar, cfg.theta_bar)
    F, gradF = potential(cfg.mass_distribution(), grid)
    data = build_primitive_data(cfg, grid, coeffs)
    v0, theta0 = bq.boussinesq_initial_data(data.rho1_0, data.theta1_0, data.u0, coeffs)
    bq_traj = run_boussinesq(v0, theta0, coeffs, F, gradF, cfg.horizon, cfg.cadence / 2)
    eps = cfg.eps_list[0]
    state0, sigma0 = regularized_acoustic_data(data, Regularizer(cfg.eta), coeffs, eps)
    traj = run_transport(sigma0, coeffs, F, bq_traj, state0, cfg.horizon, cfg.cadence)
    out = _outdir(cfg, "transport")
    with open(out / "sigma_norms.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", "sigma_l2"])
        for t, f in zip(traj.times, traj.fields):
            w.writerow([f"{t:.6g}", f"{norm(f, 'l2'):.10g}"])
    _write_manifest(out, cfg)
    print(f"transported combination marched to t={traj.times[-1]:.4g}; outputs in {out}")
    return 0


def cmd_boussinesq(args) -> int:
    cfg = _load_config(args)
    grid = cfg.grid()
    model = cfg.gas_model()
    coeffs = linearize(model, cfg.rho_bar, cfg.theta_bar)
    F, gradF = potential(cfg.mass_distribution(), grid)
    data = build_primitive_data(cfg, grid, coeffs)
    v0, theta0 = bq.boussinesq_initial_data(data.rho1_0, data.theta1_0, data.u0, coeffs)
    traj = run_boussinesq(v0, theta0, coeffs, F, gradF, cfg.horizon, cfg.cadence / 2)
    out = _outdir(cfg, "boussinesq")
    with open(out / "energy.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", "kinetic", "thermal", "exchange_rate", "grad_v_max"])
        for t, st in zip(traj.times, traj.states):
            k, th, ex = bq.boussinesq_energy(st)
            w.writerow([f"{t:.6g}", f"{k:.10g}", f"{th:.10g}", f"{ex:.10g}",
                        f"{bq.grad_v_max(st):.6g}"])
    write_field(out / "v_final.ebf", traj.states[-1].v)
    _write_manifest(out, cfg)
    print(f"target run to t={traj.times[-1]:.4g}; outputs in {out}")
    return 0


def cmd_nsf(args) -> int:
    cfg = _load_config(args)
    grid = cfg.grid()
    model = cfg.gas_model()
    laws = default_transport_laws()
    coeffs = linearize(model, cfg.rho_bar, cfg.theta_bar)
    F, gradF = potential(cfg.mass_distribution(), grid)
    eps = cfg.eps_list[0]
    profile = solve_equilibrium(model, cfg.rho_bar, cfg.theta_bar, eps, F, gradF)
    data = build_primitive_data(cfg, grid, coeffs)
    state0 = build_initial_state(profile, eps, data)
    traj = run_nsf(model, laws, cfg.scaling(eps), profile, state0, cfg.horizon,
                   snapshot_every=4, sponge=cfg.sponge(), track_production=True)
    report = entropy_balance_check(traj)
    out = _outdir(cfg, "nsf")
    with open(out / "norms.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", "umax", "rho_min", "theta_min"])
        for t, st in zip(traj.times, traj.states):
            w.writerow([f"{t:.6g}", f"{np.max(np.abs(st.u.values)):.6g}",
                        f"{np.min(st.rho.values):.9g}",
                        f"{np.min(st.theta.values):.9g}"])
    write_field(out / "rho_final.ebf", traj.states[-1].rho)
    (out / "entropy_report.txt").write_text(report.render() + "\n")
    _write_manifest(out, cfg)
    print(report.render())
    print(f"mass drift per step: {traj.mass_drift:.3e}")
    print(f"outputs in {out}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    report = convergence_sweep(cfg, progress=lambda msg: print(msg, flush=True))
    out = write_report(report, Path(cfg.out_dir) / "sweep")
    print(report.render_orders())
    for eps, err in report.failures.items():
        print(f"FAILED eps={eps}: {err}", file=sys.stderr)
    print(f"outputs in {out}")
    return 0 if not report.failures else 1


def cmd_report(args) -> int:
    run_dir = Path(args.run_dir)
    orders = run_dir / "orders.csv"
    summary = run_dir / "summary.csv"
    if not summary.exists():
        print(f"no summary.csv under {run_dir}", file=sys.stderr)
        return 1
    for path in (summary, orders):
        if path.exists():
            print(f"--- {path.name} ---")
            print(path.read_text().strip())
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="eblab",
        description="numerical laboratory for the stratified low-Mach limit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--config", help="JSON experiment config")
        p.add_argument("--out", help="output directory root")
        p.add_argument("--eps-list", dest="eps_list", help="comma-separated eps values")
        p.add_argument("--eta", type=float, help="regularization band parameter")
        p.add_argument("--seed", type=int, help="data seed")
        p.set_defaults(fn=fn)
        return p

    add("check-thermo", cmd_check_thermo, help="validate the gas model hypotheses")
    add("equilibrium", cmd_equilibrium, help="solve and verify the stratified profile")
    add("acoustic", cmd_acoustic, help="wave propagation and local decay")
    add("transport", cmd_transport, help="march the transported combination")
    add("boussinesq", cmd_boussinesq, help="run the target solver")
    add("nsf", cmd_nsf, help="run the compressible solver at the first eps")
    add("sweep", cmd_sweep, help="full Mach-scale convergence sweep")
    p_rep = sub.add_parser("report", help="print tables from a sweep run directory")
    p_rep.add_argument("run_dir")
    p_rep.set_defaults(fn=cmd_report)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
