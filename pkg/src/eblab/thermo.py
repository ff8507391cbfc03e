"""Constitutive closure for the gas, structural validators, and the
relative-entropy machinery built on the ballistic free energy.

The molecular part of the closure is a monotone pressure profile P of the
degeneracy variable Z = rho / theta^(3/2); the entropy profile S is tied to P
through its defining differential relation, with a free additive offset.  A
radiation term with coefficient `radiation_const` completes pressure, energy
and entropy.
"""

from dataclasses import dataclass, field as dataclass_field
from typing import Callable

import numpy as np

__all__ = [
    "GasModel",
    "TransportLaws",
    "ThermoEval",
    "LinearizationCoefficients",
    "ValidationReport",
    "ThermoDomainError",
    "GasModelError",
    "default_gas_model",
    "default_transport_laws",
    "eval_state",
    "check_hypotheses",
    "linearize",
    "ballistic_free_energy",
    "bregman_distance",
    "relative_entropy_density",
    "coercivity_constant",
]


class ThermoDomainError(ValueError):
    """Raised for thermodynamically inadmissible inputs (rho <= 0, theta <= 0)."""


class GasModelError(ValueError):
    """Raised when a gas model violates the structural hypotheses in use."""


@dataclass(frozen=True)
class GasModel:
    """Closure bundle: molecular pressure profile P with derivatives, entropy
    profile S, radiation coefficient, and the entropy normalization offset."""

    P: Callable
    dP: Callable
    d2P: Callable
    S: Callable
    radiation_const: float = 0.0
    entropy_offset: float = 0.0

    def with_offset(self, entropy_offset: float) -> "GasModel":
        return GasModel(self.P, self.dP, self.d2P, self.S,
                        self.radiation_const, entropy_offset)


@dataclass(frozen=True)
class TransportLaws:
    """Temperature-dependent viscosity, bulk viscosity, and conductivity."""

    mu: Callable
    eta: Callable
    kappa: Callable


def default_gas_model(radiation_const: float = 0.0,
                      entropy_offset: float = 0.0) -> GasModel:
    """P(Z) = Z + Z^(5/3); the matching entropy profile is S(Z) = -log Z."""
    return GasModel(
        P=lambda z: z + z ** (5.0 / 3.0),
        dP=lambda z: 1.0 + (5.0 / 3.0) * z ** (2.0 / 3.0),
        d2P=lambda z: (10.0 / 9.0) * np.asarray(z, dtype=float) ** (-1.0 / 3.0),
        S=lambda z: -np.log(z),
        radiation_const=radiation_const,
        entropy_offset=entropy_offset,
    )


def default_transport_laws(mu_lower: float = 1.0,
                           kappa_lower: float = 1.0) -> TransportLaws:
    """Minimal laws with the required growth: mu = 1+theta, kappa = 1+theta^3."""
    return TransportLaws(
        mu=lambda t: mu_lower * (1.0 + t),
        eta=lambda t: np.zeros_like(np.asarray(t, dtype=float)) + 0.0,
        kappa=lambda t: kappa_lower * (1.0 + t**3),
    )


@dataclass
class ThermoEval:
    p: np.ndarray
    e: np.ndarray
    s: np.ndarray
    dp_drho: np.ndarray
    dp_dtheta: np.ndarray
    ds_drho: np.ndarray
    ds_dtheta: np.ndarray
    de_dtheta: np.ndarray


def _sprime(model: GasModel, z):
    """S'(Z) from the defining relation tied to P."""
    return -1.5 * ((5.0 / 3.0) * model.P(z) - model.dP(z) * z) / z**2


def eval_state(model: GasModel, rho, theta) -> ThermoEval:
    """Pressure, specific internal energy, specific entropy and their
    derivatives at (rho, theta).  Accepts scalars or arrays."""
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(rho <= 0) or np.any(theta <= 0):
        raise ThermoDomainError("eval_state requires rho > 0 and theta > 0")
    a = model.radiation_const
    z = rho * theta ** (-1.5)
    P = model.P(z)
    dP = model.dP(z)
    t32 = theta**1.5
    p = theta**2.5 * P + (a / 3.0) * theta**4
    e = 1.5 * theta**2.5 * P / rho + a * theta**4 / rho
    s = model.S(z) + (4.0 * a / 3.0) * theta**3 / rho + model.entropy_offset
    sp = _sprime(model, z)
    dp_drho = theta * dP
    dp_dtheta = 2.5 * t32 * P - 1.5 * rho * dP + (4.0 * a / 3.0) * theta**3
    ds_drho = sp / t32 - (4.0 * a / 3.0) * theta**3 / rho**2
    ds_dtheta = -1.5 * z * sp / theta + 4.0 * a * theta**2 / rho
    de_dtheta = theta * ds_dtheta
    return ThermoEval(p, e, s, dp_drho, dp_dtheta, ds_drho, ds_dtheta, de_dtheta)


def _de_drho(model: GasModel, rho, theta):
    ev = eval_state(model, rho, theta)
    return (ev.p - theta * ev.dp_dtheta) / rho**2


# ---------------------------------------------------------------------------
# structural hypotheses
# ---------------------------------------------------------------------------


@dataclass
class HypothesisResult:
    name: str
    passed: bool
    margin: float
    detail: str


@dataclass
class ValidationReport:
    results: list[HypothesisResult] = dataclass_field(default_factory=list)
    notes: list[str] = dataclass_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def render(self) -> str:
        lines = ["gas model hypothesis report", "-" * 42]
        for r in self.results:
            flag = "PASS" if r.passed else "FAIL"
            lines.append(f"{flag}  {r.name:<28s} margin={r.margin:+.3e}  {r.detail}")
        for n in self.notes:
            lines.append(f"note  {n}")
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def check_hypotheses(model: GasModel, z_grid=None) -> ValidationReport:
    """Validate the structural hypotheses on P and S over a sample grid.

    Checks: P(0)=0 with P' > 0 everywhere sampled; convergence of
    P(Z)/Z^(5/3) to a positive constant; positivity and boundedness of the
    specific-heat ratio (5/3 P - P' Z)/Z; and the differential relation
    defining S', via central finite differences of S.  The large-Z limit of S
    is reported informationally only.
    """
    if z_grid is None:
        z_grid = np.logspace(-4, 4, 257)
    z = np.asarray(z_grid, dtype=float)
    report = ValidationReport()

    # monotone pressure profile anchored at zero
    try:
        p0 = float(model.P(0.0))
        p0_ok = abs(p0) < 1e-12
        p0_detail = f"P(0)={p0:.3e}"
    except Exception as exc:  # P need not accept 0 to fail gracefully
        p0_ok, p0, p0_detail = False, np.nan, f"P(0) raised {exc!r}"
    dp = np.asarray(model.dP(z), dtype=float)
    mono_ok = bool(np.all(dp > 0))
    report.results.append(HypothesisResult(
        "anchored monotonicity", p0_ok and mono_ok,
        float(np.min(dp)), p0_detail + f", min P'={np.min(dp):.3e}"))

    # power-law tail P(Z)/Z^(5/3) -> P_inf > 0
    top = z[z >= z.max() / 10.0]
    ratio = np.asarray(model.P(top), dtype=float) / top ** (5.0 / 3.0)
    positive = bool(np.all(ratio > 0))
    spread = float(np.max(ratio) / np.min(ratio) - 1.0) if positive else np.inf
    tail_ok = positive and spread < 0.05
    p_inf = float(ratio[-1]) if positive else np.nan
    report.results.append(HypothesisResult(
        "5/3 power-law tail", tail_ok, -spread,
        f"P_inf~{p_inf:.4g}, top-decade spread {spread:.2%}"))

    # specific-heat ratio positivity/boundedness
    g = ((5.0 / 3.0) * np.asarray(model.P(z)) - dp * z) / z
    heat_ok = bool(np.all(g > 0) and np.all(np.isfinite(g)))
    report.results.append(HypothesisResult(
        "specific heat positivity", heat_ok, float(np.min(g)),
        f"ratio in [{np.min(g):.4g}, {np.max(g):.4g}] (observed sup reported)"))

    # differential relation for the entropy profile
    hz = 1e-6 * z
    s_num = (np.asarray(model.S(z + hz)) - np.asarray(model.S(z - hz))) / (2 * hz)
    s_exact = _sprime(model, z)
    denom = np.maximum(np.abs(s_exact), 1e-30)
    rel = float(np.max(np.abs(s_num - s_exact) / denom))
    diff_ok = rel < 1e-4
    report.results.append(HypothesisResult(
        "entropy differential relation", diff_ok, 1e-4 - rel,
        f"max relative residual {rel:.3e}"))

    report.notes.append(
        f"S at Z={z.max():.3g}: {float(np.asarray(model.S(z.max()))):.4g} "
        "(large-Z normalization is informational; offset is free)")
    return report


# ---------------------------------------------------------------------------
# linearization at a reference state
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearizationCoefficients:
    alpha: float      # (1/rho_bar) dp/drho
    beta: float       # (1/rho_bar) dp/dtheta
    delta: float      # rho_bar ds/dtheta
    omega: float      # rho_bar (alpha + beta^2/delta), adiabatic sound speed^2
    a_exp: float      # thermal expansion coefficient beta/(rho_bar alpha)
    c_p: float        # specific heat at constant pressure
    rho_bar: float
    theta_bar: float

    @property
    def recovery_det(self) -> float:
        return self.beta**2 + self.alpha * self.delta


def linearize(model: GasModel, rho_bar: float, theta_bar: float) -> LinearizationCoefficients:
    if rho_bar <= 0 or theta_bar <= 0:
        raise ThermoDomainError("reference state must be positive")
    ev = eval_state(model, rho_bar, theta_bar)
    alpha = float(ev.dp_drho) / rho_bar
    beta = float(ev.dp_dtheta) / rho_bar
    delta = rho_bar * float(ev.ds_dtheta)
    if alpha <= 0 or delta <= 0:
        raise GasModelError(
            f"degenerate linearization: alpha={alpha:.3e}, delta={delta:.3e}")
    omega = rho_bar * (alpha + beta**2 / delta)
    a_exp = beta / (rho_bar * alpha)
    c_p = theta_bar * (alpha * delta + beta**2) / (rho_bar * alpha)
    return LinearizationCoefficients(alpha, beta, delta, omega, a_exp, c_p,
                                     rho_bar, theta_bar)


# ---------------------------------------------------------------------------
# ballistic free energy and the relative-entropy integrand
# ---------------------------------------------------------------------------


def ballistic_free_energy(model: GasModel, Theta, rho, theta):
    """H_Theta(rho, theta) = rho (e - Theta s)."""
    Theta = np.asarray(Theta, dtype=float)
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(Theta <= 0) or np.any(rho <= 0) or np.any(theta <= 0):
        raise ThermoDomainError("ballistic free energy requires positive inputs")
    ev = eval_state(model, rho, theta)
    return rho * (ev.e - Theta * ev.s)


def _H_and_drho(model: GasModel, Theta, rho, theta):
    """H_Theta and its rho-derivative, vacuum-safe in rho.

    As rho -> 0 the products rho*e and rho*s have finite limits; at exactly
    rho = 0 the molecular entropy contribution vanishes.
    """
    Theta = np.asarray(Theta, dtype=float)
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    a = model.radiation_const
    pos = rho > 0
    H = np.empty(np.broadcast(rho, theta, Theta).shape)
    rho_b, theta_b, Theta_b = np.broadcast_arrays(rho, theta, Theta)
    if np.any(pos):
        ev = eval_state(model, rho_b[pos], theta_b[pos])
        H[pos] = rho_b[pos] * (ev.e - Theta_b[pos] * ev.s)
    if np.any(~pos):
        th0 = theta_b[~pos]
        H[~pos] = a * th0**4 - Theta_b[~pos] * (4.0 * a / 3.0) * th0**3
    return H


def _dH_drho(model: GasModel, Theta, r, theta):
    """d/drho of H_Theta at (r, theta); equals e - Theta s + rho (e_rho - Theta s_rho)."""
    ev = eval_state(model, r, theta)
    e_rho = (ev.p - theta * ev.dp_dtheta) / np.asarray(r, dtype=float) ** 2
    return ev.e - Theta * ev.s + np.asarray(r, dtype=float) * (e_rho - Theta * ev.ds_drho)


def bregman_distance(model: GasModel, rho, theta, r, Theta):
    """H_Theta(rho,theta) - dH_Theta/drho(r,Theta) (rho - r) - H_Theta(r,Theta).

    The static (velocity-free) part of the relative-entropy integrand;
    invariant under entropy-offset shifts by construction.
    """
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    r = np.asarray(r, dtype=float)
    Theta = np.asarray(Theta, dtype=float)
    if np.any(rho < 0) or np.any(theta <= 0) or np.any(r <= 0) or np.any(Theta <= 0):
        raise ThermoDomainError("bregman_distance: rho >= 0 and theta, r, Theta > 0")
    H = _H_and_drho(model, Theta, rho, theta)
    Hr = ballistic_free_energy(model, Theta, r, Theta)
    slope = _dH_drho(model, Theta, r, Theta)
    return H - slope * (rho - r) - Hr


def relative_entropy_density(model: GasModel, state, ref, eps: float):
    """Pointwise relative-entropy integrand.

    state: (rho, theta, u) with u of shape (d, ...) or None.
    ref: (r, Theta, U) likewise.
    Returns 0.5 rho |u-U|^2 + eps^-2 * bregman_distance.
    """
    rho, theta, u = state
    r, Theta, U = ref
    rho = np.asarray(rho, dtype=float)
    kinetic = 0.0
    if u is not None or U is not None:
        u = 0.0 if u is None else np.asarray(u, dtype=float)
        U = 0.0 if U is None else np.asarray(U, dtype=float)
        du = u - U
        kinetic = 0.5 * rho * np.sum(np.atleast_2d(du) ** 2, axis=0).reshape(rho.shape) \
            if du.ndim > rho.ndim else 0.5 * rho * du**2
    return kinetic + bregman_distance(model, rho, theta, r, Theta) / eps**2


def coercivity_constant(model: GasModel, ref, K, n: int = 200) -> float:
    """Numerical infimum over K of bregman/(|rho-r|^2 + |theta-Theta|^2).

    K is ((rho_lo, rho_hi), (theta_lo, theta_hi)); ref must be interior.
    """
    r, Theta = ref
    (rlo, rhi), (tlo, thi) = K
    if not (rlo < r < rhi and tlo < Theta < thi):
        raise ValueError("reference state must be interior to K")
    rho = np.linspace(rlo, rhi, n)
    theta = np.linspace(tlo, thi, n)
    R, T = np.meshgrid(rho, theta, indexing="ij")
    num = bregman_distance(model, R, T, r, Theta)
    den = (R - r) ** 2 + (T - Theta) ** 2
    mask = den > 1e-14 * max(r, Theta) ** 2
    c = float(np.min(num[mask] / den[mask]))
    if c <= 0:
        raise GasModelError(f"non-positive coercivity constant {c:.3e}")
    return c
