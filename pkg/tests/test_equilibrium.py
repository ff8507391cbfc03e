import numpy as np
import pytest

from eblab.field import Grid, ScalarField
from eblab.equilibrium import (
    MassDistribution, potential, solve_equilibrium, verify_stratification,
)
from eblab.thermo import default_gas_model, eval_state


@pytest.fixture
def grid():
    return Grid((48, 48), (4.0, 4.0))


@pytest.fixture
def model():
    return default_gas_model(radiation_const=0.0)


def test_mass_inside_box_rejected(grid):
    masses = MassDistribution.of(([2.0, 2.0], 1.0))
    with pytest.raises(ValueError):
        potential(masses, grid)
    with pytest.raises(ValueError):
        MassDistribution.of(([2.0, -1.0], -0.5)).validate_outside(grid)


def test_single_mass_point_value(grid):
    masses = MassDistribution.of(([2.0, -3.0], 1.0))
    F, _ = potential(masses, grid)
    # node nearest the box-bottom center
    ix = 23
    x = grid.axis_coords(0)[ix]
    iy = 0
    y = grid.axis_coords(1)[iy]
    d = np.hypot(x - 2.0, y + 3.0)
    assert F.values[ix, iy] == pytest.approx(1.0 / d, rel=1e-13)
    assert np.all(F.values > 0)


def test_two_symmetric_masses(grid):
    masses = MassDistribution.of(([-1.0, 2.0], 3.0), ([5.0, 2.0], 3.0))
    F, G = potential(masses, grid)
    assert np.allclose(F.values, F.values[::-1, :], atol=1e-13)
    assert np.allclose(G.values[0], -G.values[0][::-1, :], atol=1e-13)
    assert np.allclose(G.values[1], G.values[1][::-1, :], atol=1e-13)


def test_gradient_against_finite_differences_of_the_kernel(grid):
    masses = MassDistribution.of(([1.0, -2.0], 2.0), ([6.0, 5.0], 0.7))
    F, G = potential(masses, grid)

    def F_fn(x, y):
        out = 0.0
        for (px, py), m in masses.masses:
            out = out + m / np.hypot(x - px, y - py)
        return out

    X, Y = grid.meshgrid()
    h = 1e-4
    gx = (F_fn(X + h, Y) - F_fn(X - h, Y)) / (2 * h)
    gy = (F_fn(X, Y + h) - F_fn(X, Y - h)) / (2 * h)
    assert np.max(np.abs(G.values[0] - gx) / np.abs(gx + 1e-300)) < 1e-6
    assert np.max(np.abs(G.values[1] - gy) / np.abs(gy + 1e-300)) < 1e-6


def test_zero_eps_returns_far_field_exactly(grid, model):
    masses = MassDistribution.of(([2.0, -3.0], 1.0))
    F, G = potential(masses, grid)
    prof = solve_equilibrium(model, 1.0, 1.0, 0.0, F, G)
    assert np.all(prof.rho_eps.values == 1.0)


def test_defining_relation_residual(grid, model):
    from eblab.thermo import _dH_drho
    masses = MassDistribution.of(([2.0, -3.0], 2.0))
    F, G = potential(masses, grid)
    prof = solve_equilibrium(model, 1.0, 1.0, 0.05, F, G)
    base = float(np.asarray(_dH_drho(model, 1.0, 1.0, 1.0)))
    resid = np.asarray(_dH_drho(model, 1.0, prof.rho_eps.values, 1.0)) \
        - 0.05 * F.values - base
    assert np.max(np.abs(resid)) < 1e-12


def test_linearized_slope_and_first_order_rate(grid, model):
    # rho_eps ~ rho_bar + eps F rho_bar / p_rho(rho_bar) with slope 3/8 here
    masses = MassDistribution.of(([2.0, -4.0], 5.0))
    F, G = potential(masses, grid)
    for eps in (1e-2, 1e-3):
        prof = solve_equilibrium(model, 1.0, 1.0, eps, F, G)
        slope = (prof.rho_eps.values - 1.0) / (eps * F.values)
        assert np.max(np.abs(slope - 0.375)) < 0.1 * 0.375
    # log-log rate of max deviation vs eps
    eps_list = [1e-1, 1e-2, 1e-3]
    devs = []
    for eps in eps_list:
        prof = solve_equilibrium(model, 1.0, 1.0, eps, F, G)
        devs.append(np.max(np.abs(prof.rho_eps.values - 1.0)))
    order = np.polyfit(np.log(eps_list), np.log(devs), 1)[0]
    assert abs(order - 1.0) < 0.1


def test_monotonicity_in_potential(grid, model):
    masses = MassDistribution.of(([2.0, -3.0], 3.0))
    F, G = potential(masses, grid)
    prof = solve_equilibrium(model, 1.0, 1.0, 0.1, F, G)
    f = F.values.ravel()
    r = prof.rho_eps.values.ravel()
    idx = np.argsort(f)
    assert np.all(np.diff(r[idx]) > -1e-12)


def test_momentum_balance_residual_reported(grid, model):
    masses = MassDistribution.of(([2.0, -3.0], 3.0))
    F, G = potential(masses, grid)
    prof = solve_equilibrium(model, 1.0, 1.0, 0.1, F, G)
    # central-difference residual of grad p = eps rho grad F is O(h^2)
    h = grid.spacing[0]
    assert prof.momentum_residual < 5.0 * h**2


def test_stratification_bounds_report(grid, model):
    masses = MassDistribution.of(([2.0, -4.0], 5.0))
    F, G = potential(masses, grid)
    prof0 = solve_equilibrium(model, 1.0, 1.0, 0.0, F, G)
    rep0 = verify_stratification(prof0, model, eps_sweep=(0.1, 0.05, 0.025))
    assert rep0.c_density == 0.0 and rep0.c_gradient == 0.0

    prof = solve_equilibrium(model, 1.0, 1.0, 0.01, F, G)
    rep = verify_stratification(prof, model)
    assert rep.c_density == pytest.approx(0.375, rel=0.5)
    assert rep.stable
    assert "stable" in rep.render()
    # constants from the sweep stay within a factor two of each other
    cs = [c for c, _ in rep.sweep.values()]
    assert max(cs) / min(cs) <= 2.0
