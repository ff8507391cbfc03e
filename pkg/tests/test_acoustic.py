import numpy as np
import pytest

from eblab.field import Grid, ScalarField, VectorField, Regularizer, regularize, helmholtz_project, norm
from eblab.acoustic import (
    AcousticState, acoustic_init, acoustic_propagate, acoustic_energy,
    gradient_potential, local_decay_profile,
)
from eblab.thermo import default_gas_model, linearize


@pytest.fixture
def coeffs():
    return linearize(default_gas_model(), 1.0, 1.0)


@pytest.fixture
def grid():
    return Grid((64, 64), (8.0, 8.0))


def band_limited_noise(grid, seed, eta=0.4):
    rng = np.random.default_rng(seed)
    f = ScalarField(grid, rng.standard_normal(grid.shape))
    return regularize(f, Regularizer(eta))


def test_init_composition_and_grid_check(grid, coeffs):
    zero = ScalarField.zeros(grid)
    st = acoustic_init(zero, zero, zero, coeffs, 0.1)
    assert acoustic_energy(st) == 0.0
    # wave-silent combination: alpha R + beta T = 0
    T0 = ScalarField.from_function(grid, lambda x, y: np.cos(np.pi * x / 8.0))
    R0 = ScalarField(grid, -(coeffs.beta / coeffs.alpha) * T0.values)
    st2 = acoustic_init(R0, T0, zero, coeffs, 0.1)
    assert np.max(np.abs(st2.q.values)) < 1e-14
    # constants: alpha 8/3, beta 1 with R0=1, T0=2 gives q = 14/3
    st3 = acoustic_init(ScalarField.full(grid, 1.0), ScalarField.full(grid, 2.0),
                        zero, coeffs, 0.1)
    assert np.allclose(st3.q.values, 14.0 / 3.0, atol=1e-13)
    other = Grid((32, 32), (8.0, 8.0))
    with pytest.raises(ValueError):
        acoustic_init(ScalarField.zeros(other), zero, zero, coeffs, 0.1)
    with pytest.raises(ValueError):
        acoustic_init(ScalarField.zeros(Grid((64, 64), (8.0, 8.0), "periodic")),
                      ScalarField.zeros(Grid((64, 64), (8.0, 8.0), "periodic")),
                      ScalarField.zeros(Grid((64, 64), (8.0, 8.0), "periodic")),
                      coeffs, 0.1)


def test_single_mode_oscillates_at_exact_frequency(grid, coeffs):
    # q0 cos(pi x / L), Phi = 0: q(t) = q0 cos(pi x/L) cos(sqrt(omega) (pi/L) t / eps)
    L = grid.extent[0]
    eps = 0.2
    q0 = ScalarField.from_function(grid, lambda x, y: 0.7 * np.cos(np.pi * x / L))
    zero = ScalarField.zeros(grid)
    state = AcousticState(q0, zero, coeffs, eps, 0.0)
    Om = np.sqrt(coeffs.omega) * (np.pi / L) / eps
    for t in (0.13, 0.41, 1.7):
        out = acoustic_propagate(state, t)
        expected = q0.values * np.cos(Om * t)
        assert np.max(np.abs(out.q.values - expected)) < 1e-10
        # Phi oscillates in quadrature
        gp = gradient_potential(out)
        expected_gx = 0.7 * np.sin(np.pi * grid.meshgrid()[0] / L) * (np.pi / L) \
            * np.sin(Om * t) / (eps * Om) * -1.0 * -1.0
        assert np.max(np.abs(gp.values[0] - expected_gx)) < 1e-10


def test_halving_eps_doubles_frequency(grid, coeffs):
    L = grid.extent[0]
    q0 = ScalarField.from_function(grid, lambda x, y: np.cos(np.pi * x / L))
    zero = ScalarField.zeros(grid)
    probe = (3, 5)
    # measure zero-crossing spacing of the probe signal
    def crossings(eps):
        state = AcousticState(q0, zero, coeffs, eps, 0.0)
        times = np.linspace(0, 4.0, 4001)
        sig = np.array([acoustic_propagate(state, t).q.values[probe] for t in times])
        sign_flips = np.where(np.diff(np.sign(sig)) != 0)[0]
        return np.diff(times[sign_flips]).mean()
    spacing_1 = crossings(0.4)
    spacing_2 = crossings(0.2)
    assert spacing_1 / spacing_2 == pytest.approx(2.0, rel=2e-2)


def test_energy_conservation_ten_periods(grid, coeffs):
    eps = 0.1
    q0 = band_limited_noise(grid, 1)
    phi0 = band_limited_noise(grid, 2)
    state = AcousticState(q0, phi0, coeffs, eps, 0.0)
    E0 = acoustic_energy(state)
    # slowest mode period sets the horizon
    L = grid.extent[0]
    T1 = 2 * np.pi * eps / (np.sqrt(coeffs.omega) * np.pi / L)
    st = state
    for t in np.linspace(0, 10 * T1, 40):
        st = acoustic_propagate(st, float(t))
        assert abs(acoustic_energy(st) - E0) / E0 < 1e-10


def test_time_reversal(grid, coeffs):
    state = AcousticState(band_limited_noise(grid, 3), band_limited_noise(grid, 4),
                          coeffs, 0.05, 0.0)
    fwd = acoustic_propagate(state, 0.77)
    back = acoustic_propagate(fwd, 0.0)
    assert np.max(np.abs(back.q.values - state.q.values)) < 1e-10
    assert np.max(np.abs(back.Phi.values - state.Phi.values)) < 1e-10


def test_linearity_superposition(grid, coeffs):
    a = AcousticState(band_limited_noise(grid, 5), band_limited_noise(grid, 6),
                      coeffs, 0.1, 0.0)
    b = AcousticState(band_limited_noise(grid, 7), band_limited_noise(grid, 8),
                      coeffs, 0.1, 0.0)
    combo = AcousticState(
        ScalarField(grid, 2.0 * a.q.values - 0.5 * b.q.values),
        ScalarField(grid, 2.0 * a.Phi.values - 0.5 * b.Phi.values),
        coeffs, 0.1, 0.0)
    t = 0.31
    at = acoustic_propagate(a, t)
    bt = acoustic_propagate(b, t)
    ct = acoustic_propagate(combo, t)
    assert np.max(np.abs(ct.q.values - 2 * at.q.values + 0.5 * bt.q.values)) < 1e-12
    assert np.max(np.abs(ct.Phi.values - 2 * at.Phi.values + 0.5 * bt.Phi.values)) < 1e-12


def test_gradient_stays_curl_free(grid, coeffs):
    state = AcousticState(band_limited_noise(grid, 9), band_limited_noise(grid, 10),
                          coeffs, 0.1, 0.0)
    for t in (0.1, 0.9):
        gp = gradient_potential(acoustic_propagate(state, t))
        sol, _ = helmholtz_project(gp)
        assert norm(sol, "linf") < 1e-10


def test_zero_mode_gauge_drift(grid, coeffs):
    state = AcousticState(ScalarField.full(grid, 2.0), ScalarField.zeros(grid),
                          coeffs, 0.1, 0.0)
    out = acoustic_propagate(state, 0.5)
    # q constant in time, Phi drifts linearly, gradient stays zero
    assert np.allclose(out.q.values, 2.0, atol=1e-13)
    assert np.allclose(out.Phi.values, -2.0 * 0.5 / 0.1, atol=1e-10)
    assert norm(gradient_potential(out), "linf") < 1e-12
    assert acoustic_energy(out) == pytest.approx(acoustic_energy(state), rel=1e-14)


def test_local_decay_zero_state(grid, coeffs):
    st = acoustic_init(ScalarField.zeros(grid), ScalarField.zeros(grid),
                       ScalarField.zeros(grid), coeffs, 0.1)
    prof = local_decay_profile(st, ((3.0, 5.0), (3.0, 5.0)), 0.05, 11)
    assert np.all(prof.sup_norms == 0.0)
    with pytest.raises(ValueError):
        local_decay_profile(st, ((0.0, 5.0), (3.0, 5.0)), 0.05, 5)


def test_local_decay_pulse_exits_window(coeffs):
    # larger box so the pulse can leave the window before any reflection
    grid = Grid((96, 96), (24.0, 24.0))
    X, Y = grid.meshgrid()
    pulse = np.exp(-((X - 12.0) ** 2 + (Y - 12.0) ** 2) / 1.5)
    window = ((10.0, 14.0), (10.0, 14.0))
    integrals = {}
    for eps in (0.2, 0.1, 0.05):
        st = AcousticState(ScalarField(grid, pulse), ScalarField.zeros(grid),
                           coeffs, eps, 0.0)
        speed = np.sqrt(coeffs.omega) / eps
        horizon = 0.9 * 2 * 10.0 / speed  # just under the reflection return
        prof = local_decay_profile(st, window, horizon, 41)
        assert not prof.horizon_exceeds_reflection
        # the packet leaves the window: the tail is far below the peak
        peak = prof.sup_norms.max()
        assert prof.sup_norms[-1] < 0.35 * peak
        integrals[eps] = prof.integral
    # faster transit at smaller eps shrinks the time integral
    assert integrals[0.2] > integrals[0.1] > integrals[0.05]


def test_decay_profile_csv(tmp_path, grid, coeffs):
    st = AcousticState(band_limited_noise(grid, 11), ScalarField.zeros(grid),
                       coeffs, 0.2, 0.0)
    prof = local_decay_profile(st, ((3.0, 5.0), (3.0, 5.0)), 0.2, 9)
    path = tmp_path / "decay.csv"
    prof.write_csv(path)
    rows = path.read_text().strip().splitlines()
    assert rows[0] == "time,sup_norm,energy"
    assert len(rows) == 10
