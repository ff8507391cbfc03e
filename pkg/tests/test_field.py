import numpy as np
import pytest

from eblab.field import (
    Grid, ScalarField, VectorField, Regularizer,
    neumann_transform, inverse_transform, laplacian_eigenvalues,
    regularize, helmholtz_project, divergence, gradient, norm,
    write_field, read_field, field_to_csv,
)


@pytest.fixture
def box():
    return Grid((48, 48), (2.0, 2.0))


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid((3, 8), (1.0, 1.0))
    with pytest.raises(ValueError):
        Grid((8, 8), (0.0, 1.0))
    with pytest.raises(ValueError):
        Grid((8, 8), (1.0, 1.0), "dirichlet")


def test_constant_field_single_coefficient(box):
    f = ScalarField.full(box, 3.7)
    c = neumann_transform(f)
    flat = np.abs(c.values)
    assert flat[0, 0] == pytest.approx(3.7 * np.sqrt(48 * 48), rel=1e-12)
    flat[0, 0] = 0.0
    assert np.max(flat) < 1e-12


def test_eigenfunction_lands_on_single_mode(box):
    L = box.extent[0]
    f = ScalarField.from_function(box, lambda x, y: np.cos(np.pi * x / L))
    c = neumann_transform(f)
    lam = laplacian_eigenvalues(box)
    nz = np.abs(c.values) > 1e-10
    assert nz.sum() == 1
    assert lam[nz][0] == pytest.approx((np.pi / L) ** 2, rel=1e-13)


def test_round_trip_and_parseval(box):
    rng = np.random.default_rng(7)
    f = ScalarField(box, rng.standard_normal(box.shape))
    c = neumann_transform(f)
    back = inverse_transform(c)
    assert np.max(np.abs(back.values - f.values)) < 1e-12
    # Parseval with the quadrature weight
    assert np.sum(c.values**2) * box.cell_volume == pytest.approx(
        norm(f, "l2") ** 2, rel=1e-10)


def test_norms_against_exact_integrals():
    g = Grid((256, 8), (1.0, 1.0))
    one = ScalarField.full(g, 1.0)
    assert norm(one, "l2") == pytest.approx(1.0, rel=1e-13)
    f = ScalarField.from_function(g, lambda x, y: x)
    h = g.spacing[0]
    assert norm(f, "l2") == pytest.approx(1.0 / np.sqrt(3.0), abs=h**2)
    # window monotonicity
    assert norm(f, "l2", ((0.2, 0.7), (0.0, 1.0))) < norm(f, "l2")
    assert norm(f, "linf") == pytest.approx(1.0 - h / 2, rel=1e-13)
    with pytest.raises(ValueError):
        norm(f, "l2", ((2.0, 3.0), (0.0, 1.0)))
    with pytest.raises(ValueError):
        norm(f, "l7")


def test_norm_homogeneous_and_l53():
    g = Grid((32, 32), (1.0, 1.0))
    rng = np.random.default_rng(3)
    f = ScalarField(g, rng.standard_normal(g.shape))
    for kind in ("l2", "l53", "linf", "h1"):
        a = norm(f, kind)
        b = norm(ScalarField(g, 2.5 * f.values), kind)
        assert b == pytest.approx(2.5 * a, rel=1e-12)


def test_regularizer_band_limiting_is_exact(box):
    rng = np.random.default_rng(11)
    f = ScalarField(box, rng.standard_normal(box.shape))
    reg = Regularizer(0.5)
    out = regularize(f, reg)
    c = neumann_transform(out)
    z = np.sqrt(laplacian_eigenvalues(box))
    lo, hi = reg.band
    outside = (z < lo) | (z > hi)
    assert np.max(np.abs(c.values[outside])) <= 1e-12
    # window is exactly one on the flat band
    zz = np.linspace(reg.eta, 1 / reg.eta, 50)
    assert np.all(reg.window(zz) == 1.0)
    assert np.all(reg.window(-zz) == reg.window(zz))


def test_regularizer_linearity(box):
    rng = np.random.default_rng(5)
    f = ScalarField(box, rng.standard_normal(box.shape))
    g = ScalarField(box, rng.standard_normal(box.shape))
    reg = Regularizer(0.4)
    lhs = regularize(ScalarField(box, 2.0 * f.values - 3.0 * g.values), reg)
    rhs = 2.0 * regularize(f, reg).values - 3.0 * regularize(g, reg).values
    assert np.max(np.abs(lhs.values - rhs)) < 1e-12


def test_regularize_band_limited_field_passes_through():
    g = Grid((64, 64), (16.0, 16.0))
    L = g.extent[0]
    # eta small enough that the cutoff plateau (radius 1/eta) covers the box,
    # and the chosen modes sit strictly inside the flat band (eta, 1/eta)
    reg = Regularizer(0.08)
    assert np.all(reg.spatial_cutoff(g) == 1.0)
    f = ScalarField.from_function(
        g, lambda x, y: np.cos(4 * np.pi * x / L) * np.cos(3 * np.pi * y / L)
        + 0.5 * np.cos(2 * np.pi * x / L) * np.cos(5 * np.pi * y / L))
    out = regularize(f, reg)
    assert np.max(np.abs(out.values - f.values)) < 1e-10
    # constant fields are annihilated (zero frequency is outside the band)
    out_const = regularize(ScalarField.full(g, 1.0), reg)
    assert np.max(np.abs(out_const.values)) < 1e-12


def test_regularized_decay_surrogate():
    # |x-c|^s |[f]_eta| <= C(s, eta) |f|_L2 measured on white noise
    g = Grid((64, 64), (16.0, 16.0))
    rng = np.random.default_rng(2)
    reg = Regularizer(0.5)
    mesh = g.meshgrid()
    r = np.sqrt(sum((m - c) ** 2 for m, c in zip(mesh, g.center)))
    for s in (1, 2):
        ratios = []
        for _ in range(5):
            f = ScalarField(g, rng.standard_normal(g.shape))
            out = regularize(f, reg)
            ratios.append(np.max(r**s * np.abs(out.values)) / norm(f, "l2"))
        assert max(ratios) < 50.0  # finite constant; cutoff kills the far field


def test_helmholtz_split_pure_gradient_and_pure_vortex(box):
    X, Y = box.meshgrid()
    phi = np.exp(-((X - 1) ** 2 + (Y - 1) ** 2) / 0.1)
    grad_phi = gradient(ScalarField(box, phi))
    sol, grad = helmholtz_project(grad_phi)
    assert norm(sol, "linf") < 1e-10
    # slip-compatible vortex: streamfunction vanishing on the walls
    L = box.extent[0]
    kx, ky = np.pi / L, 2 * np.pi / L
    vx = ky * np.sin(kx * X) * np.cos(ky * Y)       # d(psi)/dy
    vy = -kx * np.cos(kx * X) * np.sin(ky * Y)      # -d(psi)/dx
    sol2, grad2 = helmholtz_project(VectorField(box, np.stack([vx, vy])))
    assert norm(grad2, "linf") < 1e-10
    with pytest.raises(ValueError):
        helmholtz_project(VectorField(Grid((16,), (1.0,)), np.zeros((1, 16))))


def test_helmholtz_idempotent_orthogonal_exact_sum(box):
    rng = np.random.default_rng(13)
    smooth = ScalarField(box, rng.standard_normal(box.shape))
    u = VectorField(box, np.stack([
        regularize(smooth, Regularizer(0.3)).values,
        regularize(ScalarField(box, rng.standard_normal(box.shape)),
                   Regularizer(0.3)).values]))
    sol, grad = helmholtz_project(u)
    assert np.max(np.abs(sol.values + grad.values - u.values)) < 1e-12
    assert norm(divergence(sol), "linf") < 1e-10
    sol2, _ = helmholtz_project(sol)
    assert np.max(np.abs(sol2.values - sol.values)) < 1e-12
    dot = np.sum(sol.values * grad.values) * box.cell_volume
    denom = norm(sol, "l2") * norm(grad, "l2") + 1e-300
    assert abs(dot) / denom < 1e-10


def test_serialization_round_trip(tmp_path, box):
    rng = np.random.default_rng(1)
    f = ScalarField(box, rng.standard_normal(box.shape))
    path = tmp_path / "f.ebf"
    write_field(path, f)
    back = read_field(path)
    assert back.grid == box
    assert np.array_equal(back.values, f.values)
    v = VectorField(box, rng.standard_normal((2,) + box.shape))
    write_field(tmp_path / "v.ebf", v)
    vb = read_field(tmp_path / "v.ebf")
    assert np.array_equal(vb.values, v.values)
    field_to_csv(tmp_path / "f.csv", f)
    data = np.loadtxt(tmp_path / "f.csv", delimiter=",", skiprows=1)
    assert data.shape == (48 * 48, 3)
