"""Grids, scalar/vector fields, spectral transforms and norms.

Two boundary flavours are supported on rectangular boxes with cell-centered
nodes: a slip/insulated "neumann" box realized by cosine (DCT-II) expansions
for scalars and mixed sine/cosine expansions for vector components, and a
fully periodic box realized by Fourier expansions.  The cosine basis
diagonalizes the Neumann Laplacian; the sine/cosine bases for velocity
components encode a vanishing normal component at the walls.
"""

from dataclasses import dataclass, field as dataclass_field
import struct

import numpy as np
from scipy import fft as sfft

__all__ = [
    "Grid",
    "ScalarField",
    "VectorField",
    "SpectralCoeffs",
    "Regularizer",
    "neumann_transform",
    "inverse_transform",
    "laplacian_eigenvalues",
    "regularize",
    "helmholtz_project",
    "divergence",
    "gradient",
    "norm",
    "write_field",
    "read_field",
    "field_to_csv",
]

NEUMANN = "neumann"
PERIODIC = "periodic"


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered grid on a box [0, L1] x ... with 1 or 2 axes."""

    points: tuple[int, ...]
    extent: tuple[float, ...]
    boundary: str = NEUMANN

    def __post_init__(self):
        if len(self.points) not in (1, 2):
            raise ValueError("only 1D and 2D grids are supported")
        if len(self.extent) != len(self.points):
            raise ValueError("points/extent rank mismatch")
        if any(n < 4 for n in self.points):
            raise ValueError("need at least 4 points per axis")
        if any(L <= 0 for L in self.extent):
            raise ValueError("extent must be positive")
        if self.boundary not in (NEUMANN, PERIODIC):
            raise ValueError(f"unknown boundary {self.boundary!r}")

    @property
    def dim(self) -> int:
        return len(self.points)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / n for L, n in zip(self.extent, self.points))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axis_coords(self, axis: int) -> np.ndarray:
        h = self.spacing[axis]
        return (np.arange(self.points[axis]) + 0.5) * h

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        axes = [self.axis_coords(a) for a in range(self.dim)]
        return tuple(np.meshgrid(*axes, indexing="ij"))

    @property
    def center(self) -> np.ndarray:
        return 0.5 * np.asarray(self.extent)


def _check_values(grid: Grid, values: np.ndarray, ncomp: int | None):
    expected = grid.shape if ncomp is None else (ncomp,) + grid.shape
    if values.shape != expected:
        raise ValueError(f"values shape {values.shape} does not match grid {expected}")
    if not np.all(np.isfinite(values)):
        raise ValueError("field contains non-finite values")


@dataclass
class ScalarField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        _check_values(self.grid, self.values, None)

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "ScalarField":
        return cls(grid, np.asarray(fn(*grid.meshgrid()), dtype=float))

    @classmethod
    def zeros(cls, grid: Grid) -> "ScalarField":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def full(cls, grid: Grid, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(value)))

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())


@dataclass
class VectorField:
    grid: Grid
    values: np.ndarray  # shape (dim, *grid.shape)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        _check_values(self.grid, self.values, self.grid.dim)

    @classmethod
    def zeros(cls, grid: Grid) -> "VectorField":
        return cls(grid, np.zeros((grid.dim,) + grid.shape))

    @classmethod
    def from_components(cls, grid: Grid, *comps) -> "VectorField":
        return cls(grid, np.stack([np.asarray(c, dtype=float) for c in comps]))

    def component(self, c: int) -> np.ndarray:
        return self.values[c]

    def copy(self) -> "VectorField":
        return VectorField(self.grid, self.values.copy())


# ---------------------------------------------------------------------------
# spectral machinery
#
# Neumann box, scalars: DCT-II along each axis; basis cos(k pi x / L),
# eigenvalue of -Laplacian is sum_axis (k pi / L)^2.
# Neumann box, vector component c: DST-II along axis c (odd across the two
# walls normal to c, i.e. zero normal component), DCT-II along the others.
# Periodic: plain FFT for everything.
# ---------------------------------------------------------------------------


def scalar_fwd(grid: Grid, arr: np.ndarray) -> np.ndarray:
    if grid.boundary == NEUMANN:
        return sfft.dctn(arr, type=2, norm="ortho")
    return sfft.fftn(arr, norm="ortho")


def scalar_inv(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    if grid.boundary == NEUMANN:
        return sfft.idctn(coeffs, type=2, norm="ortho")
    return sfft.ifftn(coeffs, norm="ortho").real


def vector_fwd(grid: Grid, arr: np.ndarray, comp: int) -> np.ndarray:
    if grid.boundary == PERIODIC:
        return sfft.fftn(arr, norm="ortho")
    out = arr
    for axis in range(grid.dim):
        kind = sfft.dst if axis == comp else sfft.dct
        out = kind(out, type=2, norm="ortho", axis=axis)
    return out


def vector_inv(grid: Grid, coeffs: np.ndarray, comp: int) -> np.ndarray:
    if grid.boundary == PERIODIC:
        return sfft.ifftn(coeffs, norm="ortho").real
    out = coeffs
    for axis in range(grid.dim):
        kind = sfft.idst if axis == comp else sfft.idct
        out = kind(out, type=2, norm="ortho", axis=axis)
    return out


def dirichlet_fwd(grid: Grid, arr: np.ndarray) -> np.ndarray:
    out = arr
    for axis in range(grid.dim):
        out = sfft.dst(out, type=2, norm="ortho", axis=axis)
    return out


def dirichlet_inv(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    out = coeffs
    for axis in range(grid.dim):
        out = sfft.idst(out, type=2, norm="ortho", axis=axis)
    return out


def _cos_wavenumbers(grid: Grid, axis: int) -> np.ndarray:
    n, L = grid.points[axis], grid.extent[axis]
    return np.arange(n) * np.pi / L


def _sin_wavenumbers(grid: Grid, axis: int) -> np.ndarray:
    n, L = grid.points[axis], grid.extent[axis]
    return (np.arange(n) + 1) * np.pi / L


def _fft_wavenumbers(grid: Grid, axis: int) -> np.ndarray:
    n, L = grid.points[axis], grid.extent[axis]
    return 2.0 * np.pi * sfft.fftfreq(n, d=L / n)


def _axis_view(k: np.ndarray, axis: int, ndim: int) -> np.ndarray:
    shape = [1] * ndim
    shape[axis] = k.size
    return k.reshape(shape)


def laplacian_eigenvalues(grid: Grid) -> np.ndarray:
    """Eigenvalues of -Laplacian over the scalar coefficient array."""
    lam = np.zeros(grid.shape)
    for axis in range(grid.dim):
        if grid.boundary == NEUMANN:
            k = _cos_wavenumbers(grid, axis)
        else:
            k = _fft_wavenumbers(grid, axis)
        lam = lam + _axis_view(k, axis, grid.dim) ** 2
    return lam


def dirichlet_eigenvalues(grid: Grid) -> np.ndarray:
    lam = np.zeros(grid.shape)
    for axis in range(grid.dim):
        k = _sin_wavenumbers(grid, axis)
        lam = lam + _axis_view(k, axis, grid.dim) ** 2
    return lam


def _cos_to_sin_deriv(coeffs: np.ndarray, grid: Grid, axis: int) -> np.ndarray:
    """d/dx along `axis`, mapping cosine coefficients to sine coefficients."""
    n = grid.points[axis]
    k = _sin_wavenumbers(grid, axis)  # wavenumber of sine index j is (j+1)pi/L
    out = np.zeros_like(coeffs)
    src = np.take(coeffs, np.arange(1, n), axis=axis)
    dst_idx = [slice(None)] * coeffs.ndim
    dst_idx[axis] = slice(0, n - 1)
    out[tuple(dst_idx)] = -src * _axis_view(k[: n - 1], axis, coeffs.ndim)
    return out


def _sin_to_cos_deriv(coeffs: np.ndarray, grid: Grid, axis: int) -> np.ndarray:
    """d/dx along `axis`, mapping sine coefficients to cosine coefficients.

    The top sine mode aliases outside the cosine basis and is dropped.
    """
    n = grid.points[axis]
    k = _sin_wavenumbers(grid, axis)
    out = np.zeros_like(coeffs)
    src = np.take(coeffs, np.arange(0, n - 1), axis=axis)
    dst_idx = [slice(None)] * coeffs.ndim
    dst_idx[axis] = slice(1, n)
    out[tuple(dst_idx)] = src * _axis_view(k[: n - 1], axis, coeffs.ndim)
    return out


def spectral_divergence_coeffs(grid: Grid, comp_coeffs: list[np.ndarray]) -> np.ndarray:
    """Divergence in the scalar coefficient space from vector-component coeffs."""
    if grid.boundary == PERIODIC:
        out = np.zeros(grid.shape, dtype=complex)
        for axis in range(grid.dim):
            ik = 1j * _axis_view(_fft_wavenumbers(grid, axis), axis, grid.dim)
            out = out + ik * comp_coeffs[axis]
        return out
    out = np.zeros(grid.shape)
    for axis in range(grid.dim):
        c = comp_coeffs[axis]
        for other in range(grid.dim):
            if other == axis:
                c = _sin_to_cos_deriv(c, grid, other)
        out = out + c
    return out


def spectral_gradient_coeffs(grid: Grid, scalar_coeffs: np.ndarray) -> list[np.ndarray]:
    """Gradient of a scalar, returned per component in the vector spaces."""
    if grid.boundary == PERIODIC:
        return [
            1j * _axis_view(_fft_wavenumbers(grid, axis), axis, grid.dim) * scalar_coeffs
            for axis in range(grid.dim)
        ]
    return [_cos_to_sin_deriv(scalar_coeffs, grid, axis) for axis in range(grid.dim)]


# ---------------------------------------------------------------------------
# public transform API
# ---------------------------------------------------------------------------


@dataclass
class SpectralCoeffs:
    grid: Grid
    values: np.ndarray

    @property
    def eigenvalues(self) -> np.ndarray:
        return laplacian_eigenvalues(self.grid)


def neumann_transform(f: ScalarField) -> SpectralCoeffs:
    """Expand a scalar field in the eigenbasis of the (Neumann or periodic) Laplacian."""
    return SpectralCoeffs(f.grid, scalar_fwd(f.grid, f.values))


def inverse_transform(c: SpectralCoeffs) -> ScalarField:
    return ScalarField(c.grid, scalar_inv(c.grid, c.values))


def divergence(u: VectorField) -> ScalarField:
    """Spectrally evaluated divergence."""
    g = u.grid
    comp = [vector_fwd(g, u.values[a], a) for a in range(g.dim)]
    return ScalarField(g, scalar_inv(g, spectral_divergence_coeffs(g, comp)))


def gradient(f: ScalarField) -> VectorField:
    """Spectrally evaluated gradient, components in the vector bases."""
    g = f.grid
    comps = spectral_gradient_coeffs(g, scalar_fwd(g, f.values))
    vals = np.stack([vector_inv(g, comps[a], a) for a in range(g.dim)])
    return VectorField(g, vals)


def helmholtz_project(u: VectorField) -> tuple[VectorField, VectorField]:
    """Split u into a solenoidal part and a gradient part.

    The gradient part is grad(phi) with phi solving the Neumann (or periodic)
    Poisson problem for div(u); the solenoidal part is the remainder, so that
    the two parts sum to u exactly.
    """
    g = u.grid
    if g.dim != 2:
        raise ValueError("Helmholtz projection requires a 2D field")
    comp = [vector_fwd(g, u.values[a], a) for a in range(g.dim)]
    div_hat = spectral_divergence_coeffs(g, comp)
    lam = laplacian_eigenvalues(g)
    phi_hat = np.zeros_like(div_hat)
    nz = lam > 0
    phi_hat[nz] = -div_hat[nz] / lam[nz]
    grad_hat = spectral_gradient_coeffs(g, phi_hat)
    grad_vals = np.stack([vector_inv(g, grad_hat[a], a) for a in range(g.dim)])
    gradient_part = VectorField(g, grad_vals)
    solenoidal = VectorField(g, u.values - grad_vals)
    return solenoidal, gradient_part


# ---------------------------------------------------------------------------
# regularization [v]_eta = G_eta(sqrt(-Lap)) [psi_{1/eta} v]
# ---------------------------------------------------------------------------


def _smoothstep(t):
    """C-infinity step: 0 for t<=0, 1 for t>=1."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
    return a / (a + b)


@dataclass(frozen=True)
class Regularizer:
    """Band parameter eta > 0; spatial cutoff radius 2/eta, band (eta/2, 2/eta)."""

    eta: float

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be positive")

    @property
    def band(self) -> tuple[float, float]:
        return (0.5 * self.eta, 2.0 / self.eta)

    @property
    def cutoff_radius(self) -> float:
        return 2.0 / self.eta

    def window(self, z) -> np.ndarray:
        """Even band window: exactly 1 on (eta, 1/eta), exactly 0 outside (eta/2, 2/eta)."""
        z = np.abs(np.asarray(z, dtype=float))
        eta = self.eta
        out = np.zeros_like(z)
        flat = (z >= eta) & (z <= 1.0 / eta)
        out[flat] = 1.0
        rise = (z > 0.5 * eta) & (z < eta)
        out[rise] = _smoothstep((z[rise] - 0.5 * eta) / (0.5 * eta))
        fall = (z > 1.0 / eta) & (z < 2.0 / eta)
        out[fall] = _smoothstep((2.0 / eta - z[fall]) / (1.0 / eta))
        return out

    def spatial_cutoff(self, grid: Grid) -> np.ndarray:
        """psi_{1/eta}(x - center): 1 inside radius 1/eta, 0 outside 2/eta."""
        mesh = grid.meshgrid()
        center = grid.center
        r2 = sum((m - c) ** 2 for m, c in zip(mesh, center))
        y = np.sqrt(r2) * self.eta
        out = np.ones_like(y)
        out[y >= 2.0] = 0.0
        mid = (y > 1.0) & (y < 2.0)
        out[mid] = _smoothstep(2.0 - y[mid])
        return out


def regularize(f: ScalarField, reg: Regularizer) -> ScalarField:
    """Spatial cutoff followed by the spectral band-pass, in that order."""
    g = f.grid
    cut = f.values * reg.spatial_cutoff(g)
    coeffs = scalar_fwd(g, cut)
    coeffs = coeffs * reg.window(np.sqrt(laplacian_eigenvalues(g)))
    return ScalarField(g, scalar_inv(g, coeffs))


# ---------------------------------------------------------------------------
# norms (composite midpoint quadrature)
# ---------------------------------------------------------------------------


def _window_mask(grid: Grid, window) -> np.ndarray:
    if window is None:
        return np.ones(grid.shape, dtype=bool)
    mesh = grid.meshgrid()
    mask = np.ones(grid.shape, dtype=bool)
    for axis, (lo, hi) in enumerate(window):
        mask &= (mesh[axis] >= lo) & (mesh[axis] <= hi)
    if not mask.any():
        raise ValueError("empty measurement window")
    return mask


def _reflect_pad(arr: np.ndarray, boundary: str) -> np.ndarray:
    mode = "wrap" if boundary == PERIODIC else "symmetric"
    return np.pad(arr, 1, mode=mode)


def _central_gradients(grid: Grid, arr: np.ndarray) -> list[np.ndarray]:
    padded = _reflect_pad(arr, grid.boundary)
    grads = []
    for axis in range(grid.dim):
        h = grid.spacing[axis]
        up = np.take(padded, np.arange(2, grid.points[axis] + 2), axis=axis)
        dn = np.take(padded, np.arange(0, grid.points[axis]), axis=axis)
        core = [slice(1, grid.points[a] + 1) for a in range(grid.dim)]
        sl = list(core)
        sl[axis] = slice(None)
        grads.append((up[tuple(sl)] - dn[tuple(sl)]) / (2.0 * h))
    return grads


def norm(f, kind: str = "l2", window=None) -> float:
    """Norm of a scalar or vector field with midpoint quadrature.

    kind: one of "l2", "l53" (the L^{5/3} norm), "linf", "h1".
    window: optional sub-box ((lo, hi), ...) in physical coordinates.
    """
    grid = f.grid
    mask = _window_mask(grid, window)
    vol = grid.cell_volume
    if isinstance(f, VectorField):
        mag2 = np.sum(f.values**2, axis=0)
    else:
        mag2 = f.values**2
    if kind == "l2":
        return float(np.sqrt(np.sum(mag2[mask]) * vol))
    if kind == "l53":
        p = 5.0 / 3.0
        return float((np.sum(mag2[mask] ** (p / 2.0)) * vol) ** (1.0 / p))
    if kind == "linf":
        return float(np.sqrt(np.max(mag2[mask])))
    if kind == "h1":
        total = np.sum(mag2[mask]) * vol
        comps = f.values if isinstance(f, VectorField) else f.values[None]
        for comp in comps:
            for g in _central_gradients(grid, comp):
                total += np.sum(g[mask] ** 2) * vol
        return float(np.sqrt(total))
    raise ValueError(f"unknown norm kind {kind!r}")


# ---------------------------------------------------------------------------
# serialization: small binary header + raw float64, plus CSV for inspection
# ---------------------------------------------------------------------------

_MAGIC = b"EBF1"
_BOUNDARY_CODE = {NEUMANN: 0, PERIODIC: 1}
_BOUNDARY_NAME = {v: k for k, v in _BOUNDARY_CODE.items()}


def write_field(path, f) -> None:
    ncomp = 0 if isinstance(f, ScalarField) else f.grid.dim
    grid = f.grid
    header = struct.pack(
        "<4sBBB", _MAGIC, grid.dim, _BOUNDARY_CODE[grid.boundary], ncomp
    )
    for axis in range(grid.dim):
        header += struct.pack("<qd", grid.points[axis], grid.extent[axis])
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def read_field(path):
    with open(path, "rb") as fh:
        magic, dim, bcode, ncomp = struct.unpack("<4sBBB", fh.read(7))
        if magic != _MAGIC:
            raise ValueError("not a field file")
        points, extent = [], []
        for _ in range(dim):
            n, L = struct.unpack("<qd", fh.read(16))
            points.append(n)
            extent.append(L)
        grid = Grid(tuple(points), tuple(extent), _BOUNDARY_NAME[bcode])
        count = int(np.prod(grid.shape)) * max(ncomp, 1)
        data = np.frombuffer(fh.read(count * 8), dtype="<f8").astype(float)
    if ncomp == 0:
        return ScalarField(grid, data.reshape(grid.shape))
    return VectorField(grid, data.reshape((ncomp,) + grid.shape))


def field_to_csv(path, f) -> None:
    grid = f.grid
    mesh = grid.meshgrid()
    cols = [m.ravel() for m in mesh]
    if isinstance(f, ScalarField):
        cols.append(f.values.ravel())
        names = [f"x{a}" for a in range(grid.dim)] + ["value"]
    else:
        cols.extend(f.values[c].ravel() for c in range(grid.dim))
        names = [f"x{a}" for a in range(grid.dim)] + [
            f"u{c}" for c in range(grid.dim)
        ]
    data = np.column_stack(cols)
    np.savetxt(path, data, delimiter=",", header=",".join(names), comments="")
