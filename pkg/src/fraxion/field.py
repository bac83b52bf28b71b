"""Sampled functions on centered boxes, their Fourier duals, and the
catalog of rapidly decaying test functions used throughout the package.

Conventions.  The box is [-L, L)^n with N (a power of two) points per
axis, x_j = -L + j h, h = 2L/N.  The transform approximates

    u_hat(xi) = int exp(-2 pi i <xi, x>) u(x) dx

on the centered dual lattice xi_k = k/(2L), k = -N/2 .. N/2-1, so that a
sampled transform is h^n times the shifted FFT and the round trip is exact
to machine precision.  Space-time fields carry time as the last axis with
its own (power-of-two, half-width) pair and dual variable sigma~.
"""

from __future__ import annotations

import math
import os
import tempfile
import warnings
from dataclasses import dataclass, field as dataclass_field, replace

import numpy as np

from .errors import AliasWarning, DomainError, ShapeError
from .quad import QuadSpec, integrate_halfline
from .specfun import SpecialValue, bessel

__all__ = [
    "GridSpec",
    "ScalarField",
    "SpaceTimeField",
    "TestFunction",
    "SpaceTimeTestFunction",
    "fourier",
    "inverse_fourier",
    "convolve",
    "radial_fourier",
    "grid_norm",
    "boundary_max",
    "to_csv",
]

PHYSICAL = "physical"
FREQUENCY = "frequency"

_BOUNDARY_TOL = 1e-8


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on the centered box [-L, L)^dim, optional time axis."""

    dim: int
    points_per_axis: int
    half_width: float
    time_points: int | None = None
    time_half_width: float | None = None

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ShapeError("dim must be 1, 2 or 3")
        if not _is_pow2(self.points_per_axis) or self.points_per_axis < 32:
            raise ShapeError("points_per_axis must be a power of two >= 32")
        if self.half_width <= 0:
            raise ShapeError("half_width must be positive")
        if (self.time_points is None) != (self.time_half_width is None):
            raise ShapeError("time axis needs both points and half-width")
        if self.time_points is not None:
            if not _is_pow2(self.time_points) or self.time_points < 32:
                raise ShapeError("time_points must be a power of two >= 32")
            if self.time_half_width <= 0:
                raise ShapeError("time_half_width must be positive")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.points_per_axis

    @property
    def time_spacing(self) -> float:
        if self.time_points is None:
            raise ShapeError("grid has no time axis")
        return 2.0 * self.time_half_width / self.time_points

    @property
    def has_time(self) -> bool:
        return self.time_points is not None

    @property
    def shape(self) -> tuple:
        s = (self.points_per_axis,) * self.dim
        return s + ((self.time_points,) if self.has_time else s[:0])

    def axis(self) -> np.ndarray:
        n = self.points_per_axis
        return -self.half_width + self.spacing * np.arange(n)

    def time_axis(self) -> np.ndarray:
        n = self.time_points
        return -self.time_half_width + self.time_spacing * np.arange(n)

    def freq_axis(self) -> np.ndarray:
        n = self.points_per_axis
        return (np.arange(n) - n // 2) / (2.0 * self.half_width)

    def time_freq_axis(self) -> np.ndarray:
        n = self.time_points
        return (np.arange(n) - n // 2) / (2.0 * self.time_half_width)

    def meshes(self) -> tuple:
        axes = [self.axis()] * self.dim
        if self.has_time:
            axes.append(self.time_axis())
        return np.meshgrid(*axes, indexing="ij")

    def freq_meshes(self) -> tuple:
        axes = [self.freq_axis()] * self.dim
        if self.has_time:
            axes.append(self.time_freq_axis())
        return np.meshgrid(*axes, indexing="ij")

    def space_radius2(self) -> np.ndarray:
        m = self.meshes()
        return sum(mi ** 2 for mi in m[: self.dim])

    def freq_radius2(self) -> np.ndarray:
        m = self.freq_meshes()
        return sum(mi ** 2 for mi in m[: self.dim])

    def cell_volume(self) -> float:
        vol = self.spacing ** self.dim
        if self.has_time:
            vol *= self.time_spacing
        return vol


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ScalarField:
    """A complex-valued sample set over a GridSpec, physical or frequency."""

    grid: GridSpec
    samples: np.ndarray
    space: str = PHYSICAL
    evaluator: object = dataclass_field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.space not in (PHYSICAL, FREQUENCY):
            raise ShapeError(f"unknown space tag {self.space!r}")
        expected = self.grid.shape
        if tuple(self.samples.shape) != expected:
            raise ShapeError(f"samples shape {self.samples.shape} != grid {expected}")
        if self.grid.has_time and type(self) is ScalarField:
            raise ShapeError("use SpaceTimeField for grids with a time axis")
        object.__setattr__(self, "samples", _freeze(self.samples))

    def with_samples(self, samples, space=None):
        return replace(
            self, samples=np.asarray(samples), space=space or self.space, evaluator=None
        )

    @property
    def real_samples(self) -> np.ndarray:
        return np.real(self.samples)


@dataclass(frozen=True)
class SpaceTimeField(ScalarField):
    """Samples over space and time; time runs along the last axis."""

    def __post_init__(self):
        if not self.grid.has_time:
            raise ShapeError("SpaceTimeField needs a grid with a time axis")
        if self.space not in (PHYSICAL, FREQUENCY):
            raise ShapeError(f"unknown space tag {self.space!r}")
        expected = self.grid.shape
        if tuple(self.samples.shape) != expected:
            raise ShapeError(f"samples shape {self.samples.shape} != grid {expected}")
        object.__setattr__(self, "samples", _freeze(self.samples))


def _field_like(f: ScalarField, samples, space) -> ScalarField:
    cls = SpaceTimeField if isinstance(f, SpaceTimeField) else ScalarField
    return cls(grid=f.grid, samples=np.asarray(samples), space=space)


def fourier(f: ScalarField) -> ScalarField:
    """Forward transform onto the centered frequency lattice."""
    if f.space != PHYSICAL:
        raise ShapeError("fourier expects a physical-space field")
    scale = f.grid.cell_volume()
    out = np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(f.samples))) * scale
    return _field_like(f, out, FREQUENCY)


def inverse_fourier(f: ScalarField) -> ScalarField:
    """Inverse of :func:`fourier`; exact round trip on the lattice."""
    if f.space != FREQUENCY:
        raise ShapeError("inverse_fourier expects a frequency-space field")
    scale = f.grid.cell_volume()
    out = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(f.samples))) / scale
    return _field_like(f, out, PHYSICAL)


def boundary_max(f: ScalarField) -> float:
    """Largest |sample| on the outermost shell of the box (space axes only)."""
    m = 0.0
    for ax in range(f.grid.dim):
        sl_lo = [slice(None)] * f.samples.ndim
        sl_lo[ax] = 0
        sl_hi = [slice(None)] * f.samples.ndim
        sl_hi[ax] = -1
        m = max(m, float(np.max(np.abs(f.samples[tuple(sl_lo)]))),
                float(np.max(np.abs(f.samples[tuple(sl_hi)]))))
    return m


def convolve(f: ScalarField, g: ScalarField) -> ScalarField:
    """Grid convolution (circular, scaled by the cell volume).

    Approximates the convolution over R^n when both fields decay at the
    box boundary; an AliasWarning is emitted when either exceeds 1e-8
    there.
    """
    if f.grid != g.grid:
        raise ShapeError("convolve requires identical grids")
    if f.space != PHYSICAL or g.space != PHYSICAL:
        raise ShapeError("convolve expects physical-space fields")
    for name, fld in (("first", f), ("second", g)):
        if boundary_max(fld) > _BOUNDARY_TOL:
            warnings.warn(
                f"{name} convolution factor is {boundary_max(fld):.2e} at the box "
                "boundary; circular wrap-around may pollute the result",
                AliasWarning,
                stacklevel=2,
            )
    scale = f.grid.cell_volume()
    ff = np.fft.fftn(np.fft.ifftshift(f.samples))
    gg = np.fft.fftn(np.fft.ifftshift(g.samples))
    out = np.fft.fftshift(np.fft.ifftn(ff * gg)) * scale
    return _field_like(f, out, PHYSICAL)


def grid_norm(f: ScalarField, p) -> float:
    """L^p norm over the box, p in {1, 2, 'inf'}.

    Physical fields are weighted by the grid cell volume, frequency fields
    by the dual-lattice cell volume, so the 2-norm realizes the L^2
    isometry of the transform.
    """
    a = np.abs(f.samples)
    if p == "inf" or p == math.inf:
        return float(np.max(a))
    if f.space == PHYSICAL:
        vol = f.grid.cell_volume()
    else:
        vol = (2.0 * f.grid.half_width) ** (-f.grid.dim)
        if f.grid.has_time:
            vol /= 2.0 * f.grid.time_half_width
    if p == 1:
        return float(np.sum(a) * vol)
    if p == 2:
        return float(math.sqrt(np.sum(a * a) * vol))
    raise DomainError("grid_norm supports p in {1, 2, inf}")


def interpolate(f: ScalarField, points: np.ndarray) -> np.ndarray:
    """Evaluate a physical field off-grid.

    Uses the attached closed-form evaluator whenever the field was built
    from the test-function catalog; otherwise falls back to separable
    8-point Lagrange interpolation of the samples.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if f.evaluator is not None:
        return np.asarray(f.evaluator(pts))
    if f.space != PHYSICAL:
        raise ShapeError("interpolation works on physical fields")
    n = f.grid.dim + (1 if f.grid.has_time else 0)
    if pts.shape[1] != n:
        raise ShapeError(f"points must have {n} coordinates")
    npts = pts.shape[0]
    order = 8
    idx_list, wt_list = [], []
    for ax in range(n):
        if ax < f.grid.dim:
            lo, hstep, size = -f.grid.half_width, f.grid.spacing, f.grid.points_per_axis
        else:
            lo, hstep, size = (
                -f.grid.time_half_width,
                f.grid.time_spacing,
                f.grid.time_points,
            )
        u = (pts[:, ax] - lo) / hstep
        base = np.clip(np.floor(u).astype(int) - order // 2 + 1, 0, size - order)
        offs = base[:, None] + np.arange(order)[None, :]
        xloc = u[:, None] - offs
        w = np.ones((npts, order))
        for a in range(order):
            for b in range(order):
                if a != b:
                    w[:, a] *= (xloc[:, b]) / (b - a) * -1.0
        idx_list.append(offs)
        wt_list.append(w)
    out = np.zeros(npts, dtype=complex)
    from itertools import product as iproduct

    for combo in iproduct(range(order), repeat=n):
        w = np.ones(npts)
        idx = []
        for ax, c in enumerate(combo):
            w = w * wt_list[ax][:, c]
            idx.append(idx_list[ax][:, c])
        out += w * f.samples[tuple(idx)]
    return out


def radial_fourier(profile, n: int, xi_mag: float, spec: QuadSpec | None = None) -> SpecialValue:
    """Transform of a radial profile via the half-line Bessel integral.

    Evaluates 2 pi |xi|^{1-n/2} int_0^inf t^{n/2} f(t) J_{n/2-1}(2 pi |xi| t) dt.
    """
    if xi_mag <= 0:
        raise DomainError("radial_fourier requires |xi| > 0")
    if n not in (1, 2, 3):
        raise ShapeError("dim must be 1, 2 or 3")
    v = 0.5 * n - 1.0
    # decay sampling: the weighted profile must fall off
    probes = np.array([1.0, 2.0, 5.0, 10.0, 20.0, 40.0])
    w = np.array([abs(profile(r)) * r ** (0.5 * n) * r ** (-0.5) for r in probes])
    if w[-1] > 1e-4 * (w[0] + 1e-300):
        raise DomainError("weighted radial profile does not decay; not integrable")

    def integrand(t):
        return (
            t ** (0.5 * n)
            * profile(t)
            * bessel("J", v, 2.0 * math.pi * xi_mag * t).value.real
        )

    spec = spec or QuadSpec(abs_tol=1e-11, rel_tol=1e-11)
    res = integrate_halfline(integrand, spec)
    value = 2.0 * math.pi * xi_mag ** (-0.5 * n + 1.0) * res.value
    return SpecialValue(complex(value), abs(res.error_estimate) * 2.0 * math.pi)


# ---------------------------------------------------------------------------
# test-function catalog
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TestFunction:
    """A rapidly decaying function with closed-form transform and heat flow.

    Catalog names: gaussian(c), modulated_gaussian(c, xi0),
    polynomial_gaussian(degree, c) with degree in {0, 1, 2} applied to the
    first coordinate.
    """

    name: str
    c: float
    xi0: tuple = ()
    degree: int = 0

    def __post_init__(self):
        if self.c <= 0:
            raise DomainError("decay parameter c must be positive")
        known = ("gaussian", "modulated_gaussian", "polynomial_gaussian")
        if self.name not in known:
            raise DomainError(f"unknown test function {self.name!r}")
        if self.name == "polynomial_gaussian" and (
            self.degree < 0 or self.degree != int(self.degree)
        ):
            raise DomainError("polynomial degree must be a nonnegative integer")

    # -- closed forms ------------------------------------------------------
    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        r2 = np.sum(pts * pts, axis=1)
        base = np.exp(-self.c * r2)
        if self.name == "gaussian":
            return base.astype(complex)
        if self.name == "modulated_gaussian":
            xi0 = np.asarray(self.xi0, dtype=float)
            phase = 2.0 * math.pi * pts @ xi0
            return base * np.exp(1j * phase)
        return pts[:, 0] ** self.degree * base

    def fourier_transform(self, xi: np.ndarray, n: int) -> np.ndarray:
        """Closed-form transform on points xi of shape (m, n)."""
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        c = self.c
        if self.name == "modulated_gaussian":
            xi = xi - np.asarray(self.xi0, dtype=float)
        r2 = np.sum(xi * xi, axis=1)
        g = (math.pi / c) ** (0.5 * n) * np.exp(-(math.pi ** 2) * r2 / c)
        if self.name in ("gaussian", "modulated_gaussian"):
            return g.astype(complex)
        # transform of x1^d exp(-c|x|^2) by differentiating the Gaussian
        # transform d times: (-2 pi i)^{-d} (-sqrt(a))^d H_d(sqrt(a) xi_1)
        # with a = pi^2/c and H_d the Hermite polynomials
        d = self.degree
        if d == 0:
            return g.astype(complex)
        a = math.pi ** 2 / c
        z = math.sqrt(a) * xi[:, 0]
        h_prev, h_cur = np.ones_like(z), 2.0 * z
        for k in range(1, d):
            h_prev, h_cur = h_cur, 2.0 * z * h_cur - 2.0 * k * h_prev
        h_d = h_cur if d >= 1 else h_prev
        return ((-math.sqrt(a)) ** d / (-2j * math.pi) ** d) * h_d * g

    def heat_evolution(self, pts: np.ndarray, t: float, n: int) -> np.ndarray:
        """Closed-form Gauss-Weierstrass evolution at time t >= 0."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        c = self.c
        d = 1.0 + 4.0 * c * t
        r2 = np.sum(pts * pts, axis=1)
        core = d ** (-0.5 * n) * np.exp(-c * r2 / d)
        if self.name == "gaussian":
            return core.astype(complex)
        if self.name == "modulated_gaussian":
            b = 2.0 * math.pi * np.asarray(self.xi0, dtype=float)
            b2 = float(b @ b)
            phase = pts @ b
            return d ** (-0.5 * n) * np.exp(
                (-c * r2 - t * b2 + 1j * phase) / d
            )
        # x1^m evolves through the generating identity for the Gaussian
        # flow: the m-th s-derivative of exp((t s^2 + s x)/d) at s = 0
        x1 = pts[:, 0]
        m = self.degree
        if m == 0:
            return core.astype(complex)
        poly = np.zeros_like(x1)
        for j in range(m // 2 + 1):
            coeff = math.factorial(m) / (math.factorial(j) * math.factorial(m - 2 * j))
            poly = poly + coeff * t ** j * x1 ** (m - 2 * j) / d ** (m - j)
        return poly * core

    # -- sampling ----------------------------------------------------------
    def sample(self, grid: GridSpec) -> ScalarField:
        if grid.has_time:
            raise ShapeError("use SpaceTimeTestFunction for space-time grids")
        meshes = grid.meshes()
        pts = np.stack([m.ravel() for m in meshes], axis=1)
        vals = self(pts).reshape(grid.shape)
        return ScalarField(grid, vals, PHYSICAL, evaluator=self)


def gaussian(c: float = math.pi) -> TestFunction:
    return TestFunction("gaussian", c)


def modulated_gaussian(c: float, xi0) -> TestFunction:
    xi0 = tuple(np.atleast_1d(np.asarray(xi0, dtype=float)))
    return TestFunction("modulated_gaussian", c, xi0=xi0)


def polynomial_gaussian(degree: int, c: float) -> TestFunction:
    return TestFunction("polynomial_gaussian", c, degree=degree)


@dataclass(frozen=True)
class SpaceTimeTestFunction:
    """Separable space-time test function g(x) exp(-ct (t-t0)^2)."""

    spatial: TestFunction
    ct: float = math.pi
    t0: float = 0.0

    def __post_init__(self):
        if self.ct <= 0:
            raise DomainError("time decay parameter must be positive")

    def time_profile(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.exp(-self.ct * (t - self.t0) ** 2)

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return self.spatial(pts[:, :-1]) * self.time_profile(pts[:, -1])

    def evolutive_closed_form(self, pts: np.ndarray, tau: float, n: int) -> np.ndarray:
        """Exact action of the evolutive semigroup at parameter tau."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return self.spatial.heat_evolution(pts[:, :-1], tau, n) * self.time_profile(
            pts[:, -1] - tau
        )

    def sample(self, grid: GridSpec) -> SpaceTimeField:
        if not grid.has_time:
            raise ShapeError("SpaceTimeTestFunction needs a time axis")
        meshes = grid.meshes()
        pts = np.stack([m.ravel() for m in meshes], axis=1)
        vals = self(pts).reshape(grid.shape)
        return SpaceTimeField(grid, vals, PHYSICAL, evaluator=self)


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------


def to_csv(f: ScalarField, path: str, extra_columns: dict | None = None) -> None:
    """Write one row per grid point: x0,..,x{n-1}[,t],value_re,value_im.

    Rows iterate the sample array in C order (first axis slowest); numbers
    carry 17 significant digits; the file is written atomically.
    """
    n = f.grid.dim
    headers = [f"x{i}" for i in range(n)]
    if f.grid.has_time:
        headers.append("t")
    if extra_columns:
        headers.extend(extra_columns.keys())
    headers += ["value_re", "value_im"]

    axes = [f.grid.axis()] * n
    if f.grid.has_time:
        axes.append(f.grid.time_axis())
    mesh = np.meshgrid(*axes, indexing="ij")
    cols = [m.ravel() for m in mesh]
    if extra_columns:
        for v in extra_columns.values():
            cols.append(np.full(cols[0].shape, v, dtype=float))
    flat = f.samples.ravel()
    cols += [np.real(flat), np.imag(flat)]

    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(",".join(headers) + "\n")
            for row in zip(*cols):
                fh.write(",".join("%.17g" % float(v) for v in row) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
