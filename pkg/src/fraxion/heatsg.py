"""The Gauss-Weierstrass heat kernel, the heat semigroup on spatial fields,
and the evolutive semigroup on space-time fields.

The evolutive semigroup combines spatial smoothing at parameter tau with
the time shift t -> t - tau.  On the sampled torus the time shift is
implemented band-limited (a phase in the dual time variable), which makes
it exact for off-grid shifts but periodic: callers integrating over large
tau must stay below the wrap-around horizon reported by
:func:`tau_horizon`.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, ShapeError
from .field import (
    FREQUENCY,
    PHYSICAL,
    GridSpec,
    ScalarField,
    SpaceTimeField,
    convolve,
    fourier,
    inverse_fourier,
)
from .quad import QuadSpec, integrate_halfline
from .specfun import gamma

__all__ = [
    "heat_kernel",
    "sample_heat_kernel",
    "apply_pt",
    "apply_pth",
    "subordination_newtonian",
    "heat_multiplier",
    "evolutive_multiplier",
    "time_support_radius",
    "tau_horizon",
]


def heat_kernel(x, t: float, n: int) -> float:
    """Pointwise Gauss-Weierstrass kernel (4 pi t)^(-n/2) exp(-|x|^2/4t)."""
    if t <= 0:
        raise DomainError("heat kernel requires t > 0")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != n:
        raise ShapeError(f"point has {x.size} coordinates, expected {n}")
    r2 = float(x @ x)
    return (4.0 * math.pi * t) ** (-0.5 * n) * math.exp(-r2 / (4.0 * t))


def sample_heat_kernel(grid: GridSpec, t: float) -> ScalarField:
    """The kernel sampled over a spatial grid."""
    if grid.has_time:
        raise ShapeError("sample_heat_kernel expects a spatial grid")
    if t <= 0:
        raise DomainError("heat kernel requires t > 0")
    r2 = grid.space_radius2()
    vals = (4.0 * math.pi * t) ** (-0.5 * grid.dim) * np.exp(-r2 / (4.0 * t))
    return ScalarField(grid, vals.astype(complex), PHYSICAL)


def heat_multiplier(grid: GridSpec, t: float) -> np.ndarray:
    """Frequency-side factor exp(-4 pi^2 |xi|^2 t) over the full dual grid."""
    return np.exp(-4.0 * math.pi ** 2 * grid.freq_radius2() * t)


def evolutive_multiplier(grid: GridSpec, tau: float) -> np.ndarray:
    """Factor exp(-tau (4 pi^2 |xi|^2 + 2 pi i sigma~)) on the dual grid."""
    if not grid.has_time:
        raise ShapeError("evolutive multiplier needs a time axis")
    meshes = grid.freq_meshes()
    xi2 = sum(m ** 2 for m in meshes[: grid.dim])
    sigma = meshes[-1]
    return np.exp(-tau * (4.0 * math.pi ** 2 * xi2 + 2j * math.pi * sigma))


def apply_pt(f: ScalarField, t: float, method: str = "spectral") -> ScalarField:
    """Heat semigroup P_t on a spatial field.

    The spectral method multiplies the transform by exp(-4 pi^2 |xi|^2 t);
    the convolution method convolves with the sampled kernel and serves as
    an independent oracle.
    """
    if t <= 0:
        raise DomainError("apply_pt requires t > 0")
    if f.space != PHYSICAL:
        raise ShapeError("apply_pt expects a physical field")
    if method == "spectral":
        fhat = fourier(f)
        if f.grid.has_time:
            # smooth in space only; the multiplier is flat along sigma~
            meshes = f.grid.freq_meshes()
            xi2 = sum(m ** 2 for m in meshes[: f.grid.dim])
            mult = np.exp(-4.0 * math.pi ** 2 * xi2 * t)
        else:
            mult = heat_multiplier(f.grid, t)
        return inverse_fourier(fhat.with_samples(fhat.samples * mult, FREQUENCY))
    if method == "convolution":
        if f.grid.has_time:
            raise ShapeError("convolution method applies to spatial fields")
        return convolve(f, sample_heat_kernel(f.grid, t))
    raise DomainError(f"unknown method {method!r}")


def _time_phase_shift(f: SpaceTimeField, tau: float) -> np.ndarray:
    """Samples of f(x, t - tau) via a band-limited (periodic) shift."""
    ft = np.fft.fft(f.samples, axis=-1)
    k = np.fft.fftfreq(f.grid.time_points, d=f.grid.time_spacing)
    phase = np.exp(-2j * math.pi * k * tau)
    return np.fft.ifft(ft * phase, axis=-1)


def apply_pth(f: SpaceTimeField, tau: float, method: str = "spectral") -> SpaceTimeField:
    """Evolutive semigroup: spatial smoothing plus the time shift by tau."""
    if tau <= 0:
        raise DomainError("apply_pth requires tau > 0")
    if not isinstance(f, SpaceTimeField):
        raise ShapeError("apply_pth expects a space-time field")
    if f.space != PHYSICAL:
        raise ShapeError("apply_pth expects a physical field")
    if method == "spectral":
        fhat = fourier(f)
        mult = evolutive_multiplier(f.grid, tau)
        return inverse_fourier(fhat.with_samples(fhat.samples * mult, FREQUENCY))
    if method == "physical":
        shifted = SpaceTimeField(f.grid, _time_phase_shift(f, tau), PHYSICAL)
        return _convolve_in_space(shifted, tau)
    raise DomainError(f"unknown method {method!r}")


def _convolve_in_space(f: SpaceTimeField, tau: float) -> SpaceTimeField:
    """Circular convolution with the sampled kernel along the space axes."""
    n = f.grid.dim
    spatial = GridSpec(n, f.grid.points_per_axis, f.grid.half_width)
    kern = sample_heat_kernel(spatial, tau)
    axes = tuple(range(n))
    kk = np.fft.fftn(np.fft.ifftshift(kern.samples), axes=axes)
    ff = np.fft.fftn(np.fft.ifftshift(f.samples, axes=axes), axes=axes)
    out = np.fft.fftshift(np.fft.ifftn(ff * kk[..., None], axes=axes), axes=axes)
    out = out * spatial.cell_volume()
    return SpaceTimeField(f.grid, out, PHYSICAL)


def subordination_newtonian(x, n: int) -> float:
    """Time integral of the heat kernel at a fixed off-origin point.

    For n >= 3 this equals the Newtonian-potential kernel
    Gamma((n-2)/2) / (4 pi^(n/2)) |x|^(2-n).
    """
    if n < 3:
        raise DomainError("the time integral diverges for n < 3")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.any(x != 0.0):
        raise DomainError("x must be nonzero")
    res = integrate_halfline(
        lambda t: heat_kernel(x, t, n), QuadSpec(abs_tol=1e-12, rel_tol=1e-12)
    )
    return float(np.real(res.value))


def newtonian_constant(n: int) -> float:
    """Gamma((n-2)/2) / (4 pi^(n/2)), the subordination closed form."""
    return gamma(0.5 * (n - 2)).value.real / (4.0 * math.pi ** (0.5 * n))


# ---------------------------------------------------------------------------
# wrap-around bookkeeping for large-tau integrals
# ---------------------------------------------------------------------------


def time_support_radius(f: SpaceTimeField, tol: float = 1e-12) -> float:
    """Radius |t| beyond which the field's time marginal is below tol*peak."""
    space_axes = tuple(range(f.grid.dim))
    marginal = np.max(np.abs(f.samples), axis=space_axes)
    peak = float(np.max(marginal))
    t = f.grid.time_axis()
    alive = np.abs(t)[marginal > tol * max(peak, 1e-300)]
    return float(np.max(alive)) if alive.size else 0.0


def tau_horizon(f: SpaceTimeField, t_eval: float | None = None) -> tuple:
    """(tau_safe, tau_wrap) horizons for evolutive-semigroup integrals.

    tau_wrap is where the periodic time shift first drags an image of the
    field's support into the evaluation window |t| <= t_eval; tau_safe is a
    handoff point beyond the genuine time support where the true semigroup
    output of a time-localized field is negligible, kept strictly below
    tau_wrap.
    """
    big_t = f.grid.time_half_width
    if t_eval is None:
        t_eval = 0.5 * big_t
    w = time_support_radius(f)
    tau_wrap = 2.0 * big_t - w - t_eval
    tau_supp = t_eval + w
    if tau_supp + 0.5 >= tau_wrap:
        raise ShapeError(
            "time box too small: the support wraps before the semigroup decays; "
            "enlarge time_half_width or shrink the evaluation window"
        )
    tau_safe = min(0.5 * (tau_supp + tau_wrap), tau_wrap - 0.5)
    return tau_safe, tau_wrap
