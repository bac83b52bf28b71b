"""Named verification suites behind the `verify` command.

Every invariant of the special-function, semigroup, fractional-operator
and extension modules appears here exactly once, as a deterministic check
producing a CheckReport.  Checks that generate curve data (ladders,
limits, decay samples) stash it in the shared artifacts dict so the CLI
can export it for plotting.
"""

from __future__ import annotations

import math
import time

import numpy as np

from . import extension as ext
from . import fracops as fo
from . import heatsg as hs
from .extrap import fit_loglog_slope
from .field import (
    FREQUENCY,
    GridSpec,
    SpaceTimeTestFunction,
    convolve,
    fourier,
    gaussian,
    grid_norm,
    inverse_fourier,
    polynomial_gaussian,
)
from .quad import QuadSpec, integrate_halfline, integrate_pv
from .report import CheckReport
from .specfun import bessel, gamma, hyp0f1

_RNG_SEED = 20220510


# ---------------------------------------------------------------------------
# specfun suite
# ---------------------------------------------------------------------------


def check_gamma_reflection(artifacts):
    rng = np.random.default_rng(_RNG_SEED)
    worst = 0.0
    for z in rng.uniform(0.001, 0.999, 200):
        v = gamma(z).value * gamma(1.0 - z).value * math.sin(math.pi * z) / math.pi
        worst = max(worst, abs(v - 1.0))
    return worst, 0.0, 1e-10


def check_gamma_duplication(artifacts):
    worst = 0.0
    for z in np.linspace(0.01, 10.0, 149):
        lhs = 2.0 ** (2 * z - 1) * gamma(z).value * gamma(z + 0.5).value
        rhs = math.sqrt(math.pi) * gamma(2 * z).value
        worst = max(worst, abs(lhs / rhs - 1.0))
    return worst, 0.0, 1e-10


def check_bessel_ode_first_kind(artifacts):
    worst = 0.0
    for v in (0.0, 0.5, 1.0, 2.5):
        for z in np.linspace(0.5, 20.0, 14):
            h = 1e-3
            f = lambda zz: bessel("J", v, zz).value.real
            d2 = (f(z + h) - 2 * f(z) + f(z - h)) / (h * h)
            d1 = (f(z + h) - f(z - h)) / (2 * h)
            res = z * z * d2 + z * d1 + (z * z - v * v) * f(z)
            worst = max(worst, abs(res) / max(1.0, abs(f(z))) / (z * z))
    return worst, 0.0, 1e-5


def _fd4(f, z, h):
    """(value, first, second derivative) by fourth-order central stencils."""
    vm2, vm1, v0, vp1, vp2 = (f(z - 2 * h), f(z - h), f(z), f(z + h), f(z + 2 * h))
    d1 = (vm2 - 8 * vm1 + 8 * vp1 - vp2) / (12 * h)
    d2 = (-vm2 + 16 * vm1 - 30 * v0 + 16 * vp1 - vp2) / (12 * h * h)
    return v0, d1, d2


def check_bessel_ode_modified(artifacts):
    worst = 0.0
    for kind in ("I", "K"):
        for v in (0.0, 0.5, 1.0, 2.5):
            for z in np.linspace(0.5, 12.0, 9):
                h = 1.5e-3 * max(1.0, z / 4.0)
                f = lambda zz: bessel(kind, v, zz).value.real
                val, d1, d2 = _fd4(f, z, h)
                res = z * z * d2 + z * d1 - (z * z + v * v) * val
                worst = max(worst, abs(res) / max(1.0, abs(val)) / (z * z))
    return worst, 0.0, 1e-5


def check_bessel_recursion(artifacts):
    worst = 0.0
    h = 1e-4
    for v in (0.0, 0.5, 1.5):
        for z in (0.8, 2.0, 7.5, 15.0):
            g = lambda zz: zz ** (-v) * bessel("J", v, zz).value.real
            lhs = (g(z + h) - g(z - h)) / (2 * h)
            rhs = -(z ** (-v)) * bessel("J", v + 1.0, z).value.real
            worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-3))
    return worst, 0.0, 1e-5


def check_macdonald_symmetry(artifacts):
    from .specfun import _bessel_k_integral

    worst = 0.0
    for v in (0.3, 0.5, 1.7, 2.4):
        for z in (0.4, 1.0, 3.0, 20.0):
            kp = bessel("K", v, z).value.real
            km = bessel("K", -v, z).value.real
            if kp != km:
                return 1.0, 0.0, 0.0
            if z <= 5.0:
                # spot-check against the series connection formula, which
                # is independent of the integral route and viable here
                iv = bessel("I", v, z).value.real
                imv = bessel("I", -v, z).value.real
                ref = 0.5 * math.pi * (imv - iv) / math.sin(math.pi * v)
            else:
                ref, _ = _bessel_k_integral(v, z)
            worst = max(worst, abs(kp / ref - 1.0))
    return max(worst, 0.0), 0.0, 1e-10


def check_bessel_asymptotic_bound(artifacts):
    worst = 0.0
    for v in (0.0, 0.5, 2.5):
        for z in np.linspace(50.0, 200.0, 16):
            worst = max(worst, abs(bessel("J", v, z).value.real) * math.sqrt(z))
    return worst, 0.0, math.sqrt(2.0 / math.pi) * 1.05


def check_hyp0f1_bessel_bridge(artifacts):
    worst = 0.0
    for v in (0.3, 1.0, 2.5):
        for z in (0.7, 3.0, 9.0):
            iv = bessel("I", v, z).value.real
            bridge = (
                (0.5 * z) ** v
                / gamma(v + 1.0).value.real
                * hyp0f1(v + 1.0, (0.5 * z) ** 2).value.real
            )
            worst = max(worst, abs(iv / bridge - 1.0))
    return worst, 0.0, 1e-10


# ---------------------------------------------------------------------------
# quad suite
# ---------------------------------------------------------------------------


def check_quad_closed_forms(artifacts):
    cases = [
        (lambda t: math.exp(-t), 1.0),
        (lambda t: t ** 0.3 * math.exp(-2.0 * t), gamma(1.3).value.real / 2 ** 1.3),
        (
            lambda t: t ** (-1.5) * math.exp(-(1.0 / t + t)),
            math.sqrt(math.pi) * math.exp(-2.0),
        ),
    ]
    worst = 0.0
    for f, exact in cases:
        res = integrate_halfline(f, QuadSpec(abs_tol=1e-11, rel_tol=1e-11))
        err = abs(res.value - exact)
        if err > res.error_estimate + 1e-13:
            worst = max(worst, 1.0)
        worst = max(worst, err / max(abs(exact), 1e-300))
    return worst, 0.0, 1e-10


def check_quad_split_invariance(artifacts):
    f = lambda t: t ** 0.3 * math.exp(-2.0 * t)
    vals, ests = [], []
    for sp in (0.5, 1.0, 2.0):
        r = integrate_halfline(f, QuadSpec(abs_tol=1e-11, rel_tol=1e-11, split_point=sp))
        vals.append(complex(r.value).real)
        ests.append(r.error_estimate)
    spread = max(vals) - min(vals)
    return spread, 0.0, max(2.0 * max(ests), 1e-13)


def check_quad_pv_second_difference(artifacts):
    s = 0.25
    u = lambda y: math.exp(-math.pi * y * y)
    second = integrate_halfline(
        lambda r: (2.0 * u(0.0) - u(r) - u(-r)) / r ** (1.0 + 2.0 * s),
        QuadSpec(abs_tol=1e-10, rel_tol=1e-10),
    )
    pv = integrate_pv(
        lambda y: (u(0.0) - u(float(y[0]))) / abs(float(y[0])) ** (1.0 + 2.0 * s),
        np.array([0.0]),
        QuadSpec(abs_tol=1e-9, rel_tol=1e-9),
        eps0=0.25,
    )
    return abs(complex(pv.value) - complex(second.value)), 0.0, 1e-6


# ---------------------------------------------------------------------------
# field suite
# ---------------------------------------------------------------------------


def check_field_plancherel(artifacts):
    g = GridSpec(1, 256, 12.0)
    worst = 0.0
    for tf in (gaussian(math.pi), polynomial_gaussian(2, 1.0)):
        f = tf.sample(g)
        worst = max(worst, abs(grid_norm(f, 2) / grid_norm(fourier(f), 2) - 1.0))
    return worst, 0.0, 1e-10


def check_field_rotation_invariance(artifacts):
    g = GridSpec(2, 64, 8.0)
    f = gaussian(1.0).sample(g)
    fh = fourier(f).samples
    worst = 0.0
    for op in (np.transpose, lambda a: np.flip(np.roll(a, -1, 0), 0),
               lambda a: np.flip(np.roll(a, -1, 1), 1)):
        rotated = fourier(f.with_samples(op(f.samples))).samples
        worst = max(worst, float(np.max(np.abs(rotated - op(fh)))))
    return worst, 0.0, 1e-12


def check_field_derivative_law(artifacts):
    g = GridSpec(1, 256, 12.0)
    f = gaussian(math.pi).sample(g)
    h = g.spacing
    grad = (np.roll(f.samples, -1) - np.roll(f.samples, 1)) / (2.0 * h)
    lhs = fourier(f.with_samples(grad)).samples
    xi = g.freq_axis()
    rhs = 2j * math.pi * xi * fourier(f).samples
    return float(np.max(np.abs(lhs - rhs))), 0.0, 10.0 * h * h


def check_field_roundtrip(artifacts):
    g = GridSpec(2, 64, 10.0)
    f = gaussian(0.8).sample(g)
    back = inverse_fourier(fourier(f))
    return float(np.max(np.abs(back.samples - f.samples))), 0.0, 1e-12


# ---------------------------------------------------------------------------
# heatsg suite
# ---------------------------------------------------------------------------


def check_heat_equation_residual(artifacts):
    h = 1e-2
    worst = 0.0
    for (x, t) in ((0.4, 0.5), (1.0, 0.8), (0.0, 0.3)):
        lap = (
            hs.heat_kernel([x + h], t, 1)
            - 2 * hs.heat_kernel([x], t, 1)
            + hs.heat_kernel([x - h], t, 1)
        ) / (h * h)
        dt = (hs.heat_kernel([x], t + h, 1) - hs.heat_kernel([x], t - h, 1)) / (2 * h)
        worst = max(worst, abs(dt - lap) / abs(lap + 1e-300))
    # the centered stencils are second order: C h^2 with C ~ O(1)
    return worst, 0.0, 50.0 * h * h


def check_chapman_kolmogorov(artifacts):
    g = GridSpec(1, 256, 12.0)
    k1 = hs.sample_heat_kernel(g, 0.5)
    k2 = hs.sample_heat_kernel(g, 1.0)
    ck = convolve(k1, k1)
    return float(np.max(np.abs(ck.samples - k2.samples))), 0.0, 1e-8


def check_heat_kernel_mass(artifacts):
    g = GridSpec(1, 256, 12.0)
    k = hs.sample_heat_kernel(g, 1.0)
    return abs(float(np.real(np.sum(k.samples)) * g.spacing) - 1.0), 0.0, 1e-10


def check_contraction(artifacts):
    g = GridSpec(1, 256, 12.0)
    f = gaussian(0.25).sample(g)
    worst = 0.0
    for t in (0.1, 1.0, 10.0):
        pt = hs.apply_pt(f, t)
        for p in (1, 2, "inf"):
            worst = max(worst, grid_norm(pt, p) / grid_norm(f, p) - 1.0)
    return max(worst, 0.0), 0.0, 1e-12


def check_ultracontractivity(artifacts):
    g = GridSpec(1, 256, 12.0)
    worst_excess = 0.0
    best_ratio = 0.0
    for c in (4.0, 64.0, 1024.0):
        f = gaussian(c).sample(g)
        n1 = grid_norm(f, 1)
        for t in (0.5, 2.0):
            bound = (4.0 * math.pi * t) ** -0.5 * n1
            peak = grid_norm(hs.apply_pt(f, t), "inf")
            worst_excess = max(worst_excess, peak / bound - 1.0)
            best_ratio = max(best_ratio, peak / bound)
    if best_ratio < 0.9:
        return 1.0, 0.0, 1e-10  # the bound should be approached by peaked inputs
    return max(worst_excess, 0.0), 0.0, 1e-10


def check_weak_ultracontractivity(artifacts):
    g = GridSpec(1, 64, 12.0, time_points=64, time_half_width=8.0)
    f = SpaceTimeTestFunction(gaussian(16.0), ct=1.0).sample(g)
    h = g.spacing
    # sup over t of the spatial L^2 norm
    norm = float(np.max(np.sqrt(np.sum(np.abs(f.samples) ** 2, axis=0) * h)))
    c_n_2 = (8.0 * math.pi) ** -0.25
    worst = 0.0
    for tau in (0.5, 2.0):
        peak = grid_norm(hs.apply_pth(f, tau), "inf")
        worst = max(worst, peak / (c_n_2 * tau ** -0.25 * norm) - 1.0)
    return max(worst, 0.0), 0.0, 1e-10


def check_commutation(artifacts):
    g = GridSpec(1, 256, 12.0)
    f = gaussian(math.pi).sample(g)

    def lap(fld):
        out = fo.fraclap_spectral(fld, 1.0)
        return out.with_samples(-out.samples)

    a = lap(hs.apply_pt(f, 0.5))
    b = hs.apply_pt(lap(f), 0.5)
    return float(np.max(np.abs(a.samples - b.samples))), 0.0, 1e-8


def check_rate_heat(artifacts):
    g = GridSpec(1, 256, 12.0)
    tf = gaussian(math.pi)
    f = tf.sample(g)
    lap_f = fo.fraclap_spectral(f, 1.0)
    worst = 0.0
    for t in (0.05, 0.2, 1.0):
        pt = hs.apply_pt(f, t)
        for p in (1, 2, "inf"):
            lhs = grid_norm(f.with_samples(pt.samples - f.samples), p)
            rhs = grid_norm(lap_f, p) * t
            worst = max(worst, lhs / rhs - 1.0)
    return max(worst, 0.0), 0.0, 1e-10


def check_rate_evolutive(artifacts):
    g = GridSpec(1, 64, 12.0, time_points=64, time_half_width=8.0)
    f = SpaceTimeTestFunction(gaussian(math.pi), ct=math.pi).sample(g)
    fh = fourier(f)
    meshes = g.freq_meshes()
    lam = 4.0 * math.pi ** 2 * meshes[0] ** 2 + 2j * math.pi * meshes[1]
    hf = inverse_fourier(fh.with_samples(fh.samples * (-lam), FREQUENCY))
    worst = 0.0
    for tau in (0.05, 0.2, 1.0):
        pt = hs.apply_pth(f, tau)
        for p in (1, 2, "inf"):
            lhs = grid_norm(f.with_samples(pt.samples - f.samples), p)
            rhs = grid_norm(hf, p) * tau
            worst = max(worst, lhs / rhs - 1.0)
    return max(worst, 0.0), 0.0, 1e-10


def check_evolutive_semigroup_law(artifacts):
    g = GridSpec(1, 128, 12.0, time_points=128, time_half_width=8.0)
    f = SpaceTimeTestFunction(gaussian(math.pi), ct=math.pi).sample(g)
    once = hs.apply_pth(hs.apply_pth(f, 0.3), 0.3)
    direct = hs.apply_pth(f, 0.6)
    return float(np.max(np.abs(once.samples - direct.samples))), 0.0, 1e-9


# ---------------------------------------------------------------------------
# fracops suite
# ---------------------------------------------------------------------------


def check_gamma_ns_oracle(artifacts):
    worst = 0.0
    for n in (1, 2):
        for s in (0.25, 0.5, 0.75):
            worst = max(worst, abs(fo.gamma_ns(n, s) * _gamma_ns_integral(n, s) - 1.0))
    return worst, 0.0, 1e-4


def _gamma_ns_integral(n: int, s: float) -> float:
    """Brute-force evaluation of the defining normalization integral
    int (1 - cos z_n)/|z|^{n+2s} dz by radial quadrature with analytic
    oscillatory tails (iterated integration by parts)."""
    p = 1.0 + 2.0 * s

    def tail_cos(a: float, power: float, phase: float = 0.0) -> float:
        # int_a^inf r^{-power} cos(r + phase) dr by four integrations by
        # parts; remainder O(a^{-power-4})
        val = 0.0
        sign_funcs = [
            lambda r: math.sin(r + phase),
            lambda r: math.cos(r + phase),
            lambda r: math.sin(r + phase),
            lambda r: math.cos(r + phase),
        ]
        signs = [-1.0, +1.0, +1.0, -1.0]
        coeff = 1.0
        pw = power
        for k in range(4):
            val += signs[k] * coeff * a ** (-pw) * sign_funcs[k](a)
            coeff *= pw
            pw += 1.0
        return val

    big_a = 30.0
    from .quad import integrate_to

    if n == 1:
        # 1 - cos r written as 2 sin^2(r/2): no cancellation at small r
        head = integrate_to(
            lambda r: 4.0 * math.sin(0.5 * r) ** 2 / r ** p, big_a,
            QuadSpec(abs_tol=1e-9, rel_tol=1e-9),
        ).value
        tail = 2.0 * (big_a ** (1.0 - p) / (p - 1.0) - tail_cos(big_a, p))
        return float(np.real(head)) + tail

    # n = 2: the angular integral of cos(r sin theta) is 2 pi J_0(r)
    def one_minus_j0(r):
        if r < 0.2:  # series form avoids cancellation under the weight
            q = 0.25 * r * r
            return q - q * q / 4.0 + q ** 3 / 36.0 - q ** 4 / 576.0
        return 1.0 - bessel("J", 0.0, r).value.real

    head = integrate_to(
        lambda r: 2.0 * math.pi * one_minus_j0(r) / r ** p,
        big_a,
        QuadSpec(abs_tol=1e-8, rel_tol=1e-8),
    ).value
    # J_0 tail via its large-argument expansion, term by term
    c0 = math.sqrt(2.0 / math.pi)
    tail = 2.0 * math.pi * (
        big_a ** (1.0 - p) / (p - 1.0)
        - c0 * tail_cos(big_a, p + 0.5, -0.25 * math.pi)
        - c0 * 0.125 * tail_cos(big_a, p + 1.5, -0.75 * math.pi)
    )
    return float(np.real(head)) + tail


def check_triple_route(artifacts):
    worst = 0.0
    for n in (1, 2):
        g = GridSpec(n, 256 if n == 1 else 128, 12.0)
        u = gaussian(math.pi).sample(g)
        stride = 16 if n == 1 else 16
        idx = np.arange(stride, g.points_per_axis - stride + 1, stride)
        for s in (0.25, 0.5, 0.75):
            spec = fo.fraclap_spectral(u, s, deperiodized=True)
            bala = fo.fraclap_balakrishnan(u, s, deperiodized=True)
            sup = float(np.max(np.abs(np.real(spec.samples))))
            worst = max(
                worst, float(np.max(np.abs(bala.samples - spec.samples))) / sup
            )
            from itertools import product as iproduct

            for combo in iproduct(idx, repeat=n):
                x = [g.axis()[i] for i in combo]
                if math.sqrt(sum(v * v for v in x)) > g.half_width / 2.0 + 1e-9:
                    continue
                pw = fo.fraclap_pointwise(u, s, x)
                worst = max(worst, abs(pw - float(np.real(spec.samples[combo]))) / sup)
    return worst, 0.0, 1e-3


def check_symmetry_bilinear(artifacts):
    g = GridSpec(1, 256, 12.0)
    u = gaussian(math.pi).sample(g)
    v = polynomial_gaussian(2, 1.0).sample(g)
    worst = 0.0
    for s in (0.25, 0.5, 0.75):
        lu = fo.fraclap_spectral(u, s)
        lv = fo.fraclap_spectral(v, s)
        a = float(np.real(np.sum(u.samples * lv.samples)) * g.spacing)
        b = float(np.real(np.sum(lu.samples * v.samples)) * g.spacing)
        worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
    return worst, 0.0, 1e-8


def check_decay_exponent(artifacts):
    g = GridSpec(1, 256, 12.0)
    n, s = 1, 0.5
    u = gaussian(math.pi).sample(g)
    xs = np.linspace(3.0, 6.0, 10)
    vals = np.array([fo.fraclap_pointwise(u, s, [x]) for x in xs])
    if np.any(-vals <= 0.0):
        return 1.0, 0.0, 0.0  # the operator must be strictly negative out there
    slope, _ = fit_loglog_slope(xs, np.abs(vals))
    artifacts["decay_slope"] = {
        "abs_x": xs,
        "abs_value": np.abs(vals),
        "n": np.full(xs.shape, float(n)),
        "s": np.full(xs.shape, s),
    }
    return slope, -(n + 2.0 * s), 0.1


def check_alpha_limit(artifacts):
    g = GridSpec(1, 256, 12.0)
    u = gaussian(math.pi).sample(g)
    lap = fo.fraclap_spectral(u, 1.0)
    alphas = (1.9, 1.99, 1.999)
    errs = [
        float(np.max(np.abs(fo.fraclap_spectral(u, a / 2.0).samples - lap.samples)))
        for a in alphas
    ]
    artifacts["alpha_limit"] = {"alpha": np.asarray(alphas), "sup_error": np.asarray(errs)}
    monotone = all(b < a for a, b in zip(errs, errs[1:]))
    if not monotone:
        return 1.0, 0.0, 0.0
    return errs[-1], 0.0, 1e-2


def check_riesz_coincidence(artifacts):
    worst = 0.0
    for n in (1, 2):
        for s in (0.25, 0.5, 0.75):
            alpha = 2.0 * s
            explicit = (
                alpha
                * 2.0 ** (alpha - 2.0)
                * gamma(0.5 * (n + alpha)).value.real
                / (math.pi ** (0.5 * n) * gamma(1.0 - 0.5 * alpha).value.real)
            )
            worst = max(worst, abs(explicit / (0.5 * fo.gamma_ns(n, s)) - 1.0))
    g = GridSpec(1, 256, 12.0)
    u = gaussian(math.pi).sample(g)
    bala = fo.fraclap_balakrishnan(u, 0.5, deperiodized=True)
    sup = float(np.max(np.abs(np.real(bala.samples))))
    for x in (0.0, 1.5, 3.0):
        pw = fo.fraclap_pointwise(u, 0.5, [x])
        i = int(round((x + g.half_width) / g.spacing))
        worst = max(worst, abs(pw - float(np.real(bala.samples[i]))) / sup)
    return worst, 0.0, 1e-3


def check_rotation_radial(artifacts):
    g = GridSpec(2, 64, 8.0)
    u = gaussian(1.0).sample(g)
    out = fo.fraclap_spectral(u, 0.5).samples
    worst = max(
        float(np.max(np.abs(out - np.transpose(out)))),
        float(np.max(np.abs(out - np.flip(np.roll(out, -1, 0), 0)))),
    )
    return worst, 0.0, 1e-12


def check_dilation(artifacts):
    g = GridSpec(1, 256, 12.0)
    s = 0.5
    lam = 2.0
    u = gaussian(math.pi)
    u_field = u.sample(g)
    dil = gaussian(math.pi * lam * lam).sample(g)  # u(lam x)
    lhs = fo.fraclap_spectral(dil, s, deperiodized=True)
    rhs = fo.fraclap_spectral(u_field, s, deperiodized=True)
    npts = g.points_per_axis
    j = np.arange(npts // 4, 3 * npts // 4)
    m = 2 * j - npts // 2
    diff = np.abs(
        lhs.samples[j] - lam ** (2.0 * s) * rhs.samples[m]
    )
    # both sides carry the image-correction residual of their own box
    return float(np.max(diff)) / float(np.max(np.abs(rhs.samples))), 0.0, 1e-4


def check_fracheat_slicewise(artifacts):
    g = GridSpec(1, 128, 12.0, time_points=64, time_half_width=8.0)
    from .field import SpaceTimeField, PHYSICAL

    u = gaussian(math.pi).sample(GridSpec(1, 128, 12.0))
    const = SpaceTimeField(
        g, np.repeat(u.samples[:, None], 64, axis=1), PHYSICAL
    )
    oracle = fo.fracheat_multiplier_oracle(const, 0.5)
    sl = fo.fraclap_spectral(u, 0.5)
    return (
        float(np.max(np.abs(oracle.samples - sl.samples[:, None]))),
        0.0,
        1e-10,
    )


def check_fracheat_oracle(artifacts):
    g = GridSpec(1, 128, 12.0, time_points=512, time_half_width=32.0)
    f = SpaceTimeTestFunction(gaussian(math.pi), ct=math.pi).sample(g)
    tmask = np.abs(g.time_axis()) <= 8.0
    worst = 0.0
    for s in (0.5, 1.5):
        mine = fo.fracheat(f, s)
        oracle = fo.fracheat_multiplier_oracle(f, s)
        sup = float(np.max(np.abs(oracle.samples[:, tmask])))
        worst = max(
            worst,
            float(np.max(np.abs(mine.samples[:, tmask] - oracle.samples[:, tmask])))
            / sup,
        )
    return worst, 0.0, 1e-4


def check_mean_value_laplacian(artifacts):
    g = GridSpec(1, 256, 12.0)
    u = gaussian(math.pi).sample(g)
    ladder = [0.8 * 2.0 ** (-k / 2.0) for k in range(5)]
    est = fo.laplacian_mean_value_estimate(u, [0.0], ladder)
    return abs(est - 2.0 * math.pi) / (2.0 * math.pi), 0.0, 1e-3


# ---------------------------------------------------------------------------
# extension suite
# ---------------------------------------------------------------------------


def check_unit_masses(artifacts):
    worst = 0.0
    for var, n, s in (
        ("elliptic", 1, 0.5),
        ("elliptic", 2, 0.25),
        ("parabolic", 1, 0.5),
        ("higher", 1, 1.5),
    ):
        for y in (0.1, 0.4):
            worst = max(worst, abs(ext.kernel_mass(var, n, s, y) - 1.0))
    return worst, 0.0, 1e-6


def _st_field():
    g = GridSpec(1, 128, 12.0, time_points=256, time_half_width=16.0)
    return SpaceTimeTestFunction(gaussian(math.pi), ct=math.pi).sample(g)


def check_trace_monotone(artifacts):
    g = GridSpec(1, 1024, 12.0)
    u = gaussian(math.pi).sample(g)
    el = ext.solve_elliptic(u, 0.5)
    tr_el = [
        float(np.max(np.abs(r.samples - u.samples))) for r in el.rungs
    ]
    f = _st_field()
    tmask = np.abs(f.grid.time_axis()) <= 4.0
    traces = {"elliptic": tr_el}
    for name, solver, s in (
        ("parabolic", ext.solve_parabolic, 0.5),
        ("higher", ext.solve_higher, 1.5),
    ):
        e = solver(f, s)
        traces[name] = [
            float(
                np.sqrt(np.mean(np.abs(r.samples[:, tmask] - f.samples[:, tmask]) ** 2))
            )
            for r in e.rungs
        ]
        if name == "higher":
            artifacts["dtn_convergence"] = {
                "y": np.asarray(e.y_ladder),
                "error": np.asarray(traces[name]),
            }
    worst = 0.0
    for name, tr in traces.items():
        ok = all(b < a for a, b in zip(tr, tr[1:]))
        if not ok:
            worst = 1.0
    return worst, 0.0, 0.5


def check_dtn_agreement(artifacts):
    g = GridSpec(1, 1024, 12.0)
    u = gaussian(math.pi).sample(g)
    worst_e = 0.0
    for s in (0.25, 0.5, 0.75):
        e = ext.solve_elliptic(u, s)
        d = ext.dtn_elliptic(e, u, s)
        ref = fo.fraclap_spectral(u, s)
        mask = np.abs(g.axis()) <= 6.0
        sup = float(np.max(np.abs(np.real(ref.samples[mask]))))
        worst_e = max(
            worst_e,
            float(np.max(np.abs(np.real(d.samples[mask]) - np.real(ref.samples[mask]))))
            / sup,
        )
    f = _st_field()
    tmask = np.abs(f.grid.time_axis()) <= 4.0
    xmask = np.abs(f.grid.axis()) <= 6.0
    sel = np.ix_(np.where(xmask)[0], np.where(tmask)[0])
    worst_st = 0.0
    for s, solver, tracer in (
        (0.5, ext.solve_parabolic, ext.dtn_parabolic),
        (1.5, ext.solve_higher, ext.dtn_higher),
    ):
        e = solver(f, s)
        d = tracer(e, f, s)
        oracle = fo.fracheat_multiplier_oracle(f, s)
        sup = float(np.max(np.abs(oracle.samples[sel])))
        worst_st = max(
            worst_st,
            float(np.max(np.abs(d.samples[sel] - oracle.samples[sel]))) / sup,
        )
    # scale both families to their stated tolerances and report the worst
    return max(worst_e / 1e-2, worst_st / 2e-2), 0.0, 1.0


def check_kernel_pde_residuals(artifacts):
    # elliptic kernel annihilated by the degenerate operator (radial form)
    reps = ext.la_harmonicity_check(3, 0.5, [((1.0, 0.0, 0.0), 1.0)])
    reps += ext.la_harmonicity_check(2, 0.25, [((0.8, 0.3), 0.7)])
    worst = max(r.measured / 1e-5 for r in reps)
    # parabolic kernel: the intertwined heat kernel is annihilated
    for a in (-0.5, 0.0, 0.5):
        res, _ = ext.intertwining_residual(a)
        worst = max(worst, res / 1e-4)
    # subordination kernel annihilation, with stencil refinement
    coarse = ext.annihilation_residual(1.5, (0.3, 0.8, 0.5), delta=1e-2)
    fine = ext.annihilation_residual(1.5, (0.3, 0.8, 0.5), delta=5e-3)
    worst = max(worst, fine / 1e-4)
    if coarse / fine < 4.0:
        worst = max(worst, 2.0)
    return worst, 0.0, 1.0


def check_kernel_identities(artifacts):
    probes = [(0.3, 0.8, 0.5), (-0.4, 0.9, 0.7)]
    reps = ext.kernel_identity_suite(1.5, probes)
    reps += ext.kernel_identity_suite(0.5, [(0.3, 0.8, 0.5)])
    worst = max(r.measured / r.tolerance for r in reps)
    return worst, 0.0, 1.0


def check_higher_parabolic_consistency(artifacts):
    f = _st_field()
    e1 = ext.solve_parabolic(f, 0.5)
    e2 = ext.solve_higher(f, 0.5)
    worst = max(
        float(np.max(np.abs(a.samples - b.samples)))
        for a, b in zip(e1.rungs, e2.rungs)
    )
    return worst, 0.0, 1e-10


def check_extension_pde_residual(artifacts):
    f = _st_field()
    rel, _, _ = ext.extension_pde_residual(f, 1.5, y0=0.8, delta_y=0.02)
    return rel, 0.0, 1e-3


SUITES = {
    "specfun": {
        "specfun.gamma_reflection": check_gamma_reflection,
        "specfun.gamma_duplication": check_gamma_duplication,
        "specfun.bessel_ode_first_kind": check_bessel_ode_first_kind,
        "specfun.bessel_ode_modified": check_bessel_ode_modified,
        "specfun.bessel_recursion": check_bessel_recursion,
        "specfun.macdonald_symmetry": check_macdonald_symmetry,
        "specfun.bessel_asymptotic_bound": check_bessel_asymptotic_bound,
        "specfun.hyp0f1_bessel_bridge": check_hyp0f1_bessel_bridge,
    },
    "quad": {
        "quad.closed_form_integrals": check_quad_closed_forms,
        "quad.split_invariance": check_quad_split_invariance,
        "quad.pv_second_difference": check_quad_pv_second_difference,
    },
    "field": {
        "field.plancherel": check_field_plancherel,
        "field.rotation_invariance": check_field_rotation_invariance,
        "field.derivative_law": check_field_derivative_law,
        "field.fourier_roundtrip": check_field_roundtrip,
    },
    "heatsg": {
        "heatsg.heat_equation_residual": check_heat_equation_residual,
        "heatsg.chapman_kolmogorov": check_chapman_kolmogorov,
        "heatsg.kernel_mass": check_heat_kernel_mass,
        "heatsg.contraction": check_contraction,
        "heatsg.ultracontractivity": check_ultracontractivity,
        "heatsg.weak_ultracontractivity": check_weak_ultracontractivity,
        "heatsg.commutation": check_commutation,
        "heatsg.rate_heat": check_rate_heat,
        "heatsg.rate_evolutive": check_rate_evolutive,
        "heatsg.evolutive_semigroup_law": check_evolutive_semigroup_law,
    },
    "fracops": {
        "fracops.gamma_ns_oracle": check_gamma_ns_oracle,
        "fracops.triple_route_agreement": check_triple_route,
        "fracops.symmetry_bilinear": check_symmetry_bilinear,
        "fracops.decay_exponent": check_decay_exponent,
        "fracops.alpha_limit": check_alpha_limit,
        "fracops.riesz_coincidence": check_riesz_coincidence,
        "fracops.rotation_radial": check_rotation_radial,
        "fracops.dilation": check_dilation,
        "fracops.fracheat_slicewise": check_fracheat_slicewise,
        "fracops.fracheat_multiplier": check_fracheat_oracle,
        "fracops.mean_value_laplacian": check_mean_value_laplacian,
    },
    "extension": {
        "extension.unit_masses": check_unit_masses,
        "extension.trace_monotone": check_trace_monotone,
        "extension.dtn_agreement": check_dtn_agreement,
        "extension.kernel_pde_residuals": check_kernel_pde_residuals,
        "extension.kernel_identities": check_kernel_identities,
        "extension.higher_parabolic_consistency": check_higher_parabolic_consistency,
        "extension.pde_residual": check_extension_pde_residual,
    },
}


def run_suite(names, tol_scale: float = 1.0, artifacts=None, timings: bool = False):
    """Run the requested suites; returns (reports, artifacts)."""
    if artifacts is None:
        artifacts = {}
    reports = []
    for suite in names:
        if suite not in SUITES:
            raise KeyError(f"unknown suite {suite!r}")
        for check_id, fn in SUITES[suite].items():
            start = time.monotonic()
            try:
                measured, expected, tol = fn(artifacts)
                ms = int((time.monotonic() - start) * 1000)
                reports.append(
                    CheckReport.from_measurement(
                        check_id, measured, expected, tol * tol_scale,
                        runtime_ms=ms if timings else 0,
                    )
                )
            except Exception as exc:  # a crashed check is a failed check
                ms = int((time.monotonic() - start) * 1000)
                reports.append(
                    CheckReport(
                        check_id, "fail", math.inf, 0.0, 0.0,
                        runtime_ms=ms if timings else 0,
                    )
                )
                artifacts.setdefault("errors", []).append(f"{check_id}: {exc!r}")
    return reports, artifacts
