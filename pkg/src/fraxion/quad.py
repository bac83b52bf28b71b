"""Quadrature for half-line integrals with endpoint singularities and for
principal-value integrals defined by symmetric excision.

The half-line rule follows the recurring (0, split) + (split, inf) split:
the lower piece is integrated in the variable u = log t with the
trapezoidal rule (exponentially convergent for integrands that vanish
algebraically at 0), the upper piece with Gauss-Legendre panels in the
same logarithmic variable.  Integrands may return scalars or numpy arrays;
arrays are measured in the max norm and reduced in a fixed order so runs
are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonConvergence
from .extrap import richardson_limit
from .specfun import _leggauss_cached

__all__ = ["QuadSpec", "QuadResult", "integrate_halfline", "integrate_to", "integrate_log_interval", "integrate_pv"]


@dataclass(frozen=True)
class QuadSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_refinements: int = 9
    split_point: float = 1.0

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise DomainError("tolerances must be positive")
        if self.max_refinements < 1:
            raise DomainError("max_refinements must be >= 1")
        if self.split_point <= 0:
            raise DomainError("split_point must be positive")


@dataclass(frozen=True)
class QuadResult:
    value: object  # complex scalar or ndarray
    error_estimate: float
    evaluations: int

    def __post_init__(self):
        if self.error_estimate < 0:
            raise ValueError("error_estimate must be >= 0")
        if self.evaluations <= 0:
            raise ValueError("evaluations must be positive")


def _mag(x):
    return float(np.max(np.abs(x)))


class _Counter:
    __slots__ = ("n",)

    def __init__(self):
        self.n = 0


_MAX_TRAP_LEVEL = 12


def _lower_de_trapezoid(f, split, level, counter, cache):
    """int_0^split f(t) dt via the double-exponential map t = split exp(-e^v).

    The substituted integrand split * f(t(v)) t'(v) vanishes exponentially
    as v -> -inf and double-exponentially as v -> +inf, so the trapezoidal
    rule in v converges geometrically under step halving.  Values are
    cached on the dyadic refinement lattice so every halving reuses all
    previous integrand evaluations.
    """
    h = 0.5 / (2 ** level)
    stride = 2 ** (_MAX_TRAP_LEVEL - level)

    def g_at(j):
        key = j * stride
        hit = cache.get(key)
        if hit is None:
            v = j * h
            ev = math.exp(v)
            t = split * math.exp(-ev)
            # below ~1e-250 the algebraic part of an integrable singularity
            # can overflow double precision before t itself underflows
            if t <= 1e-250:
                hit = 0.0
            else:
                hit = f(t) * (t * ev)
                counter.n += 1
            cache[key] = hit
        return hit

    total = g_at(0) * h
    peak = _mag(total) / h if h else 0.0
    for direction in (+1, -1):
        quiet = 0
        j = direction
        max_steps = int(800 / h) + 8
        while abs(j) < max_steps:
            g = g_at(j)
            total = total + g * h
            m = _mag(g)
            peak = max(peak, m)
            if m < 1e-17 * max(peak, 1e-300):
                quiet += 1
                if quiet >= 3:
                    break
            else:
                quiet = 0
            j += direction
    return total


def _upper_gauss_panels(f, split, level, counter):
    """int_split^inf f(t) dt with Gauss-Legendre panels in u = log(t/split)."""
    nodes = 12 * (2 ** level)
    x, w = _leggauss_cached(min(nodes, 200))
    total = None
    peak = 0.0
    quiet = 0
    for j in range(400):
        a, b = float(j), float(j + 1)
        u = 0.5 * (b - a) * x + 0.5 * (a + b)
        wu = 0.5 * (b - a) * w
        panel = None
        for ui, wi in zip(u, wu):
            t = split * math.exp(ui)
            g = f(t) * t * wi
            counter.n += 1
            panel = g if panel is None else panel + g
        total = panel if total is None else total + panel
        m = _mag(panel)
        peak = max(peak, m)
        if m < 1e-16 * max(peak, 1e-300):
            quiet += 1
            if quiet >= 2:
                break
        else:
            quiet = 0
    return total


def integrate_halfline(f, spec: QuadSpec = QuadSpec()) -> QuadResult:
    """Integrate f over (0, inf).

    f may be singular only at the endpoints (integrably so) and may return
    scalars or numpy arrays.  Convergence is judged by nested-rule
    differences; NonConvergence carries the partial value.
    """
    counter = _Counter()
    prev = None
    err = math.inf
    value = None
    cache = {}
    for level in range(min(spec.max_refinements, _MAX_TRAP_LEVEL)):
        low = _lower_de_trapezoid(f, spec.split_point, level, counter, cache)
        high = _upper_gauss_panels(f, spec.split_point, level, counter)
        value = low + high
        if prev is not None:
            err = _mag(value - prev)
            if err <= max(spec.abs_tol, spec.rel_tol * _mag(value)):
                return QuadResult(value, err, counter.n)
        prev = value
    raise NonConvergence(
        "halfline quadrature exhausted its refinement budget",
        value=value,
        error_estimate=err,
    )


def integrate_log_interval(f, lower: float, upper: float, spec: QuadSpec = QuadSpec(),
                           panel_width: float = 2.0) -> QuadResult:
    """Integrate f over (lower, upper) with Gauss-Legendre panels in
    u = log t.

    Intended for integrands that are analytic on the interval and already
    negligible at `lower` (e.g. carrying an exp(-c/t) cutoff), where the
    rule converges spectrally under node doubling.
    """
    if not 0 < lower < upper:
        raise DomainError("need 0 < lower < upper")
    u_lo, u_hi = math.log(lower), math.log(upper)
    edges = np.linspace(u_lo, u_hi, max(2, int(math.ceil((u_hi - u_lo) / panel_width)) + 1))
    counter = _Counter()
    prev = None
    err = math.inf
    value = None
    for level in range(spec.max_refinements):
        nodes = min(16 * (2 ** level), 260)
        x, w = _leggauss_cached(nodes)
        value = None
        for a, b in zip(edges[:-1], edges[1:]):
            u = 0.5 * (b - a) * x + 0.5 * (a + b)
            wu = 0.5 * (b - a) * w
            for ui, wi in zip(u, wu):
                t = math.exp(ui)
                g = f(t) * (t * wi)
                counter.n += 1
                value = g if value is None else value + g
        if prev is not None:
            err = _mag(value - prev)
            if err <= max(spec.abs_tol, spec.rel_tol * _mag(value)):
                return QuadResult(value, err, counter.n)
        prev = value
    raise NonConvergence(
        "log-interval quadrature exhausted its refinement budget",
        value=value,
        error_estimate=err,
    )


def integrate_to(f, upper: float, spec: QuadSpec = QuadSpec()) -> QuadResult:
    """Integrate f over (0, upper) with the same endpoint treatment
    as :func:`integrate_halfline` (DE map below the split, log-spaced
    Gauss-Legendre panels above)."""
    if upper <= 0:
        raise DomainError("upper limit must be positive")
    split = min(spec.split_point, 0.5 * upper)
    v_top = math.log(upper / split)
    counter = _Counter()
    cache = {}
    prev = None
    err = math.inf
    value = None
    for level in range(min(spec.max_refinements, _MAX_TRAP_LEVEL)):
        low = _lower_de_trapezoid(f, split, level, counter, cache)
        nodes = min(12 * (2 ** level), 200)
        x, w = _leggauss_cached(nodes)
        high = None
        edges = np.linspace(0.0, v_top, max(2, int(math.ceil(v_top)) + 1))
        for a, b in zip(edges[:-1], edges[1:]):
            u = 0.5 * (b - a) * x + 0.5 * (a + b)
            wu = 0.5 * (b - a) * w
            for ui, wi in zip(u, wu):
                t = split * math.exp(ui)
                g = f(t) * t * wi
                counter.n += 1
                high = g if high is None else high + g
        value = low + high
        if prev is not None:
            err = _mag(value - prev)
            if err <= max(spec.abs_tol, spec.rel_tol * _mag(value)):
                return QuadResult(value, err, counter.n)
        prev = value
    raise NonConvergence(
        "capped quadrature exhausted its refinement budget",
        value=value,
        error_estimate=err,
    )


# ---------------------------------------------------------------------------
# principal value integrals
# ---------------------------------------------------------------------------


def _sphere_average_times_area(f, x0, n):
    """Callable r -> r^(n-1) * integral of f(x0 + r omega) over the sphere."""
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if n == 1:
        def s(r):
            return f(x0 + r) + f(x0 - r)
    elif n == 2:
        theta = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
        omegas = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        wt = 2.0 * math.pi / len(theta)

        def s(r):
            acc = 0.0
            for om in omegas:
                acc += f(x0 + r * om)
            return acc * wt * r
    elif n == 3:
        mu, wmu = _leggauss_cached(16)
        theta = np.linspace(0.0, 2.0 * math.pi, 32, endpoint=False)
        wth = 2.0 * math.pi / len(theta)
        oms, ws = [], []
        for m, wm in zip(mu, wmu):
            sin_phi = math.sqrt(1.0 - m * m)
            for th in theta:
                oms.append((sin_phi * math.cos(th), sin_phi * math.sin(th), m))
                ws.append(wm * wth)
        oms = np.asarray(oms)
        ws = np.asarray(ws)

        def s(r):
            acc = 0.0
            for om, w in zip(oms, ws):
                acc += w * f(x0 + r * om)
            return acc * r * r
    else:
        raise DomainError("integrate_pv supports dimensions 1..3")
    return s


def integrate_pv(f, x0, spec: QuadSpec = QuadSpec(), eps0: float = 1.0) -> QuadResult:
    """Cauchy principal value of f over R^n minus the point x0.

    Computes symmetric excisions I(eps_k) on the ladder eps_k = eps0 2^-k
    and Richardson-extrapolates the limit.  The caller should pass eps0 of
    the order of one grid spacing when f comes from a sampled field.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    n = x0.size
    shell = _sphere_average_times_area(f, x0, n)
    counter = _Counter()

    def outer(r):
        counter.n += 1
        return shell(r)

    base = integrate_halfline(
        lambda t: outer(eps0 + t),
        QuadSpec(spec.abs_tol, spec.rel_tol, spec.max_refinements, spec.split_point),
    )
    ladder = [base.value]
    x_gl, w_gl = _leggauss_cached(48)
    shell_peak = 0.0
    n_rungs = 10
    for k in range(n_rungs):
        hi = eps0 * 2.0 ** (-k)
        lo = 0.5 * hi
        r = 0.5 * (hi - lo) * x_gl + 0.5 * (hi + lo)
        inc = 0.0
        for ri, wi in zip(r, w_gl):
            s = outer(ri)
            shell_peak = max(shell_peak, abs(s) * ri)
            inc += wi * s
        inc *= 0.5 * (hi - lo)
        ladder.append(ladder[-1] + inc)
    scale = max(abs(v) for v in ladder) + shell_peak
    diffs = [abs(ladder[i + 1] - ladder[i]) for i in range(len(ladder) - 1)]
    if max(diffs) <= max(spec.abs_tol, spec.rel_tol * scale):
        # excisions already stable to tolerance; nothing to extrapolate
        return QuadResult(ladder[-1], max(diffs) + base.error_estimate, counter.n)
    try:
        limit, err = richardson_limit(ladder)
    except Exception as exc:
        raise NonConvergence(
            f"excision ladder did not converge: {exc}",
            value=ladder[-1],
            error_estimate=abs(ladder[-1] - ladder[-2]),
        ) from exc
    return QuadResult(limit, err + base.error_estimate, counter.n)
