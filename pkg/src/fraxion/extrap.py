"""Richardson-type extrapolation on geometric ladders."""

from __future__ import annotations

import math

import numpy as np

from .errors import ExtrapolationError

__all__ = ["richardson_limit", "fit_loglog_slope"]


def _usable_prefix(values):
    """Trim the tail of a ladder once successive differences hit a noise floor."""
    diffs = [abs(values[i + 1] - values[i]) for i in range(len(values) - 1)]
    if not diffs:
        return values
    keep = len(values)
    best = diffs[0]
    for i, d in enumerate(diffs):
        if d <= best:
            best = d
        elif d > 4.0 * best and best < 1e-8 * max(abs(v) for v in values[: i + 1]):
            keep = i + 1
            break
    return values[:keep]


def richardson_limit(values, ratio: float = 2.0, exponent: float | None = None):
    """Extrapolate v_k -> V assuming v_k = V + c q_k with q_k shrinking by `ratio`.

    The error exponent is estimated from consecutive differences unless
    given.  Returns (limit, error_estimate).  Raises ExtrapolationError if
    the sequence is not Cauchy at all.
    """
    vals = [complex(v) for v in values]
    if len(vals) < 2:
        raise ExtrapolationError("need at least two ladder entries")
    vals = _usable_prefix(vals)
    if len(vals) < 2:
        raise ExtrapolationError("ladder collapsed to a single usable entry")

    scale = max(max(abs(v) for v in vals), 1e-300)
    diffs = [abs(vals[i + 1] - vals[i]) for i in range(len(vals) - 1)]
    if len(diffs) >= 2 and diffs[-1] > 2.0 * diffs[0] and diffs[-1] > 1e-9 * scale:
        raise ExtrapolationError("ladder is not Cauchy-converging")

    current = vals
    err = diffs[-1] if diffs else 0.0
    for _ in range(len(vals) - 1):
        if len(current) < 3 and exponent is None:
            break
        if len(current) < 2:
            break
        if exponent is not None:
            p = exponent
        else:
            ps = []
            for i in range(len(current) - 2):
                d0 = current[i + 1] - current[i]
                d1 = current[i + 2] - current[i + 1]
                if abs(d1) > 0 and abs(d0) > abs(d1):
                    ps.append(math.log(abs(d0) / abs(d1)) / math.log(ratio))
            if not ps:
                break
            p = float(np.median(ps))
            if p <= 0.05:
                break
        factor = ratio ** p - 1.0
        nxt = [
            current[i + 1] + (current[i + 1] - current[i]) / factor
            for i in range(len(current) - 1)
        ]
        new_err = abs(nxt[-1] - current[-1])
        if new_err > 2.0 * err and err < 1e-10 * scale:
            break
        current = nxt
        err = new_err
        exponent = None  # only the leading exponent is known a priori
    limit = current[-1]
    if abs(limit.imag) < 1e-12 * max(abs(limit), 1.0):
        limit = complex(limit.real, 0.0)
    return limit, err


def fit_loglog_slope(x, y):
    """Least-squares slope of log|y| against log|x| (with intercept)."""
    lx = np.log(np.abs(np.asarray(x, dtype=float)))
    ly = np.log(np.abs(np.asarray(y, dtype=float)))
    a = np.vstack([lx, np.ones_like(lx)]).T
    slope, intercept = np.linalg.lstsq(a, ly, rcond=None)[0]
    return float(slope), float(intercept)
