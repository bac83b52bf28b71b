"""Render diagnostic figures from fraxion artifacts.

Four kinds: trace-error ladders (log-log with fitted slope), the order->2
limit curve, the far-field decay slope fit, and residual bars from a
verify report.  The scripts only visualize; every number comes from the
input files.
"""

from __future__ import annotations

import argparse
import math
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .figspec import (
    FIGURE_KINDS,
    EmptyInputError,
    FigureSpec,
    SchemaError,
    load_curve,
    load_report,
)


def fit_slope(x, y):
    """Deterministic least-squares slope of log y against log x."""
    coeffs = np.polyfit(np.log(np.abs(x)), np.log(np.abs(y)), 1)
    return float(coeffs[0]), float(coeffs[1])


def _new_axes(title):
    fig, ax = plt.subplots(figsize=(6.0, 4.2), dpi=160)
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    return fig, ax


def _render_dtn_convergence(spec: FigureSpec):
    cols = load_curve(spec.inputs[0], "dtn_convergence")
    y, err = cols["y"], cols["error"]
    slope, intercept = fit_slope(y, err)
    fig, ax = _new_axes("extension trace error down the y-ladder")
    ax.loglog(y, err, "o-", label="measured")
    ax.loglog(y, np.exp(intercept) * y ** slope, "--", label=f"fit: slope {slope:.3f}")
    ax.set_xlabel("ladder height y")
    ax.set_ylabel("trace error")
    ax.legend()
    return fig, {"slope": slope}


def _render_alpha_limit(spec: FigureSpec):
    cols = load_curve(spec.inputs[0], "alpha_limit")
    alpha, err = cols["alpha"], cols["sup_error"]
    fig, ax = _new_axes("fractional order approaching 2")
    ax.semilogy(alpha, err, "o-")
    ax.set_xlabel("order alpha")
    ax.set_ylabel("sup error against the negative Laplacian")
    monotone = bool(np.all(np.diff(err) < 0))
    ax.annotate(
        f"monotone: {monotone}",
        xy=(0.05, 0.08),
        xycoords="axes fraction",
    )
    return fig, {"monotone": monotone}


def _render_decay_slope(spec: FigureSpec):
    cols = load_curve(spec.inputs[0], "decay_slope")
    x, v = cols["abs_x"], cols["abs_value"]
    slope, intercept = fit_slope(x, v)
    fig, ax = _new_axes("far-field decay of the fractional Laplacian")
    ax.loglog(x, v, "o", label="|operator output|")
    ax.loglog(x, np.exp(intercept) * x ** slope, "--", label=f"fit: slope {slope:.3f}")
    if "n" in cols and "s" in cols:
        expected = -(float(cols["n"][0]) + 2.0 * float(cols["s"][0]))
        ax.loglog(
            x,
            np.exp(intercept + slope * math.log(x[0]) - expected * math.log(x[0]))
            * x ** expected,
            ":",
            label=f"expected slope {expected:.1f}",
        )
    ax.set_xlabel("|x|")
    ax.set_ylabel("magnitude")
    ax.legend()
    return fig, {"slope": slope}


def _render_residual_bars(spec: FigureSpec):
    checks = load_report(spec.inputs[0])
    ids = [c["check_id"] for c in checks]
    ratios = []
    colors = []
    for c in checks:
        tol = c["tolerance"] if c["tolerance"] else 1.0
        gap = abs(c["measured"] - c.get("expected", 0.0))
        ratios.append(max(gap / tol, 1e-18))
        colors.append("tab:blue" if c["status"] == "pass" else "tab:red")
    fig, ax = plt.subplots(figsize=(7.0, 0.32 * len(ids) + 1.6), dpi=160)
    pos = np.arange(len(ids))
    ax.barh(pos, ratios, color=colors)
    ax.set_yticks(pos, ids, fontsize=6)
    ax.set_xscale("log")
    ax.axvline(1.0, color="k", lw=1)
    ax.set_xlabel("|measured - expected| / tolerance")
    ax.set_title("verification residuals (1 = at tolerance)")
    ax.invert_yaxis()
    fig.tight_layout()
    return fig, {"n_checks": len(ids)}


_RENDERERS = {
    "dtn_convergence": _render_dtn_convergence,
    "alpha_limit": _render_alpha_limit,
    "decay_slope": _render_decay_slope,
    "residual_bars": _render_residual_bars,
}


def render(spec: FigureSpec) -> dict:
    """Render one figure to spec.output; returns fit metadata."""
    fig, meta = _RENDERERS[spec.kind](spec)
    if spec.kind != "residual_bars":
        fig.tight_layout()
    fig.savefig(spec.output)
    plt.close(fig)
    return meta


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fraxion-plots",
        description="render diagnostic figures from fraxion CSV/JSON artifacts",
    )
    parser.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    parser.add_argument(
        "--input", required=True, action="append", help="artifact path (repeatable)"
    )
    parser.add_argument("--out", required=True, help="output image path (png/svg)")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(args.kind, tuple(args.input), args.out)
        meta = render(spec)
    except (SchemaError, EmptyInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    pretty = ", ".join(f"{k}={v}" for k, v in meta.items())
    print(f"wrote {args.out} ({pretty})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
