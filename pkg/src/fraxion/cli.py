"""Command-line front end.

Subcommands
    constants   print the named constants at (n, s) as a table and JSON
    apply       apply an operator to a catalog function, write the CSV
    extend      solve an extension problem, write per-rung CSVs and the
                trace comparison
    verify      run verification suites, write the JSON report

Configuration comes from flags or a flat JSON file (--config); flags win.
Unknown config keys are an error.  Exit codes: 0 all checks pass, 1 a
check failed, 2 configuration error.  Reports serialize numbers with 17
significant digits; by default runtime fields are zeroed so identical
configs produce byte-identical outputs (set FRAXION_TIMINGS=1 to record
wall times instead).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass

import numpy as np

from . import checks as checks_mod
from . import extension as ext
from . import fracops as fo
from .errors import ConfigError, FraxionError
from .field import (
    GridSpec,
    SpaceTimeTestFunction,
    gaussian,
    modulated_gaussian,
    polynomial_gaussian,
    to_csv,
)
from .report import CheckReport

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

_FLAG_KEYS = (
    "command",
    "n",
    "s",
    "function",
    "grid_points",
    "half_width",
    "time_points",
    "time_half_width",
    "method",
    "op",
    "variant",
    "suite",
    "tol_scale",
    "out",
    "report",
)


@dataclass
class RunConfig:
    command: str
    n: int = 1
    s: float = 0.5
    function: str = "gaussian"
    grid_points: int = 256
    half_width: float = 12.0
    time_points: int = 256
    time_half_width: float = 16.0
    method: str = "spectral"
    op: str = "fraclap"
    variant: str = "elliptic"
    suite: str = "all"
    tol_scale: float = 1.0
    out: str | None = None
    report: str | None = None

    def validate(self):
        if self.command not in ("constants", "apply", "extend", "verify"):
            raise ConfigError(f"unknown command {self.command!r}")
        if self.command in ("constants", "apply", "extend"):
            if abs(self.s - round(self.s)) < 1e-12:
                raise ConfigError("fractional commands need a non-integer order s")
        if self.n not in (1, 2, 3):
            raise ConfigError("n must be 1, 2 or 3")
        if self.function.split("(")[0] not in (
            "gaussian",
            "modulated_gaussian",
            "polynomial_gaussian",
        ):
            raise ConfigError(f"unknown test function {self.function!r}")
        return self


def _merge_config(args) -> RunConfig:
    values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a flat JSON object")
        for key, val in raw.items():
            if key not in _FLAG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            values[key] = val
    for key in _FLAG_KEYS:
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            values[key] = flag_val
    if "command" not in values:
        raise ConfigError("no command given")
    return RunConfig(**values).validate()


def _parse_function(spec: str, n: int):
    """Catalog names: gaussian[(c)], modulated_gaussian(c,xi0...),
    polynomial_gaussian(degree,c)."""
    name = spec.split("(")[0]
    params = []
    if "(" in spec:
        inner = spec[spec.index("(") + 1 : spec.rindex(")")]
        params = [float(p) for p in inner.split(",") if p.strip()]
    if name == "gaussian":
        return gaussian(params[0] if params else math.pi)
    if name == "modulated_gaussian":
        if len(params) < 1 + n:
            raise ConfigError("modulated_gaussian needs (c, xi0 components)")
        return modulated_gaussian(params[0], params[1 : 1 + n])
    if name == "polynomial_gaussian":
        if len(params) != 2:
            raise ConfigError("polynomial_gaussian needs (degree, c)")
        return polynomial_gaussian(int(params[0]), params[1])
    raise ConfigError(f"unknown test function {name!r}")


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _format_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    v = float(x)
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    return "%.17g" % v


def dumps_json(obj, indent: int = 0) -> str:
    """Deterministic JSON with 17-significant-digit floats."""
    pad = " " * indent
    if isinstance(obj, dict):
        items = ",\n".join(
            f'{pad}  "{k}": {dumps_json(v, indent + 2).lstrip()}' for k, v in obj.items()
        )
        return f"{pad}{{\n{items}\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        items = ",\n".join(f"{pad}  {dumps_json(v, indent + 2).lstrip()}" for v in obj)
        return f"{pad}[\n{items}\n{pad}]" if obj else f"{pad}[]"
    if obj is None:
        return f"{pad}null"
    if isinstance(obj, str):
        return pad + json.dumps(obj)
    return pad + _format_number(obj)


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_curve_csv(path: str, columns: dict):
    keys = list(columns.keys())
    rows = zip(*[np.atleast_1d(columns[k]) for k in keys])
    text = ",".join(keys) + "\n"
    for row in rows:
        text += ",".join("%.17g" % float(v) for v in row) + "\n"
    _atomic_write(path, text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_constants(cfg: RunConfig) -> int:
    table = fo.constants_table(cfg.n, cfg.s)
    rows = [
        ("gamma_ns", table.gamma_ns),
        ("riesz_const", table.riesz_const),
        ("dtn_const", table.dtn_const),
        ("K", table.K_s),
    ]
    width = max(len(k) for k, _ in rows)
    print(f"constants at n={cfg.n}, s={_format_number(cfg.s)}")
    for key, val in rows:
        print(f"  {key:<{width}}  {_format_number(val)}")
    payload = {
        "schema": SCHEMA_VERSION,
        "config_echo": asdict(cfg),
        "constants": {k: v for k, v in rows},
    }
    if cfg.out:
        _atomic_write(cfg.out, dumps_json(payload) + "\n")
        print(f"wrote {cfg.out}")
    return 0


def _spatial_grid(cfg: RunConfig) -> GridSpec:
    return GridSpec(cfg.n, cfg.grid_points, cfg.half_width)


def _spacetime_grid(cfg: RunConfig) -> GridSpec:
    return GridSpec(
        cfg.n,
        cfg.grid_points,
        cfg.half_width,
        time_points=cfg.time_points,
        time_half_width=cfg.time_half_width,
    )


def _cmd_apply(cfg: RunConfig) -> int:
    tf = _parse_function(cfg.function, cfg.n)
    if cfg.op in ("fraclap", "riesz"):
        u = tf.sample(_spatial_grid(cfg))
        if cfg.op == "fraclap":
            if cfg.method == "spectral":
                out = fo.fraclap_spectral(u, cfg.s)
            elif cfg.method == "balakrishnan":
                out = fo.fraclap_balakrishnan(u, cfg.s)
            else:
                raise ConfigError(f"unknown method {cfg.method!r} for fraclap")
        else:
            out = fo.riesz_potential(u, 2.0 * cfg.s)
    elif cfg.op == "fracheat":
        f = SpaceTimeTestFunction(tf, ct=math.pi).sample(_spacetime_grid(cfg))
        out = fo.fracheat(f, cfg.s)
    else:
        raise ConfigError(f"unknown operator {cfg.op!r}")
    path = cfg.out or f"{cfg.op}_s{cfg.s:g}_n{cfg.n}.csv"
    to_csv(out, path)
    print(f"wrote {path}")
    return 0


def _cmd_extend(cfg: RunConfig) -> int:
    tf = _parse_function(cfg.function, cfg.n)
    base = cfg.out or f"extend_{cfg.variant}_s{cfg.s:g}"
    reports = []
    if cfg.variant == "elliptic":
        u = tf.sample(_spatial_grid(cfg))
        sol = ext.solve_elliptic(u, cfg.s)
        trace = ext.dtn_elliptic(sol, u, cfg.s)
        ref = fo.fraclap_spectral(u, cfg.s)
    else:
        f = SpaceTimeTestFunction(tf, ct=math.pi).sample(_spacetime_grid(cfg))
        solver = ext.solve_parabolic if cfg.variant == "parabolic" else ext.solve_higher
        tracer = ext.dtn_parabolic if cfg.variant == "parabolic" else ext.dtn_higher
        sol = solver(f, cfg.s)
        trace = tracer(sol, f, cfg.s)
        ref = fo.fracheat_multiplier_oracle(f, cfg.s)
    for y, rung in zip(sol.y_ladder, sol.rungs):
        path = f"{base}_y{y:.6g}.csv"
        to_csv(rung, path, extra_columns={"y": y})
        reports.append(path)
    diff = np.max(np.abs(trace.samples - ref.samples)) / np.max(np.abs(ref.samples))
    to_csv(trace, f"{base}_dtn.csv")
    reports.append(f"{base}_dtn.csv")
    print(f"wrote {', '.join(reports)}")
    print(f"trace-vs-operator sup-relative difference: {_format_number(diff)}")
    return 0


def _cmd_verify(cfg: RunConfig) -> int:
    if cfg.suite == "all":
        names = list(checks_mod.SUITES.keys())
    else:
        names = [s.strip() for s in cfg.suite.split(",")]
        for nm in names:
            if nm not in checks_mod.SUITES:
                raise ConfigError(f"unknown suite {nm!r}")
    timings = os.environ.get("FRAXION_TIMINGS", "") == "1"
    reports, artifacts = checks_mod.run_suite(
        names, tol_scale=cfg.tol_scale, timings=timings
    )
    width = max(len(r.check_id) for r in reports)
    for r in reports:
        print(
            f"  {r.check_id:<{width}}  {r.status.upper():4s}  "
            f"measured={_format_number(r.measured)} tol={_format_number(r.tolerance)}"
        )
    n_fail = sum(1 for r in reports if r.status == "fail")
    print(f"{len(reports)} checks, {n_fail} failed")
    for msg in artifacts.get("errors", []):
        print(f"  error: {msg}", file=sys.stderr)
    report_path = cfg.report or "report.json"
    payload = {
        "schema": SCHEMA_VERSION,
        "config_echo": asdict(cfg),
        "checks": [asdict_report(r) for r in reports],
    }
    _atomic_write(report_path, dumps_json(payload) + "\n")
    print(f"wrote {report_path}")
    outdir = os.path.dirname(os.path.abspath(report_path))
    for name in ("decay_slope", "alpha_limit", "dtn_convergence"):
        if name in artifacts:
            cols = {
                k: v
                for k, v in artifacts[name].items()
                if isinstance(v, np.ndarray)
            }
            path = os.path.join(outdir, f"{name}.csv")
            _write_curve_csv(path, cols)
            print(f"wrote {path}")
    return 1 if n_fail else 0


def asdict_report(r: CheckReport) -> dict:
    return {
        "check_id": r.check_id,
        "status": r.status,
        "measured": r.measured,
        "expected": r.expected,
        "tolerance": r.tolerance,
        "runtime_ms": r.runtime_ms,
    }


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fraxion",
        description="fractional Laplacians, fractional heat operators and "
        "their extension problems on sampled grids",
    )
    parser.add_argument("--config", help="flat JSON config file (flags win)")
    sub = parser.add_subparsers(dest="command")
    for name in ("constants", "apply", "extend", "verify"):
        p = sub.add_parser(name)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--s", type=float, default=None)
        p.add_argument("--function", default=None)
        p.add_argument("--grid-points", dest="grid_points", type=int, default=None)
        p.add_argument("--half-width", dest="half_width", type=float, default=None)
        p.add_argument("--time-points", dest="time_points", type=int, default=None)
        p.add_argument(
            "--time-half-width", dest="time_half_width", type=float, default=None
        )
        p.add_argument("--method", default=None)
        p.add_argument("--op", default=None)
        p.add_argument("--variant", default=None)
        p.add_argument("--suite", default=None)
        p.add_argument("--tol-scale", dest="tol_scale", type=float, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--report", default=None)
    return parser


def main(argv=None) -> int:
    if "FRAXION_THREADS" in os.environ:
        # cap the worker pools of the array backend as well
        os.environ.setdefault("OMP_NUM_THREADS", os.environ["FRAXION_THREADS"])
    args = build_parser().parse_args(argv)
    try:
        cfg = _merge_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        if cfg.command == "constants":
            return _cmd_constants(cfg)
        if cfg.command == "apply":
            return _cmd_apply(cfg)
        if cfg.command == "extend":
            return _cmd_extend(cfg)
        return _cmd_verify(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FraxionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
