"""Figure requests and artifact-schema validation.

The scripts consume exactly the artifacts the main package's CLI writes —
curve CSVs with named headers and the JSON check report — and never
recompute any mathematics themselves.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

FIGURE_KINDS = ("dtn_convergence", "alpha_limit", "decay_slope", "residual_bars")

_REQUIRED_COLUMNS = {
    "dtn_convergence": ("y", "error"),
    "alpha_limit": ("alpha", "sup_error"),
    "decay_slope": ("abs_x", "abs_value"),
}


class SchemaError(ValueError):
    """Input file does not match the documented artifact schema."""


class EmptyInputError(ValueError):
    """Input file parses but holds no data rows."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple
    output: str

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise SchemaError("at least one input path is required")
        for path in self.inputs:
            if not os.path.exists(path):
                raise SchemaError(f"input does not exist: {path}")


def load_curve(path: str, kind: str) -> dict:
    """Read a curve CSV and validate the columns the kind requires."""
    try:
        data = np.genfromtxt(path, delimiter=",", names=True)
    except (OSError, ValueError) as exc:
        raise SchemaError(f"cannot parse {path}: {exc}") from exc
    if data.dtype.names is None:
        raise SchemaError(f"{path} has no header row")
    required = _REQUIRED_COLUMNS[kind]
    missing = [c for c in required if c not in data.dtype.names]
    if missing:
        raise SchemaError(f"{path} lacks columns {missing}; has {data.dtype.names}")
    if data.size == 0:
        raise EmptyInputError(f"{path} holds no rows")
    cols = {name: np.atleast_1d(data[name]) for name in data.dtype.names}
    if len(cols[required[0]]) < 2 and kind != "residual_bars":
        raise EmptyInputError(f"{path} needs at least two rows to plot a curve")
    return cols


def load_report(path: str) -> list:
    """Read the JSON check report and validate its schema."""
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(payload, dict) or "checks" not in payload:
        raise SchemaError(f"{path} is not a check report (no 'checks' key)")
    if payload.get("schema") != 1:
        raise SchemaError(f"{path} has unsupported schema {payload.get('schema')!r}")
    checks = payload["checks"]
    if not checks:
        raise EmptyInputError(f"{path} holds no checks")
    for entry in checks:
        for key in ("check_id", "status", "measured", "tolerance"):
            if key not in entry:
                raise SchemaError(f"check entry lacks {key!r}: {entry}")
    return checks
