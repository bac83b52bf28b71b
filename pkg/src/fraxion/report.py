"""Verification records shared by the check suites and the CLI."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CheckReport:
    """One verification record: measured against expected at a tolerance.

    status is "pass" iff |measured - expected| <= tolerance (checks that
    are relative by nature fold the normalization into `measured` before
    constructing the record); "skip" marks checks not run.
    """

    check_id: str
    status: str
    measured: float
    expected: float
    tolerance: float
    runtime_ms: int = 0

    def __post_init__(self):
        if self.status not in ("pass", "fail", "skip"):
            raise ValueError(f"bad status {self.status!r}")

    @staticmethod
    def from_measurement(check_id, measured, expected, tolerance, runtime_ms=0):
        ok = abs(measured - expected) <= tolerance
        return CheckReport(
            check_id, "pass" if ok else "fail", float(measured), float(expected),
            float(tolerance), int(runtime_ms),
        )
