"""The four figure kinds against artifacts from a completed verify run.

The fixtures directory holds the JSON report and curve CSVs written by
`fraxion verify --suite fracops,extension`; the tests only exercise the
documented file schemas, never the numerics behind them.
"""

import json
import math
import os
import shutil
import subprocess
import sys

import numpy as np
import pytest

from fraxion_plots import EmptyInputError, FigureSpec, SchemaError, fit_slope, render

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture(name):
    return os.path.join(FIXTURES, name)


class TestRenderAllKinds:
    @pytest.mark.parametrize(
        "kind,source",
        [
            ("dtn_convergence", "dtn_convergence.csv"),
            ("alpha_limit", "alpha_limit.csv"),
            ("decay_slope", "decay_slope.csv"),
            ("residual_bars", "report.json"),
        ],
    )
    def test_renders_without_error(self, kind, source, tmp_path):
        out = tmp_path / f"{kind}.png"
        meta = render(FigureSpec(kind, (fixture(source),), str(out)))
        assert out.exists() and out.stat().st_size > 0
        assert meta

    def test_decay_slope_matches_expected_exponent(self, tmp_path):
        cols = np.genfromtxt(fixture("decay_slope.csv"), delimiter=",", names=True)
        slope, _ = fit_slope(cols["abs_x"], cols["abs_value"])
        expected = -(float(cols["n"][0]) + 2.0 * float(cols["s"][0]))
        assert abs(slope - expected) <= 0.1

    def test_slope_fits_reproduce(self, tmp_path):
        spec1 = FigureSpec("dtn_convergence", (fixture("dtn_convergence.csv"),), str(tmp_path / "a.png"))
        spec2 = FigureSpec("dtn_convergence", (fixture("dtn_convergence.csv"),), str(tmp_path / "b.png"))
        m1, m2 = render(spec1), render(spec2)
        assert round(m1["slope"], 3) == round(m2["slope"], 3)

    def test_alpha_limit_monotone(self, tmp_path):
        meta = render(
            FigureSpec("alpha_limit", (fixture("alpha_limit.csv"),), str(tmp_path / "a.png"))
        )
        assert meta["monotone"] is True

    def test_svg_output(self, tmp_path):
        out = tmp_path / "fig.svg"
        render(FigureSpec("residual_bars", (fixture("report.json"),), str(out)))
        assert out.read_text().lstrip().startswith("<?xml")


class TestSchemaFailures:
    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError):
            FigureSpec("alpha_limit", (str(tmp_path / "nope.csv"),), str(tmp_path / "o.png"))

    def test_wrong_columns(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("foo,bar\n1,2\n3,4\n")
        with pytest.raises(SchemaError):
            render(FigureSpec("alpha_limit", (str(bad),), str(tmp_path / "o.png")))

    def test_empty_rows(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("alpha,sup_error\n1.9,0.5\n")
        with pytest.raises(EmptyInputError):
            render(FigureSpec("alpha_limit", (str(bad),), str(tmp_path / "o.png")))

    def test_bad_report(self, tmp_path):
        bad = tmp_path / "r.json"
        bad.write_text(json.dumps({"schema": 7, "checks": []}))
        with pytest.raises(SchemaError):
            render(FigureSpec("residual_bars", (str(bad),), str(tmp_path / "o.png")))

    def test_unknown_kind(self, tmp_path):
        with pytest.raises(SchemaError):
            FigureSpec("pie_chart", (fixture("report.json"),), str(tmp_path / "o.png"))


class TestCli:
    def test_cli_roundtrip(self, tmp_path):
        out = subprocess.run(
            [
                sys.executable, "-m", "fraxion_plots.render",
                "--kind", "decay_slope",
                "--input", fixture("decay_slope.csv"),
                "--out", str(tmp_path / "d.png"),
            ],
            capture_output=True,
            text=True,
        )
        assert out.returncode == 0
        assert (tmp_path / "d.png").exists()

    def test_cli_schema_violation_exits_nonzero(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n3,4\n")
        out = subprocess.run(
            [
                sys.executable, "-m", "fraxion_plots.render",
                "--kind", "decay_slope",
                "--input", str(bad),
                "--out", str(tmp_path / "d.png"),
            ],
            capture_output=True,
            text=True,
        )
        assert out.returncode == 2
        assert "error" in out.stderr
