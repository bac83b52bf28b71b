import json
import os
import subprocess
import sys

import numpy as np
import pytest

ENV = {**os.environ, "PYTHONHASHSEED": "0"}


def run_cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "fraxion.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
        env=ENV,
    )


class TestConstants:
    def test_table_values(self, tmp_path):
        out = run_cli(
            ["constants", "--n", "1", "--s", "0.5", "--out", "c.json"], tmp_path
        )
        assert out.returncode == 0
        assert "0.31830988618379" in out.stdout  # gamma_ns at (1, 1/2)
        data = json.loads((tmp_path / "c.json").read_text())
        assert data["schema"] == 1
        assert data["constants"]["K"] == -1.0
        assert data["constants"]["dtn_const"] == 1.0

    def test_integer_order_rejected(self, tmp_path):
        out = run_cli(["constants", "--n", "1", "--s", "2"], tmp_path)
        assert out.returncode == 2
        assert "config error" in out.stderr


class TestConfigFile:
    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"command": "constants", "n": 1, "s": 0.25}))
        out = run_cli(["--config", str(cfg), "constants", "--s", "0.5"], tmp_path)
        assert out.returncode == 0
        assert "s=0.5" in out.stdout

    def test_unknown_key_fails_loud(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"command": "constants", "wavelength": 3}))
        out = run_cli(["--config", str(cfg), "constants"], tmp_path)
        assert out.returncode == 2
        assert "wavelength" in out.stderr


class TestApply:
    def test_fraclap_csv_anchor(self, tmp_path):
        out = run_cli(
            [
                "apply",
                "--op",
                "fraclap",
                "--method",
                "spectral",
                "--s",
                "0.5",
                "--function",
                "gaussian",
                "--n",
                "1",
                "--out",
                "field.csv",
            ],
            tmp_path,
        )
        assert out.returncode == 0
        lines = (tmp_path / "field.csv").read_text().strip().splitlines()
        assert lines[0] == "x0,value_re,value_im"
        rows = [line.split(",") for line in lines[1:]]
        x0 = [float(r[0]) for r in rows]
        vals = [float(r[1]) for r in rows]
        at_zero = vals[x0.index(0.0)]
        assert abs(at_zero - 2.0) <= 2e-3

    def test_determinism_byte_identical(self, tmp_path):
        args = [
            "apply", "--op", "fraclap", "--s", "0.75", "--function", "gaussian",
            "--n", "1", "--out", "f.csv",
        ]
        run_cli(args, tmp_path)
        first = (tmp_path / "f.csv").read_bytes()
        run_cli(args, tmp_path)
        assert (tmp_path / "f.csv").read_bytes() == first


class TestVerify:
    def test_specfun_suite_passes(self, tmp_path):
        out = run_cli(
            ["verify", "--suite", "specfun", "--report", "r.json"], tmp_path
        )
        assert out.returncode == 0
        data = json.loads((tmp_path / "r.json").read_text())
        assert data["schema"] == 1
        assert all(c["status"] == "pass" for c in data["checks"])
        ids = [c["check_id"] for c in data["checks"]]
        assert len(ids) == len(set(ids))

    def test_tolerance_scale_can_force_failure(self, tmp_path):
        out = run_cli(
            ["verify", "--suite", "quad", "--tol-scale", "1e-16", "--report", "r.json"],
            tmp_path,
        )
        assert out.returncode == 1

    def test_unknown_suite(self, tmp_path):
        out = run_cli(["verify", "--suite", "nonsense"], tmp_path)
        assert out.returncode == 2

    def test_report_byte_determinism(self, tmp_path):
        args = ["verify", "--suite", "quad", "--report", "rep.json"]
        run_cli(args, tmp_path)
        first = (tmp_path / "rep.json").read_bytes()
        run_cli(args, tmp_path)
        assert (tmp_path / "rep.json").read_bytes() == first

    def test_report_completeness(self, tmp_path):
        from fraxion.checks import SUITES

        expected = {
            check_id
            for suite in ("specfun", "heatsg", "fracops", "extension")
            for check_id in SUITES[suite]
        }
        assert len(expected) >= 30  # every module invariant appears once
        seen = set()
        for suite in SUITES.values():
            for check_id in suite:
                assert check_id not in seen
                seen.add(check_id)


class TestExtendCommand:
    def test_elliptic_artifacts(self, tmp_path):
        out = run_cli(
            [
                "extend", "--variant", "elliptic", "--s", "0.5", "--n", "1",
                "--function", "gaussian", "--grid-points", "256", "--out", "ell",
            ],
            tmp_path,
        )
        assert out.returncode == 0
        rungs = sorted(tmp_path.glob("ell_y*.csv"))
        assert len(rungs) == 7
        header = rungs[0].read_text().splitlines()[0]
        assert header == "x0,y,value_re,value_im"
        assert (tmp_path / "ell_dtn.csv").exists()
        assert "trace-vs-operator" in out.stdout


class TestCheckRunner:
    def test_run_suite_directly(self):
        from fraxion.checks import run_suite

        reports, artifacts = run_suite(["field"])
        assert all(r.status == "pass" for r in reports)
        assert len({r.check_id for r in reports}) == len(reports)
        assert "errors" not in artifacts

    def test_config_only_invocation(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"command": "constants", "n": 2, "s": 0.5}))
        out = run_cli(["--config", str(cfg)], tmp_path)
        assert out.returncode == 0
        assert "n=2" in out.stdout
