"""Command-line interface: exit codes, outputs, determinism, configuration."""

import json
import subprocess
import sys

import numpy as np
import pytest

from ricci_forge import __version__
from ricci_forge.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main, read_config
from ricci_forge.errors import UsageError
from ricci_forge.report import read_csv

SMALL = "t=0.4:1.2:2,x=0.5:1.5:2,y=-1:1:2,z=0:0:1"


def run(tmp_path, *argv, name="out.json"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out.read_text() if out.exists() else None


class TestExitCodes:
    @pytest.mark.parametrize("model", ["example1", "example2", "example3", "minkowski",
                                       "schwarzschild", "theorem1_instance"])
    def test_verify_default_grids(self, tmp_path, model):
        code, text = run(tmp_path, "verify", "--model", model)
        assert code == EXIT_OK
        env = json.loads(text)
        assert env["summary"]["passed"] is True and env["tool_version"] == __version__

    def test_verify_corrupted_fails(self, tmp_path):
        code, text = run(tmp_path, "verify", "--model", "example2", "--corrupt", "v", "--grid", SMALL)
        assert code == EXIT_FAIL and json.loads(text)["results"]["checks"]["vacuum"]["pass"] is False

    @pytest.mark.parametrize("argv", [
        ["verify", "--model", "nosuch"],
        ["verify", "--model", "example1", "--param", "mass=2"],
        ["verify", "--model", "example3", "--grid", "x=-1:1:3"],
        ["verify", "--grid", "x=0:1"],
        ["verify", "--x-floor", "0"],
        ["verify", "--workers", "0"],
        ["derive-check", "--model", "minkowski"],
        ["derive-check", "--samples", "0"],
        ["null-curve", "--start", "t=0.7", "--to", "x=1"],
        ["classify", "--model", "example1", "--locus", "r->0"],
        ["classify", "--model", "minkowski"],
        ["slice", "--model", "example3", "--t", "0.7", "--grid", "x=-1:1:3"],
        ["frobnicate"],
        [],
    ])
    def test_usage_errors(self, tmp_path, capsys, argv):
        assert main(argv + ["--out", str(tmp_path / "x")] if argv else argv) == EXIT_USAGE

    def test_version(self, capsys):
        assert main(["--version"]) == EXIT_OK
        assert __version__ in capsys.readouterr().out


class TestCommands:
    def test_scan_csv(self, tmp_path):
        code, text = run(tmp_path, "scan", "--model", "example2", "--grid", SMALL, "--format", "csv",
                         name="s.csv")
        assert code == EXIT_OK
        cols, rows = read_csv(text)
        assert cols[:4] == ["t", "x", "y", "z"] and len(rows) == 8
        assert "# model: example2" in text

    def test_derive_check(self, tmp_path):
        code, text = run(tmp_path, "derive-check", "--model", "example3", "--samples", "20")
        env = json.loads(text)
        assert code == EXIT_OK
        assert set(env["results"]["checks"]) == {"ode7", "eq27", "eq28", "eq29", "eq30"}

    def test_derive_check_quadrature_and_tolerance_override(self, tmp_path):
        code, _ = run(tmp_path, "derive-check", "--model", "example2", "--samples", "10",
                      "--quadrature", "--y0", "0.5")
        assert code == EXIT_OK
        code, _ = run(tmp_path, "derive-check", "--model", "example2", "--samples", "10",
                      "--residual-tol", "eq29=1e-40")
        assert code == EXIT_FAIL

    def test_null_curve_csv_default(self, tmp_path):
        code, text = run(tmp_path, "null-curve", "--model", "example1", "--start", "t=0.7853981633974483,x=0",
                         "--to", "x=2", "--step", "0.01", name="n.csv")
        assert code == EXIT_OK
        cols, rows = read_csv(text)
        assert cols == ["x", "t", "slope", "residual", "relative_residual"]
        assert float(rows[-1][0]) == 2.0
        assert abs(np.sin(float(rows[-1][1])) - np.sqrt(2) / 2 * np.exp(-2)) < 1e-6

    def test_null_curve_rho(self, tmp_path):
        code, text = run(tmp_path, "null-curve", "--model", "example3", "--start", "t=0.7853981633974483,rho=0",
                         "--to", "rho=-1", "--format", "json")
        assert code == EXIT_OK
        env = json.loads(text)
        assert env["results"]["coordinate"] == "rho" and env["summary"]["halted"] is False
        _, text = run(tmp_path, "null-curve", "--model", "example3", "--start", "t=0.7853981633974483,rho=0",
                      "--to", "rho=-1", name="r.csv")
        cols, rows = read_csv(text)
        assert cols[:2] == ["rho", "x"] and float(rows[-1][0]) == -1.0

    def test_slice_degenerate(self, tmp_path):
        code, text = run(tmp_path, "slice", "--model", "example2", "--t", "3.141592653589793")
        assert code == EXIT_OK and json.loads(text)["summary"]["degenerate"] is True

    def test_classify_all(self, tmp_path):
        code, text = run(tmp_path, "classify", "--model", "example3")
        env = json.loads(text)
        assert code == EXIT_OK
        assert env["summary"]["verdicts"]["x->0"] == "essential"
        assert all(env["summary"]["matches_expected"].values())

    def test_classify_csv(self, tmp_path):
        code, text = run(tmp_path, "classify", "--model", "example1", "--format", "csv", name="c.csv")
        cols, rows = read_csv(text)
        assert cols[:2] == ["locus", "kind"] and len(rows) == 4


class TestDeterminism:
    def test_byte_identical_json(self, tmp_path):
        a = run(tmp_path, "verify", "--model", "example3", "--grid", SMALL, name="a.json")[1]
        b = run(tmp_path, "verify", "--model", "example3", "--grid", SMALL, name="b.json")[1]
        assert a == b

    def test_derive_check_seeded(self, tmp_path):
        a = run(tmp_path, "derive-check", "--model", "example2", "--samples", "5", "--seed", "3", name="a")[1]
        b = run(tmp_path, "derive-check", "--model", "example2", "--samples", "5", "--seed", "3", name="b")[1]
        c = run(tmp_path, "derive-check", "--model", "example2", "--samples", "5", "--seed", "4", name="c")[1]
        assert a == b and a != c

    def test_workers_do_not_change_output(self, tmp_path):
        a = run(tmp_path, "scan", "--model", "example3", "--grid", SMALL, name="a")[1]
        b = run(tmp_path, "scan", "--model", "example3", "--grid", SMALL, "--workers", "2", name="b")[1]
        assert a == b

    def test_csv_and_json_agree(self, tmp_path):
        js = json.loads(run(tmp_path, "scan", "--model", "example2", "--grid", SMALL, name="s.json")[1])
        cols, rows = read_csv(run(tmp_path, "scan", "--model", "example2", "--grid", SMALL,
                                  "--format", "csv", name="s.csv")[1])
        rng = np.random.default_rng(7)
        events = js["results"]["events"]
        for _ in range(10):
            i = int(rng.integers(len(rows)))
            col = str(rng.choice(["det", "scale", "ricci_rel", "kretschmann", "D2"]))
            ref = events[i]["minors"][1] if col == "D2" else events[i][col]
            assert float(rows[i][cols.index(col)]) == ref


class TestConfig:
    def test_read_config(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text("# comment\nricci-tol = 1e-9\nmodel = example2  # trailing\n")
        assert read_config(p) == {"ricci_tol": "1e-9", "model": "example2"}

    def test_bad_config(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text("just words\n")
        with pytest.raises(UsageError):
            read_config(p)

    def test_config_then_flag_override(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text(f"model = example2\ngrid = {SMALL}\n")
        env = json.loads(run(tmp_path, "verify", "--config", str(p), name="a")[1])
        assert env["model"] == "example2" and env["config"]["grid"] == SMALL
        env = json.loads(run(tmp_path, "verify", "--config", str(p), "--model", "example3", name="b")[1])
        assert env["model"] == "example3"

    def test_unknown_config_key(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text("colour = blue\n")
        assert main(["verify", "--config", str(p)]) == EXIT_USAGE


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "ricci_forge.cli", "verify", "--model", "minkowski",
                           "--format", "csv"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "check,value,tol,pass" in proc.stdout
