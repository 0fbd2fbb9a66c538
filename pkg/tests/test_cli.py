import csv
import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from delta_riemann import cli
from delta_riemann.friction import FrictionTerm
from delta_riemann.model import State
from delta_riemann.pressureless import sample_pressureless, solve_pressureless

KK_DELTA = {"schema": 1, "system": "kk", "left": {"rho": 1, "u": 2},
            "right": {"rho": 1, "u": 0}, "mu": 1}
KK_CLASSICAL = {"schema": 1, "system": "kk", "left": {"rho": 1, "u": 0},
                "right": {"rho": 2, "u": 1}, "mu": 1}
FAN = {"schema": 1, "system": "pressureless", "left": {"rho": 1, "u": 0},
       "right": {"rho": 1, "u": 1}}


@pytest.fixture
def write(tmp_path):
    def _write(cfg, name="cfg.json"):
        p = tmp_path / name
        p.write_text(json.dumps(cfg))
        return str(p)
    return _write


def run(command, path, out=None, check=False):
    code, text = cli.run(command, path, out, check)
    return code, json.loads(text)


def test_classify(write):
    assert run("classify", write(KK_DELTA)) == (0, {"region": "V", "branch": "delta_shock"})
    assert run("classify", write(FAN)) == (0, {"branch": "vacuum_fan"})


def test_schema_errors(write):
    bad = dict(KK_DELTA)
    del bad["mu"]
    code, res = run("classify", write(bad))
    assert code == 2 and "mu" in res["error"]
    code, res = run("classify", write({**FAN, "mu": 1}))
    assert code == 2 and "mu" in res["error"]
    code, res = run("classify", write({**KK_DELTA, "schema": 2}))
    assert code == 2 and "field schema" in res["error"]
    code, res = run("classify", write({**KK_DELTA, "left": {"rho": -1, "u": 0}}))
    assert code == 2 and "field left/rho" in res["error"]
    code, res = run("profile", write(KK_DELTA))
    assert code == 2 and "required by command" in res["error"]


def test_invalid_json_reports_line(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{\n  "schema": 1,\n  "system": kk\n}')
    code, res = run("classify", str(p))
    assert code == 2 and "broken.json:3:" in res["error"]


def test_solve_constant_friction_delta(write):
    code, res = run("solve", write({**KK_DELTA, "friction": {"kind": "constant", "a": 1},
                                    "t": 2.0}))
    assert code == 0 and res["type"] == "delta_shock"
    assert res["u_delta0"] == 1.5 and res["w_slope"] == 2
    at = res["at_t"]
    assert at["u_delta"] == 3.5 and at["x_delta"] == 5.0 and at["weight"] == 4.0


def test_solve_classical_and_fan(write):
    code, res = run("solve", write(KK_CLASSICAL))
    assert res["type"] == "two_contact" and res["rho_star"] == pytest.approx(2 / 3)
    assert res["speeds"] == [0, 1.5]
    code, res = run("solve", write(FAN))
    assert res["type"] == "vacuum_fan" and res["speeds"] == [0, 1]


def test_profile_fan_rows(write, tmp_path):
    f = {"kind": "degenerate", "theta": 1, "beta": 2}
    cfg = {**FAN, "friction": f, "t": 1.0, "grid": {"x_min": -1, "x_max": 2, "n": 31}}
    code, _ = run("profile", write(cfg), str(tmp_path / "out"))
    assert code == 0
    with open(tmp_path / "out" / "profile.csv") as fh:
        rows = list(csv.DictReader(fh))
    fr = FrictionTerm.from_json(f)
    left, right = State(1, 0), State(1, 1)
    x = np.array([float(r["x"]) for r in rows])
    ref = sample_pressureless(solve_pressureless(left, right, fr), left, right, fr, 1.0, x)
    fan = [i for i, r in enumerate(rows) if float(r["rho"]) == 0.0]
    assert len(fan) >= 3
    for i in fan[:3]:
        assert float(rows[i]["u"]) == pytest.approx(x[i] - fr.double_primitive(1.0)
                                                    + fr.primitive(1.0), abs=1e-15)
        assert float(rows[i]["u"]) == ref.u_vals[i]


def test_residual_command(write):
    code, res = run("residual", write({**KK_DELTA, "friction": {"kind": "constant", "a": 1}}),
                    check=True)
    assert code == 0 and res["passed"] and res["max_residual"] <= 1e-8 and res["monotone"]
    assert [r["order"] for r in res["rows"]] == [8, 16, 32, 64]


def test_residual_assert_failure(write):
    phi = [{"x0": 0.0, "t0": 1.0, "rx": 1.0, "rt": 0.5}]
    code, res = run("residual", write({**KK_DELTA, "test_functions": phi, "orders": [4]}),
                    check=True)
    assert code == 4 and not res["passed"]


def test_limit_study_csv(write, tmp_path):
    cfg = {**KK_DELTA, "right": {"rho": 0.5, "u": 0}, "limit": {"kind": "mu_to_mu0", "k_max": 20}}
    code, res = run("limit-study", write(cfg), str(tmp_path / "lim"), check=True)
    assert code == 0 and res["mu0"] == 1
    with open(tmp_path / "lim" / "limit.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 20
    assert {"mu", "rho_star", "speed1", "speed2", "plateau_mass"} <= set(rows[0])
    for r in rows:
        assert float(r["plateau_mass"]) == pytest.approx(float(r["mu"]), rel=1e-12)


def test_limit_study_not_applicable(write):
    code, res = run("limit-study", write({**KK_CLASSICAL, "limit": {"kind": "mu_to_mu0"}}))
    assert code == 2


def test_fvm_ladder_classical(write, tmp_path):
    cfg = {**KK_CLASSICAL, "fvm": {"x_min": -1.5, "x_max": 1.5, "n_cells": 250,
                                   "ladder": [250, 500, 1000]}}
    code, res = run("fvm", write(cfg), str(tmp_path / "f"), check=True)
    assert code == 0 and min(res["orders"]) >= 0.5
    lines = (tmp_path / "f" / "ladder.csv").read_text().splitlines()
    assert lines[0] == "n_cells,l1_rho,l1_m" and len(lines) == 4


def test_fvm_numerical_failure_exit_code(write):
    cfg = {**KK_DELTA, "friction": {"kind": "constant", "a": 1},
           "fvm": {"x_min": -1.5, "x_max": 1.5, "n_cells": 100}}
    code, res = run("fvm", write(cfg))
    assert code == 3 and "boundary" in res["error"]


@pytest.mark.parametrize("command,extra", [
    ("solve", {"t": 0.3}),
    ("profile", {"t": 0.7, "grid": {"x_min": -2, "x_max": 2, "n": 50}}),
    ("residual", {}),
    ("limit-study", {"limit": {"kind": "vanishing", "k_max": 12}}),
    ("fvm", {"fvm": {"x_min": -1.5, "x_max": 1.5, "n_cells": 300,
                     "snapshot_times": [0.2]}}),
])
def test_manifest_round_trip_is_byte_identical(write, tmp_path, command, extra):
    cfg = {**KK_DELTA, "friction": {"kind": "degenerate", "theta": -1, "beta": 1.5}, **extra}
    first, second = tmp_path / "a", tmp_path / "b"
    assert cli.run(command, write(cfg), str(first))[0] == 0
    assert cli.run(command, str(first / "manifest.json"), str(second))[0] == 0
    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name


def test_manifest_command_mismatch(write, tmp_path):
    cli.run("classify", write(KK_DELTA), str(tmp_path / "m"))
    code, _ = cli.run("solve", str(tmp_path / "m" / "manifest.json"))
    assert code == 2


def test_floats_use_17_digits():
    assert cli.dumps({"x": 0.1}) == '{\n  "x": 0.10000000000000001\n}'
    assert cli.csv_text(("a",), ([1 / 3],)) == "a\n0.33333333333333331\n"


def test_console_entry_point(write):
    exe = shutil.which("delta-riemann")
    cmd = [exe] if exe else [sys.executable, "-m", "delta_riemann.cli"]
    proc = subprocess.run(cmd + ["classify", "--config", write(KK_DELTA)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == {"region": "V", "branch": "delta_shock"}
    proc = subprocess.run(cmd + ["nonsense", "--config", "x"], capture_output=True, text=True)
    assert proc.returncode == 2
