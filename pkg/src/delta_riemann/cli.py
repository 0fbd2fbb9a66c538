"""``delta-riemann`` command-line entry point.

Every command reads one JSON config (``"schema": 1``), prints a JSON summary
on stdout and, with ``--out DIR``, writes its artifacts plus ``manifest.json``
into ``DIR``.  The manifest is itself a valid config, so
``delta-riemann CMD --config DIR/manifest.json --out DIR2`` reproduces the
artifacts byte for byte.

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 failed check
under ``--assert``.
"""
from __future__ import annotations

import argparse
import copy
import json
import math
import sys
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from . import fvm as fvm_mod
from .errors import (ConfigError, DegenerateData, EmptyInput, InvalidTime, MuBelowCritical,
                     NoSpike, NotApplicable, NotDeltaRegime, NumericalFailure, SingularProfile)
from .friction import FrictionTerm
from .kk import DeltaShock, RiemannData, TwoContact, classify, sample, solve
from .limits import (critical_sequence, mu_critical, mu_to_mu0_study, vanishing_pressure_study,
                     vanishing_sequence)
from .model import State
from .pressureless import (SingleContact, VacuumFan, branch_name, pressureless_delta_params,
                           sample_pressureless, solve_pressureless)
from .weak import DEFAULT_ORDER, PASS_THRESHOLD, TestFunction, residual_sweep

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VERIFY = 0, 2, 3, 4
COMMANDS = ("classify", "solve", "profile", "residual", "limit-study", "fvm")
SCHEMA_VERSION = 1

_STATE = {
    "type": "object",
    "properties": {"rho": {"type": "number", "exclusiveMinimum": 0}, "u": {"type": "number"}},
    "required": ["rho", "u"],
    "additionalProperties": False,
}
_FRICTION = {
    "oneOf": [
        {"type": "object", "properties": {"kind": {"const": "zero"}},
         "required": ["kind"], "additionalProperties": False},
        {"type": "object", "properties": {"kind": {"const": "constant"}, "a": {"type": "number"}},
         "required": ["kind", "a"], "additionalProperties": False},
        {"type": "object",
         "properties": {"kind": {"const": "degenerate"}, "theta": {"type": "number"},
                        "beta": {"type": "number", "minimum": 0}},
         "required": ["kind", "theta", "beta"], "additionalProperties": False},
    ]
}
_POS = {"type": "number", "exclusiveMinimum": 0}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "command": {"enum": list(COMMANDS)},
        "system": {"enum": ["kk", "pressureless"]},
        "left": _STATE,
        "right": _STATE,
        "mu": _POS,
        "friction": _FRICTION,
        "t": _POS,
        "grid": {
            "type": "object",
            "properties": {"x_min": {"type": "number"}, "x_max": {"type": "number"},
                           "n": {"type": "integer", "minimum": 2}},
            "required": ["x_min", "x_max", "n"],
            "additionalProperties": False,
        },
        "test_functions": {
            "type": "array", "minItems": 1,
            "items": {"type": "object",
                      "properties": {"x0": {"type": "number"}, "t0": _POS, "rx": _POS, "rt": _POS},
                      "required": ["x0", "t0", "rx", "rt"], "additionalProperties": False},
        },
        "orders": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}},
        "limit": {
            "type": "object",
            "properties": {"kind": {"enum": ["mu_to_mu0", "vanishing"]},
                           "k_max": {"type": "integer", "minimum": 2},
                           "mu_values": {"type": "array", "minItems": 2, "items": _POS}},
            "required": ["kind"],
            "additionalProperties": False,
        },
        "fvm": {
            "type": "object",
            "properties": {
                "x_min": {"type": "number"}, "x_max": {"type": "number"},
                "n_cells": {"type": "integer", "minimum": 16},
                "cfl": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "t_end": _POS,
                "rho_floor": {"type": "number", "minimum": 0},
                "scheme": {"const": "llf"},
                "snapshot_times": {"type": "array", "items": _POS},
                "ladder": {"type": "array", "minItems": 2,
                           "items": {"type": "integer", "minimum": 16}},
            },
            "required": ["x_min", "x_max", "n_cells"],
            "additionalProperties": False,
        },
    },
    "required": ["schema", "system", "left", "right"],
    "additionalProperties": False,
    "allOf": [
        {"if": {"properties": {"system": {"const": "kk"}}},
         "then": {"required": ["mu"]},
         "else": {"not": {"required": ["mu"]}}},
    ],
}

# Config keys each command needs beyond the common ones.
_NEEDS = {"profile": ("t", "grid"), "limit-study": ("limit",), "fvm": ("fvm",)}


class VerificationFailed(Exception):
    pass


# --------------------------------------------------------------------- output

def fmt(x: float) -> str:
    return format(float(x), ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    return json.dumps(obj)


def csv_text(header, columns) -> str:
    rows = [",".join(header)]
    for vals in zip(*columns):
        rows.append(",".join("" if v is None else (v if isinstance(v, str) else fmt(v))
                             for v in vals))
    return "\n".join(rows) + "\n"


# --------------------------------------------------------------------- config

def load_config(path: str, command: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for err in errors:
            where = "/".join(str(p) for p in err.absolute_path) or "<root>"
            msg = err.message
            if err.validator == "not":
                msg = "'mu' is only allowed for system 'kk'"
            lines.append(f"{path}: field {where}: {msg}")
        raise ConfigError("\n".join(lines))
    if cfg.get("command", command) != command:
        raise ConfigError(f"config was written for command {cfg['command']!r}, not {command!r}")
    for key in _NEEDS.get(command, ()):
        if key not in cfg:
            raise ConfigError(f"{path}: field {key}: required by command {command!r}")
    return normalize(cfg, command)


def normalize(cfg: dict, command: str) -> dict:
    """Fill defaults so the manifest fully determines the run."""
    out = copy.deepcopy(cfg)
    out["command"] = command
    out.setdefault("friction", {"kind": "zero"})
    if command == "residual":
        out.setdefault("orders", [8, 16, 32, DEFAULT_ORDER])
        if "test_functions" not in out:
            out["test_functions"] = [p.to_json() for p in default_test_functions(out)]
    if command == "limit-study":
        out["limit"].setdefault("k_max", 40)
        out.setdefault("t", 1.0)
    if command == "fvm":
        spec = out["fvm"]
        defaults = fvm_mod.FvmConfig(spec["x_min"], spec["x_max"], spec["n_cells"])
        for key in ("cfl", "t_end", "rho_floor", "scheme"):
            spec.setdefault(key, getattr(defaults, key))
        spec.setdefault("snapshot_times", [])
    return out


def _states(cfg):
    left, right = State.from_json(cfg["left"]), State.from_json(cfg["right"])
    return left, right, FrictionTerm.from_json(cfg["friction"])


def _solve(cfg):
    left, right, f = _states(cfg)
    if cfg["system"] == "kk":
        data = RiemannData(left, right, float(cfg["mu"]))
        return solve(data, f), data, f
    return solve_pressureless(left, right, f), (left, right), f


def _wave_paths(sol):
    if isinstance(sol, TwoContact):
        return [sol.x1, sol.x2]
    if isinstance(sol, VacuumFan):
        return [sol.x_minus, sol.x_plus]
    if isinstance(sol, SingleContact):
        return [sol.x_contact]
    return [sol.x_delta]


def default_test_functions(cfg: dict) -> list[TestFunction]:
    """Five bumps around the wave pattern at ``t = 1``."""
    sol, _, _ = _solve(cfg)
    xs = [float(p.position(1.0)) for p in _wave_paths(sol)]
    mid = 0.5 * (min(xs) + max(xs))
    rx = 1.0 + 0.5 * (max(xs) - min(xs))
    return [TestFunction(mid + d, 1.0, rx, 0.5) for d in (-0.5, -0.25, 0.0, 0.25, 0.5)]


# ------------------------------------------------------------------- commands

def cmd_classify(cfg: dict, out: dict, check: bool) -> dict:
    left, right, _ = _states(cfg)
    if cfg["system"] == "pressureless":
        return {"branch": branch_name(left, right)}
    region = classify(RiemannData(left, right, float(cfg["mu"])))
    return {"region": region.value, "branch": "delta_shock" if region.is_delta else "two_contact"}


def _at_time(sol, t: float) -> dict:
    if isinstance(sol, DeltaShock):
        return {"t": t, "x_delta": sol.position(t), "u_delta": sol.velocity(t),
                "weight": sol.weight(t)}
    return {"t": t, "positions": [p.position(t) for p in _wave_paths(sol)],
            "velocities": [p.velocity(t) for p in _wave_paths(sol)]}


def cmd_solve(cfg: dict, out: dict, check: bool) -> dict:
    """Solution parameters; each wave moves along ``x = c t + B(t)``."""
    sol, data, _ = _solve(cfg)
    if isinstance(sol, DeltaShock):
        res = {"type": "delta_shock", "u_delta0": sol.u_delta0, "w_slope": sol.w_slope,
               "speeds": [sol.u_delta0]}
    elif isinstance(sol, TwoContact):
        res = {"type": "two_contact", "rho_star": sol.intermediate.rho,
               "u_star": sol.intermediate.u, "speeds": [sol.x1.speed_const, sol.x2.speed_const]}
    elif isinstance(sol, VacuumFan):
        res = {"type": "vacuum_fan", "speeds": [sol.x_minus.speed_const, sol.x_plus.speed_const]}
    else:
        res = {"type": "single_contact", "speeds": [sol.x_contact.speed_const]}
    if cfg["system"] == "kk":
        res["region"] = classify(data).value if data.left != data.right else None
    if "t" in cfg:
        res["at_t"] = _at_time(sol, float(cfg["t"]))
    return res


def cmd_profile(cfg: dict, out: dict, check: bool) -> dict:
    sol, data, f = _solve(cfg)
    g = cfg["grid"]
    grid = np.linspace(g["x_min"], g["x_max"], g["n"])
    t = float(cfg["t"])
    if cfg["system"] == "kk":
        prof = sample(sol, data, f, t, grid)
    else:
        prof = sample_pressureless(sol, data[0], data[1], f, t, grid)
    out["profile.csv"] = csv_text(("x", "rho", "u", "m"),
                                  (prof.grid, prof.rho_vals, prof.u_vals, prof.m_vals))
    sing = prof.singular
    return {"t": t, "n_points": int(grid.size),
            "singular": None if sing is None else
            {"x_pos": sing.x_pos, "weight": sing.weight, "u_delta": sing.u_delta}}


def cmd_residual(cfg: dict, out: dict, check: bool) -> dict:
    sol, data, f = _solve(cfg)
    phis = [TestFunction.from_json(p) for p in cfg["test_functions"]]
    table = residual_sweep(sol, data, f, phis, cfg["orders"])
    out["residual.csv"] = csv_text(
        ("order", "max_mass", "max_momentum"),
        ([r.order for r in table.rows], [r.max_mass for r in table.rows],
         [r.max_momentum for r in table.rows]))
    final = table.final()
    res = {"max_residual": final, "threshold": PASS_THRESHOLD,
           "passed": final <= PASS_THRESHOLD, "monotone": table.monotone,
           "rows": [{"order": r.order, "max_mass": r.max_mass, "max_momentum": r.max_momentum}
                    for r in table.rows]}
    if check and not res["passed"]:
        raise VerificationFailed(f"max residual {final:.3e} exceeds {PASS_THRESHOLD:.0e}", res)
    return res


def cmd_limit_study(cfg: dict, out: dict, check: bool) -> dict:
    left, right, f = _states(cfg)
    lim = cfg["limit"]
    t = float(cfg["t"])
    mus = lim.get("mu_values")
    if lim["kind"] == "mu_to_mu0":
        mu0 = mu_critical(left, right)
        study = mu_to_mu0_study(left, right, f, mus or critical_sequence(mu0, lim["k_max"]), t)
        res = {"kind": "mu_to_mu0", "mu0": mu0,
               "limit": {"speed": left.u + f.primitive(t), "weight": mu0 * t}}
    else:
        study = vanishing_pressure_study(left, right, f, mus or vanishing_sequence(lim["k_max"]), t)
        res = {"kind": "vanishing", "limit_branch": branch_name(left, right)}
        if left.u > right.u:
            u0, w = pressureless_delta_params(left, right)
            res["limit"] = {"u_delta0": u0, "w_slope": w}
        else:
            res["limit"] = {"speeds": [left.u + f.primitive(t), right.u + f.primitive(t)]}
    recs = study.records
    names = ("mu", "rho_star", "speed1", "speed2", "plateau_mass", "plateau_momentum",
             "u_delta0", "w_slope")
    out["limit.csv"] = csv_text(
        names[:1] + ("region",) + names[1:],
        [[r.mu for r in recs], [r.region.value for r in recs]]
        + [[getattr(r, n) for r in recs] for n in names[1:]])
    res["t"] = t
    res["n_records"] = len(recs)
    res["extrapolated"] = dict(study.extrapolated)
    if check:
        _check_limit(res, study)
    return res


def _check_limit(res: dict, study) -> None:
    if res["kind"] == "mu_to_mu0":
        bad = [r.mu for r in study.records
               if abs(r.plateau_mass - r.mu * study.t) > 1e-8 * r.mu * study.t]
        if bad:
            raise VerificationFailed(f"plateau mass differs from mu*t at mu={bad[0]}", res)
    elif "u_delta0" in res["limit"]:
        got = res["extrapolated"].get("u_delta0")
        want = res["limit"]["u_delta0"]
        if got is None or abs(got - want) > 1e-8 * max(1.0, abs(want)):
            raise VerificationFailed(f"extrapolated u_delta0 {got} != {want}", res)


def _exact_profile(sol, data, f, t, x):
    if isinstance(data, RiemannData):
        return sample(sol, data, f, t, x)
    return sample_pressureless(sol, data[0], data[1], f, t, x)


def _fvm_diagnostics(sol, data, f, state, left, right):
    t = state.t
    if isinstance(sol, DeltaShock):
        x_exact = float(sol.position(t))
        w = sol.weight(t)
        diag = fvm_mod.spike_diagnostics(state, left, right, x_exact, w)
        return {"t": t, "kind": "spike", "center": diag.center, "x_delta": x_exact,
                "center_error_dx": (diag.center - x_exact) / state.dx,
                "excess_mass": diag.excess_mass, "weight": w,
                "mass_rel_error": (diag.excess_mass - w) / w}
    err_rho, err_m = fvm_mod.l1_error(state, _exact_profile(sol, data, f, t, state.x))
    return {"t": t, "kind": "l1", "l1_rho": err_rho, "l1_m": err_m}


def cmd_fvm(cfg: dict, out: dict, check: bool) -> dict:
    sol, data, f = _solve(cfg)
    left, right, _ = _states(cfg)
    mu = float(cfg.get("mu", 0.0))
    spec = dict(cfg["fvm"])
    snaps = spec.pop("snapshot_times")
    ladder = spec.pop("ladder", None)
    fcfg = fvm_mod.FvmConfig.from_json(spec)
    hist = fvm_mod.fvm_run(left, right, mu, f, fcfg, snapshot_times=snaps)
    diags = []
    for i, s in enumerate(hist.snapshots):
        out[f"snapshot_{i:03d}.csv"] = csv_text(("x", "rho", "m", "u"), (s.x, s.rho, s.m, s.u))
        diags.append(_fvm_diagnostics(sol, data, f, s, left, right))
    res = {"dx": fcfg.dx, "n_steps": hist.n_steps, "snapshots": diags}
    if ladder:
        rows = []
        for n in ladder:
            lcfg = fvm_mod.FvmConfig.from_json({**spec, "n_cells": n})
            final = fvm_mod.fvm_run(left, right, mu, f, lcfg).final
            rows.append({"n_cells": n, **_fvm_diagnostics(sol, data, f, final, left, right)})
        if isinstance(sol, DeltaShock):
            out["ladder.csv"] = csv_text(
                ("n_cells", "center_error", "mass_error"),
                ([r["n_cells"] for r in rows], [r["center"] - r["x_delta"] for r in rows],
                 [r["excess_mass"] - r["weight"] for r in rows]))
        else:
            errs = [r["l1_rho"] for r in rows]
            out["ladder.csv"] = csv_text(("n_cells", "l1_rho", "l1_m"),
                                         ([r["n_cells"] for r in rows], errs,
                                          [r["l1_m"] for r in rows]))
            res["orders"] = fvm_mod.empirical_orders([r["n_cells"] for r in rows], errs)
        res["ladder"] = rows
    if check:
        _check_fvm(res, sol)
    return res


def _check_fvm(res: dict, sol) -> None:
    last = res["snapshots"][-1]
    if isinstance(sol, DeltaShock):
        if abs(last["center_error_dx"]) > 2 or abs(last["mass_rel_error"]) > 0.05:
            raise VerificationFailed(
                f"spike centre off by {last['center_error_dx']:.2f} cells or mass by "
                f"{last['mass_rel_error']:.2%}", res)
    elif "ladder" in res:
        errs = [r["l1_rho"] for r in res["ladder"]]
        if any(b >= a for a, b in zip(errs, errs[1:])) or min(res["orders"]) < 0.5:
            raise VerificationFailed("L1 errors do not converge at order >= 0.5", res)


HANDLERS = {
    "classify": cmd_classify, "solve": cmd_solve, "profile": cmd_profile,
    "residual": cmd_residual, "limit-study": cmd_limit_study, "fvm": cmd_fvm,
}

# Errors that trace back to the inputs rather than to the numerics.
_INPUT_ERRORS = (ConfigError, DegenerateData, NotDeltaRegime, NotApplicable, MuBelowCritical,
                 InvalidTime, SingularProfile, EmptyInput)


def run(command: str, config_path: str, out_dir: Optional[str] = None,
        check: bool = False) -> tuple[int, str]:
    """Execute one command; return ``(exit_code, stdout_text)``."""
    artifacts: dict[str, str] = {}
    try:
        cfg = load_config(config_path, command)
        result = HANDLERS[command](cfg, artifacts, check)
        code = EXIT_OK
    except VerificationFailed as exc:
        result = {"error": str(exc.args[0]), **exc.args[1]}
        code = EXIT_VERIFY
    except _INPUT_ERRORS as exc:
        return EXIT_CONFIG, dumps({"error": f"config error: {exc}"}) + "\n"
    except (NumericalFailure, NoSpike) as exc:
        return EXIT_NUMERICAL, dumps({"error": f"numerical failure: {exc}"}) + "\n"
    text = dumps(result) + "\n"
    if out_dir is not None:
        dest = Path(out_dir)
        dest.mkdir(parents=True, exist_ok=True)
        artifacts["result.json"] = text
        artifacts["manifest.json"] = dumps(cfg) + "\n"
        for name, body in sorted(artifacts.items()):
            (dest / name).write_text(body)
    return code, text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="delta-riemann",
        description="Exact Riemann solutions, weak-form checks and FVM comparisons for the "
                    "Chaplygin Keyfitz-Kranzer and pressureless systems with friction.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON config file (\"schema\": 1)")
    parser.add_argument("--out", help="directory for artifacts and manifest.json")
    parser.add_argument("--assert", dest="check", action="store_true",
                        help="exit with status 4 when a verification check fails")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    code, text = run(args.command, args.config, args.out, args.check)
    stream = sys.stdout if code in (EXIT_OK, EXIT_VERIFY) else sys.stderr
    stream.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
