"""Command-line experiment runner.

    adamslab <experiment> [--config PATH] [--out DIR] [--seed N] [--nodes N] [--rmax X]

A config file holds flat ``key = value`` lines (``#`` starts a comment).
Flags override the file.  Each run writes summary.json, one or more CSV
tables and metadata.json into the output directory; only metadata.json
carries a timestamp, so identical inputs give byte-identical summaries and
tables.  Failures exit nonzero, print a JSON error record on stderr and
write no files.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bubble_green as bg
from . import extremal_lab as ex
from . import ground_state as gs
from . import sharp_constants as sc
from .errors import ConfigError, LabError
from .radial import FunctionalSpec, critical_exponent

EXPERIMENTS = ("constants", "ground-state", "bubble", "green", "test-function",
               "sweep", "nonexistence", "tm2d")


@dataclass(frozen=True)
class Key:
    kind: str            # int, float, str, floats
    default: object
    check: object = None  # callable returning an error message or None


def _positive(v):
    return None if v > 0 else "must be positive"


def _min_nodes(v):
    return None if v >= 16 else "must be at least 16"


def _dimension(v):
    return None if v in (2, 4) else "must be 2 or 4"


def _nonempty(v):
    return None if len(v) > 0 else "must not be empty"


def _small_eps(v):
    return None if v and all(0 < e <= 0.1 for e in v) else "needs values in (0, 0.1]"


def _reading(v):
    return None if v in sc.READINGS else f"must be one of {sc.READINGS}"


def _t_max(v):
    return None if 0 < v < 1 / math.e else "must lie in (0, 1/e)"


COMMON = {"seed": Key("int", 0), "nodes": Key("int", 1024, _min_nodes),
          "rmax": Key("float", 30.0, _positive)}

SCHEMA = {
    "constants": {"k_max": Key("int", 6, lambda v: None if v >= 2 else "must be >= 2")},
    "ground-state": {"dimension": Key("int", 4, _dimension)},
    "bubble": {"r_lo": Key("float", 0.1, _positive), "r_hi": Key("float", 10.0, _positive)},
    "green": {"R": Key("float", 1.0, _positive), "samples": Key("int", 41, _positive)},
    "test-function": {"epsilon_list": Key("floats", (1e-2, 1e-3), _small_eps),
                      "alpha_list": Key("floats", (0.0,), _nonempty),
                      "inner_nodes": Key("int", 1024, _min_nodes),
                      "outer_nodes": Key("int", 1024, _min_nodes),
                      "r_out": Key("float", 40.0, _positive)},
    "sweep": {"alpha_list": Key("floats", None, _nonempty)},
    "nonexistence": {"alpha": Key("float", 32 * math.pi**2 - 1000.0),
                     "t_max": Key("float", 0.36, _t_max),
                     "t_points": Key("int", 181, lambda v: None if v >= 2 else "must be >= 2"),
                     "M": Key("float", None, lambda v: None if v >= 0 else "must be >= 0"),
                     "reading": Key("str", "proof", _reading)},
    "tm2d": {"alpha_list": Key("floats", None, _nonempty)},
}


def _parse_value(name, key: Key, text: str):
    text = text.strip()
    try:
        if key.kind == "int":
            return int(text)
        if key.kind == "float":
            v = float(text)
            if not math.isfinite(v):
                raise ValueError
            return v
        if key.kind == "floats":
            parts = [p for p in text.replace(",", " ").split()]
            return tuple(float(p) for p in parts)
        return text
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {text!r} as {key.kind}") from None


def read_config(path) -> dict:
    """Flat key = value pairs; values stay strings until validated."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key = value")
        k, v = line.split("=", 1)
        k = k.strip()
        if k in out:
            raise ConfigError(f"line {n}: duplicate key {k!r}")
        out[k] = v
    return out


def resolve(experiment: str, raw: dict) -> dict:
    """Typed config with every default filled in."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    schema = {**COMMON, **SCHEMA[experiment]}
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"unknown keys for {experiment}: {', '.join(unknown)}")
    cfg = {}
    for name, key in schema.items():
        if name in raw:
            v = raw[name] if not isinstance(raw[name], str) else _parse_value(name, key, raw[name])
        else:
            v = key.default
        if v is not None and key.check is not None:
            msg = key.check(v)
            if msg:
                raise ConfigError(f"{name}: {msg}")
        cfg[name] = v
    return cfg


# -- serialization -------------------------------------------------------------

def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if x is None else (repr(float(x)) if isinstance(x, (float, np.floating))
                                          else x) for x in row])
    return buf.getvalue()


# -- experiments ---------------------------------------------------------------

def _grid(cfg, dimension):
    return gs.default_grid(dimension, cfg["nodes"], cfg["rmax"])


def run_constants(cfg):
    rows = [b.as_row() for b in sc.constants_table(cfg["k_max"])]
    b2 = sc.b2_interval()
    summary = {"b2_lower": b2.lower, "b2_upper": b2.upper,
               "gaussian_quotient": sc.gaussian_quotient(),
               "trial_family_limit": sc.trial_family_limit(), "rows": rows}
    table = _csv(["index", "lower", "upper", "method"],
                 [(r["index"], r["lower"], r["upper"], r["method"]) for r in rows])
    return summary, {"constants.csv": table}


def run_ground_state(cfg):
    dim = cfg["dimension"]
    state = gs.maximize_quotient(dim, _grid(cfg, dim))
    q = state.rescaled()
    table = _csv(["r", "value"], zip(q.grid.nodes, q.values))
    return state.summary(), {"profile.csv": table}


def run_bubble(cfg):
    mass = bg.bubble_mass()
    res = bg.bubble_residual(cfg["r_lo"], cfg["r_hi"])
    r = np.linspace(0.0, cfg["r_hi"], 201)
    table = _csv(["r", "value"], zip(r, bg.bubble(r)))
    return {"mass": mass, "residual_sup": res, "k": bg.K_BUBBLE}, {"bubble.csv": table}


def run_green(cfg):
    R = cfg["R"]
    gb = bg.green_ball(R)
    fs = bg.fundamental_solution()
    A = fs.regular_part_A
    r = np.linspace(0.0, R, 101)[1:]
    summary = {"R": R, "ball_residual": bg.green_ball_residual(R, cfg["samples"]),
               "ball_concentration_bound": bg.ball_concentration_bound(R),
               "boundary_value": float(gb(R)), "boundary_derivative": float(gb.derivative(R)),
               "A": A, "d_nc": bg.whole_space_concentration_bound(A),
               "gamma_residual": bg.gamma_residual(fs),
               "gamma_error_max": float(np.max(fs.error))}
    tables = {"gamma.csv": _csv(["r", "Gamma", "phi"],
                                zip(fs.radii, fs.gamma, fs.phi_table())),
              "green_ball.csv": _csv(["r", "value"], zip(r, gb(r)))}
    return summary, tables


def run_test_function(cfg):
    fs = bg.fundamental_solution()
    out, tables = [], {}
    for eps in cfg["epsilon_list"]:
        params, prof = ex.build_test_function(eps, None, fs, inner_nodes=cfg["inner_nodes"],
                                              outer_nodes=cfg["outer_nodes"],
                                              r_out=cfg["r_out"])
        entry = params.summary()
        entry["norm"] = prof.sobolev_norm()
        entry["surpass"] = []
        for a in cfg["alpha_list"]:
            v, b, m = ex.surpass_check(eps, a, params.A, fs=fs, profile=prof)
            entry["surpass"].append({"alpha": a, "value": v, "bound": b, "margin": m})
        out.append(entry)
        tables[f"test_function_eps{eps:g}.csv"] = _csv(["r", "value"],
                                                       zip(prof.radii(), prof.values()))
    return {"A": fs.regular_part_A, "cases": out}, tables


def _sweep(cfg, dim):
    grid = _grid(cfg, dim)
    state = gs.maximize_quotient(dim, grid)
    alphas = cfg["alpha_list"]
    if alphas is None:
        alphas = ex.sweep_alphas(dim, state.quotient)
    res = ex.threshold_sweep(sorted(alphas), dim, grid=grid)
    crit = critical_exponent(dim)
    level = crit * crit * state.quotient / 2.0
    rows = [r.as_dict() for r in res.rows]
    for r in rows:
        r["diagnostics"] = {k: v for k, v in r["diagnostics"].items() if k != "trials"}
    summary = {"dimension": dim, "gn_constant": state.quotient, "gn_level": level,
               "rows": rows, "bracket": list(res.bracket),
               "transfer_violations": list(res.transfer_violations),
               "monotonicity_violations": list(res.monotonicity_violations)}
    # g_v(t) at two levels on either side of the GN level, base field the ground state
    t = np.linspace(0.0, 1.0, 101)
    q = state.rescaled()
    curves = [ex.gv_curve(q, crit - f * level, dim, t).g for f in (0.5, 1.5)]
    tables = {"sweep.csv": _csv(["alpha", "value", "classification", "d_nv", "d_nc"],
                                [(r["alpha"], r["value"], r["classification"], r["d_nv"],
                                  r["d_nc"]) for r in rows]),
              "gv_curve.csv": _csv(["t", "g_below", "g_above"], zip(t, *curves))}
    return summary, tables


def run_sweep(cfg):
    return _sweep(cfg, 4)


def run_tm2d(cfg):
    summary, tables = _sweep(cfg, 2)
    spec = FunctionalSpec(4 * math.pi, 0.0, 2)
    summary["witness_rho_1e-3_alpha0"] = ex.vanishing_witness(1e-3, None, spec)
    return summary, tables


def run_nonexistence(cfg):
    t = np.linspace(0.0, cfg["t_max"], cfg["t_points"])
    M = cfg["M"]
    if M is None:
        M = ex.critical_sup_estimate(_grid(cfg, 4))
    nb = ex.nonexistence_bound(cfg["alpha"], t, M, reading=cfg["reading"])
    summary = nb.summary()
    summary["certified_level"] = ex.certified_level(M, t, reading=cfg["reading"])
    table = _csv(["t", "F", "truncation"], zip(nb.t, nb.F, nb.truncation))
    return summary, {"F_curve.csv": table}


RUNNERS = {"constants": run_constants, "ground-state": run_ground_state,
           "bubble": run_bubble, "green": run_green, "test-function": run_test_function,
           "sweep": run_sweep, "nonexistence": run_nonexistence, "tm2d": run_tm2d}


def _version() -> str:
    try:
        from importlib.metadata import version
        return version("artifact")
    except Exception:
        return "unknown"


def run(experiment: str, raw: dict, out_dir) -> dict:
    """Validate, compute, then write; nothing is written if any step fails."""
    cfg = resolve(experiment, raw)
    np.random.seed(cfg["seed"])
    summary, tables = RUNNERS[experiment](cfg)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.json").write_text(_json({"experiment": experiment, **summary}))
    for name, text in sorted(tables.items()):
        (out / name).write_text(text)
    meta = {"experiment": experiment, "config": cfg,
            "defaults": {k: v.default for k, v in {**COMMON, **SCHEMA[experiment]}.items()},
            "files": ["summary.json", *sorted(tables)], "version": _version(),
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat()}
    (out / "metadata.json").write_text(_json(meta))
    return summary


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adamslab", description="Adams / Trudinger-Moser extremal lab")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", type=Path, help="flat key = value file")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--nodes", type=int)
    p.add_argument("--rmax", type=float)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = read_config(args.config) if args.config else {}
        for name in ("seed", "nodes", "rmax"):
            v = getattr(args, name)
            if v is not None:
                raw[name] = v
        run(args.experiment, raw, args.out)
    except (LabError, ValueError, OSError, ArithmeticError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc),
                  "experiment": args.experiment}
        sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")
        return 2 if isinstance(exc, ConfigError) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
