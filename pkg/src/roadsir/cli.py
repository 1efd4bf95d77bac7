"""Command line entry point: ``roadsir {speed,simulate,steady,compare,sweep,omega}``.

Every command reads one JSON document (see ``parse_config``) and writes its
tables into an output directory, prefixed with the run id, next to a
normalised echo of the configuration.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import analysis, dispersion, pde
from .model import PARAM_NAMES, ModelError, ModelParams, c_sir, f_prime, plateau, reduce, v_star

log = logging.getLogger("roadsir")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
THREADS_ENV = "ROADSIR_THREADS"
DEFAULT_LAMBDAS = (0.0, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0)


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class RuntimeFailure(RuntimeError):
    pass


REQUIRED = object()

# section -> key -> default (REQUIRED for mandatory keys)
SCHEMA = {
    "params": {name: REQUIRED for name in PARAM_NAMES},
    "grid": {"lx": 100.0, "ly": 10.0, "h": 0.25, "cfl": pde.DEFAULT_CFL},
    "time": {"t_end": 40.0, "snapshot_dt": 10.0},
    "steady": {"tol": pde.DEFAULT_STEADY_TOL, "t_max": 1000.0},
    "output": {"dir": ".", "run_id": "run"},
}
SOURCE_KEYS = {"shape", "center", "radius", "amplitude"}
DEFAULT_SOURCES = {
    "i0": {"shape": "disk-indicator", "center": [0.0, 0.0], "radius": 5.0, "amplitude": 1.0},
    "t0": {"shape": "none"},
}
TOP_KEYS = {"mode", "sources", *SCHEMA}


@dataclass(frozen=True)
class RunConfig:
    mode: str
    params: ModelParams
    grid: pde.GridSpec
    i0: pde.SourceSpec
    t0: pde.SourceSpec
    t_end: float
    snapshot_dt: float
    steady_tol: float
    steady_t_max: float
    out_dir: str
    run_id: str

    def to_document(self) -> dict:
        def source(s: pde.SourceSpec) -> dict:
            if not s.active:
                return {"shape": "none"}
            return {"shape": s.shape, "center": [float(c) for c in s.center],
                    "radius": float(s.radius), "amplitude": float(s.amplitude)}

        g = self.grid
        return {
            "mode": self.mode,
            "params": {k: float(v) for k, v in self.params.as_dict().items()},
            "grid": {"lx": float(g.lx), "ly": float(g.ly), "h": float(g.h), "cfl": float(g.cfl)},
            "sources": {"i0": source(self.i0), "t0": source(self.t0)},
            "time": {"t_end": self.t_end, "snapshot_dt": self.snapshot_dt},
            "steady": {"tol": self.steady_tol, "t_max": self.steady_t_max},
            "output": {"dir": self.out_dir, "run_id": self.run_id},
        }


def _number(path: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(path, "must be finite")
    return float(value)


def _section(doc: dict, name: str) -> dict:
    raw = doc.get(name, {})
    if not isinstance(raw, dict):
        raise ConfigError(name, "expected an object")
    spec = SCHEMA[name]
    for key in raw:
        if key not in spec:
            raise ConfigError(f"{name}.{key}", "unknown key")
    out = {}
    for key, default in spec.items():
        if key in raw:
            out[key] = raw[key]
        elif default is REQUIRED:
            raise ConfigError(f"{name}.{key}", "missing required key")
        else:
            out[key] = default
    return out


def _source(raw, path: str) -> pde.SourceSpec:
    if not isinstance(raw, dict):
        raise ConfigError(path, "expected an object")
    for key in raw:
        if key not in SOURCE_KEYS:
            raise ConfigError(f"{path}.{key}", "unknown key")
    shape = raw.get("shape", REQUIRED)
    if shape is REQUIRED:
        raise ConfigError(f"{path}.shape", "missing required key")
    if shape not in pde.SHAPES:
        raise ConfigError(f"{path}.shape", f"must be one of {', '.join(pde.SHAPES)}")
    if shape == "none":
        extra = set(raw) - {"shape", "amplitude"}
        if extra:
            raise ConfigError(f"{path}.{sorted(extra)[0]}", "not allowed for shape 'none'")
        return pde.SourceSpec()
    for key in ("center", "radius", "amplitude"):
        if key not in raw:
            raise ConfigError(f"{path}.{key}", "missing required key")
    center = raw["center"]
    if not isinstance(center, list) or len(center) != 2:
        raise ConfigError(f"{path}.center", "expected [x, y]")
    center = tuple(_number(f"{path}.center[{k}]", c) for k, c in enumerate(center))
    radius = _number(f"{path}.radius", raw["radius"])
    amplitude = _number(f"{path}.amplitude", raw["amplitude"])
    if not radius > 0:
        raise ConfigError(f"{path}.radius", "must be positive")
    if not amplitude > 0:
        raise ConfigError(f"{path}.amplitude", "must be positive")
    return pde.SourceSpec(shape, center, radius, amplitude)


def parse_config(document) -> RunConfig:
    """Validate a JSON document (text or already-decoded dict) into a RunConfig."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ConfigError("<document>", f"invalid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise ConfigError("<document>", "expected a JSON object")
    for key in document:
        if key not in TOP_KEYS:
            raise ConfigError(key, "unknown key")

    mode = document.get("mode", "roadfield_uv")
    if mode not in pde.MODES:
        raise ConfigError("mode", f"must be one of {', '.join(pde.MODES)}")

    raw = _section(document, "params")
    values = {k: _number(f"params.{k}", v) for k, v in raw.items()}
    for k, v in values.items():
        if not v > 0:
            raise ConfigError(f"params.{k}", f"must be strictly positive, got {v!r}")
    params = ModelParams(**values)

    raw = _section(document, "grid")
    g = {k: _number(f"grid.{k}", v) for k, v in raw.items()}
    if not g["h"] > 0:
        raise ConfigError("grid.h", "must be positive")
    if not 0 < g["cfl"] <= 0.5:
        raise ConfigError("grid.cfl", "must lie in (0, 0.5]")
    for key in ("lx", "ly"):
        try:
            pde.GridSpec(**{**g, "lx": g[key], "ly": g[key]})
        except pde.GridError:
            raise ConfigError(f"grid.{key}", "must be a positive multiple of grid.h") from None
    try:
        grid = pde.GridSpec(**g)
    except pde.GridError as exc:
        raise ConfigError("grid", str(exc)) from None

    sources = document.get("sources", {})
    if not isinstance(sources, dict):
        raise ConfigError("sources", "expected an object")
    for key in sources:
        if key not in DEFAULT_SOURCES:
            raise ConfigError(f"sources.{key}", "unknown key")
    specs = {}
    for key, default in DEFAULT_SOURCES.items():
        specs[key] = _source(sources.get(key, default), f"sources.{key}")
        try:
            specs[key].check_inside(grid)
        except pde.GridError as exc:
            raise ConfigError(f"sources.{key}", str(exc)) from None
    if not specs["i0"].active:
        raise ConfigError("sources.i0", "the infected source must not be identically zero")

    raw = _section(document, "time")
    t_end = _number("time.t_end", raw["t_end"])
    snapshot_dt = _number("time.snapshot_dt", raw["snapshot_dt"])
    if t_end < 0:
        raise ConfigError("time.t_end", "must be nonnegative")
    if not snapshot_dt > 0:
        raise ConfigError("time.snapshot_dt", "must be positive")

    raw = _section(document, "steady")
    tol = _number("steady.tol", raw["tol"])
    t_max = _number("steady.t_max", raw["t_max"])
    if not tol > 0:
        raise ConfigError("steady.tol", "must be positive")
    if not t_max > 0:
        raise ConfigError("steady.t_max", "must be positive")

    raw = _section(document, "output")
    out_dir, run_id = raw["dir"], raw["run_id"]
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("output.dir", "expected a non-empty string")
    _check_run_id(run_id, "output.run_id")

    return RunConfig(mode, params, grid, specs["i0"], specs["t0"], t_end, snapshot_dt,
                     tol, t_max, out_dir, run_id)


def _check_run_id(run_id, path: str) -> None:
    if not isinstance(run_id, str) or not run_id or any(c in run_id for c in "/\\") or run_id.startswith("."):
        raise ConfigError(path, "expected a plain non-empty name")


# ---------------------------------------------------------------- output helpers

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value)


class Outputs:
    """Writes ``<run_id>_<name>`` files into one directory and remembers them."""

    def __init__(self, directory: Path, run_id: str):
        self.dir = directory
        self.run_id = run_id
        self.written: list = []

    def path(self, name: str) -> Path:
        return self.dir / f"{self.run_id}_{name}"

    def table(self, name: str, header: list, rows) -> Path:
        p = self.path(name)
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
        self.written.append(p)
        return p

    def summary(self, entries: list) -> Path:
        """entries: (quantity, value, approximates)."""
        return self.table("summary.csv", ["quantity", "value", "approximates"], entries)


def _prepare(cfg: RunConfig) -> Outputs:
    directory = Path(cfg.out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    echo = directory / f"{cfg.run_id}.config.json"
    if echo.exists():
        raise ConfigError("output.run_id", f"run id {cfg.run_id!r} already used in {directory}")
    echo.write_text(json.dumps(cfg.to_document(), indent=2, sort_keys=True) + "\n")
    return Outputs(directory, cfg.run_id)


def _say(lines) -> None:
    for line in lines:
        print(line)


# ---------------------------------------------------------------- speed

def speed_report(params: ModelParams) -> dict:
    """Dispersion quantities for one parameter set; ``spreading`` False when R0 <= 1."""
    red = reduce(params)
    out = {"r0": params.r0, "spreading": params.r0 > 1, "dd": red.dd, "mu_bar": red.mu_bar,
           "nu_bar": red.nu_bar, "w_sir": red.w_sir, "lam": red.lam, "rho": red.rho}
    trip = dispersion.decay_exponents(params)
    out.update(a=trip.a, b=trip.b, gamma=trip.gamma)
    if not out["spreading"]:
        out.update(c_sir=None, c_sirt=None, ratio=None, w_bar=None, omega=None, v_star=0.0)
        return out
    cs, ct = c_sir(params), dispersion.c_sirt(params)
    out.update(c_sir=cs, c_sirt=ct, ratio=ct / cs, v_star=v_star(params),
               w_bar=ct / (math.sqrt(params.d * params.alpha) * math.sqrt(red.dd) * red.w_sir),
               omega=dispersion.omega_reduced(red.lam))
    return out


SPEED_ROWS = (
    ("r0", "R0"), ("c_sir", "c_SIR"), ("c_sirt", "c_SIR^T"), ("ratio", "c_SIR^T / c_SIR"),
    ("v_star", "v_*"), ("a", "a_*"), ("b", "b_*"), ("gamma", "gamma_*"),
    ("dd", "reduced diffusivity ratio D/d"), ("mu_bar", "reduced mu"), ("nu_bar", "reduced nu"),
    ("w_sir", "w_SIR"), ("lam", "lambda"), ("rho", "rho"),
    ("w_bar", "reduced road speed w_bar"), ("omega", "omega_SIR^T(lambda)"),
)


def cmd_speed(cfg: RunConfig) -> int:
    out = _prepare(cfg)
    rep = speed_report(cfg.params)
    rows = [(key, rep[key], meaning) for key, meaning in SPEED_ROWS]
    verdict = "spreading" if rep["spreading"] else "no spreading"
    rows.append(("outcome", verdict, "R0 > 1 dichotomy"))
    out.summary(rows)
    if rep["spreading"]:
        _say([f"c_SIR   = {rep['c_sir']:.10g}", f"c_SIR^T = {rep['c_sirt']:.10g}",
              f"ratio   = {rep['ratio']:.10g}",
              f"(a_*, b_*, gamma_*) = ({rep['a']:.10g}, {rep['b']:.10g}, {rep['gamma']:.10g})",
              f"D/d = {rep['dd']:.6g}, lambda = {rep['lam']:.6g}, rho = {rep['rho']:.6g}, "
              f"w_SIR = {rep['w_sir']:.6g}, w_bar = {rep['w_bar']:.6g}"])
    else:
        _say([f"R0 = {rep['r0']:.6g} <= 1: no spreading; the steady potential decays to 0 "
              f"far from the source"])
    return EXIT_OK


# ---------------------------------------------------------------- simulate

def predicted_speed(mode: str, params: ModelParams) -> Optional[float]:
    if not params.r0 > 1:
        return None
    return dispersion.c_sirt(params) if mode in pde.ROAD_MODES else c_sir(params)


def simulate(cfg: RunConfig, out: Outputs) -> list:
    """Run, analyse and write artifacts; returns summary rows."""
    p, g = cfg.params, cfg.grid
    state = pde.init_state(g, cfg.mode, (cfg.i0, cfg.t0), p)
    traj = pde.run(state, p, cfg.t_end, cfg.snapshot_dt)
    for snap in traj.snapshots:
        out.written.extend(pde.write_snapshot(snap, out.dir, cfg.run_id))

    level = pde.front_level(cfg.mode, p)
    x = g.x
    right = x >= 0
    rows = [("mode", cfg.mode, "model form"), ("t_end", traj.final.t, "final time")]
    trace = None
    if level is not None and traj.wall_trace.shape[0] > 0:
        trace = analysis.front_trace(traj.wall_trace[:, right], traj.trace_times, level, x[right])
        pairs = [(t, xf) for t, xf in zip(trace.times, trace.positions) if np.isfinite(xf)]
    else:
        pairs = []
    out.table("front_trace.csv", ["t", "x_front"], pairs)

    measured = None
    if trace is not None:
        reached = trace.reached()
        try:
            measured, r2 = analysis.fit_speed(reached)
            rows.append(("fit_r2", r2, "coefficient of determination of the front fit"))
        except analysis.AnalysisError as exc:
            rows.append(("speed_fit", f"unavailable ({exc})", "front speed"))
    predicted = predicted_speed(cfg.mode, p)
    name = "c_SIR^T" if cfg.mode in pde.ROAD_MODES else "c_SIR"
    rows.append(("measured_speed", measured, f"{name} (front speed along y = 0)"))
    rows.append(("predicted_speed", predicted, name))
    if measured is not None and predicted:
        rows.append(("relative_error", abs(measured - predicted) / predicted, f"|measured - {name}| / {name}"))

    if cfg.mode in pde.TRANSFORMED_MODES and p.r0 > 1 and traj.wall_trace.shape[0] > 0:
        vs = v_star(p)
        tau = analysis.peak_time_map(traj.wall_trace, traj.trace_times, vs)
        out.table("tau_star.csv", ["x", "tau"], zip(x, tau))
        rows.append(("v_star", vs, "v_*"))
        try:
            slope = analysis.inverse_speed_from_peaks(tau, x)
            rows.append(("peak_time_slope", slope, f"1 / {name} (slope of tau_* against x)"))
        except analysis.AnalysisError:
            pass
    rows.append(("boundary_warning", traj.boundary_warning, "front within 10h of the x boundary"))
    return rows


def cmd_simulate(cfg: RunConfig) -> int:
    out = _prepare(cfg)
    rows = simulate(cfg, out)
    out.summary(rows)
    _say(f"{q} = {_fmt(v)}" for q, v, _ in rows)
    return EXIT_OK


# ---------------------------------------------------------------- steady / compare

def _steady(cfg: RunConfig, mode: str) -> pde.SteadyResult:
    state = pde.init_state(cfg.grid, mode, (cfg.i0, cfg.t0), cfg.params)
    return pde.solve_steady(state, cfg.params, cfg.steady_tol, cfg.steady_t_max)


def decay_reference(mode: str, params: ModelParams) -> float:
    """Predicted far-field decay rate: a_* with the road, sqrt(-f'(limit)/d) without."""
    if mode == "roadfield_uv":
        return dispersion.decay_exponents(params).a
    return math.sqrt(-f_prime(plateau(params), params) / params.d)


def decay_row(state: pde.FieldState, params: ModelParams):
    """(window, rate, reference, relative_error): along y = 0 with the road, at mid-height without."""
    g = state.grid
    right = g.x >= 0
    column = 0 if state.has_road else g.ny // 2
    profile = state.primary[right, column]
    limit = plateau(params)
    window = analysis.auto_window(profile, limit, g.x[right])
    rate = analysis.fit_decay(profile, limit, g.x[right], window)
    ref = decay_reference(state.mode, params)
    return f"{window[0]:.17g}:{window[1]:.17g}", rate, ref, abs(rate - ref) / ref


def plateau_rows(state: pde.FieldState, params: ModelParams) -> list:
    g = state.grid
    band = np.abs(g.x) >= 0.9 * g.lx
    vs = plateau(params)
    v_far = float(np.mean(state.primary[band, g.ny // 2]))
    rows = [("v_far_mid_height", v_far, "v_* (far-field plateau)"),
            ("itot_far", float(np.mean(analysis.itot(state.primary[band, g.ny // 2], params))),
             "I_tot limit S0 (1 - exp(-beta v_*))"),
            ("itot_limit", -params.s0 * math.expm1(-params.beta * vs), "I_tot limit")]
    if state.has_road:
        rows.insert(1, ("u_far", float(np.mean(state.road["u"][band])), "(nu / mu) v_*"))
    return rows


def cmd_steady(cfg: RunConfig) -> int:
    if cfg.mode not in pde.TRANSFORMED_MODES:
        raise ConfigError("mode", "steady needs scalar_v or roadfield_uv")
    out = _prepare(cfg)
    res = _steady(cfg, cfg.mode)
    rows = [("mode", cfg.mode, "model form"), ("converged", res.converged, "steady residual below tol"),
            ("residual", res.residual, "max |dv/dt|"), ("t_stop", res.state.t, "time at stop")]
    out.written.extend(pde.write_snapshot(res.state, out.dir, cfg.run_id))
    if res.converged:
        rows += plateau_rows(res.state, cfg.params)
        try:
            fit = decay_row(res.state, cfg.params)
            out.table("decay_fit.csv", ["window", "rate", "reference", "relative_error"], [fit])
            rows.append(("decay_rate", fit[1], "a_*" if res.state.has_road else "sqrt(-f'(v_*)/d)"))
        except analysis.AnalysisError as exc:
            rows.append(("decay_rate", f"unavailable ({exc})", "decay rate"))
    out.summary(rows)
    _say(f"{q} = {_fmt(v)}" for q, v, _ in rows)
    if not res.converged:
        raise RuntimeFailure(f"steady solve did not converge by t = {res.state.t:.6g} "
                             f"(residual {res.residual:.3g})")
    return EXIT_OK


def cmd_compare(cfg: RunConfig) -> int:
    p = cfg.params
    if p.r0 == 1:
        raise ConfigError("params", "compare needs R0 != 1")
    out = _prepare(cfg)
    road = _steady(cfg, "roadfield_uv")
    plain = _steady(cfg, "scalar_v")
    rows = [("road_converged", road.converged, "road-field steady residual below tol"),
            ("road_residual", road.residual, "max rate"),
            ("plain_converged", plain.converged, "no-road steady residual below tol"),
            ("plain_residual", plain.residual, "max rate")]
    if not (road.converged and plain.converged):
        out.summary(rows)
        _say(f"{q} = {_fmt(v)}" for q, v, _ in rows)
        raise RuntimeFailure("a steady solve did not converge")
    g = cfg.grid
    vr, vp = road.state.primary, plain.state.primary
    scale = v_star(p) if p.r0 > 1 else float(vp.max())
    rep = analysis.region_split(vr, vp, 1e-4 * scale, g)
    X, Y = np.meshgrid(g.x, g.y, indexing="ij")
    sign = rep.e_plus_mask.astype(int) - rep.e_minus_mask.astype(int)
    idx = np.nonzero(sign)
    out.table("regions.csv", ["x", "y", "sign"], zip(X[idx], Y[idx], sign[idx]))
    for name, field_ in (("itot_road.csv", vr), ("itot_plain.csv", vp)):
        vals = analysis.itot(field_, p)
        out.table(name, ["x", "y", "value"], zip(X.ravel(), Y.ravel(), vals.ravel()))
    bulk, exch = analysis.integral_balance(road, p)
    rows += [("e_plus_area", rep.e_plus_area, "area of E+ (road raises I_tot)"),
             ("e_minus_area", rep.e_minus_area, "area of E- (road lowers I_tot)"),
             ("region_tol", rep.tol, "1e-4 v_*"),
             ("balance_bulk", bulk, "normalised bulk integral identity residual"),
             ("balance_road", exch, "normalised road integral identity residual")]
    band = np.abs(g.x) >= 0.9 * g.lx
    lim = -p.s0 * math.expm1(-p.beta * plateau(p))
    rows += [("itot_far_road", float(np.mean(analysis.itot(vr[band, g.ny // 2], p))), "I_tot limit"),
             ("itot_far_plain", float(np.mean(analysis.itot(vp[band, g.ny // 2], p))), "I_tot limit"),
             ("itot_limit", lim, "I_tot limit S0 (1 - exp(-beta v_*))")]
    out.summary(rows)
    _say(f"{q} = {_fmt(v)}" for q, v, _ in rows)
    return EXIT_OK


# ---------------------------------------------------------------- sweep

def _apply_axis(cfg: RunConfig, axis: str, value: float) -> RunConfig:
    if axis == "r0":
        if not value > 0:
            raise ConfigError("--values", "R0 values must be positive")
        beta = value * cfg.params.alpha / cfg.params.s0
        return replace(cfg, params=cfg.params.replace(beta=beta))
    doc = copy.deepcopy(cfg.to_document())
    section, key = axis.split(".")
    doc[section][key] = value
    try:
        return parse_config(doc)
    except ConfigError as exc:
        raise ConfigError("--values", f"{value!r} is invalid for {axis}: {exc}") from None


SWEEP_AXES = ("r0",) + tuple(f"params.{k}" for k in PARAM_NAMES) + (
    "grid.h", "grid.lx", "grid.ly", "time.t_end")
SWEEP_COLUMNS = ("r0", "c_sir", "c_sirt", "ratio", "a", "b", "gamma", "dd", "lam", "rho",
                 "w_sir", "w_bar", "omega")


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(THREADS_ENV, f"expected a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(THREADS_ENV, "must be at least 1")
    return n


def cmd_sweep(cfg: RunConfig, axis: str, values: list, with_simulate: bool = False) -> int:
    if axis not in SWEEP_AXES:
        raise ConfigError("--axis", f"must be one of {', '.join(SWEEP_AXES)}")
    if not values:
        raise ConfigError("--values", "need at least one value")
    entries = [_apply_axis(cfg, axis, float(v)) for v in values]
    out = _prepare(cfg)

    def work(k: int):
        e = entries[k]
        rep = speed_report(e.params)
        sim = None
        if with_simulate:
            sub = Outputs(out.dir, f"{cfg.run_id}_{k}")
            sim = dict((q, v) for q, v, _ in simulate(replace(e, run_id=sub.run_id), sub))
        return rep, sim

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(work, range(len(entries))))

    header = ["axis", "value", *SWEEP_COLUMNS]
    if with_simulate:
        header += ["measured_speed", "predicted_speed"]
    rows = []
    for v, (rep, sim) in zip(values, results):
        row = [axis, float(v), *(rep[c] for c in SWEEP_COLUMNS)]
        if with_simulate:
            row += [sim.get("measured_speed"), sim.get("predicted_speed")]
        rows.append(row)
    out.table("sweep.csv", header, rows)
    _say([",".join(header)])
    _say(",".join(_fmt(v) for v in row) for row in rows)
    return EXIT_OK


# ---------------------------------------------------------------- omega

def omega_table(lambdas, dd: float, rho: float) -> list:
    rows = []
    for lam in lambdas:
        w = dispersion.omega_reduced(lam)
        finite = dispersion.reduced_speed(lam, rho, dd)
        rows.append((lam, w, finite, abs(finite - w) / w))
    return rows


def cmd_omega(lambdas, dd: float, rho: float, out_dir: str, run_id: str) -> int:
    for lam in lambdas:
        if not (lam >= 0 and math.isfinite(lam)):
            raise ConfigError("--lambdas", f"values must be finite and nonnegative, got {lam!r}")
    if not (dd > 0 and math.isfinite(dd)):
        raise ConfigError("--dd", "must be positive")
    if not (rho >= 0 and math.isfinite(rho)):
        raise ConfigError("--rho", "must be nonnegative")
    _check_run_id(run_id, "--run-id")
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    echo = directory / f"{run_id}.config.json"
    if echo.exists():
        raise ConfigError("--run-id", f"run id {run_id!r} already used in {directory}")
    echo.write_text(json.dumps({"lambdas": list(lambdas), "dd": dd, "rho": rho}, indent=2) + "\n")
    out = Outputs(directory, run_id)
    rows = omega_table(lambdas, dd, rho)
    header = ["lambda", "omega", "reduced_speed", "relative_difference"]
    out.table("omega.csv", header, rows)
    _say([",".join(header)])
    _say(",".join(_fmt(v) for v in row) for row in rows)
    return EXIT_OK


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="roadsir", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="JSON run configuration")
        p.add_argument("--out", help="output directory (overrides output.dir)")
        p.add_argument("--run-id", help="run id (overrides output.run_id)")
        return p

    common(sub.add_parser("speed", help="dispersion speeds and decay exponents"))
    common(sub.add_parser("simulate", help="time-dependent run with front analysis"))
    common(sub.add_parser("steady", help="steady state with decay fit"))
    common(sub.add_parser("compare", help="road vs no-road steady states"))
    sw = common(sub.add_parser("sweep", help="repeat speed (and optionally simulate) along one axis"))
    sw.add_argument("--axis", required=True, help="params.<name>, r0, grid.<name> or time.t_end")
    sw.add_argument("--values", required=True, type=float, nargs="+")
    sw.add_argument("--simulate", action="store_true", help="also run simulate for each value")
    om = common(sub.add_parser("omega", help="tabulate the limit reduced speed curve"), config_required=False)
    om.add_argument("--lambdas", type=float, nargs="+", default=list(DEFAULT_LAMBDAS))
    om.add_argument("--dd", type=float, default=1e4, help="diffusivity ratio for the finite column")
    om.add_argument("--rho", type=float, default=1e-3, help="rho for the finite column")
    return parser


def _load(args) -> RunConfig:
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {args.config}: {exc.strerror}") from None
    cfg = parse_config(text)
    if args.out is not None:
        cfg = replace(cfg, out_dir=args.out)
    if args.run_id is not None:
        _check_run_id(args.run_id, "--run-id")
        cfg = replace(cfg, run_id=args.run_id)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "omega":
            out_dir, run_id = args.out or ".", args.run_id or "omega"
            if args.config is not None:
                cfg = _load(args)
                out_dir, run_id = cfg.out_dir, cfg.run_id
            return cmd_omega(args.lambdas, args.dd, args.rho, out_dir, run_id)
        cfg = _load(args)
        if args.command == "speed":
            return cmd_speed(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "steady":
            return cmd_steady(cfg)
        if args.command == "compare":
            return cmd_compare(cfg)
        return cmd_sweep(cfg, args.axis, args.values, args.simulate)
    except (ConfigError, ModelError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (pde.BlowUpError, RuntimeFailure, dispersion.ConvergenceError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
