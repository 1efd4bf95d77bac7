"""Finite-difference integration of the SIR / road-field systems on a
truncated half-plane ``[-lx, lx] x [0, ly]``.

Four model forms share one grid:

``scalar_v``      integrated SIR potential, Neumann wall at y = 0 (the
                  y-symmetric whole-plane problem without a road)
``roadfield_uv``  integrated road-field system with the exchange condition
``sir_direct``    S, I without a road
``sirt_direct``   S, I and the road compartment T

Integrated modes carry I0 and T0 as time-independent forcing and start
from zero; direct modes use them as initial data.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Literal, NamedTuple, Optional

import numpy as np

from . import _kernels
from .model import ModelParams, v_star

log = logging.getLogger(__name__)

Mode = Literal["scalar_v", "roadfield_uv", "sir_direct", "sirt_direct"]
MODES = ("scalar_v", "roadfield_uv", "sir_direct", "sirt_direct")
ROAD_MODES = ("roadfield_uv", "sirt_direct")
TRANSFORMED_MODES = ("scalar_v", "roadfield_uv")
SHAPES = ("disk-indicator", "truncated-gaussian", "none")

DEFAULT_CFL = 0.4
DEFAULT_STEADY_TOL = 1e-8
MAX_TRACE_SAMPLES = 2000
BOUNDARY_CELLS = 10
_GAUSS_K = 4.5
_CHUNK = 2000


class GridError(ValueError):
    pass


class BlowUpError(RuntimeError):
    def __init__(self, field_name: str, node: tuple, t: float):
        super().__init__(f"non-finite {field_name} at node {node} (t = {t:.6g})")
        self.field_name = field_name
        self.node = node
        self.t = t


def _is_multiple(length: float, h: float) -> bool:
    k = length / h
    return abs(k - round(k)) <= 1e-9 * max(1.0, abs(k))


@dataclass(frozen=True)
class GridSpec:
    lx: float
    ly: float
    h: float
    cfl: float = DEFAULT_CFL

    def __post_init__(self) -> None:
        if not (self.h > 0 and math.isfinite(self.h)):
            raise GridError("h must be positive")
        if not 0 < self.cfl <= 0.5:
            raise GridError("cfl must lie in (0, 0.5]")
        for name in ("lx", "ly"):
            value = getattr(self, name)
            if not value > 0 or not _is_multiple(value, self.h):
                raise GridError(f"{name} must be a positive multiple of h")
        if self.nx < 3 or self.ny < 2:
            raise GridError("grid needs at least 3 x-nodes and 2 y-nodes")

    @property
    def nx(self) -> int:
        return int(round(2 * self.lx / self.h)) + 1

    @property
    def ny(self) -> int:
        return int(round(self.ly / self.h)) + 1

    @property
    def x(self) -> np.ndarray:
        return np.linspace(-self.lx, self.lx, self.nx)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(0.0, self.ly, self.ny)

    def dt(self, params: ModelParams, road: bool = True) -> float:
        """Explicit step; without a road only the bulk diffusivity limits it."""
        top = max(params.d, params.D) if road else params.d
        return self.cfl * self.h * self.h / (4.0 * top)


@dataclass(frozen=True)
class SourceSpec:
    """Compactly supported source: disk indicator, truncated Gaussian, or nothing.

    The truncated Gaussian is shifted so that it vanishes continuously at the
    support radius and is radially decreasing inside it.
    """

    shape: str = "none"
    center: tuple = (0.0, 0.0)
    radius: float = 0.0
    amplitude: float = 0.0

    def __post_init__(self) -> None:
        if self.shape not in SHAPES:
            raise GridError(f"unknown source shape {self.shape!r}")
        if self.shape != "none":
            if not self.radius > 0:
                raise GridError("source radius must be positive")
            if not self.amplitude > 0:
                raise GridError("source amplitude must be positive")
        elif self.amplitude < 0:
            raise GridError("source amplitude must be nonnegative")

    @property
    def active(self) -> bool:
        return self.shape != "none"

    def _profile(self, r2: np.ndarray) -> np.ndarray:
        inside = r2 <= self.radius ** 2
        if self.shape == "disk-indicator":
            vals = np.full(r2.shape, self.amplitude)
        else:
            tail = math.exp(-_GAUSS_K)
            vals = self.amplitude * (np.exp(-_GAUSS_K * r2 / self.radius ** 2) - tail) / (1.0 - tail)
        return np.where(inside, vals, 0.0)

    def sample_bulk(self, grid: GridSpec) -> np.ndarray:
        if not self.active:
            return np.zeros((grid.nx, grid.ny))
        cx, cy = self.center
        X, Y = np.meshgrid(grid.x - cx, grid.y - cy, indexing="ij")
        return self._profile(X * X + Y * Y)

    def sample_road(self, grid: GridSpec) -> np.ndarray:
        if not self.active:
            return np.zeros(grid.nx)
        dx = grid.x - self.center[0]
        return self._profile(dx * dx)

    def check_inside(self, grid: GridSpec) -> None:
        """Support must stay within |x| <= lx/2 and have its center on the grid."""
        if not self.active:
            return
        cx, cy = self.center
        if abs(cx) + self.radius > grid.lx / 2 + 1e-12:
            raise GridError(
                f"source support reaches |x| = {abs(cx) + self.radius:g}, "
                f"closer than lx/2 to the x-truncation boundary"
            )
        if not 0 <= cy <= grid.ly:
            raise GridError("source center must lie inside the grid")


@dataclass
class FieldState:
    t: float
    mode: str
    grid: GridSpec
    bulk: dict
    road: dict
    i0: np.ndarray
    t0: np.ndarray
    steps: int = 0

    def copy(self) -> "FieldState":
        return FieldState(
            t=self.t, mode=self.mode, grid=self.grid,
            bulk={k: a.copy() for k, a in self.bulk.items()},
            road={k: a.copy() for k, a in self.road.items()},
            i0=self.i0, t0=self.t0, steps=self.steps,
        )

    @property
    def transformed(self) -> bool:
        return self.mode in TRANSFORMED_MODES

    @property
    def has_road(self) -> bool:
        return self.mode in ROAD_MODES

    @property
    def primary(self) -> np.ndarray:
        """v for integrated modes, I for direct ones."""
        return self.bulk["v"] if self.transformed else self.bulk["I"]

    @property
    def road_field(self) -> Optional[np.ndarray]:
        if not self.has_road:
            return None
        return self.road["u"] if self.transformed else self.road["T"]

    def check_finite(self) -> None:
        for store in (self.bulk, self.road):
            for name, arr in store.items():
                bad = ~np.isfinite(arr)
                if bad.any():
                    node = tuple(int(k) for k in np.argwhere(bad)[0])
                    raise BlowUpError(name, node, self.t)


def init_state(grid: GridSpec, mode: str, sources: tuple, params: ModelParams) -> FieldState:
    """Initial state. ``sources`` is (i0, t0); t0 is ignored for road-less modes."""
    if mode not in MODES:
        raise GridError(f"unknown mode {mode!r}")
    i0, t0 = sources
    i0 = i0 if i0 is not None else SourceSpec()
    t0 = t0 if t0 is not None else SourceSpec()
    i0.check_inside(grid)
    t0.check_inside(grid)
    i0_arr = i0.sample_bulk(grid)
    t0_arr = t0.sample_road(grid) if mode in ROAD_MODES else np.zeros(grid.nx)
    shape = (grid.nx, grid.ny)
    if mode in TRANSFORMED_MODES:
        bulk = {"v": np.zeros(shape)}
        road = {"u": np.zeros(grid.nx)} if mode == "roadfield_uv" else {}
        forcing_i0, forcing_t0 = i0_arr, t0_arr
    else:
        bulk = {"S": np.full(shape, float(params.s0)), "I": i0_arr.copy()}
        road = {"T": t0_arr.copy()} if mode == "sirt_direct" else {}
        forcing_i0, forcing_t0 = np.zeros(shape), np.zeros(grid.nx)
    forcing_i0.setflags(write=False)
    forcing_t0.setflags(write=False)
    return FieldState(0.0, mode, grid, bulk, road, forcing_i0, forcing_t0)


class _Traces:
    """Preallocated trace buffers handed to the kernels."""

    def __init__(self, nx: int, samples: int):
        self.road = np.zeros((samples, nx))
        self.wall = np.zeros((samples, nx))
        self.acc_road = np.zeros((samples, nx))
        self.acc_wall = np.zeros((samples, nx))


def _advance(state: FieldState, params: ModelParams, nsteps: int, acc_road: np.ndarray,
             acc_wall: np.ndarray, trace_every: int = 0, traces: Optional[_Traces] = None,
             trace_pos: int = 0) -> tuple:
    """Advance ``state`` in place; returns (max rate of the last step, trace rows written)."""
    g = state.grid
    dt = g.dt(params, state.has_road)
    if traces is None:
        traces = _Traces(g.nx, 0)
        trace_every = 0
    sl = slice(trace_pos, None)
    args = (
        params.d, params.D, params.alpha, params.beta, params.mu, params.nu,
    )
    if state.transformed:
        u = state.road.get("u", np.zeros(g.nx))
        rate, written = _kernels.advance_transformed(
            state.bulk["v"], u, state.i0, state.t0, state.has_road, *args, params.s0,
            g.h, dt, nsteps, trace_every, state.steps,
            traces.road[sl], traces.wall[sl], acc_road, acc_wall,
            traces.acc_road[sl], traces.acc_wall[sl],
        )
    else:
        T = state.road.get("T", np.zeros(g.nx))
        rate, written = _kernels.advance_direct(
            state.bulk["S"], state.bulk["I"], T, state.has_road, *args,
            g.h, dt, nsteps, trace_every, state.steps,
            traces.road[sl], traces.wall[sl], acc_road, acc_wall,
            traces.acc_road[sl], traces.acc_wall[sl],
        )
    state.steps += nsteps
    state.t = state.steps * dt
    state.check_finite()
    return rate, written


def step(state: FieldState, params: ModelParams) -> FieldState:
    """One forward-Euler step; returns a new state and leaves the input untouched."""
    new = state.copy()
    nx = state.grid.nx
    _advance(new, params, 1, np.zeros(nx), np.zeros(nx))
    return new


@dataclass
class Trajectory:
    snapshot_times: list
    snapshots: list
    trace_times: np.ndarray
    road_trace: Optional[np.ndarray]
    wall_trace: np.ndarray
    road_cumulative: Optional[np.ndarray]
    wall_cumulative: np.ndarray
    road_integral: Optional[np.ndarray]
    wall_integral: np.ndarray
    final: FieldState
    dt: float
    trace_every: int
    boundary_warning: bool = False
    notes: list = field(default_factory=list)


def front_level(mode: str, params: ModelParams) -> Optional[float]:
    """Level used to locate fronts: v_*/2 for integrated modes, 1e-3 S0 for I."""
    if mode in TRANSFORMED_MODES:
        return 0.5 * v_star(params) if params.r0 > 1 else None
    return 1e-3 * params.s0


def run(state: FieldState, params: ModelParams, t_end: float, snapshot_dt: float,
        trace_every: Optional[int] = None) -> Trajectory:
    """Integrate to t_end, snapshotting every snapshot_dt and tracing the road and wall.

    Traces are taken every ``trace_every`` steps; by default every step unless
    that would exceed MAX_TRACE_SAMPLES, in which case the stride is widened.
    Time integrals of the road and wall arrays use every step regardless.
    """
    if t_end < 0 or not math.isfinite(t_end):
        raise ValueError("t_end must be finite and nonnegative")
    if not snapshot_dt > 0:
        raise ValueError("snapshot_dt must be positive")
    state = state.copy()
    g = state.grid
    dt = g.dt(params, state.has_road)
    nsteps = int(math.ceil(t_end / dt - 1e-9)) if t_end > 0 else 0
    if trace_every is None:
        trace_every = max(1, math.ceil(nsteps / MAX_TRACE_SAMPLES))
    samples = nsteps // trace_every
    traces = _Traces(g.nx, samples)
    acc_road = np.zeros(g.nx)
    acc_wall = np.zeros(g.nx)

    snap_steps = []
    k = 1
    while True:
        s = int(math.ceil(k * snapshot_dt / dt - 1e-9))
        if s > nsteps:
            break
        snap_steps.append(s)
        k += 1
    if nsteps and (not snap_steps or snap_steps[-1] != nsteps):
        snap_steps.append(nsteps)

    snapshots = [state.copy()]
    times = [state.t]
    pos = 0
    done = 0
    for target in snap_steps:
        while done < target:
            n = min(_CHUNK, target - done)
            _, written = _advance(state, params, n, acc_road, acc_wall, trace_every, traces, pos)
            pos += written
            done += n
        snapshots.append(state.copy())
        times.append(state.t)

    trace_times = dt * trace_every * np.arange(1, samples + 1)
    has_road = state.has_road
    traj = Trajectory(
        snapshot_times=times,
        snapshots=snapshots,
        trace_times=trace_times,
        road_trace=traces.road if has_road else None,
        wall_trace=traces.wall,
        road_cumulative=traces.acc_road if has_road else None,
        wall_cumulative=traces.acc_wall,
        road_integral=acc_road if has_road else None,
        wall_integral=acc_wall,
        final=state,
        dt=dt,
        trace_every=trace_every,
    )
    traj.boundary_warning = _near_boundary(traj, params)
    if traj.boundary_warning:
        traj.notes.append("front within 10h of the x-truncation boundary")
        log.warning("front reached within %d cells of the x boundary", BOUNDARY_CELLS)
    return traj


def _near_boundary(traj: Trajectory, params: ModelParams) -> bool:
    level = front_level(traj.final.mode, params)
    if level is None:
        return False
    k = BOUNDARY_CELLS
    if traj.final.transformed:
        edge = np.concatenate([traj.final.primary[:k], traj.final.primary[-k:]])
        return bool(edge.max() >= level)
    if traj.wall_trace.size == 0:
        edge = np.concatenate([traj.final.primary[:k], traj.final.primary[-k:]])
        return bool(edge.max() >= level)
    hist = traj.wall_trace
    return bool(max(hist[:, :k].max(), hist[:, -k:].max()) >= level)


class SteadyResult(NamedTuple):
    state: FieldState
    converged: bool
    residual: float


def solve_steady(state: FieldState, params: ModelParams, tol: float = DEFAULT_STEADY_TOL,
                 t_max: float = 1000.0, check_every: int = 500) -> SteadyResult:
    """Integrate until max |state_{n+1} - state_n| / dt < tol or t_max is reached."""
    if state.mode not in TRANSFORMED_MODES:
        raise ValueError("steady solves need an integrated mode (scalar_v or roadfield_uv)")
    if not tol > 0:
        raise ValueError("tol must be positive")
    state = state.copy()
    g = state.grid
    dt = g.dt(params, state.has_road)
    max_steps = int(math.ceil(t_max / dt))
    acc_r, acc_w = np.zeros(g.nx), np.zeros(g.nx)
    rate, _ = _advance(state, params, 1, acc_r, acc_w)
    taken = 1
    while rate >= tol and taken < max_steps:
        n = min(check_every, max_steps - taken)
        rate, _ = _advance(state, params, n, acc_r, acc_w)
        taken += n
    log.info("steady solve: t = %.4g, residual = %.3g", state.t, rate)
    return SteadyResult(state, bool(rate < tol), float(rate))


def write_snapshot(state: FieldState, directory, run_id: str) -> list:
    """Write ``<run_id>_t<time>.csv`` (x,y,value) and a road file (x,value) if present."""
    from pathlib import Path

    directory = Path(directory)
    g = state.grid
    stamp = f"{state.t:.6g}"
    paths = []
    X, Y = np.meshgrid(g.x, g.y, indexing="ij")
    bulk_path = directory / f"{run_id}_t{stamp}.csv"
    table = np.column_stack([X.ravel(), Y.ravel(), state.primary.ravel()])
    np.savetxt(bulk_path, table, delimiter=",", header="x,y,value", comments="", fmt="%.17g")
    paths.append(bulk_path)
    if state.has_road:
        road_path = directory / f"{run_id}_road_t{stamp}.csv"
        table = np.column_stack([g.x, state.road_field])
        np.savetxt(road_path, table, delimiter=",", header="x,value", comments="", fmt="%.17g")
        paths.append(road_path)
    return paths
