"""Observables read off trajectories and steady states: fronts and their
speeds, exponential decay rates, peak times, cumulative infection, the
regions where the road helps or hurts, and discrete integral identities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .model import ModelParams, evaluate_f
from .pde import FieldState, GridSpec, SourceSpec, SteadyResult

BELOW_LEVEL = -math.inf
MIN_TAIL_SAMPLES = 10
AUTO_WINDOW = (1e-6, 1e-2)


class AnalysisError(ValueError):
    pass


@dataclass(frozen=True)
class FrontTrace:
    times: np.ndarray
    positions: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        x = np.asarray(self.positions, dtype=float)
        if t.shape != x.shape or t.ndim != 1:
            raise AnalysisError("times and positions must be 1-D and of equal length")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise AnalysisError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "positions", x)

    def reached(self) -> "FrontTrace":
        """Samples taken once the front exists (finite positions)."""
        keep = np.isfinite(self.positions)
        return FrontTrace(self.times[keep], self.positions[keep])


@dataclass
class RegionReport:
    e_plus_mask: np.ndarray
    e_minus_mask: np.ndarray
    e_plus_area: float
    e_minus_area: float
    tol: float
    e_plus_bbox: Optional[tuple] = None
    e_minus_bbox: Optional[tuple] = None


def front_position(profile, level: float, coords) -> float:
    """Largest coordinate where ``profile`` crosses ``level``, linearly interpolated.

    Returns BELOW_LEVEL if the profile never reaches the level, and the last
    coordinate if the profile is still above it there.
    """
    p = np.asarray(profile, dtype=float)
    x = np.asarray(coords, dtype=float)
    above = np.flatnonzero(p >= level)
    if above.size == 0:
        return BELOW_LEVEL
    i = above[-1]
    if i == p.size - 1:
        return float(x[-1])
    return float(x[i] + (p[i] - level) / (p[i] - p[i + 1]) * (x[i + 1] - x[i]))


def front_trace(history: np.ndarray, times, level: float, coords) -> FrontTrace:
    """Front position of each row of a (time, x) history."""
    positions = np.array([front_position(row, level, coords) for row in history])
    return FrontTrace(np.asarray(times, dtype=float), positions)


def fit_speed(trace: FrontTrace, tail_fraction: float = 0.5) -> tuple:
    """Least-squares slope of position vs time over the last tail_fraction of samples.

    Returns (speed, r_squared).
    """
    if not 0 < tail_fraction <= 1:
        raise AnalysisError("tail_fraction must lie in (0, 1]")
    n = trace.times.size
    k = int(math.ceil(tail_fraction * n))
    t = trace.times[n - k:]
    x = trace.positions[n - k:]
    if k < MIN_TAIL_SAMPLES or not np.all(np.isfinite(x)):
        raise AnalysisError(f"need at least {MIN_TAIL_SAMPLES} finite samples in the tail window")
    slope, intercept = np.polyfit(t, x, 1)
    resid = x - (slope * t + intercept)
    ss_tot = float(np.sum((x - x.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(slope), r2


def auto_window(profile, limit: float, coords, band: tuple = AUTO_WINDOW, x_min: float = 0.0) -> tuple:
    """Window of coordinates >= x_min where the excess over ``limit`` lies in band * max."""
    p = np.asarray(profile, dtype=float)
    x = np.asarray(coords, dtype=float)
    side = x >= x_min
    excess = p[side] - limit
    top = excess.max()
    if not top > 0:
        raise AnalysisError("profile never exceeds its limit")
    inside = (excess >= band[0] * top) & (excess <= band[1] * top)
    if inside.sum() < 2:
        raise AnalysisError("auto-window holds fewer than two nodes")
    xs = x[side][inside]
    return float(xs.min()), float(xs.max())


def fit_decay(profile, limit: float, coords, window: Union[tuple, str] = "auto") -> float:
    """Exponential rate of approach of ``profile`` to ``limit`` on a window.

    Minus the least-squares slope of log(profile - limit) against x.
    """
    p = np.asarray(profile, dtype=float)
    x = np.asarray(coords, dtype=float)
    if isinstance(window, str):
        if window != "auto":
            raise AnalysisError(f"unknown window {window!r}")
        window = auto_window(p, limit, x)
    x1, x2 = window
    sel = (x >= x1 - 1e-12) & (x <= x2 + 1e-12)
    if sel.sum() < 2:
        raise AnalysisError("window holds fewer than two nodes")
    excess = p[sel] - limit
    if np.any(excess <= 0):
        raise AnalysisError("excess over the limit is not positive on the window")
    if np.any(np.diff(excess) >= 0):
        raise AnalysisError("excess is not strictly decreasing on the window")
    slope = np.polyfit(x[sel], np.log(excess), 1)[0]
    return float(-slope)


def peak_time_map(history: np.ndarray, times, v_star_value: float) -> np.ndarray:
    """First time each node's potential reaches v_*/2, linear in t; NaN if never.

    ``history`` rows are samples at ``times`` (all > 0); the potential is taken
    to be 0 at t = 0.
    """
    level = 0.5 * v_star_value
    h = np.vstack([np.zeros((1, history.shape[1])), np.asarray(history, dtype=float)])
    t = np.concatenate([[0.0], np.asarray(times, dtype=float)])
    tau = np.full(h.shape[1], np.nan)
    hit = h >= level
    crossed = hit.any(axis=0)
    first = np.argmax(hit, axis=0)
    for i in np.flatnonzero(crossed):
        k = first[i]
        if k == 0:
            tau[i] = 0.0
            continue
        h0, h1 = h[k - 1, i], h[k, i]
        tau[i] = t[k - 1] + (level - h0) / (h1 - h0) * (t[k] - t[k - 1])
    return tau


def far_decade(tau: np.ndarray, coords) -> np.ndarray:
    """Mask of crossed nodes with x in [x_far/10, x_far], x_far the farthest crossed x > 0."""
    x = np.asarray(coords, dtype=float)
    ok = np.isfinite(tau) & (x > 0)
    if not ok.any():
        return ok
    x_far = x[ok].max()
    return ok & (x >= x_far / 10.0)


def inverse_speed_from_peaks(tau: np.ndarray, coords, mask: Optional[np.ndarray] = None) -> float:
    """Least-squares slope of tau against x over ``mask`` (default: the far decade)."""
    x = np.asarray(coords, dtype=float)
    mask = far_decade(tau, x) if mask is None else mask
    if mask.sum() < 2:
        raise AnalysisError("fewer than two crossed nodes")
    return float(np.polyfit(x[mask], tau[mask], 1)[0])


def rise_and_decay(series, frac: float = 1e-3) -> bool:
    """Whether a node's time series starts below frac*peak, peaks, and falls back below it."""
    s = np.asarray(series, dtype=float)
    peak = s.max()
    if not peak > 0:
        return False
    k = int(np.argmax(s))
    floor = frac * peak
    return bool(s[0] < floor and s[-1] < floor and 0 < k < s.size - 1)


def itot(v_field, params: ModelParams):
    """Total ever infected, ``S0 (1 - e^{-beta v})``."""
    v = np.asarray(v_field, dtype=float)
    if np.any(v < 0):
        raise AnalysisError("v must be nonnegative")
    out = -params.s0 * np.expm1(-params.beta * v)
    return float(out) if out.ndim == 0 else out


def _bbox(mask: np.ndarray, grid: GridSpec) -> Optional[tuple]:
    if not mask.any():
        return None
    ii, jj = np.nonzero(mask)
    x, y = grid.x, grid.y
    return float(x[ii.min()]), float(x[ii.max()]), float(y[jj.min()]), float(y[jj.max()])


def region_split(v_road, v_plain, tol: float, grid: GridSpec) -> RegionReport:
    """Nodes where the road raises (E+) or lowers (E-) the steady potential beyond tol."""
    a = np.asarray(v_road, dtype=float)
    b = np.asarray(v_plain, dtype=float)
    if a.shape != b.shape or a.shape != (grid.nx, grid.ny):
        raise AnalysisError("fields are not on the same grid")
    plus = a > b + tol
    minus = a < b - tol
    cell = grid.h ** 2
    return RegionReport(
        e_plus_mask=plus, e_minus_mask=minus,
        e_plus_area=cell * int(plus.sum()), e_minus_area=cell * int(minus.sum()),
        tol=tol, e_plus_bbox=_bbox(plus, grid), e_minus_bbox=_bbox(minus, grid),
    )


def integral_balance(steady: Union[SteadyResult, FieldState], params: ModelParams,
                     i0: Optional[SourceSpec] = None) -> tuple:
    """Residuals of the integrated steady road-field identities, normalised by the source mass.

    bulk: h^2 sum(f(v) + I0) - h sum(nu v(., 0) - mu u)
    road: h sum(nu v(., 0) - mu u)
    Both use plain node sums.
    """
    if isinstance(steady, SteadyResult):
        if not steady.converged:
            raise AnalysisError("steady state did not converge")
        state = steady.state
    else:
        state = steady
    if state.mode != "roadfield_uv":
        raise AnalysisError("integral balance needs a roadfield_uv state")
    g = state.grid
    src = state.i0 if i0 is None else i0.sample_bulk(g)
    v, u = state.bulk["v"], state.road["u"]
    exchange = g.h * float(np.sum(params.nu * v[:, 0] - params.mu * u))
    bulk = g.h ** 2 * float(np.sum(evaluate_f(v, params) + src)) - exchange
    norm = g.h ** 2 * float(np.sum(src))
    if norm == 0:
        norm = 1.0
    return bulk / norm, exchange / norm


def _trapezoid_weights(n: int) -> np.ndarray:
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    return w


def mass_total(state: FieldState) -> float:
    """h * sum(road) + h^2 * sum(bulk) with half weights on boundary nodes.

    Those are the control-volume areas of the node-centred scheme, for which
    pure diffusion plus exchange conserves this total exactly.
    """
    if state.mode not in ("roadfield_uv", "sirt_direct"):
        raise AnalysisError("mass_total needs a mode with a road")
    g = state.grid
    wx, wy = _trapezoid_weights(g.nx), _trapezoid_weights(g.ny)
    bulk = state.primary
    road = state.road_field
    return g.h * float(wx @ road) + g.h ** 2 * float(wx @ bulk @ wy)
