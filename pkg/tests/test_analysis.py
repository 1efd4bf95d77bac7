import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from roadsir.analysis import (
    BELOW_LEVEL,
    AnalysisError,
    FrontTrace,
    auto_window,
    far_decade,
    fit_decay,
    fit_speed,
    front_position,
    front_trace,
    integral_balance,
    inverse_speed_from_peaks,
    itot,
    mass_total,
    peak_time_map,
    region_split,
    rise_and_decay,
)
from roadsir.model import ModelParams, v_star
from roadsir.pde import GridSpec, SourceSpec, SteadyResult, init_state, run

GOLDEN = ModelParams(d=1, D=10, alpha=1, beta=2, mu=1, nu=1, s0=1)


# ---------------------------------------------------------------- fronts

def test_front_position_midpoint():
    assert front_position([1, 1, 0, 0], 0.5, [0, 1, 2, 3]) == 1.5


def test_front_position_linear_profile():
    x = np.linspace(0, 20, 401)
    prof = np.maximum(0, 1 - x / 10)
    assert front_position(prof, 0.5, x) == pytest.approx(5.0, abs=x[1] - x[0])


def test_front_position_sentinels():
    assert front_position([0.1, 0.2], 0.5, [0, 1]) == BELOW_LEVEL
    assert front_position([1.0, 0.9], 0.5, [0, 1]) == 1.0


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 2), min_size=2, max_size=40), st.floats(0.05, 1.5))
def test_front_position_matches_scan_oracle(profile, level):
    x = np.arange(len(profile), dtype=float) * 0.25
    assert front_position(profile, level, x) == oracles.front_scan(profile, level, x)


def test_front_on_simulated_history_matches_scan_oracle():
    g = GridSpec(lx=20, ly=2, h=0.5)
    src = SourceSpec("disk-indicator", (0.0, 0.0), 2.0, 1.0)
    traj = run(init_state(g, "roadfield_uv", (src, None), GOLDEN), GOLDEN, 4.0, 4.0)
    level = v_star(GOLDEN) / 2
    tr = front_trace(traj.wall_trace, traj.trace_times, level, g.x)
    for row, pos in zip(traj.wall_trace, tr.positions):
        assert pos == oracles.front_scan(row, level, g.x)


def test_front_trace_validation():
    with pytest.raises(AnalysisError):
        FrontTrace(np.array([0.0, 1.0]), np.array([1.0]))
    with pytest.raises(AnalysisError):
        FrontTrace(np.array([1.0, 1.0]), np.array([0.0, 0.0]))
    tr = FrontTrace(np.arange(3.0), np.array([-math.inf, 1.0, 2.0]))
    assert tr.reached().times.tolist() == [1.0, 2.0]


def test_fit_speed_exact_and_constant():
    t = np.linspace(0, 10, 50)
    s, r2 = fit_speed(FrontTrace(t, 2 * t))
    assert s == pytest.approx(2.0, abs=1e-12) and r2 == pytest.approx(1.0)
    s, r2 = fit_speed(FrontTrace(t, np.full(50, 3.0)))
    assert s == pytest.approx(0.0, abs=1e-12)


def test_fit_speed_uses_tail():
    t = np.linspace(0, 10, 100)
    x = np.where(t < 5, 0.0, 3 * (t - 5))
    s, _ = fit_speed(FrontTrace(t, x), tail_fraction=0.4)
    assert s == pytest.approx(3.0)


def test_fit_speed_needs_enough_samples():
    t = np.arange(12.0)
    with pytest.raises(AnalysisError):
        fit_speed(FrontTrace(t, t), tail_fraction=0.5)
    with pytest.raises(AnalysisError):
        fit_speed(FrontTrace(t, t), tail_fraction=0.0)


# ---------------------------------------------------------------- decay fits

def test_fit_decay_synthetic():
    x = np.linspace(0, 60, 241)
    prof = 0.7 + np.exp(-0.3 * x)
    assert fit_decay(prof, 0.7, x, (10, 40)) == pytest.approx(0.3, abs=1e-6)
    assert fit_decay(prof, 0.7, x) == pytest.approx(0.3, abs=1e-6)


def test_auto_window_band():
    x = np.linspace(0, 60, 601)
    prof = np.exp(-0.5 * x)
    lo, hi = auto_window(prof, 0.0, x)
    assert math.exp(-0.5 * lo) <= 1e-2 + 1e-12
    assert math.exp(-0.5 * hi) >= 1e-6 - 1e-12


def test_fit_decay_rejects_bad_excess():
    x = np.linspace(0, 10, 11)
    with pytest.raises(AnalysisError):
        fit_decay(np.exp(-x), 0.5, x, (2, 8))
    with pytest.raises(AnalysisError):
        fit_decay(1 + np.exp(x - 10), 1.0, x, (2, 8))
    with pytest.raises(AnalysisError):
        fit_decay(1 + np.exp(-x), 1.0, x, "manual")


# ---------------------------------------------------------------- peak times

def test_peak_time_map_interpolates():
    hist = np.array([[0.2, 0.0, 0.0], [0.6, 0.2, 0.0], [1.0, 0.6, 0.1]])
    tau = peak_time_map(hist, [1.0, 2.0, 3.0], 0.8)
    assert tau[0] == pytest.approx(1.5)
    assert tau[1] == pytest.approx(2.5)
    assert math.isnan(tau[2])


def test_peak_time_from_zero_start():
    tau = peak_time_map(np.array([[1.0]]), [2.0], 1.0)
    assert tau[0] == pytest.approx(1.0)


def test_far_decade_and_inverse_speed():
    x = np.linspace(-50, 50, 201)
    tau = np.abs(x) / 4.0 + 1.0
    tau[np.abs(x) > 40] = np.nan
    m = far_decade(tau, x)
    assert x[m].max() == 40 and x[m].min() == pytest.approx(4.0)
    assert inverse_speed_from_peaks(tau, x) == pytest.approx(0.25)


def test_rise_and_decay():
    t = np.linspace(0, 20, 400)
    pulse = np.exp(-((t - 8) ** 2))
    assert rise_and_decay(pulse)
    assert not rise_and_decay(np.minimum(t, 1.0))
    assert not rise_and_decay(np.zeros(5))


# ---------------------------------------------------------------- I_tot and regions

def test_itot_values():
    assert itot(0.0, GOLDEN) == 0.0
    assert itot(200.0, GOLDEN) == pytest.approx(1.0)
    vs = v_star(GOLDEN)
    assert itot(vs, GOLDEN) == pytest.approx(1 - math.exp(-2 * vs), rel=1e-15)
    with pytest.raises(AnalysisError):
        itot(np.array([-1.0]), GOLDEN)


def test_region_split_identical_fields_empty():
    g = GridSpec(lx=4, ly=2, h=0.5)
    v = np.random.default_rng(0).random((g.nx, g.ny))
    rep = region_split(v, v, 1e-6, g)
    assert not rep.e_plus_mask.any() and not rep.e_minus_mask.any()
    assert rep.e_plus_area == 0 and rep.e_plus_bbox is None


def test_region_split_areas_and_disjointness():
    g = GridSpec(lx=4, ly=2, h=0.5)
    rng = np.random.default_rng(1)
    a, b = rng.random((g.nx, g.ny)), rng.random((g.nx, g.ny))
    rep = region_split(a, b, 0.1, g)
    assert not (rep.e_plus_mask & rep.e_minus_mask).any()
    assert rep.e_plus_area == 0.25 * rep.e_plus_mask.sum()
    assert rep.e_minus_area == 0.25 * rep.e_minus_mask.sum()
    with pytest.raises(AnalysisError):
        region_split(a[:-1], b[:-1], 0.1, g)


# ---------------------------------------------------------------- integral identities

def test_integral_balance_zero_fields():
    g = GridSpec(lx=4, ly=2, h=0.5)
    s = init_state(g, "roadfield_uv", (SourceSpec(), None), GOLDEN)
    assert integral_balance(SteadyResult(s, True, 0.0), GOLDEN) == (0.0, 0.0)


def test_integral_balance_rejects_unconverged_or_wrong_mode():
    g = GridSpec(lx=4, ly=2, h=0.5)
    s = init_state(g, "roadfield_uv", (SourceSpec(), None), GOLDEN)
    with pytest.raises(AnalysisError):
        integral_balance(SteadyResult(s, False, 1.0), GOLDEN)
    with pytest.raises(AnalysisError):
        integral_balance(init_state(g, "scalar_v", (SourceSpec(), None), GOLDEN), GOLDEN)


def test_mass_total_zero_and_mode():
    g = GridSpec(lx=4, ly=2, h=0.5)
    assert mass_total(init_state(g, "roadfield_uv", (SourceSpec(), None), GOLDEN)) == 0.0
    with pytest.raises(AnalysisError):
        mass_total(init_state(g, "scalar_v", (SourceSpec(), None), GOLDEN))


def test_mass_total_weights():
    g = GridSpec(lx=1, ly=1, h=0.5)
    s = init_state(g, "roadfield_uv", (SourceSpec(), None), GOLDEN)
    s.bulk["v"][:] = 1.0
    s.road["u"][:] = 1.0
    # uniform fields integrate to the exact area and length
    assert mass_total(s) == pytest.approx(2.0 * 1.0 + 2.0)
