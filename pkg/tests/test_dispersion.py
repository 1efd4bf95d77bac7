import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import oracles
from roadsir.dispersion import (
    ConvergenceError,
    DispersionTriple,
    SpeedQuery,
    c_sirt,
    decay_exponents,
    decay_exponents_perturbed,
    omega_reduced,
    reduced_speed,
    speed_admissible,
)
from roadsir.model import ModelError, ModelParams, NoSpreadingError, c_sir, f_prime, reduce, v_star


def make(**kw):
    base = dict(d=1.0, D=10.0, alpha=1.0, beta=2.0, mu=1.0, nu=1.0, s0=1.0)
    base.update(kw)
    return ModelParams(**base)


GOLDEN = make()
C_SIRT_GOLDEN = 3.206356681883335
A_STAR = 0.20640937030701745
B_STAR = 0.7423068313636554
GAMMA_STAR = 0.5739517184911269
OMEGA_GOLDEN = {
    0.0: 0.5,
    0.25: 0.48700397300490295,
    0.5: 0.4621637209183973,
    1.0: 0.41421356237333384,
    2.0: 0.34659957192798174,
    5.0: 0.24964674885541172,
    10.0: 0.18566681975426036,
}


# ---------------------------------------------------------------- decay exponents

def test_decay_exponents_golden():
    t = decay_exponents(GOLDEN)
    assert (t.a, t.b, t.gamma) == pytest.approx((A_STAR, B_STAR, GAMMA_STAR), rel=1e-10)


def test_decay_exponents_match_high_precision_oracle():
    r2 = -float(oracles.f_prime_hp(oracles.v_star_hp(1, 2, 1), 1, 2, 1))
    a, b, gamma = oracles.decay_hp(1, 10, 1, 1, r2)
    t = decay_exponents(GOLDEN)
    assert t.a == pytest.approx(a, rel=1e-9)
    assert t.b == pytest.approx(b, rel=1e-10)
    assert t.gamma == pytest.approx(gamma, rel=1e-10)
    assert t.a == pytest.approx(0.206, abs=1e-3)
    assert t.b == pytest.approx(0.742, abs=1e-3)


def test_decay_exponents_at_threshold():
    p = make(beta=1.0, mu=2.0, nu=0.5)
    assert decay_exponents(p) == DispersionTriple(0.0, 0.0, 4.0)


def test_decay_exponents_below_threshold_use_zero_plateau():
    p = make(beta=0.5)
    t = decay_exponents(p)
    r2 = -f_prime(0.0, p) / p.d
    assert t.a ** 2 + t.b ** 2 == pytest.approx(r2, rel=1e-10)
    assert 0 < t.a < math.sqrt(r2)


def test_decay_perturbed_eps_zero_is_unperturbed_system():
    zeta = 0.8
    t = decay_exponents_perturbed(GOLDEN, zeta, 0.0)
    a, b, gamma = oracles.decay_hp(1, 10, 1, 1, zeta)
    assert (t.a, t.b, t.gamma) == pytest.approx((a, b, gamma), rel=1e-10)


def test_decay_perturbed_oracle_value():
    t = decay_exponents_perturbed(GOLDEN, 0.6, 0.1)
    a, b, gamma = oracles.decay_hp(1, 10, 1, 1, 0.6, eps=0.1)
    assert (t.a, t.b, t.gamma) == pytest.approx((a, b, gamma), rel=1e-10)


def test_decay_perturbed_converges_along_halving_sequence():
    base = decay_exponents(GOLDEN)
    floor = -f_prime(v_star(GOLDEN), GOLDEN)
    gaps = []
    for k in range(1, 12):
        s = 2.0 ** -k
        t = decay_exponents_perturbed(GOLDEN, floor + s, s)
        gaps.append(max(abs(t.a - base.a), abs(t.b - base.b), abs(t.gamma - base.gamma)))
    assert all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-3


@pytest.mark.parametrize("zeta,eps", [(0.5, 0.1), (0.6, -0.1), (0.6, 1.0)])
def test_decay_perturbed_rejects_out_of_range(zeta, eps):
    with pytest.raises(ModelError):
        decay_exponents_perturbed(GOLDEN, zeta, eps)


# ---------------------------------------------------------------- speed predicate

def test_speed_query_rejects_nonpositive_speed():
    with pytest.raises(ModelError):
        SpeedQuery(0.0, GOLDEN)
    with pytest.raises(ModelError):
        SpeedQuery(-1.0, GOLDEN)


def test_admissible_requires_spreading():
    with pytest.raises(NoSpreadingError):
        speed_admissible(SpeedQuery(1.0, make(beta=0.9)))


def test_below_c_sir_never_admissible():
    for c in (0.5, 1.0, 1.9, 1.999):
        assert not speed_admissible(SpeedQuery(c, GOLDEN))


def test_large_speed_admissible_with_fast_road():
    assert speed_admissible(SpeedQuery(100 * c_sir(GOLDEN), GOLDEN))


@pytest.mark.parametrize("D", [0.5, 1.0, 1.5, 2.0])
def test_slow_road_admissible_just_above_c_sir(D):
    p = make(D=D)
    assert speed_admissible(SpeedQuery(c_sir(p) * (1 + 1e-6), p))


# ---------------------------------------------------------------- c_SIR^T

def test_c_sirt_golden():
    assert c_sirt(GOLDEN) == pytest.approx(C_SIRT_GOLDEN, rel=1e-9)
    assert c_sirt(GOLDEN) > 2.0


def test_c_sirt_matches_minmax_oracle():
    ref = oracles.c_sirt_minmax(1, 10, 1, 2, 1, 1)
    assert c_sirt(GOLDEN) == pytest.approx(ref, rel=1e-8)


def test_c_sirt_equals_c_sir_for_slow_road():
    assert c_sirt(make(D=1.5)) == pytest.approx(2.0, abs=1e-6)


def test_c_sirt_nondecreasing_in_D():
    speeds = [c_sirt(make(D=D)) for D in (2.0, 4.0, 8.0, 16.0)]
    assert all(b >= a for a, b in zip(speeds, speeds[1:]))
    assert speeds[-1] > speeds[0]


def test_c_sirt_requires_spreading():
    with pytest.raises(NoSpreadingError):
        c_sirt(make(beta=1.0))


# ---------------------------------------------------------------- reduced curve

@pytest.mark.parametrize("lam", sorted(OMEGA_GOLDEN))
def test_omega_golden(lam):
    assert omega_reduced(lam) == pytest.approx(OMEGA_GOLDEN[lam], abs=1e-10)


@pytest.mark.parametrize("lam", [0.25, 1.0, 5.0])
def test_omega_matches_minmax_oracle(lam):
    assert omega_reduced(lam) == pytest.approx(oracles.omega_minmax(lam), rel=1e-7)


def test_omega_at_one_is_tangency_value():
    # Gamma1 and Gamma2 touch at b = 1/2, a = 1 when w = sqrt(2) - 1
    assert omega_reduced(1.0) == pytest.approx(math.sqrt(2) - 1, abs=1e-11)


def test_omega_limits():
    assert omega_reduced(0.0) == pytest.approx(0.5, abs=1e-12)
    w1 = omega_reduced(1.0)
    assert 0 < w1 < 0.5
    assert omega_reduced(1e3) < 0.05


def test_omega_rejects_negative():
    with pytest.raises(ModelError):
        omega_reduced(-0.1)
    with pytest.raises(ModelError):
        omega_reduced(math.inf)


def test_reduced_speed_oracle_values():
    assert reduced_speed(0.0, 0.0, 1.0) == pytest.approx(oracles.reduced_minmax(0.0, 0.0, 1.0), rel=1e-8)
    assert reduced_speed(0.5, 2.0, 10.0) == pytest.approx(oracles.reduced_minmax(0.5, 2.0, 10.0), rel=1e-8)


@pytest.mark.parametrize("lam", [0.0, 0.5, 1.0])
def test_reduced_speed_approaches_limit_curve(lam):
    assert reduced_speed(lam, 1e-3, 1e4) == pytest.approx(omega_reduced(lam), rel=0.02)


@pytest.mark.parametrize("args", [(-1, 0, 1), (0, -1, 1), (0, 0, 0), (0, 0, math.nan)])
def test_reduced_speed_rejects_bad_args(args):
    with pytest.raises(ModelError):
        reduced_speed(*args)


def test_cross_path_identity_golden():
    red = reduce(GOLDEN)
    w = reduced_speed(red.lam, red.rho, red.dd)
    assert c_sirt(GOLDEN) == pytest.approx(math.sqrt(red.dd) * red.w_sir * w, rel=1e-6)


# ---------------------------------------------------------------- properties

positive = st.floats(min_value=0.1, max_value=10.0)


@st.composite
def spreading_params(draw):
    alpha = draw(positive)
    s0 = draw(positive)
    r0 = draw(st.floats(min_value=1.05, max_value=6.0))
    return ModelParams(d=draw(positive), D=draw(st.floats(0.1, 50.0)), alpha=alpha,
                       beta=r0 * alpha / s0, mu=draw(positive), nu=draw(positive), s0=s0)


@settings(max_examples=60, deadline=None)
@given(spreading_params(), st.lists(st.floats(0.5, 6.0), min_size=2, max_size=6))
def test_admissibility_monotone_in_c(p, factors):
    cs = c_sir(p)
    ladder = sorted(f * cs for f in factors)
    flags = [speed_admissible(SpeedQuery(c, p)) for c in ladder]
    first = flags.index(True) if True in flags else len(flags)
    assert all(flags[first:])


@settings(max_examples=40, deadline=None)
@given(spreading_params())
def test_c_sirt_at_least_c_sir(p):
    ct, cs = c_sirt(p), c_sir(p)
    assert ct >= cs
    if p.D <= 2 * p.d:
        assert ct == pytest.approx(cs, rel=1e-6)


@settings(max_examples=40, deadline=None)
@given(spreading_params())
def test_c_sirt_is_admissibility_threshold(p):
    ct = c_sirt(p)
    assert speed_admissible(SpeedQuery(ct * (1 + 1e-8), p))
    if ct > c_sir(p) * (1 + 1e-6):
        assert not speed_admissible(SpeedQuery(ct * (1 - 1e-6), p))


@settings(max_examples=60, deadline=None)
@given(spreading_params())
def test_decay_triple_inside_disk(p):
    t = decay_exponents(p)
    r2 = -f_prime(v_star(p), p) / p.d
    assert t.a > 0 and t.b > 0 and t.gamma > 0
    assert t.a ** 2 + t.b ** 2 == pytest.approx(r2, rel=1e-10)
    assert t.gamma == pytest.approx(p.mu / (p.d * t.b + p.nu), rel=1e-10)
    assert t.a < math.sqrt(r2) and t.b < math.sqrt(r2)


def test_omega_nonincreasing_and_bounded():
    grid = [0, 0.25, 0.5, 1, 2, 5, 10]
    vals = [omega_reduced(lam) for lam in grid]
    assert all(v <= 0.5 for v in vals)
    assert all(b <= a for a, b in zip(vals, vals[1:]))


@settings(max_examples=10, deadline=None)
@given(spreading_params())
def test_cross_path_identity(p):
    assume(p.D > 2 * p.d)
    red = reduce(p)
    w = reduced_speed(red.lam, red.rho, red.dd)
    scale = math.sqrt(p.d * p.alpha) * math.sqrt(red.dd) * red.w_sir
    assert c_sirt(p) == pytest.approx(scale * w, rel=1e-6)


def test_convergence_error_is_runtime_error():
    assert issubclass(ConvergenceError, RuntimeError)
