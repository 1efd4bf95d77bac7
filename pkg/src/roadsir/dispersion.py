"""Algebraic systems for decay exponents and spreading speeds.

Speeds are found as the least c for which the exponential ansatz
``e^{-a(x - ct)} (1, gamma e^{-b y})`` is a supersolution of the linearised
road-field system, i.e. both

    (R)  -D a^2 + c a + mu d b / (nu + d b) >= 0
    (F)  c a - d (a^2 + b^2) >= alpha (R0 - 1)

hold for some a, b > 0. (F) confines a to ``[a_lo(b), a_hi(b)]`` and (R) to
``a <= a_road(b)``, so feasibility is ``max_b a_road(b) - a_lo(b) >= 0``. The
margin is concave in b (concave minus the convex lower arc of an ellipse),
which makes a scan followed by golden-section refinement reliable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import ModelError, ModelParams, NoSpreadingError, c_sir, f_prime, v_star

ROOT_TOL = 1e-12
SPEED_RTOL = 1e-9
MAX_ITER = 200
SCAN_POINTS = 512
SCAN_REFINE = 8
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class DispersionTriple:
    a: float
    b: float
    gamma: float


@dataclass(frozen=True)
class SpeedQuery:
    c: float
    params: ModelParams

    def __post_init__(self) -> None:
        if not self.c > 0:
            raise ModelError(f"speed must be positive, got {self.c!r}")


def _bisect_root(g: Callable[[float], float], lo: float, hi: float, tol: float = ROOT_TOL) -> float:
    """Root of g on [lo, hi] assuming g(lo) > 0 >= g(hi)."""
    for _ in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol:
            return 0.5 * (lo + hi)
    raise ConvergenceError("root bisection hit the iteration cap")


def _least_admissible(pred: Callable[[float], bool], lo: float, hi: float, rtol: float) -> float:
    """Least x in (lo, inf) with pred(x), for pred monotone nondecreasing in x."""
    for _ in range(MAX_ITER):
        if pred(hi):
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise ConvergenceError("no admissible upper bracket found")
    for _ in range(MAX_ITER):
        if hi - lo <= rtol * hi:
            return hi
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
    raise ConvergenceError("speed bisection hit the iteration cap")


def _golden_max(g: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Maximum value of a unimodal g on [lo, hi]."""
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    g1, g2 = g(x1), g(x2)
    best = max(g(lo), g(hi), g1, g2)
    for _ in range(MAX_ITER):
        if hi - lo <= tol:
            break
        if g1 < g2:
            lo, x1, g1 = x1, x2, g2
            x2 = lo + _GOLDEN * (hi - lo)
            g2 = g(x2)
        else:
            hi, x2, g2 = x2, x1, g1
            x1 = hi - _GOLDEN * (hi - lo)
            g1 = g(x1)
        best = max(best, g1, g2)
    return best


def _max_margin(margin: Callable[[float], float], b_max: float) -> float:
    """Max of a concave margin over (0, b_max]: geometric scan then local refinement."""
    grid = np.geomspace(1e-9 * b_max, b_max, SCAN_POINTS)
    values = np.array([margin(b) for b in grid])
    k = int(np.argmax(values))
    best = float(values[k])
    if best >= 0:
        return best
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, SCAN_POINTS - 1)]
    fine = np.linspace(lo, hi, 2 * SCAN_REFINE + 1)
    fvals = np.array([margin(b) for b in fine])
    j = int(np.argmax(fvals))
    best = max(best, float(fvals[j]))
    if best >= 0:
        return best
    lo = fine[max(j - 1, 0)]
    hi = fine[min(j + 1, fine.size - 1)]
    return max(best, _golden_max(margin, lo, hi, 1e-14 * b_max))


def _field_radius_sq(params: ModelParams) -> float:
    """-f'(v_*)/d, with v_* := 0 when R0 <= 1."""
    v = v_star(params) if params.r0 > 1 else 0.0
    return -f_prime(v, params) / params.d


def decay_exponents(params: ModelParams) -> DispersionTriple:
    """Positive solution of ``D a^2 = mu d b / (d b + nu)``, ``a^2 + b^2 = -f'(v_*)/d``."""
    if params.r0 == 1.0:
        return DispersionTriple(0.0, 0.0, params.mu / params.nu)
    return _solve_decay(params, _field_radius_sq(params), 0.0)


def decay_exponents_perturbed(params: ModelParams, zeta: float, eps: float) -> DispersionTriple:
    """Same elimination with radius^2 = zeta/d and the strip-subsolution road relation."""
    floor = -f_prime(v_star(params) if params.r0 > 1 else 0.0, params)
    if not zeta > floor:
        raise ModelError(f"zeta must exceed -f'(v_*) = {floor:.6g}, got {zeta!r}")
    if not 0 <= eps < 1:
        raise ModelError(f"eps must lie in [0, 1), got {eps!r}")
    return _solve_decay(params, zeta / params.d, eps)


def _solve_decay(params: ModelParams, r2: float, eps: float) -> DispersionTriple:
    d, D, mu, nu = params.d, params.D, params.mu, params.nu
    p, q = 1.0 + eps, 1.0 - eps

    def g(b: float) -> float:
        return D * (r2 - b * b) - mu * d * b * p / (d * b * p + nu * q)

    b = _bisect_root(g, 0.0, math.sqrt(r2))
    a = math.sqrt(max(r2 - b * b, 0.0))
    return DispersionTriple(a, b, mu / (d * b * p + nu * q))


def _lower_root(c: float, d: float, k: float) -> float:
    """Smaller root of ``d a^2 - c a + k = 0`` in cancellation-free form."""
    return 2.0 * k / (c + math.sqrt(max(c * c - 4.0 * d * k, 0.0)))


def speed_admissible(q: SpeedQuery) -> bool:
    """Whether the relaxed plane-wave system (R), (F) has a solution a, b > 0 at speed c."""
    p, c = q.params, q.c
    if not p.r0 > 1:
        raise NoSpreadingError("admissibility is only defined for R0 > 1")
    growth = p.alpha * (p.r0 - 1.0)
    slack = c * c / (4.0 * p.d) - growth
    if slack <= 0:
        return False
    b_max = math.sqrt(slack / p.d)
    d, D, mu, nu = p.d, p.D, p.mu, p.nu

    def margin(b: float) -> float:
        a_lo = _lower_root(c, d, growth + d * b * b)
        a_road = (c + math.sqrt(c * c + 4.0 * D * mu * d * b / (nu + d * b))) / (2.0 * D)
        return a_road - a_lo

    return _max_margin(margin, b_max) >= 0


def c_sirt(params: ModelParams) -> float:
    """Spreading speed along the road: least admissible c, never below c_SIR."""
    base = c_sir(params)
    speed = _least_admissible(
        lambda c: speed_admissible(SpeedQuery(c, params)), base, 2.0 * base, SPEED_RTOL
    )
    return max(speed, base)


def _check_lambda(lam: float) -> None:
    if not (lam >= 0 and math.isfinite(lam)):
        raise ModelError(f"lambda must be finite and nonnegative, got {lam!r}")


def omega_reduced(lam: float) -> float:
    """Limit reduced speed: least w with ``(w + sqrt(w^2 + 4 lam b))/2 >= (1/4 + b^2)/w`` for some b >= 0."""
    _check_lambda(lam)

    def gap(w: float, b: float) -> float:
        return (0.25 + b * b) / w - 0.5 * (w + math.sqrt(w * w + 4.0 * lam * b))

    def admissible(w: float) -> bool:
        if gap(w, 0.0) <= 0:
            return True
        if lam == 0:
            return False
        b_hi = 1.0
        while gap(w, b_hi) <= gap(w, 0.5 * b_hi) or b_hi < 1.0:
            b_hi *= 2.0
        grid = np.concatenate(([0.0], np.geomspace(1e-9 * b_hi, b_hi, SCAN_POINTS)))
        vals = np.array([gap(w, b) for b in grid])
        k = int(np.argmin(vals))
        if vals[k] <= 0:
            return True
        lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
        return -_golden_max(lambda b: -gap(w, b), lo, hi, 1e-14 * b_hi) <= 0

    lo, hi = 0.0, 0.5
    for _ in range(MAX_ITER):
        if hi - lo <= ROOT_TOL:
            return hi
        mid = 0.5 * (lo + hi)
        if admissible(mid):
            hi = mid
        else:
            lo = mid
    raise ConvergenceError("omega bisection hit the iteration cap")


def reduced_speed(lam: float, rho: float, dd: float) -> float:
    """Least reduced speed w for the finite-(dd, rho) relaxed system.

    (1) -a^2 + w a + lam b / (1 + rho b) >= 0
    (2) w a - a^2/dd - b^2 >= 1/4
    """
    _check_lambda(lam)
    if not (rho >= 0 and math.isfinite(rho)):
        raise ModelError(f"rho must be finite and nonnegative, got {rho!r}")
    if not (dd > 0 and math.isfinite(dd)):
        raise ModelError(f"dd must be finite and positive, got {dd!r}")
    inv = 1.0 / dd

    def admissible(w: float) -> bool:
        slack = dd * w * w / 4.0 - 0.25
        if slack <= 0:
            return False

        def margin(b: float) -> float:
            a_lo = _lower_root(w, inv, 0.25 + b * b)
            a_road = 0.5 * (w + math.sqrt(w * w + 4.0 * lam * b / (1.0 + rho * b)))
            return a_road - a_lo

        return _max_margin(margin, math.sqrt(slack)) >= 0

    base = 1.0 / math.sqrt(dd)
    return max(_least_admissible(admissible, base, 2.0 * base, SPEED_RTOL), base)
