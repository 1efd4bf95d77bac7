"""Model parameters, the KPP nonlinearity of the integrated SIR system, and
the non-dimensional parameter set used to compare road-enhanced speeds.

The cumulative-infection potential ``v = int_0^t I ds`` obeys
``v_t - d Lap v = f(v) + I0`` with ``f(v) = S0 (1 - exp(-beta v)) - alpha v``.
Everything here is a pure function of a :class:`ModelParams` instance.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

V_STAR_TOL = 1e-12
_MAX_BISECT = 200

PARAM_NAMES = ("d", "D", "alpha", "beta", "mu", "nu", "s0")


class ModelError(ValueError):
    """Invalid parameters or a quantity that does not exist for them."""


class NoSpreadingError(ModelError):
    """Raised when a spreading quantity is requested with R0 <= 1."""


@dataclass(frozen=True)
class ModelParams:
    """The seven dimensional parameters of the SIR / road-field systems.

    d, D    bulk and road diffusivities (length^2/time)
    alpha   recovery rate (1/time)
    beta    transmission rate (1/(density time))
    mu      road-to-field exchange rate (1/time)
    nu      field-to-road exchange rate (length/time)
    s0      initial susceptible density

    Strict positivity is enforced unless ``degenerate=True``; the PDE
    integrator uses degenerate instances (no exchange, no reaction) for
    conservation and heat-kernel checks.
    """

    d: float
    D: float
    alpha: float
    beta: float
    mu: float
    nu: float
    s0: float
    degenerate: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        for name in PARAM_NAMES:
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ModelError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise ModelError(f"{name} must be finite, got {value!r}")
            if self.degenerate:
                if value < 0:
                    raise ModelError(f"{name} must be nonnegative, got {value!r}")
            elif value <= 0:
                raise ModelError(f"{name} must be strictly positive, got {value!r}")
        if self.degenerate and self.d <= 0:
            raise ModelError("d must be strictly positive")

    @classmethod
    def relaxed(cls, **kwargs: float) -> "ModelParams":
        """Parameters that only need to be nonnegative (d > 0 still required)."""
        return cls(**kwargs, degenerate=True)

    @property
    def r0(self) -> float:
        if self.alpha == 0:
            return math.inf if self.s0 * self.beta > 0 else 0.0
        return self.s0 * self.beta / self.alpha

    def as_dict(self) -> dict:
        out = asdict(self)
        out.pop("degenerate")
        return out

    def replace(self, **changes: float) -> "ModelParams":
        values = self.as_dict()
        values.update(changes)
        return type(self)(**values, degenerate=self.degenerate)


@dataclass(frozen=True)
class ReducedParams:
    """Dimensionless parameters. ``w_sir``, ``lam`` and ``rho`` are None when R0 <= 1."""

    dd: float
    r0: float
    mu_bar: float
    nu_bar: float
    w_sir: Optional[float]
    lam: Optional[float]
    rho: Optional[float]

    @property
    def spreading(self) -> bool:
        return self.w_sir is not None


def _check_v(v) -> None:
    if np.any(np.asarray(v) < 0):
        raise ModelError("v must be nonnegative")


def evaluate_f(v, params: ModelParams):
    """KPP reaction ``S0 (1 - e^{-beta v}) - alpha v``; accepts scalars or arrays."""
    _check_v(v)
    out = -params.s0 * np.expm1(-params.beta * np.asarray(v, dtype=float)) - params.alpha * np.asarray(v, dtype=float)
    return float(out) if np.ndim(out) == 0 else out


def f_prime(v, params: ModelParams):
    _check_v(v)
    out = params.s0 * params.beta * np.exp(-params.beta * np.asarray(v, dtype=float)) - params.alpha
    return float(out) if np.ndim(out) == 0 else out


def v_star(params: ModelParams) -> float:
    """Unique positive zero of f, by bisection on (0, S0 R0 / alpha]."""
    if not params.r0 > 1:
        raise NoSpreadingError(f"f has no positive zero for R0 = {params.r0:.6g} <= 1")
    lo, hi = 0.0, params.s0 * params.r0 / params.alpha
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if evaluate_f(mid, params) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= V_STAR_TOL:
            return 0.5 * (lo + hi)
    raise ModelError("v_star bisection did not converge")


def plateau(params: ModelParams) -> float:
    """Far-field value of the steady potential: v_* if R0 > 1, else 0."""
    return v_star(params) if params.r0 > 1 else 0.0


def c_sir(params: ModelParams) -> float:
    """Spreading speed without the road, ``2 sqrt(d alpha (R0 - 1))``."""
    if not params.r0 > 1:
        raise NoSpreadingError(f"no spreading for R0 = {params.r0:.6g} <= 1")
    return 2.0 * math.sqrt(params.d * params.alpha * (params.r0 - 1.0))


def reduce(params: ModelParams) -> ReducedParams:
    """Non-dimensionalise with time 1/alpha and length sqrt(d/alpha).

    nu carries length/time, so its reduced form is nu / sqrt(d alpha).
    """
    r0 = params.r0
    mu_bar = params.mu / params.alpha
    nu_bar = params.nu / math.sqrt(params.d * params.alpha)
    w_sir = lam = rho = None
    if r0 > 1:
        w_sir = 2.0 * math.sqrt(r0 - 1.0)
        lam = mu_bar / (nu_bar * w_sir)
        rho = w_sir / nu_bar
    return ReducedParams(
        dd=params.D / params.d, r0=r0, mu_bar=mu_bar, nu_bar=nu_bar,
        w_sir=w_sir, lam=lam, rho=rho,
    )
