"""Epidemic spreading with a line of fast diffusion: SIR / road-field
reaction-diffusion solvers, dispersion-relation speeds, and observables."""

from .dispersion import (
    DispersionTriple,
    SpeedQuery,
    c_sirt,
    decay_exponents,
    decay_exponents_perturbed,
    omega_reduced,
    reduced_speed,
    speed_admissible,
)
from .model import ModelParams, ReducedParams, c_sir, evaluate_f, f_prime, plateau, reduce, v_star

__all__ = [
    "DispersionTriple",
    "ModelParams",
    "ReducedParams",
    "SpeedQuery",
    "c_sir",
    "c_sirt",
    "decay_exponents",
    "decay_exponents_perturbed",
    "evaluate_f",
    "f_prime",
    "omega_reduced",
    "plateau",
    "reduce",
    "reduced_speed",
    "speed_admissible",
    "v_star",
]
