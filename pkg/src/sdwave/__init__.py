"""Pseudospectral simulator and decay-rate verification harness for the
semilinear wave equation with fractional structural damping,

    u_tt + (-Lap)^sigma u_t - Lap u = f(u),   sigma in (0, 1/2),

on a periodic box.  The package evaluates the exact per-mode propagator,
the diffusion profiles and their remainders, the full exponent calculus in
rational arithmetic, and fits measured decay slopes against the predicted
rates.
"""

from .exponents import (
    SimParams,
    critical_exponent,
    linear_remainder_rate,
    profile_remainder_rate,
    solution_decay_exponents,
    validate_hypotheses,
    weight_window,
)
from .grid import Grid, gaussian_data, make_grid
from .propagator import State, linear_solution, linear_step
from .solver import Trajectory, etd_step, nonlinearity, phi_map, picard_solve, run

__version__ = "0.1.0"

__all__ = [
    "SimParams", "critical_exponent", "weight_window", "solution_decay_exponents",
    "linear_remainder_rate", "profile_remainder_rate", "validate_hypotheses",
    "Grid", "make_grid", "gaussian_data",
    "State", "linear_solution", "linear_step",
    "Trajectory", "nonlinearity", "etd_step", "run", "phi_map", "picard_solve",
    "__version__",
]
