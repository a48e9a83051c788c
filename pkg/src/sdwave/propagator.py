"""Exact linear evolution of the damped wave pair (u_hat, v_hat).

Each mode evolves by the 2x2 matrix built from the kernel symbols, so
stepping is exact up to round-off (the step map is a true semigroup:
composing two half steps equals one full step).  Velocity is always
evolved through the matrix, never by differencing positions.

Also provides physical-space kernel fields (full or frequency-split) and
measured-versus-predicted decay tables for the split kernels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import dispersion, fit
from .exponents import kernel_low_rate, mid_band_decay_rate
from .grid import Grid, min_image_weight, to_field, to_spectrum

__all__ = [
    "State",
    "linear_solution",
    "linear_step",
    "evolution_symbols",
    "kernel_field",
    "kernel_rate_table",
    "KERNELS",
    "PIECES",
]

KERNELS = ("K0", "K1", "K1plus", "K1minus", "K0plus", "K0minus")
PIECES = ("full", "low", "mid", "high", "mh")


@dataclass
class State:
    """Spectral pair (u_hat, v_hat = d/dt u_hat) at one time stamp."""

    t: float
    u_hat: np.ndarray
    v_hat: np.ndarray
    grid: Grid

    def copy(self) -> "State":
        return State(self.t, self.u_hat.copy(), self.v_hat.copy(), self.grid)


def evolution_symbols(grid: Grid, sigma: float, dt: float) -> dispersion.SymbolPair:
    """Symbols of the exact one-step map, cached per (sigma, dt) on the grid.

    Symbol evaluation dominates stepping cost otherwise; exactness of the
    map makes the cache safe.  Keyed by the bit patterns of sigma and dt.
    """
    key = ("evo", float(sigma).hex(), float(dt).hex())
    pair = grid._cache.get(key)
    if pair is None:
        pair = dispersion.kernel_symbols(sigma, dt, grid.rho)
        grid._cache[key] = pair
    return pair


def linear_solution(grid: Grid, sigma: float, u0: np.ndarray, u1: np.ndarray, t: float) -> State:
    """One-shot solution of the linear problem from physical data (u0, u1)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    u0_hat = to_spectrum(grid, u0)
    u1_hat = to_spectrum(grid, u1)
    return linear_solution_spectral(grid, sigma, u0_hat, u1_hat, t)


def linear_solution_spectral(grid: Grid, sigma: float, u0_hat: np.ndarray,
                             u1_hat: np.ndarray, t: float) -> State:
    """One-shot solution from spectral data."""
    s = dispersion.kernel_symbols(sigma, t, grid.rho)
    u_hat = s.k0 * u0_hat + s.k1 * u1_hat
    v_hat = s.dk0 * u0_hat + s.dk1 * u1_hat
    return State(t=float(t), u_hat=u_hat, v_hat=v_hat, grid=grid)


def linear_step(state: State, sigma: float, dt: float) -> State:
    """Exact one-step map over dt > 0."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    s = evolution_symbols(state.grid, sigma, dt)
    u_hat = s.k0 * state.u_hat + s.k1 * state.v_hat
    v_hat = s.dk0 * state.u_hat + s.dk1 * state.v_hat
    return State(t=state.t + dt, u_hat=u_hat, v_hat=v_hat, grid=state.grid)


def _piece_mask(grid: Grid, sigma: float, piece: str, shape: str = "bump") -> np.ndarray:
    lo, mid, hi = dispersion.frequency_cutoffs(sigma, grid.rho, shape=shape)
    table = {"full": lo + mid + hi, "low": lo, "mid": mid, "high": hi, "mh": mid + hi}
    try:
        return table[piece]
    except KeyError:
        raise ValueError(f"unknown piece {piece!r}") from None


def kernel_spectrum(grid: Grid, sigma: float, which: str, piece: str, t: float,
                    shape: str = "bump") -> np.ndarray:
    """Cutoff-multiplied kernel symbol over the grid modes.

    Split kernels are evaluated on the cutoff support only.  Their origin
    cell is zeroed (the branch symbols carry the same integrable
    origin singularity as the singular diffusion profile), and a support
    cell inside the double-root band is an error: the cutoffs are arranged
    so this cannot happen for the low piece.
    """
    if which not in KERNELS:
        raise ValueError(f"unknown kernel tag {which!r}")
    chi = _piece_mask(grid, sigma, piece, shape)
    if which in ("K0", "K1"):
        pair = dispersion.kernel_symbols(sigma, t, grid.rho)
        return (pair.k0 if which == "K0" else pair.k1) * chi
    roots = dispersion.characteristic_roots(sigma, grid.rho)
    if np.any((roots.regime == "degenerate") & (chi > 0)):
        raise dispersion.DegenerateSplitError(
            "split kernel support touches the double-root band; use the unsplit kernel")
    sup = (chi > 0) & (grid.rho > 0)
    sym = np.zeros(grid.rho.shape, dtype=complex)
    k1p, k1m, k0p, k0m = dispersion.split_symbols(sigma, t, grid.rho[sup])
    sym[sup] = {"K1plus": k1p, "K1minus": k1m, "K0plus": k0p, "K0minus": k0m}[which]
    return sym * chi


def kernel_field(grid: Grid, sigma: float, which: str, piece: str, t: float,
                 shape: str = "bump") -> np.ndarray:
    """Physical-space kernel piece via the inverse transform.

    Real for the unsplit kernels and for low-band splits; complex when a
    split kernel is requested over the oscillatory range.
    """
    sym = kernel_spectrum(grid, sigma, which, piece, t, shape)
    if np.isrealobj(sym):
        return to_field(grid, sym.astype(complex))
    u = np.fft.ifftn(sym) / grid.cell
    if np.max(np.abs(u.imag)) <= 1e-10 * (np.max(np.abs(u)) + 1e-300):
        return u.real
    return u


@dataclass
class KernelRateRow:
    """Measured weighted-norm decay of one kernel piece against its prediction."""

    which: str
    piece: str
    theta: float
    times: np.ndarray
    values: np.ndarray
    report: fit.RateReport


def kernel_rate_table(
    grid: Grid,
    sigma: float,
    which: str,
    piece: str,
    theta: float,
    datum: Optional[np.ndarray],
    t_list: Sequence[float],
    window: Optional[tuple[float, float]] = None,
    tolerance: float = fit.TOL_LINEAR,
    shape: str = "bump",
) -> KernelRateRow:
    """Rows of | |x|^theta (K_piece(t) * datum) |_2 versus t with the fit.

    Low pieces are fitted as power laws against the predicted integrable-
    datum exponent; mid/high pieces as exponential decays (bound 0, or the
    uniform mid-band rate when available).  The origin cell is excluded:
    on the torus it carries the linearly growing mean, a discretization
    artifact outside the decay statement being measured.
    """
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    datum_hat = None if datum is None else to_spectrum(grid, datum)
    w = min_image_weight(grid, theta) if theta > 0 else None
    times = np.asarray(sorted(float(t) for t in t_list))
    values = np.empty(times.shape)
    origin = (0,) * grid.n
    for i, t in enumerate(times):
        sym = kernel_spectrum(grid, sigma, which, piece, t, shape)
        sym[origin] = 0.0
        conv = sym if datum_hat is None else sym * datum_hat
        if w is None:
            values[i] = float(np.sqrt(np.sum(np.abs(conv) ** 2) * grid.mode_weight))
        else:
            u = np.fft.ifftn(conv) / grid.cell
            values[i] = float(np.sqrt(np.sum((w * np.abs(u)) ** 2) * grid.cell))
    name = f"{which}_{piece}_theta{theta:g}"
    if piece == "low":
        predicted = float(kernel_low_rate(grid.n, sigma, which, theta))
        policy = "last_decade" if window is None else ("fixed",) + tuple(window)
        report = fit.fit_decay(times, values, policy, predicted, tolerance, quantity=name)
    else:
        bound = -mid_band_decay_rate(sigma) if piece == "mid" else 0.0
        report = fit.fit_exponential(times, values, window, rate_bound=bound, quantity=name)
    return KernelRateRow(which, piece, float(theta), times, values, report)


def low_band_energy_fraction(state: State, sigma: float) -> float:
    """Fraction of the L2 mass carried by the low-frequency cutoff."""
    lo, _, _ = dispersion.frequency_cutoffs(sigma, state.grid.rho)
    total = float(np.sum(np.abs(state.u_hat) ** 2))
    if total == 0:
        return 1.0
    return float(np.sum((lo * np.abs(state.u_hat)) ** 2) / total)
