"""Norm evaluators: Lebesgue, weighted L2, homogeneous Sobolev, Lorentz,
energy, and the weighted sup-in-time trajectory norm.

Physical-space norms are cell-weighted sums; spectral norms are mode
sums with the continuum weight, so the two L2 routes agree to round-off
(exact discrete Parseval).  Reductions use numpy's fixed summation order
for determinism.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import grid as gridmod
from .exponents import SimParams, solution_decay_exponents

__all__ = [
    "NormSeries",
    "lq_norm",
    "l2_spectral",
    "hsdot_norm",
    "weighted_l2",
    "lorentz_quasinorm",
    "energy",
    "dissipation",
    "x_norm",
    "x_norm_exponents",
    "CSV_HEADER",
]

CSV_HEADER = ("t", "l2", "wdelta", "hs1", "energy", "gerr", "herr", "ratio_g")


def lq_norm(grid: gridmod.Grid, u: np.ndarray, q: float) -> float:
    """Cell-weighted discrete L^q norm; q = inf gives the max norm."""
    if q == np.inf or q == "inf":
        return float(np.max(np.abs(u)))
    if q < 1:
        raise ValueError("q must be >= 1")
    return float((np.sum(np.abs(u) ** q) * grid.cell) ** (1.0 / q))


def l2_spectral(grid: gridmod.Grid, u_hat: np.ndarray) -> float:
    """L2 norm evaluated on modes (Parseval route)."""
    return float(np.sqrt(np.sum(np.abs(u_hat) ** 2) * grid.mode_weight))


def hsdot_norm(grid: gridmod.Grid, u_hat: np.ndarray, s: float) -> float:
    """Homogeneous Sobolev norm: mode-weighted L2 of |xi|^s u_hat.

    Negative s requires a vanishing mean mode.
    """
    if s < 0 and abs(u_hat[(0,) * grid.n]) > 1e-13 * (np.max(np.abs(u_hat)) + 1e-300):
        raise ValueError("negative order requires zero mean mode")
    if s == 0:
        return l2_spectral(grid, u_hat)
    with np.errstate(divide="ignore"):
        w = np.where(grid.rho > 0, grid.rho**s, 0.0)
    return float(np.sqrt(np.sum(np.abs(w * u_hat) ** 2) * grid.mode_weight))


def weighted_l2(grid: gridmod.Grid, u: np.ndarray, delta: float, kind: str = "minimage") -> float:
    """Weighted L2 norm with |x|^delta ("minimage") or (1+|x|^2)^(delta/2) ("bracket")."""
    if kind == "minimage":
        w = gridmod.min_image_weight(grid, delta)
    elif kind == "bracket":
        w = gridmod.bracket_weight(grid, delta)
    else:
        raise ValueError("kind must be 'minimage' or 'bracket'")
    return float(np.sqrt(np.sum((w * np.abs(u)) ** 2) * grid.cell))


def lorentz_quasinorm(grid: gridmod.Grid, u: np.ndarray, q: float, r: float) -> float:
    """Lorentz quasinorm via the decreasing rearrangement over grid cells.

    The rearrangement is piecewise constant on intervals of measure dx^n;
    r = inf takes sup_t t^(1/q) u*(t), and r = 2 evaluates the defining
    integral exactly on the rearrangement's breakpoints.
    """
    if not 1 < q < np.inf:
        raise ValueError("q must lie in (1, inf)")
    vals = np.sort(np.abs(np.asarray(u)).ravel())[::-1]
    vals = vals[vals > 0]
    if vals.size == 0:
        return 0.0
    mu = grid.cell
    edges = mu * np.arange(1, vals.size + 1)
    if r == np.inf or r == "inf":
        return float(np.max(edges ** (1.0 / q) * vals))
    if r == 2:
        left = mu * np.arange(0, vals.size)
        segments = vals**2 * (q / 2.0) * (edges ** (2.0 / q) - left ** (2.0 / q))
        return float(np.sqrt(np.sum(segments)))
    raise ValueError("r must be 2 or inf")


def energy(grid: gridmod.Grid, u_hat: np.ndarray, v_hat: np.ndarray) -> float:
    """Wave energy 0.5 |u_t|_2^2 + 0.5 |grad u|_2^2, evaluated spectrally."""
    kin = np.sum(np.abs(v_hat) ** 2)
    pot = np.sum(grid.rho**2 * np.abs(u_hat) ** 2)
    return float(0.5 * (kin + pot) * grid.mode_weight)


def dissipation(grid: gridmod.Grid, v_hat: np.ndarray, sigma: float) -> float:
    """Damping functional |(-Lap)^(sigma/2) u_t|_2^2."""
    return float(np.sum(grid.rho ** (2 * sigma) * np.abs(v_hat) ** 2) * grid.mode_weight)


def x_norm_exponents(params: SimParams) -> tuple[float, float]:
    """Time-weight exponents (sobolev term, weighted term) of the trajectory norm."""
    e_l2, e_w, e_s = solution_decay_exponents(
        params.n, params.sigma, params.r, params.delta, params.sbar)
    return float(-e_s), float(-e_w)


def x_norm(traj, params: SimParams) -> float:
    """Discrete weighted sup-in-time norm of a trajectory.

    sup over sample times of
      <t>^a |(-Lap)^(sbar/2) u(t)|_2 + <t>^b |<x>^delta u(t)|_2
    with (a, b) from the decay calculus; <t> = sqrt(1 + t^2).  The sup over
    continuous time is approximated on the trajectory's samples, hence the
    value is monotone under truncation to fewer samples.
    """
    a, b = x_norm_exponents(params)
    g = traj.grid
    wdelta = gridmod.bracket_weight(g, float(params.delta))
    best = 0.0
    for t, u_hat in zip(traj.times, traj.u_hats):
        bracket = float(np.sqrt(1.0 + t * t))
        sob = hsdot_norm(g, u_hat, float(params.sbar))
        # difference trajectories carry round-off imaginary parts that are
        # tiny absolutely but not relative to the difference scale
        u = gridmod.to_field(g, u_hat, check_real=False).real
        wgt = float(np.sqrt(np.sum((wdelta * u) ** 2) * g.cell))
        best = max(best, bracket**a * sob + bracket**b * wgt)
    return best


@dataclass
class NormSeries:
    """Time-stamped record of every tracked norm and profile remainder.

    The fixed CSV columns are t, l2, wdelta, hs1, energy, gerr, herr,
    ratio_g; additional tracked quantities (mode-mass fractions, forcing
    mass, profile cross terms) live in ``extra``.  Profile columns may be
    NaN before the profile constant is known.
    """

    t: np.ndarray
    l2: np.ndarray
    wdelta: np.ndarray
    hs1: np.ndarray
    energy: np.ndarray
    gerr: Optional[np.ndarray] = None
    herr: Optional[np.ndarray] = None
    ratio_g: Optional[np.ndarray] = None
    extra: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.t)

    def column(self, name: str) -> np.ndarray:
        if name in CSV_HEADER:
            val = getattr(self, name)
            if val is None:
                return np.full(len(self), np.nan)
            return val
        return self.extra[name]

    def to_csv(self) -> str:
        """Deterministic CSV with the fixed documented header."""
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        cols = [self.column(name) for name in CSV_HEADER]
        for row in zip(*cols):
            writer.writerow(["" if np.isnan(v) else repr(float(v)) for v in row])
        return out.getvalue()

    @staticmethod
    def from_csv(text: str) -> "NormSeries":
        rows = list(csv.reader(io.StringIO(text)))
        header = tuple(rows[0])
        if header != CSV_HEADER:
            raise ValueError("unexpected series header")
        data = {name: [] for name in CSV_HEADER}
        for row in rows[1:]:
            for name, cell in zip(CSV_HEADER, row):
                data[name].append(np.nan if cell == "" else float(cell))
        arrays = {name: np.asarray(vals) for name, vals in data.items()}
        return NormSeries(
            t=arrays["t"], l2=arrays["l2"], wdelta=arrays["wdelta"],
            hs1=arrays["hs1"], energy=arrays["energy"], gerr=arrays["gerr"],
            herr=arrays["herr"], ratio_g=arrays["ratio_g"])
