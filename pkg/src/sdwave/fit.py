"""Decay-slope estimation on log-log (power laws) and log-linear
(exponential bounds) axes, with window selection and pass/fail pairing
against predicted exponents.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

__all__ = [
    "RateReport",
    "InsufficientDataError",
    "NonpositiveValueError",
    "fit_decay",
    "fit_exponential",
    "TOL_LINEAR",
    "TOL_SEMILINEAR",
]

# Default slope tolerances: linear-problem rates settle fast, semilinear
# transients are longer.  Reports always record the tolerance they used.
TOL_LINEAR = 0.05
TOL_SEMILINEAR = 0.10

# Samples below this time never enter automatic windows (early-time
# bracket effects distort the algebraic rates).
TRANSIENT_FLOOR = 10.0

WindowPolicy = Union[str, tuple]


class InsufficientDataError(ValueError):
    """Fewer than the minimum number of samples in the fit window."""


class NonpositiveValueError(ValueError):
    """Log fit requested on a series with nonpositive values."""


@dataclass(frozen=True)
class RateReport:
    """Fitted slope with its uncertainty paired against a prediction.

    verdict is "pass" iff |slope - predicted| <= tolerance, "fail"
    otherwise, and "indeterminate" when the caller marked the prediction
    as borderline (tied exponents produce logarithmic corrections that a
    pure power law cannot separate at this scale).
    """

    quantity: str
    window: tuple[float, float]
    slope: float
    stderr: float
    predicted: Optional[float]
    tolerance: float
    verdict: str
    model: str = "power"
    n_samples: int = 0
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "window": [self.window[0], self.window[1]],
            "slope": self.slope,
            "stderr": self.stderr,
            "predicted": self.predicted,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "model": self.model,
            "n_samples": self.n_samples,
            "note": self.note,
        }


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Ordinary least squares slope and its standard error."""
    m = x.size
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    resid = y - ym - slope * (x - xm)
    if m > 2:
        stderr = float(np.sqrt(np.sum(resid**2) / (m - 2) / sxx))
    else:
        stderr = 0.0
    return slope, stderr


def _select_window(t: np.ndarray, policy: WindowPolicy, y: np.ndarray) -> np.ndarray:
    if isinstance(policy, tuple) and policy and policy[0] == "fixed":
        _, ta, tb = policy
        return (t >= ta) & (t <= tb)
    if policy == "last_decade":
        tb = t[-1]
        return (t >= tb / 10.0) & (t <= tb)
    if policy == "auto":
        # grow the window downward from the last decade while the slope
        # stays put; never admit early-transient samples
        tb = t[-1]
        admissible = t >= TRANSIENT_FLOOR
        mask = (t >= tb / 10.0) & admissible
        if np.count_nonzero(mask) < 8:
            return admissible
        ref_slope, _ = _ols(np.log(t[mask]), np.log(y[mask]))
        order = np.argsort(t)[::-1]
        for j in order:
            if mask[j] or not admissible[j]:
                continue
            trial = mask.copy()
            trial[t >= t[j]] |= admissible[t >= t[j]]
            s, _ = _ols(np.log(t[trial]), np.log(y[trial]))
            if abs(s - ref_slope) < 0.02:
                mask = trial
            else:
                break
        return mask
    raise ValueError(f"unknown window policy {policy!r}")


def _verdict(slope: float, predicted: Optional[float], tol: float, borderline: bool) -> str:
    if borderline:
        return "indeterminate"
    if predicted is None:
        return "indeterminate"
    return "pass" if abs(slope - predicted) <= tol else "fail"


def fit_decay(
    times: Sequence[float],
    values: Sequence[float],
    window_policy: WindowPolicy = "last_decade",
    predicted: Optional[float] = None,
    tolerance: float = TOL_LINEAR,
    quantity: str = "",
    borderline: bool = False,
) -> RateReport:
    """Least-squares power-law slope of values ~ t^slope over the window.

    window_policy is "last_decade", "auto", or ("fixed", t_a, t_b).  The
    fit needs at least 8 samples with positive values.  Scaling the series
    shifts only the intercept, never the slope.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    order = np.argsort(t, kind="stable")
    t, y = t[order], y[order]
    mask = _select_window(t, window_policy, y)
    if np.count_nonzero(mask) < 8:
        raise InsufficientDataError(
            f"only {np.count_nonzero(mask)} samples in window for {quantity or 'series'}")
    t, y = t[mask], y[mask]
    if np.any(y <= 0):
        raise NonpositiveValueError(f"nonpositive values in {quantity or 'series'}")
    slope, stderr = _ols(np.log(t), np.log(y))
    return RateReport(
        quantity=quantity, window=(float(t[0]), float(t[-1])),
        slope=slope, stderr=stderr, predicted=None if predicted is None else float(predicted),
        tolerance=float(tolerance),
        verdict=_verdict(slope, predicted, tolerance, borderline),
        model="power", n_samples=t.size,
        note="tied exponents: logarithmic correction possible" if borderline else "")


def fit_exponential(
    times: Sequence[float],
    values: Sequence[float],
    window: Optional[tuple[float, float]] = None,
    rate_bound: Optional[float] = None,
    quantity: str = "",
) -> RateReport:
    """OLS slope of log(values) against t (exponential-decay check).

    verdict is "pass" when the fitted rate is at most rate_bound (default
    0: any genuine decay passes).
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    order = np.argsort(t, kind="stable")
    t, y = t[order], y[order]
    if window is not None:
        mask = (t >= window[0]) & (t <= window[1])
        t, y = t[mask], y[mask]
    if t.size < 8:
        raise InsufficientDataError(f"only {t.size} samples for {quantity or 'series'}")
    if np.any(y <= 0):
        raise NonpositiveValueError(f"nonpositive values in {quantity or 'series'}")
    slope, stderr = _ols(t, np.log(y))
    bound = 0.0 if rate_bound is None else float(rate_bound)
    return RateReport(
        quantity=quantity, window=(float(t[0]), float(t[-1])),
        slope=slope, stderr=stderr, predicted=bound, tolerance=0.0,
        verdict="pass" if slope <= bound else "fail",
        model="exponential", n_samples=t.size)
