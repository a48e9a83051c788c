"""Exact exponent calculus for the structurally damped semilinear wave model.

The model is u_tt + (-Lap)^sigma u_t - Lap u = f(u) on R^n with
sigma in (0, 1/2) and f(u) ~ |u|^p or u|u|^(p-1).  Every decay rate,
admissibility window, and threshold used by the verification harness is a
rational function of the parameter tuple (n, sigma, p, r, delta, sbar,
theta, nu).  All operations here run in exact rational arithmetic through
``fractions.Fraction`` so that comparisons at window boundaries never
depend on floating-point rounding.  Floats are converted to their exact
binary values; pass ``Fraction`` or decimal strings when exact decimal
inputs matter.

All functions are pure: identical inputs give bit-identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

Rational = Union[int, float, str, Fraction]

__all__ = [
    "SimParams",
    "HypothesisCheck",
    "HypothesisReport",
    "WeightWindow",
    "HypothesisError",
    "critical_exponent",
    "weight_window",
    "lorentz_data_indices",
    "solution_decay_exponents",
    "linear_remainder_rate",
    "profile_remainder_rate",
    "nu_upper_bound",
    "forcing_decay_exponent",
    "forcing_mass_decay_exponent",
    "derivative_norm_index",
    "mid_band_decay_rate",
    "kernel_low_rate",
    "existence_case",
    "validate_hypotheses",
]

F_KINDS = ("abs_power", "signed_power", "none")


class HypothesisError(ValueError):
    """Raised when a rate is requested outside its admissible window."""


def _frac(x: Rational) -> Fraction:
    """Exact rational view of a numeric input (floats kept bit-exact)."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


@dataclass(frozen=True)
class SimParams:
    """Full parameter tuple of one experiment.

    n      : spatial dimension (1, 2 or 3 on the grid; any integer >= 1 here)
    sigma  : fractional damping order, 0 < sigma < 1/2
    p      : nonlinearity power, p > 1
    r      : integrability index of the data, r in [1, 2)
    delta  : spatial weight exponent, delta >= 0
    sbar   : Sobolev regularity level, sbar >= 1
    theta  : moment exponent of the data weights, theta in [0, 1]
    nu     : profile-remainder margin, nu > 0
    f_kind : "abs_power" for |u|^p, "signed_power" for u|u|^(p-1),
             "none" to disable the nonlinearity (linear runs)
    """

    n: int
    sigma: float
    p: float = 3.0
    r: float = 1.0
    delta: float = 0.0
    sbar: float = 1.0
    theta: float = 1.0
    nu: float = 0.2
    f_kind: str = "abs_power"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension n must be >= 1")
        if not 0 < float(self.sigma) < 0.5:
            raise ValueError("sigma must lie in (0, 1/2)")
        if float(self.p) <= 1:
            raise ValueError("nonlinearity power p must exceed 1")
        if not 0 <= float(self.theta) <= 1:
            raise ValueError("theta must lie in [0, 1]")
        if float(self.delta) < 0:
            raise ValueError("delta must be nonnegative")
        if float(self.sbar) < 1:
            raise ValueError("sbar must be >= 1")
        if self.f_kind not in F_KINDS:
            raise ValueError(f"f_kind must be one of {F_KINDS}")


@dataclass(frozen=True)
class HypothesisCheck:
    """One evaluated inequality: lhs <relation> rhs.

    status is "pass", "fail", or "boundary".  A boundary status means
    lhs == rhs exactly; ``satisfied`` still reports the literal truth of
    the stated (strict or non-strict) inequality.
    """

    name: str
    satisfied: bool
    lhs: Fraction
    rhs: Fraction
    relation: str
    status: str

    @staticmethod
    def of(name: str, lhs: Fraction, rhs: Fraction, relation: str) -> "HypothesisCheck":
        if relation == "<":
            ok = lhs < rhs
        elif relation == "<=":
            ok = lhs <= rhs
        elif relation == ">":
            ok = lhs > rhs
        elif relation == ">=":
            ok = lhs >= rhs
        else:
            raise ValueError(f"unknown relation {relation!r}")
        status = "boundary" if lhs == rhs else ("pass" if ok else "fail")
        return HypothesisCheck(name, bool(ok), lhs, rhs, relation, status)


@dataclass
class HypothesisReport:
    """Outcome of validate_hypotheses: all checks plus their conjunction."""

    mode: str
    entries: list[HypothesisCheck] = field(default_factory=list)
    case: Optional[str] = None
    notes: list[str] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(e.satisfied for e in self.entries)

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "overall": self.overall,
            "case": self.case,
            "notes": list(self.notes),
            "entries": [
                {
                    "name": e.name,
                    "satisfied": e.satisfied,
                    "lhs": float(e.lhs),
                    "rhs": float(e.rhs),
                    "relation": e.relation,
                    "status": e.status,
                }
                for e in self.entries
            ],
        }


@dataclass(frozen=True)
class WeightWindow:
    """Admissible window for the spatial weight exponent delta.

    The window is [lo, hi) intersected with {delta > extra_lo} (strict for
    r = 1) or {delta >= extra_lo} (non-strict for r > 1), and with
    delta >= 0.  ``empty`` reports an empty intersection; nothing is raised.
    """

    lo: Fraction
    hi: Fraction
    extra_lo: Fraction
    extra_strict: bool
    empty: bool

    def contains(self, delta: Rational) -> bool:
        d = _frac(delta)
        if d < 0 or d < self.lo or d >= self.hi:
            return False
        if self.extra_strict:
            return d > self.extra_lo
        return d >= self.extra_lo


def critical_exponent(n: int, sigma: Rational, r: Rational = 1) -> Fraction:
    """Small-data global-existence threshold 1 + 2r/(n - 2 r sigma).

    Requires n > 2 r sigma.  With r = 1 this is the basic threshold
    1 + 2/(n - 2 sigma).
    """
    n_, s, r_ = Fraction(n), _frac(sigma), _frac(r)
    den = n_ - 2 * r_ * s
    if den <= 0:
        raise ValueError("critical exponent undefined: need n > 2 r sigma")
    return 1 + 2 * r_ / den


def weight_window(n: int, sigma: Rational, r: Rational, p: Rational) -> WeightWindow:
    """Admissible interval for the weight exponent delta at given (n, sigma, r, p).

    Main window: max(0, n(1/r - 1/2) - 1) <= delta < n(1/r - 1/2) - 2 sigma.
    Extra lower bound: delta > n(1/(p r) - 1/2) strictly when r = 1, and
    delta >= n(1/(p r) - 1/2) when r > 1.
    """
    n_, s, r_, p_ = Fraction(n), _frac(sigma), _frac(r), _frac(p)
    if not r_ < 2 * n_ / (n_ + 4 * s):
        raise ValueError("need r < 2n/(n + 4 sigma) for a nonempty window")
    gap = n_ * (1 / r_ - Fraction(1, 2))
    lo = max(Fraction(0), gap - 1)
    hi = gap - 2 * s
    extra = n_ * (1 / (p_ * r_) - Fraction(1, 2))
    strict = r_ == 1
    empty = hi <= lo or hi <= extra
    return WeightWindow(lo, hi, extra, strict, empty)


def lorentz_data_indices(n: int, r: Rational, sigma: Rational, delta: Rational) -> tuple[Fraction, Fraction]:
    """Lorentz integrability indices (q0, q1) for the weighted data norms.

    q0 = n r / (n - r (delta + 2 sigma)),  q1 = n r / (n - r delta).
    Both denominators must be positive.
    """
    n_, r_, s, d = Fraction(n), _frac(r), _frac(sigma), _frac(delta)
    d0 = n_ - r_ * (d + 2 * s)
    d1 = n_ - r_ * d
    if d0 <= 0 or d1 <= 0:
        raise ValueError("lorentz index undefined: nonpositive denominator")
    return n_ * r_ / d0, n_ * r_ / d1


def solution_decay_exponents(
    n: int, sigma: Rational, r: Rational, delta: Rational, sbar: Rational
) -> tuple[Fraction, Fraction, Fraction]:
    """Predicted decay exponents (L2, weighted-L2, homogeneous-Sobolev).

    e_L2       = -(1/(1-sigma)) (n/2 (1/r - 1/2) - sigma)
    e_weighted = -(1/(1-sigma)) (n/2 (1/r - 1/2) - delta/2 - sigma)
    e_sobolev  = -(1/(1-sigma)) (n/2 (1/r - 1/2) - sigma + sbar/2)
    """
    n_, s, r_, d, sb = Fraction(n), _frac(sigma), _frac(r), _frac(delta), _frac(sbar)
    base = n_ / 2 * (1 / r_ - Fraction(1, 2))
    c = 1 / (1 - s)
    return (-c * (base - s), -c * (base - d / 2 - s), -c * (base - s + sb / 2))


def linear_remainder_rate(n: int, sigma: Rational, theta0: Rational, theta1: Rational) -> Fraction:
    """Decay exponent of the linear solution minus its two-profile expansion.

    Maximum of the four algebraic exponents (the exponentially decaying
    middle/high contribution is excluded):

      a1 = (1/(1-sigma)) (-n/4 + 2 sigma - 1)              (plain data term, position)
      a2 = max{(1/(1-sigma)) (-n/4 + 3 sigma - 1),
               (1/sigma)    (-n/4 + sigma)}                (plain data term, velocity)
      a3 = (1/(1-sigma)) (-n/4 - theta0/2)                 (moment term, position)
      a4 = (1/(1-sigma)) (-n/4 + sigma - theta1/2)         (moment term, velocity)
    """
    n_, s = Fraction(n), _frac(sigma)
    t0, t1 = _frac(theta0), _frac(theta1)
    if not (0 <= t0 <= 1 and 0 <= t1 <= 1):
        raise ValueError("moment exponents must lie in [0, 1]")
    c = 1 / (1 - s)
    q = n_ / 4
    a1 = c * (-q + 2 * s - 1)
    a2 = max(c * (-q + 3 * s - 1), (1 / s) * (-q + s))
    a3 = c * (-q - t0 / 2)
    a4 = c * (-q + s - t1 / 2)
    return max(a1, a2, a3, a4)


def nu_upper_bound(
    n: int, sigma: Rational, p: Rational, delta: Rational, sbar: Optional[Rational] = None
) -> Fraction:
    """Upper bound of the admissible profile margin nu.

    nu < min{ n/4 (p-2) + p delta / 2, delta }, and additionally
    nu < delta/(2 sbar) (n - p/2 (n - 2 sbar)) when sbar < n/2.
    """
    n_, p_, d = Fraction(n), _frac(p), _frac(delta)
    bound = min(n_ / 4 * (p_ - 2) + p_ * d / 2, d)
    if sbar is not None:
        sb = _frac(sbar)
        if sb < n_ / 2:
            bound = min(bound, d / (2 * sb) * (n_ - p_ / 2 * (n_ - 2 * sb)))
    return bound


def profile_remainder_rate(
    n: int,
    sigma: Rational,
    p: Rational,
    delta: Rational,
    theta: Rational,
    nu: Rational,
    sbar: Optional[Rational] = None,
) -> Fraction:
    """Decay exponent of the semilinear solution minus its diffusion profile.

    max{ (1/(1-sigma)) (-n/4 + sigma - min{(p-1)(n/2 - sigma) - 1,
                                           1 - 2 sigma, nu, theta/2}),
         (1/sigma) (-n/4 + sigma) }

    Raises HypothesisError when nu lies outside its admissible window.
    """
    n_, s, p_, th, v = Fraction(n), _frac(sigma), _frac(p), _frac(theta), _frac(nu)
    bound = nu_upper_bound(n, sigma, p, delta, sbar)
    if not 0 < v < bound:
        raise HypothesisError(f"nu={float(v):g} outside (0, {float(bound):g})")
    gain = min((p_ - 1) * (n_ / 2 - s) - 1, 1 - 2 * s, v, th / 2)
    a = (1 / (1 - s)) * (-n_ / 4 + s - gain)
    b = (1 / s) * (-n_ / 4 + s)
    return max(a, b)


def forcing_decay_exponent(n: int, sigma: Rational, r: Rational, p: Rational, vartheta: Rational) -> Fraction:
    """Decay exponent of the weighted dual-Lebesgue norm of f(u(t)).

    (1/(1-sigma)) (-(n/(2r) - sigma) p + n/4 + vartheta/2 + 1/2).
    Linear in vartheta with slope 1/(2(1-sigma)).
    """
    n_, s, r_, p_, v = Fraction(n), _frac(sigma), _frac(r), _frac(p), _frac(vartheta)
    return (1 / (1 - s)) * (-(n_ / (2 * r_) - s) * p_ + n_ / 4 + v / 2 + Fraction(1, 2))


def forcing_mass_decay_exponent(n: int, sigma: Rational, p: Rational, r: Rational = 1) -> Fraction:
    """Decay exponent of the L^r norm of f(u(t)): (1/(1-sigma)) (-(n/2)(p-1)/r + p sigma)."""
    n_, s, p_, r_ = Fraction(n), _frac(sigma), _frac(p), _frac(r)
    return (1 / (1 - s)) * (-(n_ / 2) * (p_ - 1) / r_ + p_ * s)


def derivative_norm_index(n: int, s: Rational) -> Fraction:
    """Lebesgue index 2n/(n + 2 + 2 floor(s) - 2 s) used for derivatives of f(u)."""
    n_, s_ = Fraction(n), _frac(s)
    if n_ < 1 or s_ < 0:
        raise ValueError("need n >= 1 and s >= 0")
    return 2 * n_ / (n_ + 2 + 2 * math.floor(s_) - 2 * s_)


def mid_band_decay_rate(sigma: float) -> float:
    """Uniform exponential rate 2^(-6/(1-2 sigma) - 1) of the middle frequency band."""
    return 2.0 ** (-6.0 / (1.0 - 2.0 * float(sigma)) - 1.0)


def kernel_low_rate(n: int, sigma: Rational, which: str, theta: Rational = 0) -> Fraction:
    """Predicted decay exponent of the weighted low-band kernel convolution.

    Plain-integrable datum branch; ``which`` selects the kernel:
    K1/K1plus decay at (1/(1-sigma)) (-n/4 + theta/2 + sigma),
    K1minus  at (1/sigma)     (-n/4 + theta/2 + sigma),
    K0/K0plus at (1/(1-sigma)) (-n/4 + theta/2),
    K0minus  at (1/sigma)     (-n/4 + theta/2 + 2 sigma - 1).
    """
    n_, s, th = Fraction(n), _frac(sigma), _frac(theta)
    q = -n_ / 4 + th / 2
    rates = {
        "K1": (1 / (1 - s)) * (q + s),
        "K1plus": (1 / (1 - s)) * (q + s),
        "K1minus": (1 / s) * (q + s),
        "K0": (1 / (1 - s)) * q,
        "K0plus": (1 / (1 - s)) * q,
        "K0minus": (1 / s) * (q + 2 * s - 1),
    }
    try:
        return rates[which]
    except KeyError:
        raise ValueError(f"unknown kernel tag {which!r}") from None


def existence_case(n: int, sigma: Rational, p: Rational) -> str:
    """Classify p against the global-existence case thresholds.

    Thresholds: p_c = critical_exponent(n, sigma), c1 = 1 + 4/(n + 2 - 4 sigma),
    c2 = 1 + 4/n.  Overlaps at equality are assigned to the lower case.
    Returns "subcritical", "case1", "case2-1" or "case2-2".
    """
    n_, s, p_ = Fraction(n), _frac(sigma), _frac(p)
    pc = critical_exponent(n, sigma, 1)
    c1 = 1 + Fraction(4) / (n_ + 2 - 4 * s)
    c2 = 1 + Fraction(4) / n_
    if p_ <= pc:
        return "subcritical"
    if p_ <= c1:
        return "case1"
    if p_ <= c2:
        return "case2-1"
    return "case2-2"


def _common_checks(params: SimParams, r: Fraction) -> list[HypothesisCheck]:
    n_, s = Fraction(params.n), _frac(params.sigma)
    p_, sb = _frac(params.p), _frac(params.sbar)
    checks = [
        HypothesisCheck.of("dimension n >= 2", Fraction(params.n), Fraction(2), ">="),
        HypothesisCheck.of("p above critical exponent", p_, critical_exponent(params.n, params.sigma, r), ">"),
        HypothesisCheck.of("sbar >= 1", sb, Fraction(1), ">="),
        HypothesisCheck.of("integer part of sbar below p", Fraction(math.floor(sb)), p_, "<"),
    ]
    if 2 * sb < n_:
        checks.append(
            HypothesisCheck.of("p within regularity ceiling", p_, 1 + Fraction(2) / (n_ - 2 * sb), "<=")
        )
    return checks


def validate_hypotheses(params: SimParams, mode: str) -> HypothesisReport:
    """Evaluate every hypothesis of the requested statement with numeric sides.

    mode is "decay" (global existence with decay, general r), "cases"
    (global existence, case-split form) or "profile" (diffusion profile,
    r = 1).  Failures are reported, never raised.
    """
    if mode not in ("decay", "cases", "profile"):
        raise ValueError("mode must be decay, cases or profile")
    n_, s = Fraction(params.n), _frac(params.sigma)
    p_, d = _frac(params.p), _frac(params.delta)
    r_ = _frac(params.r)
    report = HypothesisReport(mode=mode)

    if mode == "cases":
        report.entries.extend(_common_checks(params, Fraction(1)))
        case = existence_case(params.n, params.sigma, params.p)
        report.case = case
        c1 = 1 + Fraction(4) / (n_ + 2 - 4 * s)
        pc = critical_exponent(params.n, params.sigma, 1)
        if c1 <= pc:
            report.notes.append("case1 window empty at this (n, sigma)")
        if case == "case1":
            lo = 2 * (1 / (p_ - 1) + s) - n_ / 2 - 1
            hi = 2 / (p_ - 1) - n_ / 2
            report.entries.append(HypothesisCheck.of("case1 delta above lower bound", lo, d, "<"))
            report.entries.append(HypothesisCheck.of("case1 delta at most upper bound", d, hi, "<="))
        return report

    # decay and profile modes share the r-indexed set; profile pins r = 1.
    if mode == "profile":
        r_ = Fraction(1)
        if _frac(params.r) != 1:
            report.notes.append("profile mode uses r = 1; config r ignored")
    report.entries.append(
        HypothesisCheck.of("r within Lorentz range", r_, 2 * n_ / (n_ + 4 * s), "<")
    )
    report.entries.append(HypothesisCheck.of("r >= 1", r_, Fraction(1), ">="))
    report.entries.extend(_common_checks(params, r_))

    gap = n_ * (1 / r_ - Fraction(1, 2))
    report.entries.append(HypothesisCheck.of("delta >= 0", d, Fraction(0), ">="))
    report.entries.append(HypothesisCheck.of("delta above window floor", gap - 1, d, "<="))
    report.entries.append(HypothesisCheck.of("delta below window ceiling", d, gap - 2 * s, "<"))
    extra = n_ * (1 / (p_ * r_) - Fraction(1, 2))
    if r_ == 1:
        report.entries.append(HypothesisCheck.of("delta above moment bound (strict)", extra, d, "<"))
        report.notes.append("plain integrable data branch (r = 1)")
    else:
        report.entries.append(HypothesisCheck.of("delta above moment bound", extra, d, "<="))
        report.notes.append("Lorentz data branch (r > 1)")

    if mode == "profile":
        v = _frac(params.nu)
        report.entries.append(HypothesisCheck.of("nu positive", v, Fraction(0), ">"))
        report.entries.append(
            HypothesisCheck.of(
                "nu below profile window",
                v,
                nu_upper_bound(params.n, params.sigma, params.p, params.delta),
                "<",
            )
        )
        sb = _frac(params.sbar)
        if sb < n_ / 2:
            rhs = d / (2 * sb) * (n_ - p_ / 2 * (n_ - 2 * sb))
            report.entries.append(HypothesisCheck.of("nu below regularity window", v, rhs, "<"))
        report.entries.append(
            HypothesisCheck.of("theta within [0, 1]", _frac(params.theta), Fraction(1), "<=")
        )
    return report
