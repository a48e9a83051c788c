"""Mode-wise symbols of the structurally damped wave operator.

Each Fourier mode of u_tt + (-Lap)^sigma u_t - Lap u = 0 obeys the scalar
ODE  w'' + rho^(2 sigma) w' + rho^2 w = 0  with characteristic roots

    lambda_pm(rho) = (-rho^(2 sigma) +- sqrt(rho^(4 sigma) - 4 rho^2)) / 2.

This module evaluates the roots, the propagator symbols k0 (position
response) and k1 (velocity response) with their time derivatives, the
plus/minus branch split, the diffusion-profile symbols, the smooth
low/mid/high frequency cutoffs, and the quadrature weights used by the
exponential integrator.  Every formula is branch-selected so that it stays
numerically stable in all regimes: near the frequency origin, inside the
double-root band, and in the oscillatory range.

All functions are vectorized over ``rho`` (scalars in, scalars out) and
pure; callers may parallelize over modes freely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Roots",
    "SymbolPair",
    "DegenerateSplitError",
    "DEGENERATE_BAND_REL",
    "characteristic_roots",
    "kernel_symbols",
    "split_symbols",
    "profile_symbols",
    "frequency_cutoffs",
    "cutoff_thresholds",
    "duhamel_weights",
]

# Relative width |lambda_+ - lambda_-| < DEGENERATE_BAND_REL * rho^(2 sigma)
# inside which the split symbols are singular and the confluent/symmetric
# forms are used instead.
DEGENERATE_BAND_REL = 1e-6

# Below this value of |spread * t| the exponential difference loses digits;
# switch to the symmetric sinh/sin forms with series kernels.
_SMALL_PHASE = 1e-3
_SERIES_CUT = 1e-4


class DegenerateSplitError(ValueError):
    """Split symbols requested inside the double-root band."""


@dataclass
class Roots:
    """Characteristic roots and the regime label per mode.

    regime is one of "zero", "subcritical", "degenerate", "oscillatory";
    an array of labels for array input.
    """

    lambda_plus: np.ndarray
    lambda_minus: np.ndarray
    regime: np.ndarray


@dataclass
class SymbolPair:
    """Propagator symbols k0, k1 and their time derivatives dk0, dk1."""

    k0: np.ndarray
    k1: np.ndarray
    dk0: np.ndarray
    dk1: np.ndarray


def _as_array(rho):
    a = np.asarray(rho, dtype=float)
    return a, a.ndim == 0


def _sinhc(x):
    """sinh(x)/x with a series kernel near zero."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SERIES_CUT
    xs = np.where(small, 0.0, x)
    out = np.where(small, 1.0 + x * x / 6.0 + x**4 / 120.0, np.sinh(xs) / np.where(small, 1.0, xs))
    return out


def _sinc(x):
    """sin(x)/x with a series kernel near zero."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SERIES_CUT
    xs = np.where(small, 1.0, x)
    return np.where(small, 1.0 - x * x / 6.0 + x**4 / 120.0, np.sin(xs) / xs)


def characteristic_roots(sigma: float, rho) -> Roots:
    """Roots of z^2 + rho^(2 sigma) z + rho^2, stable in every regime.

    The subcritical branch uses the rationalized form
    lambda_+ = -2 rho^(2-2 sigma) / (1 + sqrt(1 - 4 rho^(2-4 sigma)))
    to avoid cancellation, and lambda_- = -rho^(2 sigma) - lambda_+ so the
    root sum is exact.
    """
    if not 0 < sigma < 0.5:
        raise ValueError("sigma must lie in (0, 1/2)")
    r, scalar = _as_array(rho)
    if np.any(r < 0):
        raise ValueError("rho must be nonnegative")
    r = np.atleast_1d(r)

    gamma = r**(2 * sigma)          # damping scale per mode
    disc = gamma**2 - 4 * r**2      # discriminant of the quadratic
    lp = np.zeros(r.shape, dtype=complex)
    lm = np.zeros(r.shape, dtype=complex)
    regime = np.full(r.shape, "subcritical", dtype="<U11")

    zero = r == 0
    regime[zero] = "zero"

    spread = np.sqrt(np.abs(disc))
    deg = (~zero) & (spread < DEGENERATE_BAND_REL * gamma)
    regime[deg] = "degenerate"
    lp[deg] = lm[deg] = -0.5 * gamma[deg]

    sub = (~zero) & (~deg) & (disc > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        root = np.sqrt(np.maximum(1.0 - 4.0 * r**(2 - 4 * sigma), 0.0))
        lplus = -2.0 * r**(2 - 2 * sigma) / (1.0 + root)
    lp[sub] = lplus[sub]
    lm[sub] = -gamma[sub] - lplus[sub]

    osc = (~zero) & (~deg) & (disc < 0)
    regime[osc] = "oscillatory"
    b = 0.5 * spread
    lp[osc] = -0.5 * gamma[osc] + 1j * b[osc]
    lm[osc] = -0.5 * gamma[osc] - 1j * b[osc]

    if scalar:
        return Roots(lp[0], lm[0], regime[0])
    return Roots(lp, lm, regime)


def kernel_symbols(sigma: float, t: float, rho) -> SymbolPair:
    """Real propagator symbols at time t >= 0.

    k0(0) = 1, k1(0) = 0, dk0(0) = 0, dk1(0) = 1 exactly; dk0 = -rho^2 k1
    identically.  Branches:

      rho = 0          : k0 = 1, k1 = t
      double-root band : confluent forms via the symmetric sinh kernel
      subcritical      : exponential difference, or the symmetric form
                         when the spread phase is small
      oscillatory      : explicitly real sin/cos forms
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    r, scalar = _as_array(rho)
    r = np.atleast_1d(r)
    k0 = np.empty(r.shape)
    k1 = np.empty(r.shape)
    dk1 = np.empty(r.shape)

    gamma = r**(2 * sigma)
    disc = gamma**2 - 4 * r**2
    abar = -0.5 * gamma

    zero = r == 0
    k0[zero], k1[zero], dk1[zero] = 1.0, float(t), 1.0

    nz = ~zero
    spread = np.sqrt(np.abs(disc))
    sym = nz & (disc >= 0) & (spread * t < _SMALL_PHASE)
    if np.any(sym):
        # symmetric form: exact at the double root, series-stable nearby
        d = spread[sym]
        a = abar[sym]
        ea = np.exp(a * t)
        sh = _sinhc(0.5 * d * t)
        ch = np.cosh(0.5 * d * t)
        k1[sym] = t * ea * sh
        k0[sym] = ea * (ch - a * t * sh)
        dk1[sym] = ea * (ch + a * t * sh)

    sub = nz & (disc > 0) & (spread * t >= _SMALL_PHASE)
    if np.any(sub):
        d = spread[sub]
        lp = abar[sub] + 0.5 * d
        lm = abar[sub] - 0.5 * d
        ep, em = np.exp(lp * t), np.exp(lm * t)
        k1[sub] = (ep - em) / d
        k0[sub] = (lp * em - lm * ep) / d
        dk1[sub] = (lp * ep - lm * em) / d

    osc = nz & (disc < 0)
    if np.any(osc):
        b = 0.5 * spread[osc]
        a = abar[osc]
        ea = np.exp(a * t)
        sn = _sinc(b * t)
        cs = np.cos(b * t)
        k1[osc] = t * ea * sn
        k0[osc] = ea * (cs - a * t * sn)
        dk1[osc] = ea * (cs + a * t * sn)

    dk0 = -(r**2) * k1
    if scalar:
        return SymbolPair(k0[0], k1[0], dk0[0], dk1[0])
    return SymbolPair(k0, k1, dk0, dk1)


def split_symbols(sigma: float, t: float, rho):
    """Branch symbols (k1_plus, k1_minus, k0_plus, k0_minus).

    k1_pm = +- exp(lambda_pm t) / (lambda_+ - lambda_-) and
    k0_pm = -lambda_mp k1_pm, so that the pairs recombine to the unsplit
    symbols.  Complex in the oscillatory regime.  Raises
    DegenerateSplitError at rho = 0 or inside the double-root band, where
    the split is singular and callers must use kernel_symbols instead.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    r, scalar = _as_array(rho)
    r = np.atleast_1d(r)
    roots = characteristic_roots(sigma, r)
    bad = (roots.regime == "zero") | (roots.regime == "degenerate")
    if np.any(bad):
        raise DegenerateSplitError("split symbols singular at or near the double root")
    d = roots.lambda_plus - roots.lambda_minus
    k1p = np.exp(roots.lambda_plus * t) / d
    k1m = -np.exp(roots.lambda_minus * t) / d
    k0p = -roots.lambda_minus * k1p
    k0m = -roots.lambda_plus * k1m
    if np.isrealobj(np.asarray(rho)) and np.all(roots.regime == "subcritical"):
        k1p, k1m, k0p, k0m = (np.real(v) for v in (k1p, k1m, k0p, k0m))
    if scalar:
        return k1p[0], k1m[0], k0p[0], k0m[0]
    return k1p, k1m, k0p, k0m


def profile_symbols(sigma: float, t: float, rho):
    """Diffusion-profile symbols (g_hat, h_hat).

    h_hat = exp(-rho^(2(1-sigma)) t) and g_hat = rho^(-2 sigma) h_hat.
    The rho = 0 value of g_hat is set to 0: on a discrete grid the single
    origin cell cannot represent the integrable singularity, and the
    profile comparison norms exclude that cell (its contribution is
    reported separately by the harness).
    """
    r, scalar = _as_array(rho)
    r = np.atleast_1d(r)
    h = np.exp(-(r**(2 * (1 - sigma))) * t)
    with np.errstate(divide="ignore"):
        g = np.where(r > 0, r**(-2.0 * sigma), 0.0) * h
    if scalar:
        return g[0], h[0]
    return g, h


def cutoff_thresholds(sigma: float) -> tuple[float, float, float, float]:
    """Support boundaries (low_flat, low_zero, high_zero, high_flat).

    The low cutoff is 1 below 2^(-3/(1-2 sigma)) and 0 above
    2^(-2/(1-2 sigma)); the high cutoff is 0 below 1 and 1 above 2.
    """
    lo_flat = 2.0 ** (-3.0 / (1.0 - 2.0 * sigma))
    lo_zero = 2.0 ** (-2.0 / (1.0 - 2.0 * sigma))
    return lo_flat, lo_zero, 1.0, 2.0


def _bridge_bump(x):
    # decreasing C-infinity bridge on [0, 1]: exp(1 - 1/(1 - x^2))
    x = np.clip(x, 0.0, 1.0)
    inner = np.maximum(1.0 - x * x, 1e-300)
    out = np.exp(1.0 - 1.0 / inner)
    return np.where(x >= 1.0, 0.0, np.where(x <= 0.0, 1.0, out))


def _bridge_smoothstep(x):
    # alternative profile with flat derivatives at both ends
    x = np.clip(x, 0.0, 1.0)
    def f(y):
        y = np.maximum(y, 1e-300)
        return np.exp(-1.0 / y)
    num = f(1.0 - x)
    return num / (num + f(x))


_BRIDGES = {"bump": _bridge_bump, "smoothstep": _bridge_smoothstep}


def frequency_cutoffs(sigma: float, rho, shape: str = "bump"):
    """Smooth partition of unity (chi_low, chi_mid, chi_high) over |xi|.

    chi_low + chi_mid + chi_high = 1 identically by construction.  The
    transition profile is free as long as the supports are respected;
    ``shape`` selects "bump" (default) or "smoothstep" so that rate
    measurements can be spot-checked for shape insensitivity.
    """
    if not 0 < sigma < 0.5:
        raise ValueError("sigma must lie in (0, 1/2)")
    bridge = _BRIDGES.get(shape)
    if bridge is None:
        raise ValueError(f"unknown cutoff shape {shape!r}")
    r, scalar = _as_array(rho)
    r = np.atleast_1d(r)
    a, b, c, d = cutoff_thresholds(sigma)
    lo = np.where(r <= a, 1.0, np.where(r >= b, 0.0, bridge((r - a) / (b - a))))
    hi = np.where(r >= d, 1.0, np.where(r <= c, 0.0, bridge((d - r) / (d - c))))
    mid = 1.0 - lo - hi
    if scalar:
        return lo[0], mid[0], hi[0]
    return lo, mid, hi


def _series_weights(sigma, h, r, order):
    """Short-time Taylor route for the quadrature weights.

    k1(s) = sum c_j s^j with c_1 = 1 and the two-term recurrence from the
    mode ODE; integrate term by term.  Used when both root scales are
    resolved by h (|lambda| h <= 1/2), where ~40 terms reach round-off.
    """
    gamma = r**(2 * sigma)
    rho2 = r**2
    w0 = np.zeros(r.shape)
    w1 = np.zeros(r.shape)
    k1h = np.zeros(r.shape)
    c_prev = np.zeros(r.shape)          # c_0
    c_cur = np.ones(r.shape)            # c_1
    hpow = h                            # h^j at j = 1
    small_streak = 0
    for j in range(1, 60):
        term0 = c_cur * hpow * h / (j + 1)
        w0 += term0
        w1 += c_cur * hpow * h * h / ((j + 1) * (j + 2))
        k1h += c_cur * hpow
        # c_{j+1} from the ODE recurrence at power j - 1
        c_next = -(gamma * j * c_cur + rho2 * c_prev) / ((j + 1) * j)
        c_prev, c_cur = c_cur, c_next
        hpow = hpow * h
        # individual coefficients may vanish; stop on two tiny terms in a row
        if np.all(np.abs(term0) <= 1e-18 * np.maximum(np.abs(w0), 1e-300)):
            small_streak += 1
            if small_streak >= 2:
                break
        else:
            small_streak = 0
    return w0, w1, k1h


def duhamel_weights(sigma: float, h: float, rho, order: int):
    """Quadrature weights of the exponential integrator over one step h.

    Returns (position_weights, velocity_weights):
      order 1: ([W0], [k1(h)])
      order 2: ([W0, W1], [k1(h), W0])
    where W_m = integral_0^h k1(h - s) s^m ds and the velocity weights are
    the same moments of dk1.  The identities dk1-moment_0 = k1(h) and
    dk1-moment_1 = W0 are exact.  For resolved steps the weights come from
    the integrated mode ODE; a Taylor series takes over when |lambda h| is
    small, removing the cancellation of the closed forms.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    r, scalar = _as_array(rho)
    r = np.atleast_1d(r)

    w0 = np.empty(r.shape)
    w1 = np.empty(r.shape)
    k1h = np.empty(r.shape)

    zero = r == 0
    w0[zero] = 0.5 * h * h
    w1[zero] = h**3 / 6.0
    k1h[zero] = h

    gamma = r**(2 * sigma)
    small = (~zero) & (gamma * h <= 0.5) & (r * h <= 0.5)
    if np.any(small):
        s0, s1, sk = _series_weights(sigma, h, r[small], order)
        w0[small], w1[small], k1h[small] = s0, s1, sk

    big = (~zero) & (~small)
    if np.any(big):
        # integrate the mode ODE: W0 = (1 - dk1 - gamma k1)/rho^2 and
        # W1 = (h - k1 - gamma W0)/rho^2, exact for rho > 0
        pair = kernel_symbols(sigma, h, r[big])
        g = gamma[big]
        rho2 = r[big] ** 2
        k1h[big] = pair.k1
        w0[big] = (1.0 - pair.dk1 - g * pair.k1) / rho2
        w1[big] = (h - pair.k1 - g * w0[big]) / rho2

    if order == 1:
        wu, wv = (w0,), (k1h,)
    else:
        wu, wv = (w0, w1), (k1h, w0.copy())
    if scalar:
        wu = tuple(w[0] for w in wu)
        wv = tuple(w[0] for w in wv)
    return wu, wv
