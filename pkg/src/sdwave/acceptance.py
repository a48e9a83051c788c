"""The shipped verification suite: ten criteria covering profile decay,
linear and semilinear solution decay, the two diffusion-limit remainders,
kernel-piece rates, the per-mode oracle, contraction observability, the
exact exponent table, and the structural invariants.

Each criterion returns a CriterionResult with one printable line; the
suite passes only when every criterion does.  Tolerances are fixed here,
not calibrated at run time.
"""

from __future__ import annotations

import time as _clock
from dataclasses import dataclass, field
from fractions import Fraction as Fr

import numpy as np

from . import dispersion, fit, norms
from .config import DataSpec, ExperimentConfig, GridSpec, PicardSpec, RunSpec, TimeSpec
from .exponents import (
    SimParams,
    critical_exponent,
    forcing_decay_exponent,
    derivative_norm_index,
    linear_remainder_rate,
    lorentz_data_indices,
    nu_upper_bound,
    profile_remainder_rate,
    solution_decay_exponents,
    existence_case,
    validate_hypotheses,
    weight_window,
)
from .grid import gaussian_data, hermitian_defect, make_grid, to_spectrum
from .harness import (
    ExperimentResult,
    geometric_times,
    profile_norm_series,
    run_linear,
    run_picard,
    run_simulate,
)
from .propagator import State, kernel_rate_table, linear_step

__all__ = ["CriterionResult", "ALL_CRITERIA", "run_suite", "reference_config"]


@dataclass
class CriterionResult:
    name: str
    passed: bool
    detail: str
    extras: dict = field(default_factory=dict)
    seconds: float = 0.0

    def __post_init__(self):
        self.passed = bool(self.passed)   # numpy truth values leak in otherwise

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.name}: {self.detail} ({self.seconds:.1f}s)"


def reference_config() -> ExperimentConfig:
    """The semilinear reference configuration (criteria 6, 7 and 8)."""
    return ExperimentConfig(
        params=SimParams(n=2, sigma=0.25, p=3.0, r=1.0, delta=0.25, sbar=1.0,
                         theta=1.0, nu=0.2, f_kind="signed_power"),
        grid=GridSpec(points=256, box=1600.0),
        data=DataSpec(u0_amplitude=0.0, u0_width=4.0,
                      u1_amplitude=3e-2, u1_width=4.0),
        time=TimeSpec(dt=0.1, order=2, t_final=500.0),
        run=RunSpec(verify=True, verify_mode="profile"),
        picard=PicardSpec(horizon=20.0, dt=0.1, max_iter=12, tol=1e-9),
    )


def linear_config() -> ExperimentConfig:
    """The linear reference configuration (criteria 2 and 3)."""
    return ExperimentConfig(
        params=SimParams(n=2, sigma=0.25, p=3.0, delta=0.25, theta=1.0,
                         f_kind="none"),
        grid=GridSpec(points=512, box=2800.0),
        data=DataSpec(u0_amplitude=0.0, u0_width=4.0,
                      u1_amplitude=1.0, u1_width=4.0),
        time=TimeSpec(t_final=1000.0),
    )


def _timed(func):
    start = _clock.perf_counter()
    out = func()
    out.seconds = _clock.perf_counter() - start
    return out


def criterion_profile_decay() -> CriterionResult:
    """1: profile L2 norms decay at their scaling exponents."""
    g = make_grid(2, 512, 2800.0)
    times = geometric_times(10.0, 1000.0)
    series = profile_norm_series(g, 0.25, times)
    rg = fit.fit_decay(times, series.extra["g_l2"], ("fixed", 10.0, 1000.0),
                       predicted=-1.0 / 3.0, tolerance=0.02, quantity="g_profile_l2")
    rh = fit.fit_decay(times, series.extra["h_l2"], ("fixed", 10.0, 1000.0),
                       predicted=-2.0 / 3.0, tolerance=0.02, quantity="h_profile_l2")
    ok = rg.verdict == "pass" and rh.verdict == "pass"
    return CriterionResult(
        "profile decay", ok,
        f"singular slope {rg.slope:+.4f} (want -1/3 +- 0.02), "
        f"regular slope {rh.slope:+.4f} (want -2/3 +- 0.02)",
        {"g": rg.as_dict(), "h": rh.as_dict()})


_LINEAR_CACHE: dict = {}


def _linear_result() -> ExperimentResult:
    if "res" not in _LINEAR_CACHE:
        _LINEAR_CACHE["res"] = run_linear(linear_config(), window=(50.0, 1000.0),
                                          tolerance=0.05)
    return _LINEAR_CACHE["res"]


def criterion_linear_decay() -> CriterionResult:
    """2: linear solution decays at the velocity-data rate."""
    res = _linear_result()
    rep = next(r for r in res.reports if r.quantity == "solution_l2")
    return CriterionResult(
        "linear solution decay", rep.verdict == "pass",
        f"L2 slope {rep.slope:+.4f} (want -1/3 +- 0.05)", {"report": rep.as_dict()})


def criterion_linear_diffusion() -> CriterionResult:
    """3: two-profile remainder decays below -1 + 0.1; ratio decreasing."""
    res = _linear_result()
    series = res.series
    rep = fit.fit_decay(series.t, series.herr, ("fixed", 50.0, 1000.0),
                        predicted=-1.0, tolerance=0.1, quantity="linear_remainder")
    one_sided = rep.slope <= -1.0 + 0.1
    last = series.t >= series.t[-1] / 10.0
    ratios = series.ratio_g[last]
    monotone = bool(np.all(np.diff(ratios) < 0))
    ok = one_sided and monotone
    return CriterionResult(
        "linear diffusion limit", ok,
        f"remainder slope {rep.slope:+.4f} (want <= -0.9), "
        f"ratio decreasing over last decade: {monotone}",
        {"report": rep.as_dict()})


def criterion_kernel_rates() -> CriterionResult:
    """4: split-kernel low-band rates match; mid/high decay exponentially."""
    sigma = 0.25
    big = make_grid(2, 1024, 20000.0)
    datum_big = gaussian_data(big, 1.0, 2.0)
    low_full = kernel_rate_table(big, sigma, "K1", "low", 0.0, datum_big,
                                 geometric_times(600.0, 10000.0),
                                 window=(600.0, 10000.0), tolerance=0.05)
    low_minus = kernel_rate_table(big, sigma, "K1minus", "low", 0.0, datum_big,
                                  geometric_times(10.0, 40.0, ratio=1.05),
                                  window=(10.0, 40.0), tolerance=0.1)
    small = make_grid(2, 256, 160.0)
    datum_small = gaussian_data(small, 1.0, 2.0)
    mid = kernel_rate_table(small, sigma, "K1", "mid", 0.0, datum_small,
                            geometric_times(1.0, 600.0), window=(1.0, 600.0))
    high = kernel_rate_table(small, sigma, "K1", "high", 0.0, datum_small,
                             geometric_times(0.5, 40.0), window=(0.5, 40.0))
    ok = (low_full.report.verdict == "pass" and low_minus.report.verdict == "pass"
          and mid.report.slope < 0 and high.report.slope < 0)
    return CriterionResult(
        "kernel band rates", ok,
        f"low slope {low_full.report.slope:+.4f} (want -1/3 +- 0.05), "
        f"slow-branch slope {low_minus.report.slope:+.4f} (want -1 +- 0.1), "
        f"mid rate {mid.report.slope:+.2e} < 0, high rate {high.report.slope:+.3f} < 0",
        {k: v.report.as_dict() for k, v in
         {"low": low_full, "minus": low_minus, "mid": mid, "high": high}.items()})


def _mode_ode_oracle(sigma: float, rho: float, t: float):
    """Adaptive integration of w'' + rho^(2 sigma) w' + rho^2 w = 0."""
    from scipy.integrate import solve_ivp

    gamma, rho2 = rho ** (2 * sigma), rho**2

    def rhs(_, y):
        return [y[1], -gamma * y[1] - rho2 * y[0]]

    out = {}
    for tag, y0 in (("k0", [1.0, 0.0]), ("k1", [0.0, 1.0])):
        sol = solve_ivp(rhs, (0.0, t), y0, method="DOP853",
                        rtol=1e-12, atol=1e-14, dense_output=True)
        w, dw = sol.sol(t)
        out[tag], out["d" + tag] = float(w), float(dw)
    return out


def criterion_mode_oracle() -> CriterionResult:
    """5: symbols match the per-mode ODE; semigroup and symbol identities."""
    rng = np.random.default_rng(20240817)
    worst = 0.0
    for _ in range(64):
        sigma = float(rng.uniform(0.06, 0.44))
        rho = float(10.0 ** rng.uniform(-3.0, 1.0))
        t = float(rng.uniform(0.1, 100.0))
        # keep the decay depth inside the oracle's own accuracy range and
        # measure relative to the decay envelope, not oscillation zeros
        t = min(t, 25.0 / rho ** (2 * sigma))
        pair = dispersion.kernel_symbols(sigma, t, rho)
        ref = _mode_ode_oracle(sigma, rho, t)
        envelope = float(np.exp(-0.5 * rho ** (2 * sigma) * t))
        scale = max(abs(ref["k0"]), abs(ref["k1"]), abs(ref["dk1"]), envelope, 1e-12)
        err = max(abs(pair.k0 - ref["k0"]), abs(pair.k1 - ref["k1"]),
                  abs(pair.dk1 - ref["dk1"]), abs(pair.dk0 - ref["dk0"])) / scale
        worst = max(worst, err)
    # near-degenerate coverage
    for sigma in (0.1, 0.25, 0.4):
        rho_c = 2.0 ** (-1.0 / (1.0 - 2.0 * sigma))
        for bump in (0.0, 1e-9, -1e-9, 1e-5):
            rho = rho_c * (1.0 + bump)
            t = 3.0
            pair = dispersion.kernel_symbols(sigma, t, rho)
            ref = _mode_ode_oracle(sigma, rho, t)
            scale = max(abs(ref["k0"]), abs(ref["k1"]), 1e-12)
            err = max(abs(pair.k0 - ref["k0"]), abs(pair.k1 - ref["k1"])) / scale
            worst = max(worst, err)

    semi = 0.0
    ident = 0.0
    for _ in range(64):
        sigma = float(rng.uniform(0.06, 0.44))
        rho = float(10.0 ** rng.uniform(-3.0, 1.0))
        t = float(rng.uniform(0.05, 5.0))
        s = float(rng.uniform(0.05, 5.0))
        a = dispersion.kernel_symbols(sigma, t, rho)
        b = dispersion.kernel_symbols(sigma, s, rho)
        c = dispersion.kernel_symbols(sigma, t + s, rho)
        m_ts = np.array([[a.k0, a.k1], [a.dk0, a.dk1]]) @ np.array(
            [[b.k0, b.k1], [b.dk0, b.dk1]])
        m_c = np.array([[c.k0, c.k1], [c.dk0, c.dk1]])
        semi = max(semi, float(np.max(np.abs(m_ts - m_c)) / (np.max(np.abs(m_c)) + 1e-300)))
        ident = max(ident, abs(a.dk0 + rho**2 * a.k1) / max(abs(a.dk0), 1e-300))
    ok = worst < 1e-8 and semi < 1e-12 and ident < 1e-10
    return CriterionResult(
        "per-mode oracle", ok,
        f"ODE mismatch {worst:.2e} < 1e-8, semigroup {semi:.2e} < 1e-12, "
        f"symbol identity {ident:.2e} < 1e-10")


_SEMI_CACHE: dict = {}


def _semilinear_result() -> ExperimentResult:
    if "res" not in _SEMI_CACHE:
        _SEMI_CACHE["res"] = run_simulate(reference_config(),
                                          window=(50.0, 500.0), tolerance=0.1)
    return _SEMI_CACHE["res"]


def criterion_semilinear_decay() -> CriterionResult:
    """6: semilinear decay triple within 0.1 of the predicted exponents."""
    res = _semilinear_result()
    reps = {r.quantity: r for r in res.reports}
    l2, w, s = (reps["solution_l2"], reps["solution_weighted"], reps["solution_sobolev"])
    margin = res.meta["guard_margin"]
    ok = all(r.verdict == "pass" for r in (l2, w, s)) and margin >= 1e6
    return CriterionResult(
        "semilinear decay", ok,
        f"L2 {l2.slope:+.4f} (want -1/3), weighted {w.slope:+.4f} (want -1/6), "
        f"sobolev {s.slope:+.4f} (want -1), all +- 0.1; guard margin {margin:.1e}",
        {"reports": [r.as_dict() for r in (l2, w, s)]})


def criterion_nonlinear_diffusion() -> CriterionResult:
    """7: profile remainder below the predicted rate; ratio decreasing."""
    res = _semilinear_result()
    series = res.series
    rep = next(r for r in res.reports if r.quantity == "profile_remainder")
    predicted = float(profile_remainder_rate(2, 0.25, 3, 0.25, 1.0, 0.2, sbar=1.0))
    one_sided = rep.slope <= predicted + 0.1
    last = series.t >= series.t[-1] / 10.0
    monotone = bool(np.all(np.diff(series.ratio_g[last]) < 0))
    tail_ok = res.meta["constants"]["tail_bound"] <= 0.01 * abs(
        res.meta["constants"]["big_theta"])
    ok = one_sided and monotone and tail_ok
    return CriterionResult(
        "nonlinear diffusion limit", ok,
        f"remainder slope {rep.slope:+.4f} (want <= {predicted + 0.1:+.2f}), "
        f"ratio decreasing: {monotone}, tail below 1%: {tail_ok}",
        {"report": rep.as_dict(), "constants": res.meta["constants"]})


def criterion_contraction() -> CriterionResult:
    """8: iterate differences contract; fixed point matches marching."""
    res = run_picard(reference_config())
    ratios = res.meta["ratios"]
    gap = res.meta["march_gap_relative"]
    # nonincreasing from the second recorded ratio onward
    monotone = all(b <= a * (1 + 1e-9) for a, b in zip(ratios[1:], ratios[2:]))
    final_ok = bool(ratios) and ratios[-1] < 0.5
    ok = bool(ratios) and monotone and final_ok and gap < 1e-4
    return CriterionResult(
        "contraction observability", bool(ok),
        f"ratios {['%.2e' % r for r in ratios]}, final < 0.5: {final_ok}, "
        f"march gap {gap:.2e} < 1e-4", res.meta)


def criterion_exponent_table() -> CriterionResult:
    """9: golden table of hand-derived exact exponent values."""
    checks: list[tuple[str, bool]] = []

    def chk(name, cond):
        checks.append((name, bool(cond)))

    chk("critical n2", critical_exponent(2, Fr(1, 4), 1) == Fr(7, 3))
    chk("critical n3", critical_exponent(3, Fr(1, 4), 1) == Fr(9, 5))
    chk("critical r-reduction", critical_exponent(2, Fr(1, 4)) ==
        1 + Fr(2) / (2 - 2 * Fr(1, 4)))
    win = weight_window(2, Fr(1, 4), 1, 3)
    chk("window lo", win.lo == 0)
    chk("window hi", win.hi == Fr(1, 2))
    chk("window extra", win.extra_lo == Fr(-1, 3) and win.extra_strict)
    chk("window member", win.contains(Fr(1, 4)))
    chk("window nonmember", not win.contains(Fr(1, 2)))
    win49 = weight_window(2, Fr(49, 100), 1, 3)
    chk("window narrow", win49.hi == Fr(1, 50) and not win49.empty)
    q0, q1 = lorentz_data_indices(2, 1, Fr(1, 4), Fr(1, 4))
    chk("lorentz idx", (q0, q1) == (Fr(8, 5), Fr(8, 7)))
    q0, q1 = lorentz_data_indices(2, 1, Fr(1, 4), 0)
    chk("lorentz idx d0", (q0, q1) == (Fr(4, 3), Fr(1)))
    chk("lorentz q1 collapse", lorentz_data_indices(3, Fr(3, 2), Fr(1, 4), 0)[1] == Fr(3, 2))
    e = solution_decay_exponents(2, Fr(1, 4), 1, Fr(1, 4), 1)
    chk("decay triple", e == (Fr(-1, 3), Fr(-1, 6), Fr(-1)))
    e0 = solution_decay_exponents(2, Fr(1, 4), 1, 0, 1)
    chk("decay collapse", e0[0] == e0[1] == Fr(-1, 3))
    chk("decay identity", e[2] == e[0] - Fr(1) / (2 * (1 - Fr(1, 4))))
    chk("lin remainder n2", linear_remainder_rate(2, Fr(1, 4), 1, 1) == Fr(-1))
    s_tie = Fr(2, 8)
    chk("branch tie", (1 / (1 - s_tie)) * (Fr(-2, 4) + 3 * s_tie - 1) ==
        (1 / s_tie) * (Fr(-2, 4) + s_tie))
    chk("lin remainder n4", linear_remainder_rate(4, Fr(1, 4), 0, 0) == Fr(-1))
    chk("profile remainder", profile_remainder_rate(2, Fr(1, 4), 3, Fr(1, 4), 1,
                                                    Fr(1, 5), sbar=1) == Fr(-3, 5))
    chk("nu window", nu_upper_bound(2, Fr(1, 4), 3, Fr(1, 4)) == Fr(1, 4))
    g_rate = (1 / (1 - Fr(1, 4))) * (Fr(-2, 4) + Fr(1, 4))
    chk("remainder dominates", profile_remainder_rate(
        2, Fr(1, 4), 3, Fr(1, 4), 1, Fr(1, 5), sbar=1) < g_rate)
    chk("forcing exponent", forcing_decay_exponent(2, Fr(1, 4), 1, 3, 0) == Fr(-5, 3))
    chk("forcing linearity", forcing_decay_exponent(2, Fr(1, 4), 1, 3, 1) -
        forcing_decay_exponent(2, Fr(1, 4), 1, 3, 0) == Fr(2, 3))
    chk("index s1", derivative_norm_index(2, 1) == 1)
    chk("index s15", derivative_norm_index(2, Fr(3, 2)) == Fr(4, 3))
    chk("index s0", derivative_norm_index(2, 0) == 1)
    p_ref = SimParams(n=2, sigma=0.25, p=3.0, delta=0.25, sbar=1.0, nu=0.2)
    chk("hypotheses hold", validate_hypotheses(p_ref, "decay").overall)
    chk("case1 empty n2", 1 + Fr(4) / (2 + 2 - 4 * Fr(1, 4)) ==
        critical_exponent(2, Fr(1, 4)))
    p_sub = SimParams(n=2, sigma=0.25, p=2.0, delta=0.25, sbar=1.0)
    chk("subcritical fails", not validate_hypotheses(p_sub, "decay").overall)
    chk("case labels", (existence_case(2, Fr(1, 4), 3), existence_case(2, Fr(1, 4), 4),
                        existence_case(4, Fr(1, 4), Fr(17, 10))) ==
        ("case2-1", "case2-2", "case1"))
    bad = [name for name, okc in checks if not okc]
    return CriterionResult(
        "exponent golden table", not bad,
        f"{len(checks)} exact checks" + ("" if not bad else f", failing: {bad}"))


def criterion_invariants() -> CriterionResult:
    """10: Parseval, symmetry, energy monotonicity, rearrangement identity,
    partition of unity."""
    rng = np.random.default_rng(7)
    g = make_grid(2, 64, 30.0)
    msgs = []

    u = rng.standard_normal(g.shape)
    parseval = abs(norms.lq_norm(g, u, 2) - norms.l2_spectral(g, to_spectrum(g, u)))
    parseval /= norms.lq_norm(g, u, 2)
    msgs.append(("parseval", parseval < 1e-10))

    state = State(0.0, to_spectrum(g, gaussian_data(g, 1.0, 2.0)),
                  to_spectrum(g, rng.standard_normal(g.shape)), g)
    herm = 0.0
    energies = [norms.energy(g, state.u_hat, state.v_hat)]
    for _ in range(40):
        state = linear_step(state, 0.25, 0.25)
        herm = max(herm, hermitian_defect(g, state.u_hat))
        energies.append(norms.energy(g, state.u_hat, state.v_hat))
    msgs.append(("hermitian", herm < 1e-12))
    msgs.append(("energy monotone", bool(np.all(np.diff(energies) <= 1e-12 * energies[0]))))

    # rearrangement identity at q = r = 2, exact on the breakpoint integral
    worst = 0.0
    for _ in range(20):
        w = gaussian_data(g, float(rng.uniform(0.5, 2.0)), float(rng.uniform(1.0, 3.0)))
        w = w + 0.2 * np.roll(w, g.N // 4, axis=0)
        val = norms.lorentz_quasinorm(g, w, 2.0, 2)
        ref = norms.lq_norm(g, w, 2.0)
        worst = max(worst, abs(val - ref) / ref)
    msgs.append(("rearrangement identity", worst < 1e-4))

    rho = np.geomspace(1e-4, 10.0, 10000)
    for shape in ("bump", "smoothstep"):
        lo, mid, hi = dispersion.frequency_cutoffs(0.25, rho, shape=shape)
        msgs.append((f"partition {shape}",
                     bool(np.max(np.abs(lo + mid + hi - 1.0)) < 1e-14)))

    bad = [name for name, okc in msgs if not okc]
    return CriterionResult(
        "structural invariants", not bad,
        "parseval, symmetry, energy, rearrangement, partition all hold"
        if not bad else f"failing: {bad}")


ALL_CRITERIA = [
    ("1", criterion_profile_decay),
    ("2", criterion_linear_decay),
    ("3", criterion_linear_diffusion),
    ("4", criterion_kernel_rates),
    ("5", criterion_mode_oracle),
    ("6", criterion_semilinear_decay),
    ("7", criterion_nonlinear_diffusion),
    ("8", criterion_contraction),
    ("9", criterion_exponent_table),
    ("10", criterion_invariants),
]


def run_suite(which=None, echo=print) -> list[CriterionResult]:
    """Run the acceptance criteria (all by default), echoing one line each."""
    results = []
    for tag, func in ALL_CRITERIA:
        if which and tag not in which:
            continue
        res = _timed(func)
        results.append(res)
        if echo:
            echo(res.line())
    return results
