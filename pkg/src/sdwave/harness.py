"""Experiment runners behind the command-line interface: hypothesis
validation, linear and semilinear decay studies, kernel rate tables, the
fixed-point contraction study, plus deterministic output files with a
hashed manifest.
"""

from __future__ import annotations

import hashlib
import json
import os
import time as _clock
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import fit, norms, profiles, solver
from .config import ExperimentConfig, build_grid_and_data, config_to_toml
from .dispersion import profile_symbols
from .exponents import (
    SimParams,
    linear_remainder_rate,
    profile_remainder_rate,
    solution_decay_exponents,
    validate_hypotheses,
)
from .grid import gaussian_data, make_grid, save_field, to_field
from .propagator import kernel_rate_table

__all__ = [
    "ExperimentResult",
    "run_validate",
    "run_linear",
    "run_simulate",
    "run_kernel_table",
    "run_picard",
    "profile_norm_series",
    "geometric_times",
    "write_outputs",
]

_VERSION = "0.1.0"


@dataclass
class ExperimentResult:
    """Uniform return of every runner: series, rate reports, metadata."""

    name: str
    series: Optional[norms.NormSeries] = None
    reports: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    passed: Optional[bool] = None
    fields: dict = field(default_factory=dict)   # name -> (grid, array)

    def report_dicts(self) -> list:
        return [r.as_dict() for r in self.reports]


def _snapshot_fields(traj) -> dict:
    out = {}
    for label, idx in (("initial", 0), ("final", len(traj.times) - 1)):
        out[f"u_{label}"] = (traj.grid, to_field(traj.grid, traj.u_hats[idx],
                                                 check_real=False).real)
    return out


def geometric_times(t_lo: float, t_hi: float, ratio: float = 1.1) -> np.ndarray:
    """Geometric schedule t_lo * ratio^k clipped to [t_lo, t_hi]."""
    if t_lo <= 0 or t_hi <= t_lo:
        raise ValueError("need 0 < t_lo < t_hi")
    pts = [t_lo]
    while pts[-1] * ratio <= t_hi * (1.0 + 1e-12):
        pts.append(pts[-1] * ratio)
    if pts[-1] < t_hi * (1.0 - 1e-9):
        pts.append(t_hi)
    return np.asarray(pts)


def run_validate(cfg: ExperimentConfig) -> ExperimentResult:
    """Evaluate the hypothesis set selected by run.verify_mode."""
    report = validate_hypotheses(cfg.params, cfg.run.verify_mode)
    res = ExperimentResult(name="validate", meta={"hypotheses": report.as_dict()})
    res.passed = report.overall
    return res


def profile_norm_series(grid, sigma: float, times) -> norms.NormSeries:
    """L2 norms of the two diffusion profiles over a time schedule.

    Mode sums with the zero cell excluded (the singular profile's origin
    cell is zero by convention; the regular profile's is excluded for
    consistency of the comparison norms).
    """
    mask = np.ones(grid.shape)
    mask[(0,) * grid.n] = 0.0
    mw = grid.mode_weight
    gs, hs = [], []
    for t in times:
        g_hat, h_hat = profile_symbols(sigma, float(t), grid.rho)
        gs.append(float(np.sqrt(np.sum((g_hat * mask) ** 2) * mw)))
        hs.append(float(np.sqrt(np.sum((h_hat * mask) ** 2) * mw)))
    times = np.asarray(times, dtype=float)
    zeros = np.zeros_like(times)
    return norms.NormSeries(t=times, l2=zeros, wdelta=zeros, hs1=zeros,
                            energy=zeros,
                            extra={"g_l2": np.asarray(gs), "h_l2": np.asarray(hs)})


def _policy(window):
    return ("fixed",) + tuple(window) if window is not None else "last_decade"


def run_linear(cfg: ExperimentConfig, window: Optional[tuple] = None,
               tolerance: float = fit.TOL_LINEAR) -> ExperimentResult:
    """Linear decay and two-profile remainder study via the exact propagator."""
    params = cfg.params
    if params.f_kind != "none":
        params = SimParams(**{**params.__dict__, "f_kind": "none"})
        cfg = ExperimentConfig(**{**cfg.__dict__, "params": params})
    traj, series = solver.run(cfg)
    g, u0, u1 = build_grid_and_data(cfg)
    consts = profiles.profile_constants(u0, u1, params, g, cfg.time.t_final)
    profiles.diffusion_diagnostic(series, consts, params)
    policy = _policy(window)
    e_l2, _, _ = solution_decay_exponents(params.n, params.sigma, 1, params.delta, params.sbar)
    rem = linear_remainder_rate(params.n, params.sigma, params.theta, params.theta)
    reports = [
        fit.fit_decay(series.t, series.l2, policy, float(e_l2),
                      tolerance, quantity="solution_l2"),
        fit.fit_decay(series.t, series.herr, policy, float(rem),
                      tolerance, quantity="profile_remainder"),
    ]
    meta = {"constants": consts.__dict__, "run": traj.meta}
    return ExperimentResult(name="linear", series=series, reports=reports,
                            meta=meta, fields=_snapshot_fields(traj))


def run_simulate(cfg: ExperimentConfig, window: Optional[tuple] = None,
                 tolerance: float = fit.TOL_SEMILINEAR) -> ExperimentResult:
    """Semilinear march with decay fits and the diffusion-profile remainder."""
    params = cfg.params
    traj, series = solver.run(cfg)
    g, u0, u1 = build_grid_and_data(cfg)
    consts = profiles.profile_constants(
        u0, u1, params, g, cfg.time.t_final,
        mass_times=series.t, mass_values=series.extra["mass"],
        mass_integral=series.extra.get("f_integral", 0.0))
    profiles.diffusion_diagnostic(series, consts, params)
    policy = _policy(window)
    e_l2, e_w, e_s = solution_decay_exponents(
        params.n, params.sigma, params.r, params.delta, params.sbar)
    reports = [
        fit.fit_decay(series.t, series.l2, policy, float(e_l2),
                      tolerance, quantity="solution_l2"),
        fit.fit_decay(series.t, series.wdelta, policy, float(e_w),
                      tolerance, quantity="solution_weighted"),
        fit.fit_decay(series.t, series.hs1, policy, float(e_s),
                      tolerance, quantity="solution_sobolev"),
    ]
    if params.f_kind != "none":
        rem = profile_remainder_rate(params.n, params.sigma, params.p,
                                     params.delta, params.theta, params.nu,
                                     sbar=params.sbar)
        reports.append(fit.fit_decay(series.t, series.gerr, policy,
                                     float(rem), tolerance,
                                     quantity="profile_remainder"))
    meta = {"constants": consts.__dict__, "run": traj.meta,
            "guard_margin": traj.meta["guard"] / max(np.max(series.l2), 1e-300)}
    return ExperimentResult(name="simulate", series=series, reports=reports,
                            meta=meta, fields=_snapshot_fields(traj))


def run_kernel_table(cfg: ExperimentConfig) -> ExperimentResult:
    """Measured kernel-piece decay rows against the predicted exponents."""
    rows = cfg.kernel_rows
    if not rows:
        raise ValueError("config has no kernel_table rows")
    res = ExperimentResult(name="kernel-table")
    base_grid = None
    for row in rows:
        n_pts = row.points or cfg.grid.points
        box = row.box or cfg.grid.box
        if base_grid is None or base_grid.N != n_pts or base_grid.L != box:
            base_grid = make_grid(cfg.params.n, n_pts, box)
        datum = gaussian_data(base_grid, cfg.data.u1_amplitude, cfg.data.u1_width)
        if row.samples:
            t_list = np.geomspace(row.t_lo, row.t_hi, row.samples)
        else:
            t_list = geometric_times(row.t_lo, row.t_hi)
        table = kernel_rate_table(
            base_grid, cfg.params.sigma, row.which, row.piece, row.theta,
            datum, t_list, window=(row.t_lo, row.t_hi), tolerance=row.tolerance)
        res.reports.append(table.report)
        res.meta.setdefault("rows", []).append({
            "which": row.which, "piece": row.piece, "theta": row.theta,
            "grid": [n_pts, box],
            "times": [float(t) for t in table.times],
            "values": [float(v) for v in table.values]})
    return res


def run_picard(cfg: ExperimentConfig) -> ExperimentResult:
    """Contraction study: iterate the solution map and compare with marching."""
    g, u0, u1 = build_grid_and_data(cfg)
    params = cfg.params
    pc = cfg.picard
    traj, ratios = solver.picard_solve(
        g, u0, u1, params, pc.horizon, pc.dt, pc.max_iter, pc.tol,
        guard_factor=cfg.run.guard_factor)
    # marching comparison on the same lattice
    from .grid import to_spectrum
    u0h, u1h = to_spectrum(g, u0), to_spectrum(g, u1)
    if params.f_kind != "none":
        u0h = np.where(g.dealias, u0h, 0.0)
        u1h = np.where(g.dealias, u1h, 0.0)
    from .propagator import State
    state = State(0.0, u0h, u1h, g)
    gap = 0.0
    scale = 1e-300
    for k, t in enumerate(traj.times):
        if k > 0:
            state = solver.etd_step(state, params, pc.dt, order=2)
        d = norms.l2_spectral(g, state.u_hat - traj.u_hats[k])
        s = norms.l2_spectral(g, state.u_hat)
        gap = max(gap, d)
        scale = max(scale, s)
    res = ExperimentResult(name="picard")
    res.meta = {
        "ratios": [float(r) for r in ratios],
        "diffs": [float(d) for d in traj.meta.get("diffs", [])],
        "iterations": traj.meta.get("iterations"),
        "converged": traj.meta.get("converged"),
        "march_gap_relative": float(gap / scale),
    }
    contracting = all(r < 1.0 for r in ratios)
    res.passed = bool(traj.meta.get("converged")) and contracting
    return res


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_outputs(outdir: str, cfg: ExperimentConfig, result: ExperimentResult,
                  fields: Optional[dict] = None) -> dict:
    """Persist series/reports/fields and the manifest; returns the manifest."""
    if fields is None:
        fields = result.fields
    os.makedirs(outdir, exist_ok=True)
    written = []
    base = result.name
    if result.series is not None and "csv" in cfg.output.formats:
        path = os.path.join(outdir, f"{base}_series.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(result.series.to_csv())
        written.append(path)
    if "json" in cfg.output.formats:
        path = os.path.join(outdir, f"{base}_rates.json")
        # timings are manifest-only so re-runs stay byte-identical
        meta = _jsonable(result.meta)
        if isinstance(meta.get("run"), dict):
            meta["run"] = {k: v for k, v in meta["run"].items() if k != "wall_time"}
        payload = {"reports": result.report_dicts(), "meta": meta}
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(path)
    if fields and "fields" in cfg.output.formats:
        for name, (grid_obj, arr) in fields.items():
            path = os.path.join(outdir, f"{base}_{name}.f64")
            save_field(path, grid_obj, arr)
            written.append(path)
    cfg_text = config_to_toml(cfg)
    manifest = {
        "name": base,
        "version": _VERSION,
        "config_sha256": hashlib.sha256(cfg_text.encode()).hexdigest(),
        "written_at": _clock.strftime("%Y-%m-%dT%H:%M:%S", _clock.gmtime()),
        "wall_time": result.meta.get("run", {}).get("wall_time"),
        "files": {os.path.basename(p): _sha256(p) for p in sorted(written)},
    }
    path = os.path.join(outdir, f"{base}_manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    cfg_path = os.path.join(outdir, f"{base}_config.toml")
    with open(cfg_path, "w", encoding="utf-8") as fh:
        fh.write(cfg_text)
    return manifest


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj
