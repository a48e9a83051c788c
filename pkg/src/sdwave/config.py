"""Experiment configuration: TOML schema, strict parsing, and lossless
serialization.

Unknown keys are errors, not warnings: silent typos in exponent-sensitive
parameters are the top user hazard.  Every field has a default, so a
config file only states what it changes.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, fields

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:  # pragma: no cover - version dependent
    import tomli as _toml

from .exponents import SimParams
from .grid import Grid, gaussian_data, load_field, make_grid

__all__ = [
    "ConfigError",
    "GridSpec",
    "DataSpec",
    "TimeSpec",
    "OutputSpec",
    "RunSpec",
    "PicardSpec",
    "KernelRow",
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "config_to_toml",
    "build_grid_and_data",
]


class ConfigError(ValueError):
    """Malformed configuration, with the offending field in the message."""


@dataclass(frozen=True)
class GridSpec:
    points: int = 256          # N per axis, power of two
    box: float = 100.0         # half-length L


@dataclass(frozen=True)
class DataSpec:
    u0_amplitude: float = 0.0
    u0_width: float = 1.0
    u1_amplitude: float = 1.0
    u1_width: float = 1.0
    u0_file: str = ""
    u1_file: str = ""


@dataclass(frozen=True)
class TimeSpec:
    dt: float = 0.0            # 0 means the automatic step policy
    order: int = 2
    t_final: float = 100.0
    sample_ratio: float = 1.1
    sample_start: float = 1.0
    force_stepping: bool = False


@dataclass(frozen=True)
class OutputSpec:
    directory: str = "out"
    formats: tuple = ("csv", "json")


@dataclass(frozen=True)
class RunSpec:
    verify: bool = False
    verify_mode: str = "decay"
    guard_factor: float = 1e12


@dataclass(frozen=True)
class PicardSpec:
    horizon: float = 20.0
    dt: float = 0.1
    max_iter: int = 12
    tol: float = 1e-9


@dataclass(frozen=True)
class KernelRow:
    which: str = "K1"
    piece: str = "low"
    theta: float = 0.0
    t_lo: float = 10.0
    t_hi: float = 1000.0
    samples: int = 0           # 0 means the geometric schedule at ratio 1.1
    points: int = 0            # optional grid override
    box: float = 0.0
    tolerance: float = 0.05


@dataclass(frozen=True)
class ExperimentConfig:
    params: SimParams = field(default_factory=lambda: SimParams(n=2, sigma=0.25))
    grid: GridSpec = field(default_factory=GridSpec)
    data: DataSpec = field(default_factory=DataSpec)
    time: TimeSpec = field(default_factory=TimeSpec)
    output: OutputSpec = field(default_factory=OutputSpec)
    run: RunSpec = field(default_factory=RunSpec)
    picard: PicardSpec = field(default_factory=PicardSpec)
    kernel_rows: tuple = ()


_SECTIONS = {
    "params": SimParams,
    "grid": GridSpec,
    "data": DataSpec,
    "time": TimeSpec,
    "output": OutputSpec,
    "run": RunSpec,
    "picard": PicardSpec,
}


def _coerce(cls, section: str, table: dict):
    known = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, value in table.items():
        if key not in known:
            raise ConfigError(f"unknown key {section}.{key}")
        if isinstance(value, list):
            value = tuple(value)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid section [{section}]: {exc}") from exc


def parse_config(text: str) -> ExperimentConfig:
    """Parse a TOML config string; unknown sections or keys are errors."""
    try:
        raw = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"TOML syntax error: {exc}") from exc
    kwargs = {}
    for name, value in raw.items():
        if name in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"section [{name}] must be a table")
            kwargs[name] = _coerce(_SECTIONS[name], name, value)
        elif name == "kernel_table":
            rows = value.get("rows", []) if isinstance(value, dict) else None
            if rows is None:
                raise ConfigError("kernel_table must contain an array 'rows'")
            extra = set(value) - {"rows"}
            if extra:
                raise ConfigError(f"unknown key kernel_table.{sorted(extra)[0]}")
            kwargs["kernel_rows"] = tuple(
                _coerce(KernelRow, f"kernel_table.rows[{i}]", row)
                for i, row in enumerate(rows))
        else:
            raise ConfigError(f"unknown section [{name}]")
    return ExperimentConfig(**kwargs)


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (tuple, list)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise ConfigError(f"unserializable value {v!r}")


def config_to_toml(cfg: ExperimentConfig) -> str:
    """Serialize a config losslessly (floats via repr round-trip)."""
    out = []
    for section, cls in _SECTIONS.items():
        obj = getattr(cfg, section)
        out.append(f"[{section}]")
        for f in fields(cls):
            out.append(f"{f.name} = {_toml_value(getattr(obj, f.name))}")
        out.append("")
    for row in cfg.kernel_rows:
        out.append("[[kernel_table.rows]]")
        for f in fields(KernelRow):
            out.append(f"{f.name} = {_toml_value(getattr(row, f.name))}")
        out.append("")
    return "\n".join(out)


def build_grid_and_data(cfg: ExperimentConfig) -> tuple[Grid, np.ndarray, np.ndarray]:
    """Materialize the grid and the two data fields of a config."""
    g = make_grid(cfg.params.n, cfg.grid.points, cfg.grid.box)
    if cfg.data.u0_file:
        gf, u0 = load_field(cfg.data.u0_file)
        if gf.shape != g.shape or gf.L != g.L:
            raise ConfigError("u0_file grid does not match the config grid")
    else:
        u0 = gaussian_data(g, cfg.data.u0_amplitude, cfg.data.u0_width)
    if cfg.data.u1_file:
        gf, u1 = load_field(cfg.data.u1_file)
        if gf.shape != g.shape or gf.L != g.L:
            raise ConfigError("u1_file grid does not match the config grid")
    else:
        u1 = gaussian_data(g, cfg.data.u1_amplitude, cfg.data.u1_width)
    return g, u0, u1
