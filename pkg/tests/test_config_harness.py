"""Config schema, CLI behavior, output determinism, and the manifest."""

import json
import os

import numpy as np
import pytest

from sdwave import cli
from sdwave.config import (
    ConfigError,
    DataSpec,
    ExperimentConfig,
    GridSpec,
    KernelRow,
    RunSpec,
    TimeSpec,
    build_grid_and_data,
    config_to_toml,
    parse_config,
)
from sdwave.exponents import SimParams
from sdwave.grid import make_grid, save_field
from sdwave.harness import run_kernel_table, run_linear, run_simulate, write_outputs


def small_linear_config(**over):
    base = dict(
        params=SimParams(n=1, sigma=0.25, p=3.0, f_kind="none"),
        grid=GridSpec(points=128, box=200.0),
        data=DataSpec(u1_amplitude=1.0, u1_width=2.0),
        time=TimeSpec(t_final=30.0),
    )
    base.update(over)
    return ExperimentConfig(**base)


class TestConfigParsing:
    def test_defaults(self):
        cfg = parse_config("")
        assert cfg.params.n == 2 and cfg.grid.points == 256

    def test_round_trip_lossless(self):
        cfg = ExperimentConfig(
            params=SimParams(n=2, sigma=0.3, p=2.7, delta=0.125, nu=0.07),
            grid=GridSpec(points=64, box=123.456),
            data=DataSpec(u1_amplitude=0.001, u1_width=3.5),
            time=TimeSpec(dt=0.05, t_final=77.0, force_stepping=True),
            kernel_rows=(KernelRow(which="K1minus", t_lo=2.0, t_hi=40.0),))
        text = config_to_toml(cfg)
        assert parse_config(text) == cfg

    def test_unknown_section(self):
        with pytest.raises(ConfigError, match="unknown section"):
            parse_config("[gridz]\npoints = 3\n")

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="grid.pointz"):
            parse_config("[grid]\npointz = 64\n")

    def test_unknown_kernel_key(self):
        with pytest.raises(ConfigError, match="kernel_table"):
            parse_config("[kernel_table]\nextra = 1\n")

    def test_invalid_parameter_value(self):
        with pytest.raises(ConfigError, match="params"):
            parse_config("[params]\nsigma = 0.7\n")

    def test_syntax_error_has_location(self):
        with pytest.raises(ConfigError, match="syntax"):
            parse_config("[grid\npoints = 64")

    def test_file_data_round_trip(self, tmp_path):
        g = make_grid(1, 128, 200.0)
        rng = np.random.default_rng(0)
        u1 = rng.standard_normal(g.shape)
        path = tmp_path / "u1.f64"
        save_field(path, g, u1)
        cfg = small_linear_config(data=DataSpec(u1_file=str(path)))
        _, _, loaded = build_grid_and_data(cfg)
        assert np.array_equal(loaded, u1)

    def test_file_grid_mismatch(self, tmp_path):
        g = make_grid(1, 64, 100.0)
        path = tmp_path / "u1.f64"
        save_field(path, g, np.zeros(g.shape))
        cfg = small_linear_config(data=DataSpec(u1_file=str(path)))
        with pytest.raises(ConfigError, match="grid"):
            build_grid_and_data(cfg)


class TestRunners:
    def test_linear_runner_reports(self):
        res = run_linear(small_linear_config(), window=(5.0, 30.0))
        names = {r.quantity for r in res.reports}
        assert names == {"solution_l2", "profile_remainder"}

    def test_simulate_f_none_matches_linear_byte_for_byte(self):
        cfg = small_linear_config()
        a = run_linear(cfg)
        b = run_simulate(cfg, window=(5.0, 30.0))
        assert a.series.to_csv() == b.series.to_csv()

    def test_kernel_table_runner(self):
        cfg = small_linear_config(
            params=SimParams(n=2, sigma=0.25, f_kind="none"),
            grid=GridSpec(points=256, box=160.0),
            data=DataSpec(u1_amplitude=1.0, u1_width=2.0),
            kernel_rows=(KernelRow(which="K1", piece="high", theta=0.0,
                                   t_lo=0.5, t_hi=20.0),))
        res = run_kernel_table(cfg)
        assert len(res.reports) == 1
        assert res.reports[0].model == "exponential"
        assert res.reports[0].slope < 0

    def test_kernel_table_requires_rows(self):
        with pytest.raises(ValueError):
            run_kernel_table(small_linear_config())


class TestOutputs:
    def test_manifest_hashes(self, tmp_path):
        cfg = small_linear_config()
        res = run_linear(cfg)
        manifest = write_outputs(str(tmp_path), cfg, res)
        assert manifest["files"]
        import hashlib
        for name, digest in manifest["files"].items():
            with open(tmp_path / name, "rb") as fh:
                assert hashlib.sha256(fh.read()).hexdigest() == digest
        assert (tmp_path / "linear_manifest.json").exists()

    def test_field_snapshots_written(self, tmp_path):
        from sdwave.config import OutputSpec
        from sdwave.grid import load_field
        cfg = small_linear_config(output=OutputSpec(directory="out",
                                                    formats=("csv", "json", "fields")))
        res = run_linear(cfg)
        write_outputs(str(tmp_path), cfg, res)
        g, u = load_field(tmp_path / "linear_u_final.f64")
        assert g.N == 128 and u.shape == (128,)

    def test_outputs_deterministic(self, tmp_path):
        cfg = small_linear_config()
        d1, d2 = tmp_path / "a", tmp_path / "b"
        for d in (d1, d2):
            write_outputs(str(d), cfg, run_linear(cfg))
        for name in ("linear_series.csv", "linear_rates.json", "linear_config.toml"):
            assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


class TestCli:
    def _write(self, tmp_path, cfg):
        path = tmp_path / "exp.toml"
        path.write_text(config_to_toml(cfg))
        return str(path)

    def test_validate_reference_exit_zero(self, tmp_path, capsys):
        from sdwave.acceptance import reference_config
        path = self._write(tmp_path, reference_config())
        code = cli.main(["validate", "--config", path,
                         "--out", str(tmp_path / "out")])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["overall"] is True

    def test_validate_subcritical_exit_one(self, tmp_path):
        cfg = ExperimentConfig(
            params=SimParams(n=2, sigma=0.25, p=2.0, delta=0.25, sbar=1.0),
            run=RunSpec(verify_mode="decay"))
        path = self._write(tmp_path, cfg)
        assert cli.main(["validate", "--config", path,
                         "--out", str(tmp_path / "out")]) == 1

    def test_config_error_exit_two(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text("[grid]\npointz = 3\n")
        assert cli.main(["validate", "--config", str(path)]) == 2

    def test_linear_subcommand_writes_artifacts(self, tmp_path):
        cfg = small_linear_config(time=TimeSpec(t_final=30.0))
        path = self._write(tmp_path, cfg)
        out = tmp_path / "out"
        code = cli.main(["linear", "--config", path, "--out", str(out)])
        assert (out / "linear_series.csv").exists()
        assert (out / "linear_rates.json").exists()
        assert code in (0, 1)   # verdicts depend on the tiny demo window

    def test_picard_subcommand(self, tmp_path):
        from sdwave.config import PicardSpec
        cfg = small_linear_config(
            params=SimParams(n=1, sigma=0.25, p=3.0, f_kind="signed_power"),
            data=DataSpec(u1_amplitude=1e-2, u1_width=2.0),
            picard=PicardSpec(horizon=2.0, dt=0.05, max_iter=8, tol=1e-9))
        path = self._write(tmp_path, cfg)
        code = cli.main(["picard", "--config", path, "--out", str(tmp_path / "o")])
        assert code == 0

    def test_kernel_table_subcommand(self, tmp_path):
        cfg = small_linear_config(
            params=SimParams(n=2, sigma=0.25, f_kind="none"),
            grid=GridSpec(points=256, box=160.0),
            data=DataSpec(u1_amplitude=1.0, u1_width=2.0),
            kernel_rows=(KernelRow(which="K1", piece="high", theta=0.0,
                                   t_lo=0.5, t_hi=20.0),))
        path = self._write(tmp_path, cfg)
        out = tmp_path / "kt"
        code = cli.main(["kernel-table", "--config", path, "--out", str(out)])
        assert code == 0
        assert (out / "kernel-table_rates.json").exists()

    def test_accept_subset(self, tmp_path, capsys):
        code = cli.main(["accept", "--only", "9", "--out", str(tmp_path)])
        out = capsys.readouterr().out
        assert "[PASS] exponent golden table" in out
        assert code == 0
        payload = json.loads((tmp_path / "acceptance.json").read_text())
        assert payload[0]["passed"] is True


class TestShippedConfigs:
    def test_profile_reference_validates(self):
        import pathlib
        root = pathlib.Path(__file__).resolve().parents[1]
        cfg = root / "configs" / "profile_reference.toml"
        if not cfg.exists():
            pytest.skip("repository configs not present in this checkout")
        assert cli.main(["validate", "--config", str(cfg),
                         "--out", "/tmp/sdwave_cfgcheck"]) == 0
