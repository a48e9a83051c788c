"""Exact linear evolution: one-shot solution, stepping, kernel fields."""

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from sdwave.dispersion import DegenerateSplitError
from sdwave.exponents import mid_band_decay_rate
from sdwave.grid import gaussian_data, hermitian_defect, make_grid, to_spectrum
from sdwave.norms import energy
from sdwave.propagator import (
    State,
    kernel_field,
    kernel_rate_table,
    kernel_spectrum,
    linear_solution,
    linear_step,
    low_band_energy_fraction,
)


def mode_oracle(sigma, rho, t, y0):
    gamma, rho2 = rho ** (2 * sigma), rho**2
    sol = solve_ivp(lambda _, y: [y[1], -gamma * y[1] - rho2 * y[0]], (0, t), y0,
                    method="DOP853", rtol=1e-12, atol=1e-15, dense_output=True)
    return sol.sol(t)


class TestLinearSolution:
    def test_time_zero_identity(self, grid2d, rng):
        u0 = rng.standard_normal(grid2d.shape)
        u1 = rng.standard_normal(grid2d.shape)
        st = linear_solution(grid2d, 0.25, u0, u1, 0.0)
        assert np.allclose(st.u_hat, to_spectrum(grid2d, u0), rtol=0, atol=1e-15)
        assert np.allclose(st.v_hat, to_spectrum(grid2d, u1), rtol=0, atol=1e-15)

    def test_single_mode_against_oracle(self):
        g = make_grid(1, 32, np.pi)   # dk = 1, mode index 1 has |xi| = 1
        u0_hat = np.zeros(32, dtype=complex)
        u0_hat[1] = u0_hat[-1] = 1.0
        zero = np.zeros_like(u0_hat)
        t = 2.7
        from sdwave.propagator import linear_solution_spectral
        st = linear_solution_spectral(g, 0.25, u0_hat, zero, t)
        ref = mode_oracle(0.25, 1.0, t, [1.0, 0.0])
        assert st.u_hat[1] == pytest.approx(ref[0], rel=1e-10)
        assert st.v_hat[1] == pytest.approx(ref[1], rel=1e-10)

    def test_negative_time_rejected(self, grid2d):
        z = np.zeros(grid2d.shape)
        with pytest.raises(ValueError):
            linear_solution(grid2d, 0.25, z, z, -1.0)


class TestLinearStep:
    def _state(self, grid, rng):
        return State(0.0, to_spectrum(grid, gaussian_data(grid, 1.0, 2.0)),
                     to_spectrum(grid, 0.3 * rng.standard_normal(grid.shape)), grid)

    def test_half_step_composition(self, grid2d, rng):
        st = self._state(grid2d, rng)
        one = linear_step(st, 0.25, 0.2)
        two = linear_step(linear_step(st, 0.25, 0.1), 0.25, 0.1)
        scale = np.max(np.abs(one.u_hat))
        assert np.max(np.abs(one.u_hat - two.u_hat)) <= 1e-12 * scale
        assert np.max(np.abs(one.v_hat - two.v_hat)) <= 1e-12 * max(np.max(np.abs(one.v_hat)), scale)

    def test_energy_monotone(self, grid2d, rng):
        st = self._state(grid2d, rng)
        prev = energy(grid2d, st.u_hat, st.v_hat)
        for _ in range(30):
            st = linear_step(st, 0.25, 0.3)
            cur = energy(grid2d, st.u_hat, st.v_hat)
            assert cur <= prev * (1 + 1e-12)
            prev = cur

    def test_mean_mode_grows_linearly(self, grid2d):
        u_hat = np.zeros(grid2d.shape, dtype=complex)
        v_hat = np.zeros(grid2d.shape, dtype=complex)
        u_hat[0, 0], v_hat[0, 0] = 2.0, 3.0
        st = State(0.0, u_hat, v_hat, grid2d)
        for _ in range(10):
            st = linear_step(st, 0.25, 0.5)
        assert st.u_hat[0, 0] == pytest.approx(2.0 + 5.0 * 3.0, rel=1e-13)
        assert st.v_hat[0, 0] == pytest.approx(3.0, rel=1e-13)

    def test_hermitian_preserved(self, grid2d, rng):
        st = self._state(grid2d, rng)
        for _ in range(5):
            st = linear_step(st, 0.3, 0.7)
        assert hermitian_defect(grid2d, st.u_hat) < 1e-12
        assert hermitian_defect(grid2d, st.v_hat) < 1e-12

    def test_matches_oracle_random_modes(self):
        g = make_grid(1, 64, 40.0)
        rng = np.random.default_rng(2)
        for _ in range(8):
            sigma = float(rng.uniform(0.1, 0.4))
            idx = int(rng.integers(1, 32))
            rho = float(g.rho[idx])
            u_hat = np.zeros(64, dtype=complex)
            v_hat = np.zeros(64, dtype=complex)
            u_hat[idx] = u_hat[-idx] = 0.7
            v_hat[idx] = v_hat[-idx] = -0.2
            st = State(0.0, u_hat, v_hat, g)
            t_total = min(20.0, 25.0 / rho ** (2 * sigma))
            n = 40
            for _ in range(n):
                st = linear_step(st, sigma, t_total / n)
            ref = mode_oracle(sigma, rho, t_total, [0.7, -0.2])
            envelope = np.exp(-0.5 * rho ** (2 * sigma) * t_total)
            scale = max(abs(ref[0]), abs(ref[1]), envelope)
            assert abs(st.u_hat[idx] - ref[0]) <= 1e-8 * scale
            assert abs(st.v_hat[idx] - ref[1]) <= 1e-8 * scale


class TestKernelFields:
    def test_piece_partition(self, grid2d):
        t = 1.5
        full = kernel_spectrum(grid2d, 0.25, "K1", "full", t)
        parts = sum(kernel_spectrum(grid2d, 0.25, "K1", p, t)
                    for p in ("low", "mid", "high"))
        assert np.max(np.abs(full - parts)) <= 1e-12 * np.max(np.abs(full))

    def test_fields_are_real(self, grid2d):
        for which in ("K0", "K1"):
            f = kernel_field(grid2d, 0.25, which, "full", 0.8)
            assert np.isrealobj(f)

    def test_split_low_field_real(self):
        g = make_grid(2, 64, 800.0)   # low band resolved
        f = kernel_field(g, 0.25, "K1minus", "low", 2.0)
        assert np.isrealobj(f)

    def test_split_rejected_when_support_hits_double_root(self, grid2d):
        # the degenerate radius for sigma = 1/4 is rho = 1/4, inside mid
        g = make_grid(2, 256, 256.0 * np.pi)  # dk = 1/256 puts modes at 1/4
        assert np.any(np.abs(g.rho - 0.25) < 1e-12)
        with pytest.raises(DegenerateSplitError):
            kernel_field(g, 0.25, "K1plus", "mid", 1.0)

    def test_high_piece_symbol_bound(self, grid2d):
        # <xi> |K1_high| stays under its small-time envelope times e^{-t/2}
        bracket = np.sqrt(1.0 + grid2d.rho**2)
        def peak(t):
            sym = kernel_spectrum(grid2d, 0.25, "K1", "high", t)
            return float(np.max(bracket * np.abs(sym) * np.exp(t / 2.0)))
        base = peak(1.0)
        for t in (2.0, 5.0, 10.0, 20.0):
            assert peak(t) <= base * 1.05

    def test_mid_piece_exponential_rate(self):
        g = make_grid(2, 64, 160.0)
        datum = gaussian_data(g, 1.0, 2.0)
        ts = np.linspace(50.0, 800.0, 16)
        row = kernel_rate_table(g, 0.25, "K1", "mid", 0.0, datum, ts,
                                window=(50.0, 800.0))
        assert row.report.model == "exponential"
        assert row.report.slope <= -mid_band_decay_rate(0.25)

    def test_rate_table_sanity_row(self, grid2d):
        datum = gaussian_data(grid2d, 1.0, 2.0)
        ts = np.linspace(0.5, 4.0, 12)
        row = kernel_rate_table(grid2d, 0.25, "K1", "high", 0.0, datum, ts,
                                window=(0.5, 4.0))
        vals = row.values
        assert np.all(vals > 0)
        assert np.all(np.abs(np.diff(np.log(vals))) < 1.5)  # continuous in t

    def test_weighted_low_band_rate(self):
        # weighted convolution row: | |x|^theta (K1_low * phi) |_2 follows
        # the predicted exponent shifted by theta/2
        from sdwave.harness import geometric_times
        from sdwave.exponents import kernel_low_rate

        g = make_grid(2, 512, 20000.0)
        datum = gaussian_data(g, 1.0, 2.0)
        row = kernel_rate_table(g, 0.25, "K1", "low", 0.25, datum,
                                geometric_times(600.0, 6000.0),
                                window=(600.0, 6000.0), tolerance=0.1)
        assert row.report.predicted == float(kernel_low_rate(2, 0.25, "K1", 0.25))
        assert row.report.verdict == "pass"

    def test_low_band_dominance_grows(self):
        g = make_grid(2, 64, 400.0)
        u1 = gaussian_data(g, 1.0, 20.0)
        st0 = linear_solution(g, 0.25, np.zeros(g.shape), u1, 1.0)
        st1 = linear_solution(g, 0.25, np.zeros(g.shape), u1, 1000.0)
        # remove the mean cell: the fraction concerns the decaying part
        for st in (st0, st1):
            st.u_hat[0, 0] = 0.0
        f0 = low_band_energy_fraction(st0, 0.25)
        f1 = low_band_energy_fraction(st1, 0.25)
        assert f1 > f0
        assert f1 > 0.99


class TestSymbolCache:
    def test_cache_hit_and_exactness(self, grid2d, rng):
        grid2d._cache.clear()
        st = State(0.0, to_spectrum(grid2d, gaussian_data(grid2d, 1.0, 2.0)),
                   np.zeros(grid2d.shape, dtype=complex), grid2d)
        a = linear_step(st, 0.25, 0.125)
        assert any(k[0] == "evo" for k in grid2d._cache)
        b = linear_step(st, 0.25, 0.125)
        assert np.array_equal(a.u_hat, b.u_hat)
