"""Discretization contract: transforms, quadrature, data, weights, files."""

import io

import numpy as np
import pytest

from sdwave.grid import (
    bracket_weight,
    field_to_csv,
    gaussian_data,
    hermitian_defect,
    load_field,
    make_grid,
    min_image_weight,
    save_field,
    to_field,
    to_spectrum,
    box_length_policy,
)


class TestConstruction:
    def test_wavenumbers_1d(self):
        g = make_grid(1, 16, np.pi)
        assert g.dk == pytest.approx(1.0)
        assert sorted(set(np.round(np.abs(g.axis_k)).astype(int))) == list(range(9))

    def test_mode_spacing_2d(self):
        g = make_grid(2, 256, 200.0)
        assert g.dk == pytest.approx(np.pi / 200.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            make_grid(1, 20, 10.0)     # not a power of two
        with pytest.raises(ValueError):
            make_grid(1, 8, 10.0)      # too small
        with pytest.raises(ValueError):
            make_grid(4, 32, 10.0)     # unsupported dimension
        with pytest.raises(ValueError):
            make_grid(2, 32, -1.0)

    def test_memory_estimate(self):
        g = make_grid(2, 64, 10.0)
        assert g.spectrum_bytes() == 64 * 64 * 16

    def test_box_policy(self):
        # spreading scale t^(2/3) at sigma = 1/4
        assert box_length_policy(1000.0, 0.25, 1.0) == pytest.approx(800.0)


class TestTransforms:
    def test_round_trip(self, grid2d, rng):
        u = rng.standard_normal(grid2d.shape)
        back = to_field(grid2d, to_spectrum(grid2d, u))
        assert np.max(np.abs(back - u)) <= 1e-12 * np.max(np.abs(u))

    def test_parseval(self, grid2d, rng):
        u = rng.standard_normal(grid2d.shape)
        phys = np.sqrt(np.sum(u**2) * grid2d.cell)
        spec = np.sqrt(np.sum(np.abs(to_spectrum(grid2d, u)) ** 2) * grid2d.mode_weight)
        assert spec == pytest.approx(phys, rel=1e-10)

    def test_hermitian_symmetry(self, grid2d, rng):
        u_hat = to_spectrum(grid2d, rng.standard_normal(grid2d.shape))
        assert hermitian_defect(grid2d, u_hat) < 1e-12

    def test_imaginary_residue_guard(self, grid2d, rng):
        bad = rng.standard_normal(grid2d.shape) + 0j
        bad[3, 5] = 1.0  # breaks Hermitian symmetry
        with pytest.raises(ValueError):
            to_field(grid2d, bad * 100.0)

    def test_derivative_consistency(self, grid2d):
        # band-limited field: spectral sqrt(-Lap) norm equals the
        # cell-quadrature norm of the gradient
        u_hat = to_spectrum(grid2d, gaussian_data(grid2d, 1.0, 2.5))
        u_hat[~grid2d.dealias] = 0.0
        kx, ky = np.meshgrid(grid2d.axis_k, grid2d.axis_k, indexing="ij")
        gx = to_field(grid2d, 1j * kx * u_hat)
        gy = to_field(grid2d, 1j * ky * u_hat)
        quad = np.sqrt(np.sum(gx**2 + gy**2) * grid2d.cell)
        spec = np.sqrt(np.sum(grid2d.rho**2 * np.abs(u_hat) ** 2) * grid2d.mode_weight)
        assert spec == pytest.approx(quad, rel=1e-8)


class TestGaussianData:
    def test_integral_closed_form(self, grid1d):
        u = gaussian_data(grid1d, 1.0, 1.0)
        assert np.sum(u) * grid1d.cell == pytest.approx(np.sqrt(2 * np.pi), abs=1e-8)

    def test_zero_amplitude(self, grid1d):
        assert not np.any(gaussian_data(grid1d, 0.0, 1.0))

    def test_first_moment_closed_form(self):
        # integral of |x| exp(-x^2/(2 w^2)) over the line is 2 w^2; the
        # integrand kink at the origin makes the quadrature second order,
        # so reaching 1e-6 needs a fine spacing
        g = make_grid(1, 32768, 20.0)
        u = gaussian_data(g, 1.0, 1.0)
        moment = np.sum(np.abs(g.axis_x) * u) * g.cell
        assert moment == pytest.approx(2.0, abs=1e-6)

    def test_width_warning(self):
        g = make_grid(1, 64, 10.0)
        with pytest.warns(UserWarning):
            gaussian_data(g, 1.0, 2.0)


class TestWeights:
    def test_zero_exponent(self, grid2d):
        assert np.all(min_image_weight(grid2d, 0.0) == 1.0)

    def test_wraparound_distance(self):
        g = make_grid(1, 16, 10.0)
        w = min_image_weight(g, 1.0)
        # the last lattice site sits one spacing from the origin
        assert w[15] == pytest.approx(g.dx)

    def test_monotone_up_to_half_box(self):
        g = make_grid(1, 64, 10.0)
        w = min_image_weight(g, 0.7)
        ascending = w[: g.N // 2]
        assert np.all(np.diff(ascending) > 0)

    def test_bracket_weight_floor(self, grid2d):
        w = bracket_weight(grid2d, 0.5)
        assert np.min(w) == 1.0
        assert np.all(w >= min_image_weight(grid2d, 0.5) * 0 + 1.0 - 1e-15)


class TestDealias:
    def test_idempotent_and_symmetric(self, grid2d):
        m = grid2d.dealias
        assert m.dtype == bool
        assert np.array_equal(m & m, m)
        flipped = m.copy()
        for ax in range(grid2d.n):
            flipped = np.roll(np.flip(flipped, axis=ax), 1, axis=ax)
        assert np.array_equal(m, flipped)


class TestSerialization:
    def test_binary_round_trip(self, tmp_path, grid2d, rng):
        u = rng.standard_normal(grid2d.shape)
        path = tmp_path / "field.f64"
        save_field(path, grid2d, u)
        g2, v = load_field(path)
        assert g2.shape == grid2d.shape and g2.L == grid2d.L
        assert np.array_equal(u, v)

    def test_magic_check(self, tmp_path):
        path = tmp_path / "junk.f64"
        path.write_bytes(b"not a field")
        with pytest.raises(ValueError):
            load_field(path)

    def test_csv_slice(self):
        g = make_grid(1, 16, 8.0)
        u = np.arange(16, dtype=float)
        text = field_to_csv(g, u)
        lines = text.strip().split("\n")
        assert lines[0] == "x,value"
        assert len(lines) == 17
        xs = [float(line.split(",")[0]) for line in lines[1:]]
        assert xs == sorted(xs)

    def test_csv_rejects_2d(self, grid2d):
        with pytest.raises(ValueError):
            field_to_csv(grid2d, np.zeros(grid2d.shape))
