"""Slope-fitting behavior on synthetic series."""

import numpy as np
import pytest

from sdwave.fit import (
    InsufficientDataError,
    NonpositiveValueError,
    fit_decay,
    fit_exponential,
)


def test_exact_power_law():
    t = np.geomspace(10, 1000, 40)
    rep = fit_decay(t, t**-0.5, "last_decade", predicted=-0.5, tolerance=0.05)
    assert rep.slope == pytest.approx(-0.5, abs=1e-12)
    assert rep.stderr < 1e-12
    assert rep.verdict == "pass"


def test_perturbed_power_law():
    t = np.geomspace(10, 1000, 60)
    y = t**-0.5 * (1 + 0.1 / t)
    rep = fit_decay(t, y, "last_decade")
    assert abs(rep.slope + 0.5) < 0.01


def test_constant_series():
    t = np.geomspace(1, 100, 30)
    rep = fit_decay(t, np.ones_like(t), "last_decade")
    assert rep.slope == pytest.approx(0.0, abs=1e-14)


def test_affine_equivariance():
    t = np.geomspace(5, 500, 25)
    y = t**-0.7 * (1 + 0.05 * np.sin(np.log(t)))
    a = fit_decay(t, y, "last_decade")
    b = fit_decay(t, 7.3 * y, "last_decade")
    assert b.slope == pytest.approx(a.slope, abs=1e-12)
    assert b.stderr == pytest.approx(a.stderr, abs=1e-12)


def test_reproducible():
    t = np.geomspace(5, 500, 25)
    y = t**-0.7
    assert fit_decay(t, y, "last_decade") == fit_decay(t, y, "last_decade")


def test_fixed_window():
    t = np.geomspace(1, 1000, 80)
    y = np.where(t < 50, t**-0.1, (t / 50) ** -0.8 * 50**-0.1)
    rep = fit_decay(t, y, ("fixed", 100.0, 1000.0))
    assert abs(rep.slope + 0.8) < 0.02
    assert rep.window[0] >= 100.0


def test_auto_window_excludes_transient():
    t = np.geomspace(1, 1000, 100)
    y = (1.0 + 3.0 * np.exp(-t)) * t**-0.5   # transient confined to t < 10
    rep = fit_decay(t, y, "auto")
    assert rep.window[0] >= 10.0
    assert abs(rep.slope + 0.5) < 1e-3


def test_insufficient_data():
    with pytest.raises(InsufficientDataError):
        fit_decay([10, 20, 30], [1, 2, 3], "last_decade")


def test_nonpositive_values():
    t = np.geomspace(10, 100, 20)
    y = np.ones_like(t)
    y[5] = -1.0
    with pytest.raises(NonpositiveValueError):
        fit_decay(t, y, "last_decade")


def test_borderline_flag():
    t = np.geomspace(10, 1000, 30)
    rep = fit_decay(t, t**-1.0, "last_decade", predicted=-1.0, tolerance=0.1,
                    borderline=True)
    assert rep.verdict == "indeterminate"
    assert "logarithmic" in rep.note


def test_exponential_fit():
    t = np.linspace(0, 40, 50)
    rep = fit_exponential(t, np.exp(-0.3 * t), quantity="decay")
    assert rep.slope == pytest.approx(-0.3, abs=1e-10)
    assert rep.verdict == "pass"
    growing = fit_exponential(t, np.exp(0.1 * t))
    assert growing.verdict == "fail"
