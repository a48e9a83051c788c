"""Exact-arithmetic checks of the exponent calculus.

Expected values are hand-derived rationals, evaluated independently of
the implementation and frozen here.
"""

from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdwave.exponents import (
    HypothesisError,
    SimParams,
    critical_exponent,
    derivative_norm_index,
    forcing_decay_exponent,
    forcing_mass_decay_exponent,
    kernel_low_rate,
    linear_remainder_rate,
    lorentz_data_indices,
    mid_band_decay_rate,
    nu_upper_bound,
    profile_remainder_rate,
    solution_decay_exponents,
    existence_case,
    validate_hypotheses,
    weight_window,
)

S = Fr(1, 4)  # reference damping order used across the hand-derived table


class TestCriticalExponent:
    def test_hand_values(self):
        assert critical_exponent(2, S, 1) == Fr(7, 3)
        assert critical_exponent(3, S, 1) == Fr(9, 5)

    def test_r_one_reduction(self):
        for n in (2, 3, 5, 9):
            assert critical_exponent(n, S) == 1 + Fr(2) / (n - 2 * S)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            critical_exponent(1, Fr(49, 100), Fr(3, 2))

    def test_float_inputs_are_exact(self):
        assert critical_exponent(2, 0.25, 1) == Fr(7, 3)


class TestWeightWindow:
    def test_reference_window(self):
        win = weight_window(2, S, 1, 3)
        assert win.lo == 0 and win.hi == Fr(1, 2)
        assert win.extra_lo == Fr(-1, 3) and win.extra_strict
        assert not win.empty

    def test_membership(self):
        win = weight_window(2, S, 1, 3)
        assert win.contains(Fr(1, 4))
        assert not win.contains(Fr(1, 2))   # ceiling is open
        assert win.contains(0)              # floor is closed

    def test_narrow_window(self):
        win = weight_window(2, Fr(49, 100), 1, 3)
        assert win.hi == Fr(1, 50)
        assert win.contains(Fr(1, 100))

    def test_precondition(self):
        with pytest.raises(ValueError):
            weight_window(2, S, Fr(7, 4), 3)

    @settings(max_examples=80, deadline=None)
    @given(n=st.integers(2, 9),
           sig=st.fractions(Fr(1, 100), Fr(49, 100)),
           r=st.fractions(1, Fr(3, 2)),
           p=st.fractions(Fr(21, 10), 6))
    def test_window_nonempty_under_preconditions(self, n, sig, r, p):
        # whenever r is admissible and p supercritical, some delta >= 0 works
        if r >= 2 * Fr(n) / (n + 4 * sig):
            return
        if p <= critical_exponent(n, sig, r):
            return
        win = weight_window(n, sig, r, p)
        assert not win.empty


class TestLorentzIndices:
    def test_hand_values(self):
        assert lorentz_data_indices(2, 1, S, Fr(1, 4)) == (Fr(8, 5), Fr(8, 7))
        assert lorentz_data_indices(2, 1, S, 0) == (Fr(4, 3), Fr(1))

    def test_zero_delta_collapse(self):
        for r in (1, Fr(6, 5), Fr(4, 3)):
            assert lorentz_data_indices(3, r, S, 0)[1] == r

    def test_domain_error(self):
        with pytest.raises(ValueError):
            lorentz_data_indices(2, Fr(3, 2), S, Fr(3, 2))


class TestDecayExponents:
    def test_reference_triple(self):
        assert solution_decay_exponents(2, S, 1, Fr(1, 4), 1) == \
            (Fr(-1, 3), Fr(-1, 6), Fr(-1))

    def test_zero_delta_collapse(self):
        e = solution_decay_exponents(2, S, 1, 0, 1)
        assert e[0] == e[1] == Fr(-1, 3)

    @settings(max_examples=60, deadline=None)
    @given(n=st.integers(1, 6),
           sig=st.fractions(Fr(1, 100), Fr(49, 100)),
           delta=st.fractions(0, 2),
           sbar=st.fractions(1, 3))
    def test_sobolev_identity(self, n, sig, delta, sbar):
        e = solution_decay_exponents(n, sig, 1, delta, sbar)
        assert e[2] == e[0] - sbar / (2 * (1 - sig))


class TestLinearRemainder:
    def test_reference(self):
        assert linear_remainder_rate(2, S, 1, 1) == Fr(-1)

    def test_branch_tie_at_crossover(self):
        # the two velocity-term exponents coincide when 8 sigma = n
        n, sig = 2, Fr(2, 8)
        a = (1 / (1 - sig)) * (Fr(-n, 4) + 3 * sig - 1)
        b = (1 / sig) * (Fr(-n, 4) + sig)
        assert a == b == Fr(-1)

    def test_four_dim_no_moments(self):
        # enumerating all four exponents: {-2, -5/3, -4/3, -1} -> -1
        assert linear_remainder_rate(4, S, 0, 0) == Fr(-1)

    def test_moment_range_checked(self):
        with pytest.raises(ValueError):
            linear_remainder_rate(2, S, 2, 0)


class TestProfileRemainder:
    def test_reference(self):
        assert profile_remainder_rate(2, S, 3, Fr(1, 4), 1, Fr(1, 5), sbar=1) == Fr(-3, 5)

    def test_margin_window(self):
        assert nu_upper_bound(2, S, 3, Fr(1, 4)) == Fr(1, 4)
        with pytest.raises(HypothesisError):
            profile_remainder_rate(2, S, 3, Fr(1, 4), 1, Fr(3, 10), sbar=1)

    @settings(max_examples=60, deadline=None)
    @given(nu=st.fractions(Fr(1, 100), Fr(24, 100)))
    def test_remainder_beats_profile_rate(self, nu):
        # remainder decays strictly faster than the profile itself
        profile_rate = (1 / (1 - S)) * (Fr(-2, 4) + S)
        assert profile_remainder_rate(2, S, 3, Fr(1, 4), 1, nu, sbar=1) < profile_rate


class TestForcingExponents:
    def test_reference(self):
        assert forcing_decay_exponent(2, S, 1, 3, 0) == Fr(-5, 3)

    def test_linearity_in_weight(self):
        base = forcing_decay_exponent(2, S, 1, 3, 0)
        for w in (Fr(1, 2), 1, Fr(3, 2)):
            assert forcing_decay_exponent(2, S, 1, 3, w) - base == w / (2 * (1 - S))

    def test_integrability_frontier(self):
        # the weighted forcing exponent drops below -1 exactly when p
        # clears the threshold solved by hand from the defining inequality:
        # (n/4 + delta/2 + 1/2 + 1 - sigma) / (n/2 - sigma) = 5/2 here
        threshold = Fr(5, 2)
        for p100 in range(210, 450, 17):
            p = Fr(p100, 100)
            zeta = forcing_decay_exponent(2, S, 1, p, Fr(1, 4))
            assert (zeta < -1) == (p > threshold)

    def test_mass_decay(self):
        assert forcing_mass_decay_exponent(2, S, 3) == Fr(-5, 3)


class TestDerivativeIndex:
    def test_hand_values(self):
        assert derivative_norm_index(2, 1) == 1
        assert derivative_norm_index(2, Fr(3, 2)) == Fr(4, 3)
        assert derivative_norm_index(2, 0) == 1


class TestKernelRates:
    def test_reference_rows(self):
        assert kernel_low_rate(2, S, "K1", 0) == Fr(-1, 3)
        assert kernel_low_rate(2, S, "K1minus", 0) == Fr(-1)
        assert kernel_low_rate(2, S, "K0", 0) == Fr(-2, 3)

    def test_mid_band_rate(self):
        assert mid_band_decay_rate(0.25) == 2.0**-13


class TestValidate:
    def test_reference_passes(self):
        params = SimParams(n=2, sigma=0.25, p=3.0, delta=0.25, sbar=1.0, nu=0.2)
        rep = validate_hypotheses(params, "decay")
        assert rep.overall
        assert all(e.status in ("pass", "boundary") for e in rep.entries)

    def test_subcritical_fails_reported(self):
        params = SimParams(n=2, sigma=0.25, p=2.0, delta=0.25, sbar=1.0)
        rep = validate_hypotheses(params, "decay")
        assert not rep.overall
        failed = [e for e in rep.entries if not e.satisfied]
        assert any("critical" in e.name for e in failed)

    def test_case_labels(self):
        assert existence_case(2, S, 3) == "case2-1"       # boundary to lower case
        assert existence_case(2, S, 4) == "case2-2"
        assert existence_case(4, S, Fr(17, 10)) == "case1"
        assert existence_case(2, S, 2) == "subcritical"

    def test_case1_unreachable_in_two_dims(self):
        assert 1 + Fr(4) / (2 + 2 - 4 * S) == critical_exponent(2, S)
        rep = validate_hypotheses(SimParams(n=2, sigma=0.25, p=3.0), "cases")
        assert rep.case == "case2-1"
        assert any("case1" in note for note in rep.notes)

    def test_profile_mode_includes_margin_window(self):
        params = SimParams(n=2, sigma=0.25, p=3.0, delta=0.25, sbar=1.0, nu=0.2)
        rep = validate_hypotheses(params, "profile")
        assert rep.overall
        params_bad = SimParams(n=2, sigma=0.25, p=3.0, delta=0.25, sbar=1.0, nu=0.3)
        assert not validate_hypotheses(params_bad, "profile").overall

    def test_boundary_status(self):
        # delta exactly at the open ceiling: strict check fails as boundary
        params = SimParams(n=2, sigma=0.25, p=3.0, delta=0.5, sbar=1.0)
        rep = validate_hypotheses(params, "decay")
        ceiling = next(e for e in rep.entries if "ceiling" in e.name)
        assert ceiling.status == "boundary" and not ceiling.satisfied

    def test_purity(self):
        params = SimParams(n=3, sigma=0.3, p=2.5, delta=0.1, sbar=1.5, nu=0.05)
        a = validate_hypotheses(params, "decay").as_dict()
        b = validate_hypotheses(params, "decay").as_dict()
        assert a == b
