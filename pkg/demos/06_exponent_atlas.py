"""Atlas of the exponent calculus.

Everything the verification harness predicts is a rational function of
(n, sigma, p, r, delta, sbar): critical powers, admissible weight
windows, the decay triple, and the two profile-remainder rates.  All
arithmetic is exact.
"""

from fractions import Fraction as Fr

from sdwave.exponents import (
    critical_exponent,
    linear_remainder_rate,
    nu_upper_bound,
    profile_remainder_rate,
    solution_decay_exponents,
    existence_case,
    weight_window,
)

print("critical power 1 + 2r/(n - 2 r sigma):")
print(f"{'n':>3} {'sigma':>8} {'r':>5} {'p_crit':>10}")
for n in (2, 3, 4):
    for sig in (Fr(1, 8), Fr(1, 4), Fr(3, 8)):
        print(f"{n:3d} {str(sig):>8} {1:5d} {str(critical_exponent(n, sig)):>10}")

print("\nadmissible weight windows at r = 1, p = 3:")
for n in (2, 3):
    for sig in (Fr(1, 8), Fr(1, 4), Fr(49, 100)):
        w = weight_window(n, sig, 1, 3)
        print(f"  n={n} sigma={sig}: delta in [{w.lo}, {w.hi}), "
              f"extra bound > {w.extra_lo}, empty={w.empty}")

print("\ndecay triple (L2, weighted, sobolev) at the reference point:")
e = solution_decay_exponents(2, Fr(1, 4), 1, Fr(1, 4), 1)
print("  ", tuple(str(x) for x in e))

print("\nremainder rates at the reference point:")
print("   two-profile linear remainder:",
      linear_remainder_rate(2, Fr(1, 4), 1, 1))
print("   nonlinear profile remainder (margin 1/5):",
      profile_remainder_rate(2, Fr(1, 4), 3, Fr(1, 4), 1, Fr(1, 5), sbar=1))
print("   admissible margin window: (0,",
      nu_upper_bound(2, Fr(1, 4), 3, Fr(1, 4)), ")")

print("\nglobal-existence case labels over p at n = 2, sigma = 1/4:")
for p in (Fr(9, 4), Fr(5, 2), 3, 4):
    print(f"   p = {str(p):>4}: {existence_case(2, Fr(1, 4), p)}")
