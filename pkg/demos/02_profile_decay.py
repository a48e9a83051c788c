"""Decay of the two diffusion profiles.

The damped wave flow relaxes onto the fundamental solution of the
fractional heat equation v_t + (-Lap)^(1-sigma) v = 0.  Its kernel (the
"regular" profile) and the smoothed kernel carrying the velocity data
(the "singular" profile, symbol |xi|^(-2 sigma) times the regular one)
decay in L2 at exact scaling rates; here we measure both on a grid and
compare with the predicted exponents from the rational calculus.
"""

import numpy as np

from sdwave.exponents import solution_decay_exponents
from sdwave.fit import fit_decay
from sdwave.grid import make_grid
from sdwave.harness import geometric_times, profile_norm_series

sigma, n = 0.25, 2
g = make_grid(n, 256, 1400.0)
times = geometric_times(10.0, 500.0)
series = profile_norm_series(g, sigma, times)

e_l2 = float(solution_decay_exponents(n, sigma, 1, 0, 1)[0])   # singular profile rate
e_h = -n / (4.0 * (1.0 - sigma))                               # regular profile rate

for tag, col, want in (("singular", "g_l2", e_l2), ("regular", "h_l2", e_h)):
    rep = fit_decay(times, series.extra[col], ("fixed", 10.0, 500.0),
                    predicted=want, tolerance=0.03, quantity=tag)
    print(f"{tag:>9} profile: fitted slope {rep.slope:+.4f}, predicted {want:+.4f} "
          f"[{rep.verdict}]")

print("\nself-similarity: |G(2t)| / |G(t)| should settle at "
      f"2^{e_l2:+.3f} = {2.0**e_l2:.4f}")
mask = np.ones(g.shape)
mask[0, 0] = 0.0
from sdwave.dispersion import profile_symbols

def gnorm(t):
    g_hat, _ = profile_symbols(sigma, t, g.rho)
    return np.sqrt(np.sum((g_hat * mask) ** 2) * g.mode_weight)

for t in (12.5, 25.0, 50.0, 100.0):
    print(f"  t = {t:6.1f}: ratio {gnorm(2 * t) / gnorm(t):.4f}")
print("(the late drift below the asymptote is the finite-box correction of")
print(" this demo-sized grid; the acceptance suite uses a box that holds it")
print(" inside the 1 percent band)")
