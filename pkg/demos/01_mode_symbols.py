"""Per-mode anatomy of the damped wave propagator.

Every Fourier mode of u_tt + (-Lap)^sigma u_t - Lap u = 0 is a scalar
oscillator whose two characteristic roots split the spectrum into a
diffusive low range (real roots, one slow and one fast), a double-root
radius, and an oscillatory range.  This script walks a few modes through
those regimes and cross-checks the closed-form symbols against a direct
ODE integration.
"""

import numpy as np
from scipy.integrate import solve_ivp

from sdwave.dispersion import characteristic_roots, kernel_symbols, split_symbols

sigma = 0.25
print(f"damping order sigma = {sigma}")
print(f"double root at rho = 2^(-1/(1-2 sigma)) = {2**(-1/(1-2*sigma)):.4f}\n")

print(f"{'rho':>8} {'regime':>12} {'lambda_+':>24} {'lambda_-':>24}")
for rho in (0.0, 0.01, 0.1, 0.25, 0.5, 1.0, 4.0):
    r = characteristic_roots(sigma, rho)
    print(f"{rho:8.3g} {str(r.regime):>12} {str(np.round(r.lambda_plus, 5)):>24} "
          f"{str(np.round(r.lambda_minus, 5)):>24}")

print("\nsymbol values at t = 2 versus adaptive ODE integration:")
print(f"{'rho':>8} {'k1 (closed form)':>18} {'k1 (ODE)':>14} {'rel diff':>10}")
for rho in (0.01, 0.25, 1.0, 4.0):
    pair = kernel_symbols(sigma, 2.0, rho)
    gamma, rho2 = rho ** (2 * sigma), rho**2
    sol = solve_ivp(lambda _, y: [y[1], -gamma * y[1] - rho2 * y[0]],
                    (0, 2.0), [0.0, 1.0], method="DOP853", rtol=1e-12, atol=1e-14)
    ode = sol.y[0, -1]
    print(f"{rho:8.3g} {pair.k1:18.10f} {ode:14.10f} "
          f"{abs(pair.k1 - ode) / max(abs(ode), 1e-12):10.1e}")

print("\nbranch split at a low mode (rho = 0.01): the slow branch carries")
print("the diffusion, the fast branch dies on the damping time scale:")
for t in (1.0, 10.0, 100.0):
    k1p, k1m, _, _ = split_symbols(sigma, t, 0.01)
    print(f"  t = {t:6.1f}: slow branch {k1p:+.4e}, fast branch {k1m:+.4e}")
