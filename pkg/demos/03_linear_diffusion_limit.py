"""The diffusion limit of the linear flow.

Evolving velocity data with nonzero integral, the solution tracks a
constant multiple of the singular diffusion profile: the remainder after
subtracting both matched profiles decays a full power of t faster than
the solution itself.  The run uses the exact mode-wise propagator, so the
only numerical error is the grid quadrature.
"""

from sdwave.config import DataSpec, ExperimentConfig, GridSpec, TimeSpec
from sdwave.exponents import SimParams, linear_remainder_rate
from sdwave.harness import run_linear

cfg = ExperimentConfig(
    params=SimParams(n=2, sigma=0.25, theta=1.0, f_kind="none"),
    grid=GridSpec(points=256, box=1400.0),
    data=DataSpec(u0_amplitude=0.0, u1_amplitude=1.0, u1_width=4.0),
    time=TimeSpec(t_final=500.0),
)
res = run_linear(cfg, window=(50.0, 500.0), tolerance=0.05)

print("predicted remainder exponent:",
      float(linear_remainder_rate(2, 0.25, 1, 1)))
for rep in res.reports:
    print(f"{rep.quantity:>20}: slope {rep.slope:+.4f} vs {rep.predicted:+.4f} "
          f"[{rep.verdict}]")

series = res.series
print("\n      t       |u|_2    remainder   remainder/|profile|")
for i in range(0, len(series), 8):
    if series.t[i] < 10:
        continue
    print(f"{series.t[i]:8.1f} {series.l2[i]:11.4e} {series.herr[i]:11.4e} "
          f"{series.ratio_g[i]:12.4f}")
print("\nthe last column falling confirms the profile dominates the remainder.")
