"""Cross-check the analytic rates against the buffer simulator.

For each policy we step the exact energy-buffer recursion for a million
slots, twenty independent seeded replications, and ask whether the analytic
rate (adjusted for the small stabilizing slack delta) falls inside the 95%
confidence interval of the empirical average.

Run:  python3 demos/demo_simulation.py   (roughly half a minute)
"""

import numpy as np

from ehcap import Policy, analytic_reference, get_preset, replicate, simulate

base = get_preset("example1")
N, REPS, SEED = 10**6, 20, 0

cases = [
    ("IDEAL_CSIT", base.with_(beta1=1.0, beta2=0.0, csit="perfect")),
    ("IDEAL_NCSIT", base.with_(beta1=1.0, beta2=0.0, csit="none")),
    ("HSU_LOSSY_NCSIT", base.with_(csit="none")),
    ("HUS", base.with_(arch="HUS", csit="none")),
    ("HU", base.with_(arch="HU", csit="none")),
]

print(f"{N} steps x {REPS} replications per policy\n")
print(f"{'policy':18} {'analytic':>10} {'empirical':>10} "
      f"{'ci halfwidth':>13} {'inside?':>8} {'trunc':>9}")
for kind, sc in cases:
    pol = Policy(kind=kind)
    summary = replicate(sc, pol, N, REPS, SEED)
    ref = analytic_reference(sc, pol)
    inside = summary.ci_low <= ref <= summary.ci_high
    print(f"{kind:18} {ref:10.6f} {summary.mean_rate:10.6f} "
          f"{summary.ci_halfwidth:13.2e} {str(inside):>8} "
          f"{summary.mean_truncation:9.2e}")

# Zoom in on one trajectory: the buffer level of the lossy store-first
# policy settles into a stationary band rather than drifting.
print("\nSingle lossy-buffer trajectory (1e5 steps, burn-in discarded):")
stats = simulate(base.with_(csit="none"), Policy(kind="HSU_LOSSY_NCSIT"),
                 10**5, seed=1)
print(f"  empirical rate  {stats.empirical_rate_nats:.6f} nats/use")
print(f"  mean withdrawal {stats.mean_used_energy:.6f} per slot "
      f"(supply beta1*E[Y] = {base.beta1 * base.harvest.mean:.4f})")
print(f"  buffer slope    {stats.buffer_slope:.2e} energy/slot "
      f"(near zero: stationary)")
print(f"  truncated slots {stats.truncation_fraction:.2e}")
print("\nThe slack delta (default 1e-3) is what keeps the buffer positive")
print("recurrent; shrink it and the truncation fraction creeps up while the")
print("rate creeps toward the analytic supremum.")
