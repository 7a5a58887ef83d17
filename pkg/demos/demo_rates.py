"""Walk through the rate formulas on the built-in two-point-harvest scenario.

Prints the full rate table, then unpacks the water-filling solution so you
can see which fade states are active and where the water level sits.

Run:  python3 demos/demo_rates.py
"""

import numpy as np

from ehcap import applicable_reports, get_preset, rate_ideal_csit

sc = get_preset("example1")
print("Scenario")
print(f"  harvest   support={sc.harvest.support} probs={sc.harvest.probs}"
      f"  (mean {sc.harvest.mean:.3f})")
print(f"  fade      support={sc.fade.support} probs={sc.fade.probs}")
print(f"  storage   beta1={sc.beta1} beta2={sc.beta2}  noise_var={sc.noise_var}")
print()

print(f"{'cell':12} {'csit':8} {'nats/use':>12} {'bits/use':>12}  lower bound?")
for rep in applicable_reports(sc):
    r = rep.rate
    print(f"{rep.formula_id:12} {rep.scenario.csit:8} {r.rate_nats:12.6f} "
          f"{r.rate_bits:12.6f}  {rep.lower_bound_flag}")
print()

# The ideal-buffer benchmark: water-filling at the mean harvest rate.
ideal = rate_ideal_csit(sc.with_(beta1=1.0, beta2=0.0, csit="perfect"))
nu = ideal.rate.diagnostics["water_level"]
print(f"Water-filling at budget E[Y] = {sc.harvest.mean}:")
print(f"  water level nu = {nu:.6f}, active states = "
      f"{ideal.rate.diagnostics['active']}")
for h, t in ideal.rate.policy.per_state:
    gap = nu - sc.noise_var / h**2 if h > 0 else float("nan")
    print(f"  h = {h}: T(h) = {t:.6f}   (nu - sigma^2/h^2 = {gap:.6f})")
print()
print("Note how the weakest state (h = 0.4) gets little or no power while")
print("the strongest state sits at the common water level. Comparing THM1")
print("against NCSIT_IDEAL in the table shows what that knowledge is worth:")
gain = (rate_ideal_csit(sc.with_(beta1=1.0, beta2=0.0, csit='perfect')).rate.rate_nats)
print(f"  {gain / np.log(2):.4f} bits/use with CSIT at an ideal buffer.")
