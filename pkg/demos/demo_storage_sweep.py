"""Sweep the storage efficiency beta1 and compare the three architectures.

Reproduces the qualitative picture of how a lossy buffer changes the game:
with a poor buffer (low beta1), transmitting fresh energy immediately (HU,
no buffer at all) beats storing first (HSU); the hybrid that spends fresh
energy and banks only the surplus (HUS) is never worse than HSU; and at
beta1 = 1 the HSU and HUS curves merge.

Writes storage_sweep.csv and storage_sweep.png next to this script.

Run:  python3 demos/demo_storage_sweep.py
"""

import csv
import os

import numpy as np

from ehcap import get_preset, rate_hsu_lossy, rate_hu, rate_hus

HERE = os.path.dirname(os.path.abspath(__file__))

base = get_preset("example1")
betas = np.linspace(0.5, 1.0, 11)

# HU has no buffer, so it does not depend on beta1 at all.
hu_csit = rate_hu(base.with_(arch="HU", csit="perfect")).rate.rate_nats
hu_ncsit = rate_hu(base.with_(arch="HU", csit="none")).rate.rate_nats

rows = []
for b1 in betas:
    sc = base.with_(beta1=float(b1))
    rows.append({
        "beta1": float(b1),
        "HSU_csit": rate_hsu_lossy(sc.with_(arch="HSU", csit="perfect")).rate.rate_nats,
        "HSU_ncsit": rate_hsu_lossy(sc.with_(arch="HSU", csit="none")).rate.rate_nats,
        "HUS_csit": rate_hus(sc.with_(arch="HUS", csit="perfect")).rate.rate_nats,
        "HUS_ncsit": rate_hus(sc.with_(arch="HUS", csit="none")).rate.rate_nats,
        "HU_csit": hu_csit,
        "HU_ncsit": hu_ncsit,
    })

cols = list(rows[0].keys())
print("  ".join(f"{c:>10}" for c in cols))
for r in rows:
    print("  ".join(f"{r[c]:10.5f}" for c in cols))

csv_path = os.path.join(HERE, "storage_sweep.csv")
with open(csv_path, "w", newline="") as fh:
    w = csv.DictWriter(fh, fieldnames=cols)
    w.writeheader()
    w.writerows(rows)
print(f"\nwrote {csv_path}")

# The crossover in one sentence:
lo, hi = rows[0], rows[-2]
print(f"\nAt beta1={lo['beta1']:.2f}: HU ({lo['HU_csit']:.4f}) beats "
      f"HSU ({lo['HSU_csit']:.4f}) with CSIT.")
print(f"At beta1={hi['beta1']:.2f}: HU ({hi['HU_csit']:.4f}) loses to both "
      f"HSU ({hi['HSU_csit']:.4f}) and HUS ({hi['HUS_csit']:.4f}).")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    b = [r["beta1"] for r in rows]
    for col, style in [("HUS_csit", "-o"), ("HSU_csit", "-s"),
                       ("HU_csit", "--"), ("HUS_ncsit", ":o"),
                       ("HSU_ncsit", ":s"), ("HU_ncsit", ":")]:
        ax.plot(b, [r[col] for r in rows], style, label=col, markersize=3)
    ax.set_xlabel("storage efficiency beta1")
    ax.set_ylabel("rate (nats/use)")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    png_path = os.path.join(HERE, "storage_sweep.png")
    fig.savefig(png_path, dpi=120, bbox_inches="tight")
    print(f"wrote {png_path}")
except ImportError:
    print("matplotlib not available; skipped the plot")
