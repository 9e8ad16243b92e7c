"""Every oversampler on one KEEL training set, with its diagnostics."""
# %%
from pathlib import Path

import numpy as np

from gmotelab import METHODS, oversample
from gmotelab.evalstats import normalize_01
from gmotelab.harness import load_keel

data = Path(__file__).resolve().parents[1] / "data" / "keel" / "glass0123vs456.dat"
rec = load_keel(data)
X = normalize_01(rec.X).apply(rec.X)
P, N = X[rec.y == 1], X[rec.y == 0]
print(f"{rec.name}: {len(P)} minority, {len(N)} majority, IR {rec.imbalance_ratio:.2f}")

# %%
for m in METHODS:
    out = oversample(m, P, N, len(P), rng=42)
    spread = out.instances.std(axis=0).mean() if len(out) else float("nan")
    extra = f"outliers removed {out.provenance['n_outliers']}" if "n_outliers" in out.provenance else ""
    print(f"{m:8s} {len(out):4d} rows  mean sd {spread:.3f}  fallback {out.fallback}  {extra}")
