"""GMOTE and SMOTE on the two toy problems, written out as plot-ready CSV."""
# %%
import csv
import sys
from pathlib import Path

import numpy as np

from gmotelab import GmoteConfig, gmote_fit, gmote_generate, oversample
from gmotelab.harness import toy_example1, toy_example2, toy_table

out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "toy_out")
out_dir.mkdir(exist_ok=True)

# %%
for make in (toy_example1, toy_example2):
    rec = make(seed=0)
    P, N = rec.X[rec.y == 1], rec.X[rec.y == 0]
    cfg = GmoteConfig(alpha=0.05, gamma=1.0, seed=0)
    model = gmote_fit(P, cfg)
    g = gmote_generate(model, len(P), cfg)
    s = oversample("SMOTE", P, N, len(P), rng=0)
    print(f"{rec.name}: C={model.cleaned_gmm.n_components}, {model.outlier_report.n_flagged} outliers "
          f"removed, {len(g)} GMOTE rows from {g.attempts} draws")

    # synthetic points that land closer to a majority row than to any minority row
    def intrusion(S):
        dmin = np.min(np.linalg.norm(S[:, None] - P[None], axis=2), axis=1)
        dmaj = np.min(np.linalg.norm(S[:, None] - N[None], axis=2), axis=1)
        return np.mean(dmaj < dmin)

    print(f"  nearer a majority row: GMOTE {intrusion(g.instances):.1%}, SMOTE {intrusion(s.instances):.1%}")
    rows = toy_table(rec, g.instances, "GMOTE") + toy_table(rec, s.instances, "SMOTE")
    with open(out_dir / f"{rec.name}.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x1", "x2", "role", "method"])
        w.writerows(rows)
print("wrote", sorted(p.name for p in out_dir.glob("*.csv")))
