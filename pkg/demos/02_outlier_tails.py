"""Tail probabilities under each mixture component and the resulting outlier flags."""
# %%
import numpy as np

from gmotelab import OutlierPolicy, detect_outliers, select_by_bic
from gmotelab.harness import toy_example1

rec = toy_example1(seed=3)
P = rec.X[rec.y == 1]
model = select_by_bic(P, range(1, 5))
print(f"{len(P)} minority rows, BIC picked C={model.n_components}")

# %% chi-square tails with max aggregation: a point is flagged only if it is
# in the alpha tail of every component
for alpha in (0.01, 0.05, 0.10):
    rep = detect_outliers(P, model, OutlierPolicy(alpha=alpha))
    print(f"alpha={alpha:.2f}: {rep.n_flagged:3d} flagged ({rep.n_flagged / len(P):.1%})")

# %% the Hotelling F tail accounts for the estimated parameters and flags less
for stat in ("chi_square", "hotelling_f"):
    rep = detect_outliers(P, model, OutlierPolicy(0.05, statistic=stat))
    worst = np.argsort(rep.aggregate)[:3]
    print(f"{stat:12s} flagged {rep.n_flagged}, smallest tails {np.round(rep.aggregate[worst], 4)}")
