"""Fit Gaussian mixtures by EM and let BIC pick the number of components."""
# %%
import numpy as np

from gmotelab import RngStream, em_fit, select_by_bic
from gmotelab.gmm import default_c_range

rng = np.random.default_rng(0)
X = np.vstack([
    rng.normal([0, 0], 0.8, (150, 2)),
    rng.normal([5, 1], [0.5, 1.5], (100, 2)),
    rng.normal([2, 6], 0.6, (80, 2)),
])
print("data", X.shape, "candidate C:", list(default_c_range(*X.shape)))

# %% one fixed C: the log-likelihood trace only ever goes up
m3 = em_fit(X, 3, rng=RngStream(1, "demo"))
print(f"C=3 after {m3.n_iterations} iterations, log L {m3.log_likelihood:.2f}, BIC {m3.bic:.2f}")
print("weights", np.round(m3.weights, 3))
print("means\n", np.round(m3.means, 2))

# %% let BIC choose
best, fitted = select_by_bic(X, range(1, 7), rng=RngStream(1, "demo"), return_candidates=True)
for C, m in fitted.items():
    mark = "<-" if C == best.n_components else ""
    print(f"C={C}  BIC {m.bic:10.2f} {mark}")
