"""A small cross-validated benchmark, its average tables and the Wilcoxon comparison."""
# %%
from gmotelab.harness import compare, run_experiment, spec_from_dict, summarize_metric

spec = spec_from_dict({
    "datasets": ["toy1", "toy2"],
    "methods": ["ROS", "SMOTE", "RBO", "GMOTE"],
    "classifiers": ["cart", "svm"],
    "folds": 5,
    "repeats": 2,
    "seed": 11,
})
results = run_experiment(spec)
print(len(results), "result rows")

# %%
print(summarize_metric(results, "f1").to_text())

# %% fold pairing gives enough pairs for the test on two datasets
print(compare(results, baseline="GMOTE", metrics=("f1",), pairing="fold").to_text())
