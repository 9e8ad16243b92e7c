"""The three classifiers on one stratified fold of pima."""
# %%
from pathlib import Path

from gmotelab.evalstats import evaluate, stratified_kfold
from gmotelab.harness import load_keel
from gmotelab.learners import fit, predict, score

rec = load_keel(Path(__file__).resolve().parents[1] / "data" / "keel" / "pima.dat")
train, test = stratified_kfold(rec.y, 5, seed=0).split(0)
print(f"train {train.size}, test {test.size}")

# %%
for name in ("cart", "logreg", "svm"):
    model = fit(name, rec.X[train], rec.y[train])
    m = evaluate(rec.y[test], predict(model, rec.X[test]), score(model, rec.X[test]))
    print(f"{name:6s} acc {m.accuracy:.3f}  recall {m.recall:.3f}  f1 {m.f1:.3f}  auc {m.auc:.3f}")
