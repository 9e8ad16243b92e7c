"""Average tables and paired Wilcoxon comparisons over result rows."""
from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from ..evalstats import METRICS, rank_methods, significance_stars, wilcoxon_signed_rank
from .experiment import NA, RunResult, _method_key

BEST, WORST = "best", "worst"


@dataclass(frozen=True)
class TableCell:
    classifier: str
    method: str
    dataset: str
    mean: float | None
    n: int
    n_na: int
    flag: str = ""


@dataclass(frozen=True)
class ReportTable:
    """Means of one metric laid out classifier block by method row by dataset column."""

    metric: str
    classifiers: tuple
    methods: tuple
    datasets: tuple
    cells: dict  # (classifier, method, dataset) -> TableCell

    def cell(self, classifier, method, dataset) -> TableCell:
        return self.cells[(classifier, method, dataset)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["metric", "classifier", "method", "dataset", "mean", "n", "n_na", "flag"])
        for c in self.classifiers:
            for m in self.methods:
                for d in self.datasets:
                    cell = self.cells[(c, m, d)]
                    w.writerow([self.metric, c, m, d,
                                NA if cell.mean is None else f"{cell.mean:.6f}",
                                cell.n, cell.n_na, cell.flag])
        return buf.getvalue()

    def to_text(self, digits: int = 3) -> str:
        """Aligned table; ``*`` marks the best and ``_`` the worst cell per column."""
        head = ["classifier", "method", *self.datasets]
        rows = []
        for c in self.classifiers:
            for i, m in enumerate(self.methods):
                row = [c if i == 0 else "", m]
                for d in self.datasets:
                    cell = self.cells[(c, m, d)]
                    txt = NA if cell.mean is None else f"{cell.mean:.{digits}f}"
                    txt += {BEST: "*", WORST: "_"}.get(cell.flag, " ")
                    row.append(txt)
                rows.append(row)
        widths = [max(len(str(r[j])) for r in [head, *rows]) for j in range(len(head))]
        fmt = lambda r: "  ".join(str(v).ljust(w) if j < 2 else str(v).rjust(w)
                                  for j, (v, w) in enumerate(zip(r, widths)))
        lines = [f"Averages of {self.metric}", fmt(head)] + [fmt(r) for r in rows]
        lines.append("* best, _ worst within classifier and dataset")
        return "\n".join(l.rstrip() for l in lines) + "\n"


def _order(results):
    datasets = tuple(dict.fromkeys(r.dataset for r in results))
    methods = tuple(sorted({r.method for r in results}, key=_method_key))
    classifiers = tuple(sorted({r.classifier for r in results},
                               key=lambda c: ("cart", "logreg", "svm").index(c)
                               if c in ("cart", "logreg", "svm") else 9))
    return classifiers, methods, datasets


def summarize_metric(results: list[RunResult], metric: str) -> ReportTable:
    """Per-cell means over folds and repeats, skipping NA values."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    results = sorted(results, key=lambda r: r.key)
    classifiers, methods, datasets = _order(results)
    vals = defaultdict(list)
    na = defaultdict(int)
    for r in results:
        k = (r.classifier, r.method, r.dataset)
        v = r.value(metric)
        if v is None:
            na[k] += 1
        else:
            vals[k].append(v)
    means = {}
    for c in classifiers:
        for m in methods:
            for d in datasets:
                v = vals.get((c, m, d))
                means[(c, m, d)] = float(np.mean(v)) if v else None
    flags = {}
    for c in classifiers:
        for d in datasets:
            col = {m: means[(c, m, d)] for m in methods if means[(c, m, d)] is not None}
            if len(col) < 2 or len(set(col.values())) < 2:
                continue
            hi, lo = max(col.values()), min(col.values())
            for m, v in col.items():
                if v == hi:
                    flags[(c, m, d)] = BEST
                elif v == lo:
                    flags[(c, m, d)] = WORST
    cells = {k: TableCell(*k, means[k], len(vals.get(k, ())), na.get(k, 0), flags.get(k, ""))
             for k in means}
    return ReportTable(metric, classifiers, methods, datasets, cells)


def summarize(results: list[RunResult], metrics=METRICS) -> dict[str, ReportTable]:
    return {m: summarize_metric(results, m) for m in metrics}


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonCell:
    """Baseline versus one method for one classifier and metric.

    ``kind`` is ``score`` or ``rank``. ``p_greater`` tests whether the
    baseline is better, ``p_less`` whether it is worse. ``sign`` is ``+``
    or ``-`` repeated once per significance level reached, or empty.
    """

    classifier: str
    method: str
    metric: str
    kind: str
    n_pairs: int
    p_greater: float | None
    p_less: float | None
    stars: int
    direction: str
    testable: bool = True

    @property
    def sign(self) -> str:
        return self.direction * self.stars


@dataclass(frozen=True)
class ComparisonReport:
    baseline: str
    pairing: str
    cells: tuple

    def to_text(self) -> str:
        head = ("classifier", "method", "metric", "kind", "n", "p_greater", "p_less", "sign")
        rows = [head]
        for c in self.cells:
            fmt = lambda p: NA if p is None else f"{p:.4g}"
            rows.append((c.classifier, c.method, c.metric, c.kind, str(c.n_pairs),
                         fmt(c.p_greater), fmt(c.p_less),
                         c.sign if c.testable else "untestable"))
        widths = [max(len(r[j]) for r in rows) for j in range(len(head))]
        lines = ["  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in rows]
        return (f"baseline {self.baseline}, paired over {self.pairing} cells\n"
                + "\n".join(lines) + "\n")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["baseline", "classifier", "method", "metric", "kind", "n_pairs",
                    "p_greater", "p_less", "sign"])
        for c in self.cells:
            w.writerow([self.baseline, c.classifier, c.method, c.metric, c.kind, c.n_pairs,
                        NA if c.p_greater is None else repr(c.p_greater),
                        NA if c.p_less is None else repr(c.p_less),
                        c.sign if c.testable else "untestable"])
        return buf.getvalue()


def _pair_units(results, metric, pairing):
    """Map (classifier, unit) -> {method: value}; units are datasets or folds."""
    acc = defaultdict(lambda: defaultdict(list))
    for r in results:
        unit = r.dataset if pairing == "dataset" else (r.dataset, r.repeat, r.fold)
        acc[(r.classifier, unit)][r.method].append(r.value(metric))
    out = {}
    for k, per_method in acc.items():
        row = {}
        for m, vs in per_method.items():
            ok = [v for v in vs if v is not None]
            row[m] = float(np.mean(ok)) if ok else None
        out[k] = row
    return out


def _cell(classifier, method, metric, kind, x, y, min_pairs) -> ComparisonCell:
    n = len(x)
    if n < min_pairs:
        return ComparisonCell(classifier, method, metric, kind, n, None, None, 0, "", False)
    g = wilcoxon_signed_rank(x, y, "greater").p_one_sided
    l = wilcoxon_signed_rank(x, y, "less").p_one_sided
    if g < 0.05 and g <= l:
        direction, stars = "+", significance_stars(g)
    elif l < 0.05:
        direction, stars = "-", significance_stars(l)
    else:
        direction, stars = "", 0
    return ComparisonCell(classifier, method, metric, kind, n, g, l, stars, direction)


def compare(results: list[RunResult], baseline: str = "GMOTE", metrics=("accuracy", "f1"),
            pairing: str = "dataset", min_pairs: int = 2) -> ComparisonReport:
    """Paired one-sided Wilcoxon tests of ``baseline`` against every other method.

    With ``pairing='dataset'`` one pair is formed per dataset (means over
    folds and repeats) for each classifier; ``pairing='fold'`` pairs
    individual (dataset, repeat, fold) cells. Score tests drop pairs with
    an NA side. Rank tests rank all methods within each unit (NA last) and
    count a lower rank as better, so ``+`` always favours the baseline.
    """
    if pairing not in ("dataset", "fold"):
        raise ValueError("pairing must be 'dataset' or 'fold'")
    methods = sorted({r.method for r in results}, key=_method_key)
    if baseline not in methods:
        raise ValueError(f"baseline {baseline!r} not in results")
    classifiers, _, _ = _order(results)
    cells = []
    for metric in metrics:
        units = _pair_units(results, metric, pairing)
        for c in classifiers:
            keys = sorted((k for k in units if k[0] == c), key=str)
            rank_rows = []
            for k in keys:
                row = units[k]
                present = [m for m in methods if m in row]
                if len(present) < 2:
                    continue
                rk = rank_methods([row[m] for m in present])
                rank_rows.append(dict(zip(present, rk)))
            for m in methods:
                if m == baseline:
                    continue
                pairs = [(units[k][baseline], units[k][m]) for k in keys
                         if baseline in units[k] and m in units[k]]
                sx = [a for a, b in pairs if a is not None and b is not None]
                sy = [b for a, b in pairs if a is not None and b is not None]
                cells.append(_cell(c, m, metric, "score", sx, sy, min_pairs))
                rr = [(row[baseline], row[m]) for row in rank_rows if baseline in row and m in row]
                # lower rank is better: test method rank minus baseline rank
                cells.append(_cell(c, m, metric, "rank",
                                   [b for _, b in rr], [a for a, _ in rr], min_pairs))
    return ComparisonReport(baseline, pairing, tuple(cells))
