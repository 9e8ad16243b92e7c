"""Cross-validated benchmark runs.

For every dataset and repeat a stratified fold plan is drawn. Within each
fold, every method oversamples the training minority once and the
augmented training set is shared by all classifiers, which are then scored
on the untouched test fold. Every random draw comes from a substream
labelled by the cell, so results do not depend on execution order.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .. import learners
from ..errors import ConfigError, GmoteLabError, InvalidArgument
from ..evalstats import METRICS, MetricSet, auc, confusion, metrics_from_counts, normalize_01, stratified_kfold
from ..gmm import EmConfig
from ..gmote import GmoteConfig, synthetic_count
from ..numcore import RngStream
from ..resamplers import PARAMS, oversample
from .datasets import DatasetRecord, load_csv, load_keel
from .toys import toy_example1, toy_example2

log = logging.getLogger(__name__)

ORIGINAL = "Original"
METHOD_ORDER = (ORIGINAL, "ROS", "SMOTE", "BLSMOTE", "SLSMOTE", "DBSMOTE", "C-SMOTE", "RBO", "GMOTE")
NORMALIZED = ("SMOTE", "BLSMOTE", "SLSMOTE", "DBSMOTE", "C-SMOTE")
RESULT_COLUMNS = ("dataset", "method", "classifier", "repeat", "fold", *METRICS,
                  "n_synth", "n_outliers", "fallback")
NA = "NA"

_REQUIRED = ("datasets", "methods", "classifiers")
_OPTIONAL = {"folds": 5, "repeats": 1, "seed": 0, "output": "results.csv",
             "ratio": 1.0, "ratio_mode": "minority", "normalize": list(NORMALIZED)}


@dataclass(frozen=True)
class DatasetSource:
    """Where a dataset comes from: a KEEL file, a CSV file or a toy generator."""

    name: str
    path: str | None = None
    kind: str = "keel"  # keel | csv | toy1 | toy2
    label_column: str | None = None
    positive_label: str | None = None

    def load(self, seed: int = 0) -> DatasetRecord:
        if self.kind == "toy1":
            rec = toy_example1(seed)
        elif self.kind == "toy2":
            rec = toy_example2(seed)
        elif self.kind == "csv":
            rec = load_csv(self.path, self.label_column, self.positive_label)
        else:
            rec = load_keel(self.path)
        return replace(rec, name=self.name)


@dataclass
class ExperimentSpec:
    """One benchmark run.

    ``methods`` maps method tags to parameter objects; the untouched
    ``Original`` baseline is always added. ``ratio`` scales the training
    minority count (``ratio_mode='minority'``); ``ratio_mode='balance'``
    instead generates up to the majority count. ``normalize`` lists the
    methods whose folds are mapped to (0, 1) using training ranges.
    """

    datasets: list
    methods: dict
    classifiers: tuple = learners.CLASSIFIERS
    folds: int = 5
    repeats: int = 1
    seed: int = 0
    output: str = "results.csv"
    ratio: float = 1.0
    ratio_mode: str = "minority"
    normalize: tuple = NORMALIZED
    learner_config: learners.LearnerConfig = field(default_factory=learners.LearnerConfig)

    def __post_init__(self):
        if not self.datasets or not self.methods or not self.classifiers:
            raise ConfigError("datasets, methods and classifiers must be non-empty")
        if self.folds < 2:
            raise ConfigError("folds must be >= 2")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        if self.ratio < 0:
            raise ConfigError("ratio must be >= 0")
        if self.ratio_mode not in ("minority", "balance"):
            raise ConfigError("ratio_mode must be 'minority' or 'balance'")
        bad = [c for c in self.classifiers if c not in learners.CLASSIFIERS]
        if bad:
            raise ConfigError(f"unknown classifiers {bad}")
        bad = [m for m in self.methods if m not in PARAMS and m != ORIGINAL]
        if bad:
            raise ConfigError(f"unknown methods {bad}")
        self.seed = int(self.seed) % 2**64
        self.methods = {ORIGINAL: None, **{m: p for m, p in self.methods.items() if m != ORIGINAL}}
        self.classifiers = tuple(self.classifiers)
        self.normalize = tuple(self.normalize)

    @property
    def method_names(self) -> list[str]:
        return sorted(self.methods, key=_method_key)


@dataclass(frozen=True)
class RunResult:
    """One (dataset, method, classifier, repeat, fold) cell.

    ``metrics`` is ``None`` when the cell failed; ``fallback`` then holds
    ``error:<ExceptionName>``.
    """

    dataset: str
    method: str
    classifier: str
    repeat: int
    fold: int
    metrics: MetricSet | None
    n_synth: int = 0
    n_outliers: int | None = None
    fallback: str | None = None

    @property
    def key(self) -> tuple:
        return (self.dataset, _method_key(self.method), self.classifier, self.repeat, self.fold)

    def value(self, metric: str) -> float | None:
        return None if self.metrics is None else getattr(self.metrics, metric)


def _method_key(m: str):
    return (METHOD_ORDER.index(m), m) if m in METHOD_ORDER else (len(METHOD_ORDER), m)


# --------------------------------------------------------------------------
# configuration


def _build_params(method: str, raw: dict | None):
    if method == ORIGINAL:
        return None
    raw = dict(raw or {})
    cls = PARAMS[method]
    names = {f.name for f in fields(cls)}
    unknown = set(raw) - names
    if unknown:
        raise ConfigError(f"{method}: unknown parameters {sorted(unknown)}")
    if method == "GMOTE":
        if "em" in raw:
            em_raw = raw["em"]
            em_names = {f.name for f in fields(EmConfig)}
            if set(em_raw) - em_names:
                raise ConfigError(f"GMOTE.em: unknown parameters {sorted(set(em_raw) - em_names)}")
            raw["em"] = EmConfig(**em_raw)
        if "c_range" in raw and raw["c_range"] is not None:
            raw["c_range"] = tuple(raw["c_range"])
    try:
        return cls(**raw)
    except (TypeError, InvalidArgument) as exc:
        raise ConfigError(f"{method}: {exc}") from None


def _parse_source(entry, base: Path) -> DatasetSource:
    if isinstance(entry, str):
        if entry in ("toy1", "toy2"):
            return DatasetSource(entry, kind=entry)
        p = base / entry
        return DatasetSource(p.stem, str(p), "csv" if p.suffix == ".csv" else "keel")
    if not isinstance(entry, dict):
        raise ConfigError(f"bad dataset entry {entry!r}")
    allowed = {"name", "path", "kind", "label_column", "positive_label"}
    if set(entry) - allowed:
        raise ConfigError(f"dataset entry: unknown keys {sorted(set(entry) - allowed)}")
    kind = entry.get("kind")
    path = entry.get("path")
    if kind in ("toy1", "toy2"):
        return DatasetSource(entry.get("name", kind), kind=kind)
    if path is None:
        raise ConfigError("dataset entry needs 'path'")
    p = base / path
    kind = kind or ("csv" if p.suffix == ".csv" else "keel")
    if kind == "csv" and not entry.get("label_column"):
        raise ConfigError(f"{path}: CSV datasets need 'label_column'")
    return DatasetSource(entry.get("name", p.stem), str(p), kind,
                         entry.get("label_column"), entry.get("positive_label"))


def spec_from_dict(cfg: dict, base_dir=".") -> ExperimentSpec:
    """Validate a configuration mapping; unknown keys are rejected."""
    if not isinstance(cfg, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(cfg) - set(_REQUIRED) - set(_OPTIONAL)
    if unknown:
        raise ConfigError(f"unknown configuration keys {sorted(unknown)}")
    missing = [k for k in _REQUIRED if k not in cfg]
    if missing:
        raise ConfigError(f"missing configuration keys {missing}")
    base = Path(base_dir)
    methods = {}
    for entry in cfg["methods"]:
        if isinstance(entry, str):
            name, raw = entry, None
        elif isinstance(entry, dict) and "method" in entry and set(entry) <= {"method", "params"}:
            name, raw = entry["method"], entry.get("params")
        else:
            raise ConfigError(f"bad method entry {entry!r}")
        if name not in PARAMS and name != ORIGINAL:
            raise ConfigError(f"unknown method {name!r}")
        methods[name] = _build_params(name, raw)
    opts = {k: cfg.get(k, v) for k, v in _OPTIONAL.items()}
    return ExperimentSpec(
        datasets=[_parse_source(d, base) for d in cfg["datasets"]],
        methods=methods,
        classifiers=tuple(cfg["classifiers"]),
        folds=int(opts["folds"]),
        repeats=int(opts["repeats"]),
        seed=int(opts["seed"]),
        output=str(opts["output"]),
        ratio=float(opts["ratio"]),
        ratio_mode=str(opts["ratio_mode"]),
        normalize=tuple(opts["normalize"]),
    )


def load_spec(path) -> ExperimentSpec:
    path = Path(path)
    try:
        cfg = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return spec_from_dict(cfg, path.parent)


# --------------------------------------------------------------------------
# execution


def n_synthetic(spec: ExperimentSpec, n_min: int, n_maj: int) -> int:
    if spec.ratio_mode == "balance":
        return max(0, n_maj - n_min)
    return synthetic_count(spec.ratio, n_min)


def _failed(ds, method, classifiers, repeat, fold, exc, n_synth=0, n_out=None):
    tag = f"error:{type(exc).__name__}"
    log.warning("%s/%s repeat %d fold %d failed: %s", ds, method, repeat, fold, exc)
    return [RunResult(ds, method, c, repeat, fold, None, n_synth, n_out, tag) for c in classifiers]


def _evaluate(name, X_tr, y_tr, X_te, y_te, cfg) -> MetricSet:
    model = learners.fit(name, X_tr, y_tr, cfg)
    s = learners.score(model, X_te)
    pred = learners.predict(model, X_te)
    return metrics_from_counts(confusion(y_te, pred), auc(s, y_te))


def run_fold(spec: ExperimentSpec, ds: str, method: str, repeat: int, fold: int,
             X_tr, y_tr, X_te, y_te, audit: list | None = None) -> list[RunResult]:
    """Resample one training fold with ``method`` and score every classifier."""
    rng = RngStream(spec.seed, f"{ds}|{method}|{repeat}|{fold}")
    if method in spec.normalize:
        scaler = normalize_01(X_tr)
        X_tr, X_te = scaler.apply(X_tr), scaler.apply(X_te)
    X_min, X_maj = X_tr[y_tr == 1], X_tr[y_tr == 0]
    n_synth, n_out, fallback = 0, None, None
    if method != ORIGINAL:
        try:
            syn = oversample(method, X_min, X_maj, n_synthetic(spec, len(X_min), len(X_maj)),
                             spec.methods[method], rng)
        except (GmoteLabError, np.linalg.LinAlgError) as exc:
            return _failed(ds, method, spec.classifiers, repeat, fold, exc)
        syn.provenance["cell"] = (ds, repeat, fold)
        if audit is not None:
            audit.append(syn)
        n_synth = len(syn)
        n_out = syn.provenance.get("n_outliers")
        fallback = syn.fallback
        X_tr = np.vstack([X_tr, syn.instances])
        y_tr = np.r_[y_tr, np.ones(n_synth, dtype=int)]
    out = []
    for c in spec.classifiers:
        try:
            m = _evaluate(c, X_tr, y_tr, X_te, y_te, spec.learner_config)
            out.append(RunResult(ds, method, c, repeat, fold, m, n_synth, n_out, fallback))
        except (GmoteLabError, np.linalg.LinAlgError) as exc:
            out.extend(_failed(ds, method, [c], repeat, fold, exc, n_synth, n_out))
    return out


def run_experiment(spec: ExperimentSpec, audit: list | None = None) -> list[RunResult]:
    """Run every cell of ``spec`` and return results sorted by key.

    ``audit``, when given, collects every generated ``SyntheticSet`` with
    its originating cell recorded under ``provenance['cell']``.
    """
    results: list[RunResult] = []
    for src in spec.datasets:
        rec = src.load(spec.seed)
        for r in range(spec.repeats):
            plan = stratified_kfold(rec.y, spec.folds, RngStream(spec.seed, f"{src.name}|{r}|folds"))
            for f, (tr, te) in enumerate(plan):
                X_tr, y_tr, X_te, y_te = rec.X[tr], rec.y[tr], rec.X[te], rec.y[te]
                for method in spec.method_names:
                    log.info("%s repeat %d fold %d %s", src.name, r, f, method)
                    results.extend(run_fold(spec, src.name, method, r, f,
                                            X_tr, y_tr, X_te, y_te, audit))
    return sorted(results, key=lambda x: x.key)


# --------------------------------------------------------------------------
# persistence


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return NA
    if isinstance(v, float):
        return repr(v)
    return str(v)


def results_to_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESULT_COLUMNS)
    for r in sorted(results, key=lambda x: x.key):
        w.writerow([r.dataset, r.method, r.classifier, r.repeat, r.fold]
                   + [_fmt(r.value(m)) for m in METRICS]
                   + [r.n_synth, _fmt(r.n_outliers), _fmt(r.fallback)])
    return buf.getvalue()


def write_results(results, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(results_to_csv(results))
    return path


def _parse(v: str):
    return None if v == NA else float(v)


def read_results(path) -> list[RunResult]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(RESULT_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ConfigError(f"{path}: missing result columns {sorted(missing)}")
        for row in reader:
            vals = {m: _parse(row[m]) for m in METRICS}
            failed = all(v is None for v in vals.values())
            metrics = None if failed else MetricSet(
                vals["accuracy"], vals["recall"], vals["precision"], vals["f1"],
                vals["gmean"], vals["auc"])
            out.append(RunResult(
                row["dataset"], row["method"], row["classifier"], int(row["repeat"]),
                int(row["fold"]), metrics, int(row["n_synth"]),
                None if row["n_outliers"] == NA else int(row["n_outliers"]),
                None if row["fallback"] == NA else row["fallback"],
            ))
    return out
