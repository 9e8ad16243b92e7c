"""Binary datasets from KEEL ``.dat`` files and plain CSV."""
from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import MalformedHeader, MissingColumn, NonNumericFeature, SingleClass

_NUMERIC_TYPES = ("real", "integer", "numeric")
_ATTR = re.compile(r"@attribute\s+('[^']*'|\S+)\s*(.*)$", re.IGNORECASE)


@dataclass(frozen=True)
class DatasetRecord:
    """A binary dataset with label 1 for the positive (minority) class."""

    name: str
    X: np.ndarray
    y: np.ndarray
    positive_label: str
    imbalance_ratio: float
    feature_names: tuple = ()

    @property
    def n_samples(self) -> int:
        return int(self.X.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.X.shape[1])

    @property
    def n_positive(self) -> int:
        return int(self.y.sum())


def _binarize(name, X, labels, feature_names, positive_label=None) -> DatasetRecord:
    values, counts = np.unique(labels, return_counts=True)
    if values.size < 2:
        raise SingleClass(f"{name}: only class {values.tolist()} present")
    if values.size > 2:
        raise MalformedHeader(f"{name}: expected two classes, found {values.tolist()}")
    if positive_label is None:
        # minority by count; ties go to the lexicographically first label
        positive_label = str(values[np.argmin(counts)])
    elif positive_label not in values:
        raise MalformedHeader(f"{name}: positive label {positive_label!r} not among {values.tolist()}")
    y = (labels == positive_label).astype(int)
    n_pos = int(y.sum())
    ir = max(n_pos, y.size - n_pos) / min(n_pos, y.size - n_pos)
    return DatasetRecord(name, X, y, positive_label, float(ir), tuple(feature_names))


def _strip_quotes(s: str) -> str:
    return s[1:-1] if len(s) >= 2 and s[0] == s[-1] == "'" else s


def load_keel(path) -> DatasetRecord:
    """Read a binary KEEL ``.dat`` file.

    Input attributes must be ``real``/``integer``; the output attribute is
    the nominal class. When ``@outputs`` is absent the last attribute is
    the class. The rarer class becomes the positive label.
    """
    path = Path(path)
    relation = path.stem
    attrs: list[tuple[str, str]] = []
    inputs = outputs = None
    rows: list[list[str]] = []
    in_data = False
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            if in_data:
                rows.append([v.strip() for v in line.split(",")])
                continue
            low = line.lower()
            if low.startswith("@relation"):
                relation = line.split(None, 1)[1].strip() if " " in line else relation
            elif low.startswith("@attribute"):
                m = _ATTR.match(line)
                if not m:
                    raise MalformedHeader(f"bad attribute line: {line!r}")
                attrs.append((_strip_quotes(m.group(1)), m.group(2).strip()))
            elif low.startswith("@inputs"):
                inputs = [a.strip() for a in line.split(None, 1)[1].split(",")]
            elif low.startswith("@outputs") or low.startswith("@output"):
                outputs = [a.strip() for a in line.split(None, 1)[1].split(",")]
            elif low.startswith("@data"):
                in_data = True
            else:
                raise MalformedHeader(f"unexpected header line: {line!r}")
    if not in_data or not attrs:
        raise MalformedHeader(f"{path}: missing @attribute or @data section")
    names = [a[0] for a in attrs]
    out_name = outputs[0] if outputs else names[-1]
    in_names = inputs if inputs else [n for n in names if n != out_name]
    try:
        out_idx = names.index(out_name)
        in_idx = [names.index(n) for n in in_names]
    except ValueError as exc:
        raise MalformedHeader(f"{path}: {exc}") from None
    for i in in_idx:
        kind = attrs[i][1].split("[")[0].strip().lower()
        if kind not in _NUMERIC_TYPES:
            raise NonNumericFeature(f"attribute {names[i]!r} has type {attrs[i][1]!r}")
    if not rows:
        raise MalformedHeader(f"{path}: no data rows")
    if any(len(r) != len(attrs) for r in rows):
        raise MalformedHeader(f"{path}: row width differs from {len(attrs)} attributes")
    try:
        X = np.array([[float(r[i]) for i in in_idx] for r in rows])
    except ValueError as exc:
        raise NonNumericFeature(f"{path}: {exc}") from None
    labels = np.array([r[out_idx] for r in rows])
    return _binarize(relation, X, labels, in_names)


def load_csv(path, label_column: str, positive_label: str | None = None) -> DatasetRecord:
    """Read a headed CSV; every column except ``label_column`` is a feature."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedHeader(f"{path}: empty file") from None
        body = [r for r in reader if r]
    if label_column not in header:
        raise MissingColumn(label_column)
    li = header.index(label_column)
    feat = [i for i in range(len(header)) if i != li]
    try:
        X = np.array([[float(r[i]) for i in feat] for r in body], dtype=float).reshape(len(body), len(feat))
    except ValueError as exc:
        raise NonNumericFeature(f"{path}: {exc}") from None
    labels = np.array([r[li] for r in body])
    return _binarize(path.stem, X, labels, [header[i] for i in feat], positive_label)


def save_csv(record: DatasetRecord, path, label_column: str = "label",
             negative_label: str = "negative") -> None:
    """Write features plus a label column; ``repr`` keeps floats exact."""
    names = list(record.feature_names) or [f"x{i}" for i in range(record.n_features)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names + [label_column])
        for row, lab in zip(record.X, record.y):
            w.writerow([repr(float(v)) for v in row]
                       + [record.positive_label if lab == 1 else negative_label])
