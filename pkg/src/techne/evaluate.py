"""Accuracy, per-class precision/recall/F1, confusion matrices, CSV exports.

Confusion matrices put gold labels on rows and predictions on columns, so in
the exported heatmap an off-diagonal column entry is a false positive for
that column's label and an off-diagonal row entry a false negative for that
row's label. All CSV files are UTF-8 with a header row and 6-decimal fixed
number formatting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class ConfusionMatrix:
    labels: tuple
    counts: np.ndarray  # (n, n) int64; rows = gold, columns = predicted

    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    per_class: dict
    macro_f1: float
    confusion: ConfusionMatrix
    zero_prediction_labels: tuple  # classes flagged for 0 predicted positives


def f1(tp: int, fp: int, fn: int) -> float:
    """2tp / (2tp + fp + fn); zero when the denominator is zero."""
    if tp < 0 or fp < 0 or fn < 0:
        raise ValueError("counts must be non-negative")
    denominator = 2 * tp + fp + fn
    return 0.0 if denominator == 0 else 2.0 * tp / denominator


def confusion_matrix(golds, preds, labels) -> ConfusionMatrix:
    index = {name: i for i, name in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for g, p in zip(golds, preds):
        if g not in index:
            raise ValueError(f"gold label {g!r} outside the label list")
        if p not in index:
            raise ValueError(f"predicted label {p!r} outside the label list")
        counts[index[g], index[p]] += 1
    return ConfusionMatrix(labels=tuple(labels), counts=counts)


def evaluate(golds, preds, labels) -> MetricsReport:
    """Standard classification metrics over parallel gold/pred label lists.

    Precision with zero predicted positives is 0 (the class is flagged);
    classes with zero support are excluded from the macro-F1 average.
    """
    if len(golds) != len(preds):
        raise ValueError(f"length mismatch: {len(golds)} golds vs {len(preds)} preds")
    if not golds:
        raise ValueError("nothing to evaluate")
    cm = confusion_matrix(golds, preds, labels)
    counts = cm.counts
    total = cm.total()
    accuracy = float(np.trace(counts)) / total

    per_class = {}
    zero_pred = []
    f1_values = []
    for i, name in enumerate(labels):
        tp = int(counts[i, i])
        fp = int(counts[:, i].sum()) - tp
        fn = int(counts[i, :].sum()) - tp
        support = int(counts[i, :].sum())
        if tp + fp == 0:
            precision = 0.0
            zero_pred.append(name)
        else:
            precision = tp / (tp + fp)
        recall = tp / support if support else 0.0
        score = f1(tp, fp, fn)
        per_class[name] = ClassMetrics(precision, recall, score, support)
        if support > 0:
            f1_values.append(score)
    macro = float(np.mean(f1_values)) if f1_values else 0.0
    return MetricsReport(
        accuracy=accuracy,
        per_class=per_class,
        macro_f1=macro,
        confusion=cm,
        zero_prediction_labels=tuple(zero_pred),
    )


def heatmap_export(cm: ConfusionMatrix, path, normalize: str = "none") -> None:
    """Write the confusion matrix as CSV (gold rows x predicted columns).

    ``normalize="row"`` divides each non-empty row by its sum, so those rows
    sum to one.
    """
    if normalize not in ("none", "row"):
        raise ValueError(f"unknown normalization {normalize!r}")
    values = cm.counts.astype(float)
    if normalize == "row":
        sums = values.sum(axis=1, keepdims=True)
        values = np.divide(values, sums, out=np.zeros_like(values), where=sums > 0)
    lines = ["gold," + ",".join(cm.labels)]
    for name, row in zip(cm.labels, values):
        lines.append(name + "," + ",".join(f"{v:.6f}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _per_class_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + "_per_class" + (path.suffix or ".csv"))


def compare_architectures(named_reports, path) -> None:
    """Summarize several runs: an accuracy table plus a per-class F1 grid.

    ``named_reports`` is a list of (name, MetricsReport). The accuracy table
    goes to ``path``; the grid (one column per label with support in any
    report) goes to a sibling file with ``_per_class`` in its name.
    """
    if not named_reports:
        raise ValueError("need at least one report")
    rows = sorted(named_reports, key=lambda item: item[0])
    lines = ["architecture,accuracy"]
    for name, report in rows:
        lines.append(f"{name},{report.accuracy:.6f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    columns = []
    for _, report in rows:
        for label in report.confusion.labels:
            if report.per_class[label].support > 0 and label not in columns:
                columns.append(label)
    grid = ["architecture," + ",".join(columns)]
    for name, report in rows:
        cells = []
        for label in columns:
            metrics = report.per_class.get(label)
            if metrics is None or metrics.support == 0:
                cells.append("")
            else:
                cells.append(f"{metrics.f1:.6f}")
        grid.append(name + "," + ",".join(cells))
    _per_class_path(path).write_text("\n".join(grid) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# JSON serialization for CLI artifacts


def report_to_obj(report: MetricsReport) -> dict:
    return {
        "accuracy": report.accuracy,
        "macro_f1": report.macro_f1,
        "per_class": {
            name: {
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
            }
            for name, m in report.per_class.items()
        },
        "zero_prediction_labels": list(report.zero_prediction_labels),
        "labels": list(report.confusion.labels),
        "confusion": report.confusion.counts.tolist(),
    }


def report_from_obj(obj: dict) -> MetricsReport:
    cm = ConfusionMatrix(
        labels=tuple(obj["labels"]),
        counts=np.array(obj["confusion"], dtype=np.int64),
    )
    per_class = {
        name: ClassMetrics(m["precision"], m["recall"], m["f1"], m["support"])
        for name, m in obj["per_class"].items()
    }
    return MetricsReport(
        accuracy=obj["accuracy"],
        per_class=per_class,
        macro_f1=obj["macro_f1"],
        confusion=cm,
        zero_prediction_labels=tuple(obj["zero_prediction_labels"]),
    )


def save_report(report: MetricsReport, path) -> None:
    Path(path).write_text(
        json.dumps(report_to_obj(report), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )


def load_report(path) -> MetricsReport:
    return report_from_obj(json.loads(Path(path).read_text(encoding="utf-8")))


__all__ = [
    "ClassMetrics",
    "ConfusionMatrix",
    "MetricsReport",
    "f1",
    "confusion_matrix",
    "evaluate",
    "heatmap_export",
    "compare_architectures",
    "report_to_obj",
    "report_from_obj",
    "save_report",
    "load_report",
]
