"""Precision / recall / F-measure of a partition against script labels."""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import EvaluationError
from .gaicda.partition import Partition

METRICS = ("precision", "recall", "f_measure")
# above this size the exhaustive search is replaced by the Hungarian solver
EXHAUSTIVE_LIMIT = 7


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f_measure: float


def f_measure(precision: float, recall: float) -> float:
    total = precision + recall
    return 2 * precision * recall / total if total > 0 else 0.0


@dataclass
class EvalReport:
    class_metrics: dict[str, ClassMetrics]
    macro: ClassMetrics
    mapping: dict[int, str | None] | None = None
    confusion: np.ndarray | None = None  # clusters x classes
    classes: tuple[str, ...] = ()
    run_stats: dict[str, tuple[float, float]] | None = None
    n_runs: int = 1
    extra: dict = field(default_factory=dict)

    def flat(self) -> dict[str, float]:
        out = {}
        for cls in self.classes:
            for m in METRICS:
                out[f"{cls}.{m}"] = getattr(self.class_metrics[cls], m)
        for m in METRICS:
            out[f"macro.{m}"] = getattr(self.macro, m)
        return out


def _overlap(partition: Partition, truth: Mapping[str, str]) -> tuple[np.ndarray, tuple[str, ...]]:
    if not partition.assignment:
        raise EvaluationError("empty partition")
    missing = [d for d in partition.assignment if d not in truth]
    if missing:
        raise EvaluationError(f"no ground-truth label for {len(missing)} document(s), e.g. {missing[0]}")
    classes = tuple(sorted({truth[d] for d in partition.assignment}))
    col = {c: j for j, c in enumerate(classes)}
    grid = np.zeros((partition.k, len(classes)), dtype=np.int64)
    for doc, lab in partition.assignment.items():
        grid[lab, col[truth[doc]]] += 1
    return grid, classes


def _best_assignment(grid: np.ndarray) -> list[tuple[int, int]]:
    k, c = grid.shape
    if max(k, c) <= EXHAUSTIVE_LIMIT:
        best, best_pairs = -1, []
        if k <= c:
            for perm in itertools.permutations(range(c), k):
                pairs = list(enumerate(perm))
                total = sum(grid[i, j] for i, j in pairs)
                if total > best:
                    best, best_pairs = total, pairs
        else:
            for perm in itertools.permutations(range(k), c):
                pairs = sorted((i, j) for j, i in enumerate(perm))
                total = sum(grid[i, j] for i, j in pairs)
                if total > best:
                    best, best_pairs = total, pairs
        return best_pairs
    rows, cols = linear_sum_assignment(grid, maximize=True)
    return list(zip(rows.tolist(), cols.tolist()))


def align_clusters(partition: Partition, truth: Mapping[str, str]) -> dict[int, str | None]:
    """One-to-one cluster -> class mapping maximizing the number of agreeing documents.

    Clusters left without a class (more clusters than classes) map to ``None``.
    """
    grid, classes = _overlap(partition, truth)
    mapping: dict[int, str | None] = {lab: None for lab in range(partition.k)}
    for i, j in _best_assignment(grid):
        mapping[i] = classes[j]
    return mapping


def agreement(partition: Partition, truth: Mapping[str, str]) -> int:
    mapping = align_clusters(partition, truth)
    return sum(1 for d, lab in partition.assignment.items() if mapping[lab] == truth[d])


def score(partition: Partition, truth: Mapping[str, str]) -> EvalReport:
    grid, classes = _overlap(partition, truth)
    mapping = align_clusters(partition, truth)
    cluster_of = {cls: lab for lab, cls in mapping.items() if cls is not None}
    per_class = {}
    for j, cls in enumerate(classes):
        lab = cluster_of.get(cls)
        if lab is None:
            per_class[cls] = ClassMetrics(0.0, 0.0, 0.0)
            continue
        hit = int(grid[lab, j])
        retrieved = int(grid[lab].sum())
        relevant = int(grid[:, j].sum())
        p = hit / retrieved if retrieved else 0.0
        r = hit / relevant if relevant else 0.0
        per_class[cls] = ClassMetrics(p, r, f_measure(p, r))
    macro = ClassMetrics(*(float(np.mean([getattr(per_class[c], m) for c in classes])) for m in METRICS))
    return EvalReport(per_class, macro, mapping, grid, classes)


def aggregate_runs(reports: Sequence[EvalReport]) -> EvalReport:
    """Mean and sample standard deviation (ddof=1; 0 for a single run) of every metric."""
    if not reports:
        raise EvaluationError("no reports to aggregate")
    classes = reports[0].classes
    if any(r.classes != classes for r in reports):
        raise EvaluationError("reports cover different class sets")
    flats = [r.flat() for r in reports]
    stats = {}
    for key in flats[0]:
        values = np.array([f[key] for f in flats])
        mean = float(values.mean())
        std = float(np.sqrt(((values - mean) ** 2).sum() / (len(values) - 1))) if len(values) > 1 else 0.0
        stats[key] = (mean, std)
    per_class = {c: ClassMetrics(*(stats[f"{c}.{m}"][0] for m in METRICS)) for c in classes}
    macro = ClassMetrics(*(stats[f"macro.{m}"][0] for m in METRICS))
    return EvalReport(per_class, macro, classes=classes, run_stats=stats, n_runs=len(reports))


def _num(x: float) -> str:
    # shortest repr round-trips exactly
    return repr(float(x))


def format_report(report: EvalReport, title: str = "") -> str:
    """Key-value text; aggregated reports print ``mean (std)`` per metric."""
    lines = []
    if title:
        lines.append(f"# {title}")
    lines.append(f"runs: {report.n_runs}")
    lines.append(f"classes: {','.join(report.classes)}")
    for key, value in report.extra.items():
        lines.append(f"{key}: {value}")
    if report.mapping is not None:
        for lab, cls in sorted(report.mapping.items()):
            lines.append(f"cluster.{lab}: {cls if cls is not None else '-'}")
    if report.run_stats is not None:
        for key, (mean, std) in report.run_stats.items():
            lines.append(f"{key}: {_num(mean)} ({_num(std)})")
    else:
        for key, value in report.flat().items():
            lines.append(f"{key}: {_num(value)}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> dict[str, tuple[float, float | None]]:
    """Metric lines of :func:`format_report` as ``key -> (value, std or None)``."""
    out = {}
    for line in text.splitlines():
        key, sep, value = line.partition(": ")
        if not sep or "." not in key or key.startswith("cluster."):
            continue
        parts = value.split()
        if len(parts) == 2 and parts[1].startswith("("):
            out[key] = (float(parts[0]), float(parts[1].strip("()")))
        else:
            out[key] = (float(parts[0]), None)
    return out


def format_confusion_csv(report: EvalReport) -> str:
    if report.confusion is None:
        raise EvaluationError("report has no confusion matrix")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("cluster", *report.classes))
    for lab, row in enumerate(report.confusion):
        writer.writerow((lab, *row.tolist()))
    return buf.getvalue()

