from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from ..errors import ClusteringError, GlyphrunError

METHODS = ("gaicda", "hierarchical", "em")


def contiguous_labels(labels: Sequence) -> list[int]:
    """Relabel to 0..k-1 in order of first appearance."""
    seen: dict = {}
    return [seen.setdefault(lab, len(seen)) for lab in labels]


@dataclass(frozen=True)
class Partition:
    assignment: Mapping[str, int]
    method: str
    seed: int = 0
    params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ClusteringError(f"unknown method {self.method!r}")
        labels = set(self.assignment.values())
        if labels != set(range(len(labels))):
            raise ClusteringError(f"cluster labels must be contiguous 0..k-1, got {sorted(labels)}")

    @classmethod
    def from_labels(cls, doc_ids: Sequence[str], labels: Sequence, method: str, seed: int = 0, params=None):
        if len(doc_ids) != len(labels):
            raise ClusteringError("doc_ids and labels differ in length")
        if len(set(doc_ids)) != len(doc_ids):
            raise ClusteringError("duplicate docId in partition")
        return cls(dict(zip(doc_ids, contiguous_labels(labels))), method, seed, dict(params or {}))

    @property
    def doc_ids(self) -> list[str]:
        return list(self.assignment)

    @property
    def labels(self) -> list[int]:
        return list(self.assignment.values())

    @property
    def k(self) -> int:
        return len(set(self.assignment.values()))

    def clusters(self) -> list[list[str]]:
        groups: list[list[str]] = [[] for _ in range(self.k)]
        for doc, lab in self.assignment.items():
            groups[lab].append(doc)
        return groups


def format_partition_csv(p: Partition) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("docId", "cluster", "method", "seed"))
    for doc, lab in p.assignment.items():
        writer.writerow((doc, lab, p.method, p.seed))
    return buf.getvalue()


def parse_partition_csv(text: str, source: str = "<partition>") -> Partition:
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise GlyphrunError(f"{source}: empty partition")
    try:
        methods = {r["method"] for r in rows}
        seeds = {int(r["seed"]) for r in rows}
        labels = [int(r["cluster"]) for r in rows]
    except (KeyError, ValueError) as exc:
        raise GlyphrunError(f"{source}: malformed partition file ({exc})") from None
    if len(methods) != 1 or len(seeds) != 1:
        raise GlyphrunError(f"{source}: mixed method/seed values")
    doc_ids = [r["docId"] for r in rows]
    if len(set(doc_ids)) != len(doc_ids):
        raise GlyphrunError(f"{source}: duplicate docId")
    return Partition(dict(zip(doc_ids, labels)), methods.pop(), seeds.pop())


def format_params(params: Mapping[str, object]) -> str:
    return "".join(f"{key}={value}\n" for key, value in params.items())


def parse_params(lines: Iterable[str]) -> dict[str, str]:
    out = {}
    for line in lines:
        line = line.strip()
        if line and not line.startswith("#"):
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out
