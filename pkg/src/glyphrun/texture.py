"""Gray-level run-length statistics of a 1-D code sequence.

A run is a maximal block of consecutive equal codes.  ``counts[i, j-1]`` of a
:class:`RunLengthMatrix` holds the number of runs of level ``i`` and length
``j``; the five Galloway features are derived from its marginals:

    SRE = sum_j p_r(j) / j**2 / n_r        (short run emphasis)
    LRE = sum_j p_r(j) * j**2 / n_r        (long run emphasis)
    GLN = sum_i p_g(i)**2 / n_r            (gray-level nonuniformity)
    RLN = sum_j p_r(j)**2 / n_r            (run-length nonuniformity)
    RP  = n_r / n_p                        (run percentage)
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._io import fmt_float
from .alphabet import CodeSequence
from .errors import EmptyDocumentError, GlyphrunError

N_LEVELS = 4
FEATURE_NAMES = ("sre", "lre", "gln", "rln", "rp")


@dataclass(frozen=True)
class RunLengthMatrix:
    counts: np.ndarray  # (N_LEVELS, max_run) int64
    n_runs: int
    n_pixels: int

    @property
    def n_levels(self) -> int:
        return self.counts.shape[0]

    @property
    def max_run(self) -> int:
        return self.counts.shape[1]

    def p(self, level: int, length: int) -> int:
        """Count of runs with gray level ``level`` (0-based) and run length ``length`` (1-based)."""
        if length < 1 or length > self.max_run:
            return 0
        return int(self.counts[level, length - 1])


@dataclass(frozen=True)
class DerivedRunStats:
    pixel_number: np.ndarray  # p_p(i, j) = p(i, j) * j
    gray_run_number: np.ndarray  # p_g(i)
    run_length_run_number: np.ndarray  # p_r(j)
    run_length_one: np.ndarray  # p_o(i) = p(i, 1)


@dataclass(frozen=True)
class FeatureVector:
    doc_id: str
    sre: float
    lre: float
    gln: float
    rln: float
    rp: float
    script: str | None = None

    def values(self, names: Sequence[str] = FEATURE_NAMES) -> np.ndarray:
        return np.array([getattr(self, n) for n in names], dtype=float)


def _runs(codes: Sequence[int], breaks: Sequence[int] = ()) -> list[tuple[int, int]]:
    cuts = set(breaks)
    runs = []
    start = 0
    for k in range(1, len(codes) + 1):
        if k == len(codes) or codes[k] != codes[start] or k in cuts:
            runs.append((int(codes[start]), k - start))
            start = k
    return runs


def build_run_length_matrix(seq: CodeSequence | Sequence[int]) -> RunLengthMatrix:
    if isinstance(seq, CodeSequence):
        codes, breaks, doc_id = seq.codes, seq.breaks, seq.doc_id
    else:
        codes, breaks, doc_id = tuple(seq), (), "<sequence>"
    if len(codes) == 0:
        raise EmptyDocumentError(doc_id, "empty code sequence")
    runs = _runs(codes, breaks)
    max_run = max(length for _, length in runs)
    counts = np.zeros((N_LEVELS, max_run), dtype=np.int64)
    for level, length in runs:
        if not 0 <= level < N_LEVELS:
            raise GlyphrunError(f"{doc_id}: code {level} outside 0..{N_LEVELS - 1}")
        counts[level, length - 1] += 1
    return RunLengthMatrix(counts, n_runs=len(runs), n_pixels=len(codes))


def derive_stats(m: RunLengthMatrix) -> DerivedRunStats:
    lengths = np.arange(1, m.max_run + 1)
    return DerivedRunStats(
        pixel_number=m.counts * lengths,
        gray_run_number=m.counts.sum(axis=1),
        run_length_run_number=m.counts.sum(axis=0),
        run_length_one=m.counts[:, 0].copy(),
    )


def compute_features(m: RunLengthMatrix, doc_id: str = "", script: str | None = None) -> FeatureVector:
    if m.n_runs < 1:
        raise EmptyDocumentError(doc_id or "<matrix>", "no runs")
    stats = derive_stats(m)
    j = np.arange(1, m.max_run + 1, dtype=float)
    p_r = stats.run_length_run_number.astype(float)
    p_g = stats.gray_run_number.astype(float)
    n_r = float(m.n_runs)
    return FeatureVector(
        doc_id=doc_id,
        sre=float(np.sum(p_r / j**2) / n_r),
        lre=float(np.sum(p_r * j**2) / n_r),
        gln=float(np.sum(p_g**2) / n_r),
        rln=float(np.sum(p_r**2) / n_r),
        rp=n_r / m.n_pixels,
        script=script,
    )


def document_features(seq: CodeSequence) -> FeatureVector:
    return compute_features(build_run_length_matrix(seq), seq.doc_id, seq.source_script)


def feature_matrix(docs: Iterable[CodeSequence]) -> list[FeatureVector]:
    return [document_features(seq) for seq in docs]


CSV_HEADER = ("docId", "script", *FEATURE_NAMES)


def format_features_csv(vectors: Iterable[FeatureVector]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for v in vectors:
        writer.writerow([v.doc_id, v.script or "", *(fmt_float(getattr(v, n)) for n in FEATURE_NAMES)])
    return buf.getvalue()


def parse_features_csv(text: str, source: str = "<features>") -> list[FeatureVector]:
    reader = csv.DictReader(io.StringIO(text))
    missing = set(CSV_HEADER) - set(reader.fieldnames or ())
    if missing:
        raise GlyphrunError(f"{source}: missing columns {sorted(missing)}")
    out = []
    for row in reader:
        try:
            values = {n: float(row[n]) for n in FEATURE_NAMES}
        except ValueError as exc:
            raise GlyphrunError(f"{source}: {row['docId']}: {exc}") from None
        out.append(FeatureVector(doc_id=row["docId"], script=row["script"] or None, **values))
    return out
