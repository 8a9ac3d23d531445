"""Per-script feature range tables and SVG range plots."""

from __future__ import annotations

import csv
import io
from typing import Sequence
from xml.sax.saxutils import escape, quoteattr

from ._io import fmt_float
from .texture import FEATURE_NAMES, FeatureVector

PLOT_FEATURES = ("sre", "lre", "rp")
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b")


def feature_ranges(vectors: Sequence[FeatureVector]) -> dict[str, dict[str, tuple[float, float]]]:
    """``{script: {feature: (min, max)}}`` over documents that carry a script label."""
    by_script: dict[str, list[FeatureVector]] = {}
    for v in vectors:
        if v.script:
            by_script.setdefault(v.script, []).append(v)
    return {
        script: {f: (min(getattr(v, f) for v in vs), max(getattr(v, f) for v in vs)) for f in FEATURE_NAMES}
        for script, vs in sorted(by_script.items())
    }


def ranges_disjoint(ranges: dict[str, dict[str, tuple[float, float]]], feature: str) -> bool:
    spans = sorted(r[feature] for r in ranges.values())
    return all(hi < lo for (_, hi), (lo, _) in zip(spans, spans[1:]))


def format_ranges_csv(ranges) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("script", "feature", "min", "max"))
    for script, feats in ranges.items():
        for f in FEATURE_NAMES:
            lo, hi = feats[f]
            writer.writerow((script, f, fmt_float(lo), fmt_float(hi)))
    return buf.getvalue()


def format_separability(ranges) -> str:
    lines = [f"{f}.disjoint: {str(ranges_disjoint(ranges, f)).lower()}" for f in FEATURE_NAMES]
    return "\n".join(lines) + "\n"


def range_plot_svg(vectors: Sequence[FeatureVector], feature: str, width: int = 480, height: int = 320) -> str:
    """Min-max bar per script with one dot per document.

    Every bar and dot carries its numbers as ``data-*`` attributes so the
    plot can be checked without rendering it.
    """
    ranges = feature_ranges(vectors)
    scripts = list(ranges)
    values = [getattr(v, feature) for v in vectors if v.script]
    lo, hi = (min(values), max(values)) if values else (0.0, 1.0)
    pad = (hi - lo) * 0.08 or abs(hi) * 0.1 or 1.0
    lo, hi = lo - pad, hi + pad
    left, right, top, bottom = 70, 20, 40, 50
    plot_h = height - top - bottom
    slot = (width - left - right) / max(len(scripts), 1)

    def y(v: float) -> float:
        return top + plot_h * (hi - v) / (hi - lo)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" data-feature={quoteattr(feature)}>',
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-family="sans-serif" font-size="14">'
        f"{escape(feature.upper())} range per script</text>",
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>',
    ]
    for t in range(5):
        v = lo + (hi - lo) * t / 4
        out.append(
            f'<text x="{left - 6}" y="{y(v) + 4:.1f}" text-anchor="end" font-family="sans-serif" '
            f'font-size="10">{v:.4g}</text>'
        )
    for s_idx, script in enumerate(scripts):
        cx = left + slot * (s_idx + 0.5)
        rmin, rmax = ranges[script][feature]
        color = COLORS[s_idx % len(COLORS)]
        out.append(
            f'<rect class="range" x="{cx - 14:.1f}" y="{y(rmax):.1f}" width="28" '
            f'height="{max(y(rmin) - y(rmax), 1):.1f}" fill="{color}" fill-opacity="0.35" stroke="{color}" '
            f"data-script={quoteattr(script)} data-min={quoteattr(fmt_float(rmin))} "
            f"data-max={quoteattr(fmt_float(rmax))}/>"
        )
        for v in vectors:
            if v.script == script:
                val = getattr(v, feature)
                out.append(
                    f'<circle class="doc" cx="{cx:.1f}" cy="{y(val):.1f}" r="2.5" fill="{color}" '
                    f"data-doc={quoteattr(v.doc_id)} data-value={quoteattr(fmt_float(val))}/>"
                )
        out.append(
            f'<text x="{cx:.1f}" y="{height - bottom + 18}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="12">{escape(script)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
