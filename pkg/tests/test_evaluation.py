import itertools
import math

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from glyphrun.errors import EvaluationError
from glyphrun.evaluation import (
    aggregate_runs,
    agreement,
    align_clusters,
    format_confusion_csv,
    format_report,
    parse_report,
    score,
)
from glyphrun.gaicda import Partition, cluster_em, normalize_features
from oracles import streaming_moments

SCRIPTS = ("cyrillic", "latin", "glagolitic")
TRUTH = {f"{s}_{i}": s for s in SCRIPTS for i in range(5)}
DOCS = list(TRUTH)


def partition(labels, method="gaicda"):
    return Partition.from_labels(DOCS, labels, method)


PERFECT = [SCRIPTS.index(TRUTH[d]) for d in DOCS]


def test_perfect_partition_scores_one():
    rep = score(partition(PERFECT), TRUTH)
    assert agreement(partition(PERFECT), TRUTH) == 15
    assert all(v == 1.0 for v in rep.flat().values())
    assert len(rep.flat()) == 12
    assert rep.confusion.sum() == 15
    assert np.array_equal(np.sort(rep.confusion.sum(axis=0)), [5, 5, 5])


def test_label_swap_is_absorbed():
    swapped = [{0: 1, 1: 0}.get(x, x) for x in PERFECT]
    a, b = score(partition(PERFECT), TRUTH), score(partition(swapped), TRUTH)
    assert a.flat() == b.flat()
    assert agreement(partition(swapped), TRUTH) == 15


def test_one_misplaced_document():
    labels = list(PERFECT)
    labels[DOCS.index("cyrillic_0")] = PERFECT[DOCS.index("latin_0")]
    rep = score(partition(labels), TRUTH)
    assert rep.class_metrics["cyrillic"].recall == pytest.approx(4 / 5)
    assert rep.class_metrics["latin"].precision == pytest.approx(5 / 6)
    assert rep.class_metrics["cyrillic"].precision == 1.0


def test_alignment_matches_exhaustive_oracle():
    rng = np.random.default_rng(4)
    for _ in range(200):
        labels = rng.integers(0, 3, size=15).tolist()
        p = partition(labels)
        grid = np.zeros((p.k, 3), dtype=int)
        classes = sorted(SCRIPTS)
        for d, lab in p.assignment.items():
            grid[lab, classes.index(TRUTH[d])] += 1
        best = max(
            sum(grid[i, perm[i]] for i in range(p.k)) for perm in itertools.permutations(range(3), p.k)
        )
        rows, cols = linear_sum_assignment(grid, maximize=True)
        assert agreement(p, TRUTH) == best == grid[rows, cols].sum()


def test_more_clusters_than_classes():
    labels = list(range(15))
    mapping = align_clusters(partition(labels), TRUTH)
    assert sum(v is not None for v in mapping.values()) == 3
    rep = score(partition(labels), TRUTH)
    assert rep.macro.precision == 1.0 and rep.macro.recall == pytest.approx(0.2)


def test_missing_truth_label():
    with pytest.raises(EvaluationError):
        score(partition(PERFECT), {k: v for k, v in TRUTH.items() if k != "latin_3"})


def test_metric_invariants_random():
    rng = np.random.default_rng(8)
    for _ in range(100):
        labels = rng.integers(0, 4, size=15).tolist()
        rep = score(partition(labels), TRUTH)
        fs = [m.f_measure for m in rep.class_metrics.values()]
        assert min(fs) - 1e-15 <= rep.macro.f_measure <= max(fs) + 1e-15
        for m in rep.class_metrics.values():
            expect = 2 * m.precision * m.recall / (m.precision + m.recall) if m.precision + m.recall else 0.0
            assert m.f_measure == pytest.approx(expect)
            assert 0 <= m.precision <= 1 and 0 <= m.recall <= 1
        perm = rng.permutation(max(labels) + 1)
        assert score(partition([int(perm[x]) for x in labels]), TRUTH).flat() == rep.flat()


def test_aggregate_identical_reports():
    rep = score(partition(PERFECT), TRUTH)
    agg = aggregate_runs([rep, rep, rep])
    assert all(std == 0.0 for _, std in agg.run_stats.values())


def test_aggregate_two_point():
    good = score(partition(PERFECT), TRUTH)
    bad = score(partition([0] * 15), TRUTH)
    agg = aggregate_runs([good, bad])
    mean, std = agg.run_stats["latin.recall"]
    # latin recall is 1 in the good run and 0 in the one-cluster run (cluster goes to cyrillic)
    assert (good.class_metrics["latin"].recall, bad.class_metrics["latin"].recall) == (1.0, 0.0)
    assert mean == 0.5 and std == pytest.approx(math.sqrt(0.5), rel=1e-15)


def test_aggregate_matches_streaming_moments(test_features):
    Z = normalize_features(test_features)
    ids = [v.doc_id for v in test_features]
    truth = {v.doc_id: v.script for v in test_features}
    reports = [score(cluster_em(Z, ids, 3, seed), truth) for seed in range(100)]
    agg = aggregate_runs(reports)
    for key, (mean, std) in agg.run_stats.items():
        m2, s2 = streaming_moments(r.flat()[key] for r in reports)
        assert math.isclose(mean, m2, rel_tol=1e-12, abs_tol=1e-12)
        assert math.isclose(std, s2, rel_tol=1e-12, abs_tol=1e-12)


def test_report_round_trip():
    reps = [score(partition(PERFECT), TRUTH), score(partition([0] * 15), TRUTH)]
    agg = aggregate_runs(reps)
    parsed = parse_report(format_report(agg))
    assert parsed.keys() == agg.run_stats.keys()
    assert all(parsed[k] == agg.run_stats[k] for k in parsed)
    single = parse_report(format_report(reps[0]))
    assert all(v == (1.0, None) for v in single.values())


def test_confusion_csv():
    text = format_confusion_csv(score(partition(PERFECT), TRUTH))
    lines = text.splitlines()
    assert lines[0] == "cluster,cyrillic,glagolitic,latin"
    assert sum(int(x) for line in lines[1:] for x in line.split(",")[1:]) == 15


def test_aggregate_requires_reports():
    with pytest.raises(EvaluationError):
        aggregate_runs([])
