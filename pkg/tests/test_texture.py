import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from glyphrun.alphabet import CodeSequence, encode_text
from glyphrun.errors import EmptyDocumentError
from glyphrun.texture import (
    FEATURE_NAMES,
    build_run_length_matrix,
    compute_features,
    derive_stats,
    document_features,
    feature_matrix,
    format_features_csv,
    parse_features_csv,
)
from oracles import enumerate_runs, features_double_sum, features_vector_form, run_length_table

codes_st = st.lists(st.integers(0, 3), min_size=1, max_size=64)


def test_matrix_small_example():
    m = build_run_length_matrix([0, 0, 1, 2, 2, 2])
    assert m.p(0, 2) == 1 and m.p(1, 1) == 1 and m.p(2, 3) == 1
    assert int(m.counts.sum()) == 3
    assert (m.n_runs, m.n_pixels, m.max_run) == (3, 6, 3)


def test_matrix_single_run():
    m = build_run_length_matrix([1, 1, 1, 1])
    assert m.p(1, 4) == 1 and int(m.counts.sum()) == 1
    assert (m.n_runs, m.n_pixels) == (1, 4)


def test_empty_sequence_rejected():
    with pytest.raises(EmptyDocumentError):
        build_run_length_matrix([])


def test_matrix_matches_oracle_on_random_sequences():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        codes = rng.integers(0, 4, size=64).tolist()
        m = build_run_length_matrix(codes)
        p, n_r, n_p, N = run_length_table(codes)
        assert m.max_run == N and m.n_runs == n_r and m.n_pixels == n_p
        for i, j in itertools.product(range(4), range(1, N + 1)):
            assert m.p(i, j) == p[i][j]


def test_derived_small_example():
    s = derive_stats(build_run_length_matrix([0, 0, 1, 2, 2, 2]))
    assert s.gray_run_number.tolist() == [1, 1, 1, 0]
    assert s.run_length_run_number.tolist() == [1, 1, 1]
    assert s.run_length_one.tolist() == [0, 1, 0, 0]


def test_pixel_number_single_run():
    s = derive_stats(build_run_length_matrix([1, 1, 1, 1]))
    assert int(s.pixel_number[1, 3]) == 4
    assert int(s.pixel_number.sum()) == 4


@given(codes_st)
def test_derived_against_raw_runs(codes):
    m = build_run_length_matrix(codes)
    s = derive_stats(m)
    runs = enumerate_runs(codes)
    for level in range(4):
        assert s.gray_run_number[level] == sum(1 for v, _ in runs if v == level)
        assert s.run_length_one[level] == sum(1 for v, n in runs if v == level and n == 1)
    for j in range(1, m.max_run + 1):
        assert s.run_length_run_number[j - 1] == sum(1 for _, n in runs if n == j)
    assert s.gray_run_number.sum() == s.run_length_run_number.sum() == m.n_runs
    assert s.pixel_number.sum() == m.n_pixels


def test_features_alternating():
    f = compute_features(build_run_length_matrix([0, 1, 0, 1]))
    assert (f.sre, f.lre, f.rln, f.gln, f.rp) == (1.0, 1.0, 4.0, 2.0, 1.0)


def test_features_constant_run():
    f = compute_features(build_run_length_matrix([1, 1, 1, 1]))
    assert (f.sre, f.lre, f.gln, f.rln, f.rp) == (1 / 16, 16.0, 1.0, 1.0, 0.25)


def test_features_mixed_example():
    f = compute_features(build_run_length_matrix([0, 0, 1, 2, 2, 2]))
    assert f.sre == pytest.approx((1 + 1 / 4 + 1 / 9) / 3, rel=1e-12)
    assert f.sre == pytest.approx(0.4537037037037037, rel=1e-12)
    assert f.lre == pytest.approx(14 / 3, rel=1e-12)
    assert (f.gln, f.rln, f.rp) == (1.0, 1.0, 0.5)


@given(codes_st)
def test_features_match_both_literal_forms(codes):
    f = compute_features(build_run_length_matrix(codes))
    a, b = features_double_sum(codes), features_vector_form(codes)
    for name in FEATURE_NAMES:
        assert math.isclose(getattr(f, name), a[name], rel_tol=1e-12)
        assert math.isclose(getattr(f, name), b[name], rel_tol=1e-12)


@given(codes_st)
def test_feature_bounds(codes):
    m = build_run_length_matrix(codes)
    f = compute_features(m)
    assert 0 < f.rp <= 1 and 0 < f.sre <= 1 <= f.lre
    assert f.rp == m.n_runs / m.n_pixels
    assert f.gln > 0 and f.rln > 0
    all_unit = m.max_run == 1
    assert (f.sre == 1) == all_unit and (f.lre == 1) == all_unit


@given(codes_st, st.permutations([0, 1, 2, 3]))
def test_level_relabelling_invariance(codes, perm):
    f = compute_features(build_run_length_matrix(codes))
    g = compute_features(build_run_length_matrix([perm[c] for c in codes]))
    for name in FEATURE_NAMES:
        assert math.isclose(getattr(f, name), getattr(g, name), rel_tol=1e-12)


def test_breaks_split_runs():
    seq = CodeSequence("d", (0, 0, 0, 0), breaks=(2,))
    m = build_run_length_matrix(seq)
    assert m.p(0, 2) == 2 and m.n_runs == 2


def test_feature_matrix_order_and_batching(synthetic, tables):
    seqs = [encode_text(d.text, tables[d.script], d.doc_id, d.script) for d in synthetic.subset("train")]
    assert len(seqs) == 100
    batch = feature_matrix(seqs)
    assert [v.doc_id for v in batch] == [s.doc_id for s in seqs]
    assert batch == [document_features(s) for s in seqs]
    assert feature_matrix(seqs[:40]) + feature_matrix(seqs[40:]) == batch


def test_feature_matrix_reports_offending_doc():
    with pytest.raises(EmptyDocumentError) as err:
        feature_matrix([CodeSequence("ok", (0,)), CodeSequence("bad", ())])
    assert err.value.doc_id == "bad"


def test_features_csv_round_trip(test_features):
    text = format_features_csv(test_features)
    assert text.splitlines()[0] == "docId,script,sre,lre,gln,rln,rp"
    assert len(text.splitlines()) == 16
    assert parse_features_csv(text) == test_features
