import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glyphrun.alphabet import (
    CodeSequence,
    ScriptClass,
    classify_letter,
    default_table,
    encode_text,
    format_coded,
    from_gray_image,
    load_mapping_table,
    parse_coded,
    parse_mapping_table,
    to_gray_image,
)
from glyphrun.errors import DuplicateEntryError, EmptyDocumentError, OutOfBlockError, OutOfBlockWarning, TableFormatError


def test_script_class_codes_and_gray_levels():
    assert [c.code for c in ScriptClass] == [0, 1, 2, 3]
    grays = [c.gray_level for c in ScriptClass]
    assert len(set(grays)) == 4
    assert grays == sorted(grays)
    assert all(0 <= g <= 255 for g in grays)


def test_load_single_line(tmp_path):
    path = tmp_path / "t.tsv"
    path.write_text("script: Latin\nb\tA\n", encoding="utf-8")
    table = load_mapping_table(path)
    assert table.script == "latin"
    assert classify_letter("b", table) is ScriptClass.ASCENDER


def test_duplicate_entry_is_error(tmp_path):
    path = tmp_path / "t.tsv"
    path.write_text("script: Latin\nb\tA\nb\tS\n", encoding="utf-8")
    with pytest.raises(DuplicateEntryError):
        load_mapping_table(path)


def test_duplicate_after_case_folding():
    with pytest.raises(DuplicateEntryError):
        parse_mapping_table(["script: Latin", "b\tA", "B\tA"])


@pytest.mark.parametrize(
    "lines",
    [
        ["b\tA"],  # missing header
        ["script: Runic", "b\tA"],
        ["script: Latin", "b\tX"],
        ["script: Latin", "bb\tA"],
        ["script: Latin", "no tab or colon"],
        ["script: Latin", "fold: sideways", "b\tA"],
    ],
)
def test_malformed_tables(lines):
    with pytest.raises(TableFormatError):
        parse_mapping_table(lines)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_mapping_table(tmp_path / "nope.tsv")


def test_out_of_block_warns_or_raises():
    lines = ["script: Latin", "ж\tS"]
    with pytest.warns(OutOfBlockWarning):
        parse_mapping_table(lines)
    with pytest.raises(OutOfBlockError):
        parse_mapping_table(lines, strict=True)


def test_default_latin_table_covers_a_to_z():
    table = default_table("latin")
    # a-z plus the five Serbian diacritic letters
    assert len(table) == 31
    assert all(table.lookup(chr(c)) is not None for c in range(ord("a"), ord("z") + 1))


@pytest.mark.parametrize("script", ["latin", "cyrillic", "glagolitic"])
def test_default_tables_load_strictly(script):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        table = default_table(script)
    assert table.script == script
    assert len(set(table.entries.values())) == 4


@pytest.mark.parametrize(
    "ch,expected",
    [("o", ScriptClass.SHORT), ("b", ScriptClass.ASCENDER), ("p", ScriptClass.DESCENDER), ("j", ScriptClass.FULL),
     ("O", ScriptClass.SHORT), ("P", ScriptClass.DESCENDER)],
)
def test_classify_latin(ch, expected):
    assert classify_letter(ch, default_table("latin")) is expected


def test_classify_cyrillic_and_glagolitic_uppercase():
    cyr = default_table("cyrillic")
    assert classify_letter("Р", cyr) is classify_letter("р", cyr) is ScriptClass.DESCENDER
    gla = default_table("glagolitic")
    assert classify_letter("Ⰰ", gla) is classify_letter("ⰰ", gla)


def test_no_mapping_is_none():
    table = default_table("latin")
    for ch in " ?7ж":
        assert classify_letter(ch, table) is None


def test_fold_none_keeps_case_distinct():
    table = parse_mapping_table(["script: Latin", "fold: none", "b\tA", "B\tF"])
    assert table.lookup("b") is ScriptClass.ASCENDER
    assert table.lookup("B") is ScriptClass.FULL


def test_encode_bob():
    seq = encode_text("bob", default_table("latin"), "d1")
    assert seq.codes == (1, 0, 1)
    assert seq.skipped_count == 0


def test_encode_empty_document():
    with pytest.raises(EmptyDocumentError):
        encode_text("???", default_table("latin"), "d1")


def test_encode_counts_skipped_characters():
    rng = np.random.default_rng(7)
    pool = list("abcdefghijklmnopqrstuvwxyz čćšžđ.,!?0123456789жШ\n")
    text = "".join(rng.choice(pool, size=1000))
    table = default_table("latin")
    seq = encode_text(text, table, "sample")
    mapped = 0
    for ch in text:  # single-pass counter using the raw entries dict
        if ch.lower() in table.entries:
            mapped += 1
    assert len(seq.codes) == mapped == 1000 - seq.skipped_count


def test_break_runs_at_space_records_boundaries():
    table = default_table("latin")
    seq = encode_text("oo oo", table, "d", break_runs_at_space=True)
    assert seq.codes == (0, 0, 0, 0)
    assert seq.breaks == (2,)
    assert seq.digits() == "00 00"
    assert encode_text("oo oo", table, "d").breaks == ()


def test_gray_image_examples():
    assert to_gray_image([0, 3]).tolist() == [0, 255]
    assert to_gray_image([1, 1, 2]).tolist() == [85, 85, 170]


@given(st.lists(st.integers(0, 3), min_size=1, max_size=200))
def test_gray_round_trip(codes):
    assert from_gray_image(to_gray_image(codes)) == tuple(codes)


_letters = st.sampled_from(list("abcdefghijklmnoprstuvzčćšžđ"))
_junk = st.sampled_from(list(" .,;!?-0123456789\n\t"))


@settings(max_examples=200)
@given(st.lists(st.tuples(_letters, st.lists(_junk, max_size=3)), min_size=1, max_size=60), st.randoms())
def test_unmapped_permutation_does_not_change_codes(chunks, rnd):
    table = default_table("latin")
    text = "".join(letter + "".join(junk) for letter, junk in chunks)
    junk_chars = [c for _, junk in chunks for c in junk]
    rnd.shuffle(junk_chars)
    it = iter(junk_chars)
    shuffled = "".join(letter + "".join(next(it) for _ in junk) for letter, junk in chunks)
    a = encode_text(text, table, "x")
    b = encode_text(shuffled, table, "x")
    assert a.codes == b.codes
    assert a == encode_text(text, table, "x")


def test_classify_is_total_over_table():
    table = default_table("cyrillic")
    for ch, cls in table.entries.items():
        assert classify_letter(ch, table) is cls
    for cp in range(0x20, 0x250):
        if chr(cp).lower() not in table.entries:
            assert classify_letter(chr(cp), table) is None


def test_coded_export_round_trip():
    seqs = [CodeSequence("test/latin/a", (0, 1, 2), "latin"), CodeSequence("b", (3, 3, 0, 0), breaks=(2,))]
    text = format_coded(seqs)
    assert text == "test/latin/a\t012\nb\t33 00\n"
    back = parse_coded(text.splitlines())
    assert [(s.doc_id, s.source_script, s.codes, s.breaks) for s in back] == [
        ("test/latin/a", "latin", (0, 1, 2), ()),
        ("b", None, (3, 3, 0, 0), (2,)),
    ]
    assert parse_coded(["c\t0 1"])[0].breaks == (1,)


def test_coded_export_rejects_bad_digits():
    with pytest.raises(TableFormatError):
        parse_coded(["a\t0124"])
    with pytest.raises(TableFormatError):
        parse_coded(["a\tb\t012"])
