"""Letter zone classes and text-to-code encoding.

Each letter of a script is assigned one of four zone classes according to
which vertical zones of the text line it occupies:

    SHORT      middle zone only                    code 0
    ASCENDER   middle + upper zone                 code 1
    DESCENDER  middle + lower zone                 code 2
    FULL       upper + middle + lower zone         code 3

A document becomes a 1-D sequence of these codes, which is treated as a
four-level gray image by :func:`to_gray_image`.

The per-letter assignments live in plain-text tables (``data/tables``) so they
can be corrected without touching code.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DuplicateEntryError,
    EmptyDocumentError,
    OutOfBlockError,
    OutOfBlockWarning,
    TableFormatError,
)

SCRIPTS = ("cyrillic", "latin", "glagolitic")

# code -> gray level; equidistant over 8 bits
DEFAULT_GRAY_LEVELS = (0, 85, 170, 255)

# Unicode ranges accepted as "belonging" to each script
SCRIPT_BLOCKS = {
    "latin": ((0x41, 0x5A), (0x61, 0x7A), (0xC0, 0x24F), (0x1E00, 0x1EFF)),
    "cyrillic": ((0x400, 0x52F), (0x1C80, 0x1C8F), (0x2DE0, 0x2DFF), (0xA640, 0xA69F)),
    "glagolitic": ((0x2C00, 0x2C5F), (0x1E000, 0x1E02F)),
}

FOLD_RULES = {
    "lower": str.lower,
    "casefold": str.casefold,
    "none": lambda s: s,
}


class ScriptClass(enum.IntEnum):
    SHORT = 0
    ASCENDER = 1
    DESCENDER = 2
    FULL = 3

    @property
    def code(self) -> int:
        return int(self)

    @property
    def letter(self) -> str:
        return self.name[0]

    @property
    def gray_level(self) -> int:
        return DEFAULT_GRAY_LEVELS[self]

    @classmethod
    def from_letter(cls, letter: str) -> "ScriptClass":
        try:
            return _BY_LETTER[letter.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown class letter {letter!r} (expected S, A, D or F)") from None


_BY_LETTER = {c.letter: c for c in ScriptClass}


def normalize_script(name: str) -> str:
    key = name.strip().lower()
    if key not in SCRIPTS:
        raise ValueError(f"unknown script {name!r}; expected one of {', '.join(SCRIPTS)}")
    return key


def in_script_block(ch: str, script: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in SCRIPT_BLOCKS[script])


@dataclass(frozen=True)
class MappingTable:
    script: str
    entries: Mapping[str, ScriptClass]
    version: str = ""
    fold: str = "lower"

    def __post_init__(self):
        if self.fold not in FOLD_RULES:
            raise TableFormatError(f"unknown fold rule {self.fold!r}")

    def fold_char(self, ch: str) -> str:
        return FOLD_RULES[self.fold](ch)

    def lookup(self, ch: str) -> ScriptClass | None:
        return self.entries.get(self.fold_char(ch))

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, ch) -> bool:
        return self.lookup(ch) is not None


def parse_mapping_table(lines: Iterable[str], source: str = "<table>", strict: bool = False) -> MappingTable:
    """Parse the tab-separated table format.

    Header lines are ``key: value`` (``script`` is required, ``version`` and
    ``fold`` are optional); entries are ``<char>\\t<S|A|D|F>``; ``#`` starts a
    comment line. With ``strict`` an entry outside the declared script's
    Unicode blocks raises instead of warning.
    """
    header: dict[str, str] = {}
    raw: list[tuple[int, str, ScriptClass]] = []
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" in line:
            ch, _, cls = line.partition("\t")
            if len(ch) != 1:
                raise TableFormatError(f"{source}:{lineno}: expected a single character, got {ch!r}")
            try:
                raw.append((lineno, ch, ScriptClass.from_letter(cls)))
            except ValueError as exc:
                raise TableFormatError(f"{source}:{lineno}: {exc}") from None
        elif ":" in line:
            key, _, value = line.partition(":")
            header[key.strip().lower()] = value.strip()
        else:
            raise TableFormatError(f"{source}:{lineno}: malformed line {line!r}")

    if "script" not in header:
        raise TableFormatError(f"{source}: missing required 'script:' header")
    try:
        script = normalize_script(header["script"])
    except ValueError as exc:
        raise TableFormatError(f"{source}: {exc}") from None
    fold = header.get("fold", "lower").lower()
    if fold not in FOLD_RULES:
        raise TableFormatError(f"{source}: unknown fold rule {fold!r}")
    folder = FOLD_RULES[fold]

    entries: dict[str, ScriptClass] = {}
    for lineno, ch, cls in raw:
        if not in_script_block(ch, script):
            msg = f"{source}:{lineno}: {ch!r} (U+{ord(ch):04X}) is outside the {script} blocks"
            if strict:
                raise OutOfBlockError(msg)
            warnings.warn(msg, OutOfBlockWarning, stacklevel=2)
        key = folder(ch)
        if key in entries:
            raise DuplicateEntryError(f"{source}:{lineno}: duplicate entry for {ch!r}")
        entries[key] = cls
    return MappingTable(script=script, entries=entries, version=header.get("version", ""), fold=fold)


def load_mapping_table(path, strict: bool = False) -> MappingTable:
    path = Path(path)
    with open(path, encoding="utf-8") as handle:
        return parse_mapping_table(handle, source=str(path), strict=strict)


def default_table(script: str) -> MappingTable:
    script = normalize_script(script)
    text = resources.files("glyphrun").joinpath(f"data/tables/{script}.tsv").read_text("utf-8")
    return parse_mapping_table(text.splitlines(), source=f"<default {script} table>", strict=True)


def load_tables(tables_dir=None) -> dict[str, MappingTable]:
    """Default tables, overridden by any ``<script>.tsv`` found in ``tables_dir``."""
    tables = {}
    for script in SCRIPTS:
        custom = Path(tables_dir) / f"{script}.tsv" if tables_dir else None
        if custom is not None and custom.is_file():
            tables[script] = load_mapping_table(custom)
        else:
            tables[script] = default_table(script)
    return tables


def classify_letter(ch: str, table: MappingTable) -> ScriptClass | None:
    """Zone class of ``ch``, or ``None`` when the table has no entry for it."""
    return table.lookup(ch)


@dataclass(frozen=True)
class CodeSequence:
    """A document reduced to zone codes in reading order.

    ``breaks`` holds positions ``k`` such that a run may not continue from
    ``codes[k-1]`` into ``codes[k]`` (only used when runs are cut at spaces).
    """

    doc_id: str
    codes: tuple[int, ...]
    source_script: str | None = None
    skipped_count: int = 0
    breaks: tuple[int, ...] = field(default=())

    def __len__(self):
        return len(self.codes)

    def segments(self) -> list[tuple[int, ...]]:
        bounds = [0, *self.breaks, len(self.codes)]
        return [self.codes[a:b] for a, b in zip(bounds, bounds[1:])]

    def digits(self) -> str:
        return " ".join("".join(map(str, seg)) for seg in self.segments())


def encode_text(
    text: str,
    table: MappingTable,
    doc_id: str,
    source_script: str | None = None,
    break_runs_at_space: bool = False,
) -> CodeSequence:
    codes: list[int] = []
    breaks: list[int] = []
    skipped = 0
    pending_break = False
    for ch in text:
        cls = table.lookup(ch)
        if cls is None:
            skipped += 1
            if break_runs_at_space and ch.isspace():
                pending_break = True
            continue
        if pending_break and codes:
            breaks.append(len(codes))
        pending_break = False
        codes.append(cls.code)
    if not codes:
        raise EmptyDocumentError(doc_id)
    return CodeSequence(doc_id, tuple(codes), source_script, skipped, tuple(breaks))


def to_gray_image(seq: CodeSequence | Sequence[int], levels: Sequence[int] = DEFAULT_GRAY_LEVELS) -> np.ndarray:
    codes = seq.codes if isinstance(seq, CodeSequence) else seq
    lut = np.asarray(levels, dtype=np.uint8)
    if len(set(int(v) for v in levels)) != len(ScriptClass):
        raise ValueError("gray levels must be four distinct values")
    return lut[np.asarray(codes, dtype=np.intp)]


def from_gray_image(pixels, levels: Sequence[int] = DEFAULT_GRAY_LEVELS) -> tuple[int, ...]:
    """Inverse of :func:`to_gray_image`; unknown gray values raise ``ValueError``."""
    inverse = {int(g): code for code, g in enumerate(levels)}
    try:
        return tuple(inverse[int(p)] for p in pixels)
    except KeyError as exc:
        raise ValueError(f"gray value {exc.args[0]} is not one of {tuple(levels)}") from None


def format_coded(sequences: Iterable[CodeSequence]) -> str:
    return "".join(f"{seq.doc_id}\t{seq.digits()}\n" for seq in sequences)


def script_from_doc_id(doc_id: str) -> str | None:
    """Script named by a corpus-style ``split/script/name`` id, else None."""
    parts = doc_id.split("/")
    return parts[-2] if len(parts) >= 2 and parts[-2] in SCRIPTS else None


def parse_coded(lines: Iterable[str], source: str = "<coded>") -> list[CodeSequence]:
    """Inverse of :func:`format_coded`; script labels come back from corpus-style ids."""
    out = []
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        doc_id, sep, digits = line.partition("\t")
        if not sep or not doc_id:
            raise TableFormatError(f"{source}:{lineno}: expected '<docId>\\t<digits>'")
        codes: list[int] = []
        breaks: list[int] = []
        for seg in digits.split(" "):
            if not seg:
                continue
            if any(c not in "0123" for c in seg):
                raise TableFormatError(f"{source}:{lineno}: codes must be digits 0-3")
            if codes:
                breaks.append(len(codes))
            codes.extend(int(c) for c in seg)
        if not codes:
            raise EmptyDocumentError(doc_id)
        out.append(CodeSequence(doc_id, tuple(codes), script_from_doc_id(doc_id), breaks=tuple(breaks)))
    return out
