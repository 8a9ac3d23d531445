"""Document collections: ingestion from disk, synthetic generation, manifests.

On-disk layout::

    <root>/train/<script>/<name>.txt
    <root>/test/<script>/<name>.txt
    <root>/manifest.csv            (docId,script,split,chars,sha256)

A document's id is its path relative to ``root`` without the ``.txt`` suffix.
"""

from __future__ import annotations

import csv
import hashlib
import io
import zlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._io import atomic_write_text, sha256_text
from .alphabet import SCRIPTS, MappingTable, normalize_script
from .errors import CorpusError, EmptyDocumentError

SPLITS = ("train", "test")
DEFAULT_TRAIN_COUNTS = {"cyrillic": 34, "latin": 33, "glagolitic": 33}
DEFAULT_TEST_COUNTS = {"cyrillic": 5, "latin": 5, "glagolitic": 5}
MIN_DOC_LENGTH = 200
MEAN_WORD_LENGTH = 5.0
WORDS_PER_LINE = 12


@dataclass(frozen=True)
class Document:
    doc_id: str
    script: str
    text: str


@dataclass(frozen=True)
class Dataset:
    documents: tuple[Document, ...]
    split: Mapping[str, str]

    def __post_init__(self):
        ids = [d.doc_id for d in self.documents]
        if len(set(ids)) != len(ids):
            raise CorpusError("duplicate docId in dataset")
        for doc in self.documents:
            if not doc.text:
                raise EmptyDocumentError(doc.doc_id, "empty text")
            if self.split.get(doc.doc_id) not in SPLITS:
                raise CorpusError(f"{doc.doc_id}: missing or invalid split")

    def subset(self, split: str | None) -> list[Document]:
        if split in (None, "all"):
            return list(self.documents)
        return [d for d in self.documents if self.split[d.doc_id] == split]

    def truth(self) -> dict[str, str]:
        return {d.doc_id: d.script for d in self.documents}

    def manifest_rows(self) -> list[tuple[str, str, str, int, str]]:
        return [
            (d.doc_id, d.script, self.split[d.doc_id], len(d.text), sha256_text(d.text))
            for d in sorted(self.documents, key=lambda d: d.doc_id)
        ]

    def manifest_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("docId", "script", "split", "chars", "sha256"))
        writer.writerows(self.manifest_rows())
        return buf.getvalue()

    @property
    def manifest_hash(self) -> str:
        return hashlib.sha256(self.manifest_csv().encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ScriptModel:
    script: str
    letter_frequencies: Mapping[str, float]
    mean_length: float = 2000.0
    std_length: float = 500.0
    _chars: tuple[str, ...] = field(init=False, repr=False, compare=False)
    _probs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        freqs = dict(self.letter_frequencies)
        if not freqs:
            raise CorpusError(f"{self.script}: model has no letters")
        if any(not np.isfinite(p) or p < 0 for p in freqs.values()):
            raise CorpusError(f"{self.script}: frequencies must be finite and non-negative")
        total = sum(freqs.values())
        if total <= 0:
            raise CorpusError(f"{self.script}: frequencies sum to zero")
        if abs(total - 1.0) > 1e-9:
            freqs = {ch: p / total for ch, p in freqs.items()}
        if self.mean_length <= 0 or self.std_length <= 0:
            raise CorpusError(f"{self.script}: document length parameters must be positive")
        object.__setattr__(self, "letter_frequencies", freqs)
        chars = tuple(sorted(freqs))
        object.__setattr__(self, "_chars", chars)
        object.__setattr__(self, "_probs", np.array([freqs[c] for c in chars]))

    def sample_letters(self, n: int, rng: np.random.Generator) -> str:
        idx = rng.choice(len(self._chars), size=n, p=self._probs)
        return "".join(self._chars[i] for i in idx)

    def check_table(self, table: MappingTable) -> None:
        missing = [ch for ch in self.letter_frequencies if table.lookup(ch) is None]
        if missing:
            raise CorpusError(f"{self.script}: letters without a zone class: {''.join(missing)}")


def parse_script_model(lines: Iterable[str], source: str = "<model>") -> ScriptModel:
    header: dict[str, str] = {}
    freqs: dict[str, float] = {}
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" in line:
            ch, _, value = line.partition("\t")
            if len(ch) != 1:
                raise CorpusError(f"{source}:{lineno}: expected a single character, got {ch!r}")
            if ch in freqs:
                raise CorpusError(f"{source}:{lineno}: duplicate character {ch!r}")
            try:
                freqs[ch] = float(value)
            except ValueError:
                raise CorpusError(f"{source}:{lineno}: bad frequency {value!r}") from None
        elif ":" in line:
            key, _, value = line.partition(":")
            header[key.strip().lower()] = value.strip()
        else:
            raise CorpusError(f"{source}:{lineno}: malformed line {line!r}")
    if "script" not in header:
        raise CorpusError(f"{source}: missing required 'script:' header")
    try:
        script = normalize_script(header["script"])
        mean = float(header.get("mean_length", 2000))
        std = float(header.get("std_length", 500))
    except ValueError as exc:
        raise CorpusError(f"{source}: {exc}") from None
    return ScriptModel(script, freqs, mean, std)


def load_script_model(path) -> ScriptModel:
    path = Path(path)
    with open(path, encoding="utf-8") as handle:
        return parse_script_model(handle, source=str(path))


def default_model(script: str) -> ScriptModel:
    script = normalize_script(script)
    text = resources.files("glyphrun").joinpath(f"data/models/{script}.tsv").read_text("utf-8")
    return parse_script_model(text.splitlines(), source=f"<default {script} model>")


def load_models(models_dir=None) -> dict[str, ScriptModel]:
    models = {}
    for script in SCRIPTS:
        custom = Path(models_dir) / f"{script}.tsv" if models_dir else None
        models[script] = load_script_model(custom) if custom is not None and custom.is_file() else default_model(script)
    return models


def code_distribution(model: ScriptModel, table: MappingTable) -> np.ndarray:
    """Probability of each zone code 0..3 under the model's letter frequencies."""
    out = np.zeros(4)
    for ch, p in model.letter_frequencies.items():
        cls = table.lookup(ch)
        if cls is None:
            raise CorpusError(f"{ch!r} has no zone class in the {table.script} table")
        out[cls.code] += p
    return out


def ingest_directory(root) -> Dataset:
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {root}")
    docs: list[Document] = []
    split: dict[str, str] = {}
    for split_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        if split_dir.name not in SPLITS:
            raise CorpusError(f"{split_dir}: unknown split directory (expected train or test)")
        for script_dir in sorted(p for p in split_dir.iterdir()):
            if not script_dir.is_dir():
                continue
            if script_dir.name not in SCRIPTS:
                raise CorpusError(f"{script_dir}: unknown script directory {script_dir.name!r}")
            for path in sorted(script_dir.glob("*.txt")):
                doc_id = path.relative_to(root).with_suffix("").as_posix()
                try:
                    text = path.read_bytes().decode("utf-8")
                except UnicodeDecodeError as exc:
                    raise CorpusError(f"{path}: not valid UTF-8 ({exc.reason})") from None
                if not text.strip():
                    raise EmptyDocumentError(str(path), "empty file")
                docs.append(Document(doc_id, script_dir.name, text))
                split[doc_id] = split_dir.name
    return Dataset(tuple(docs), split)


def _sub_seed(seed: int, *parts) -> np.random.SeedSequence:
    keys = [zlib.crc32(str(p).encode("utf-8")) for p in parts]
    return np.random.SeedSequence([seed & 0xFFFFFFFF, *keys])


def _layout_words(letters: str, rng: np.random.Generator) -> str:
    words = []
    i = 0
    while i < len(letters):
        n = 1 + int(rng.poisson(MEAN_WORD_LENGTH - 1))
        words.append(letters[i:i + n])
        i += n
    lines = [" ".join(words[k:k + WORDS_PER_LINE]) for k in range(0, len(words), WORDS_PER_LINE)]
    return "\n".join(lines) + "\n"


def generate_document(model: ScriptModel, seed: int, split: str, index: int) -> str:
    """One synthetic document; depends only on (seed, script, split, index)."""
    rng = np.random.default_rng(_sub_seed(seed, model.script, split, index))
    length = max(MIN_DOC_LENGTH, int(round(rng.normal(model.mean_length, model.std_length))))
    return _layout_words(model.sample_letters(length, rng), rng)


def _counts(value, scripts) -> dict[str, int]:
    if isinstance(value, Mapping):
        return {s: int(value.get(s, 0)) for s in scripts}
    return {s: int(value) for s in scripts}


def generate_synthetic(
    models: Sequence[ScriptModel] | Mapping[str, ScriptModel],
    train_per_script=DEFAULT_TRAIN_COUNTS,
    test_per_script=DEFAULT_TEST_COUNTS,
    seed: int = 0,
) -> Dataset:
    """Letter-wise i.i.d. documents per script with normal(mean, std) lengths clamped at 200.

    Counts are either one integer for every script or a ``{script: count}`` map.
    """
    if isinstance(models, Mapping):
        models = list(models.values())
    by_script = {m.script: m for m in models}
    if set(by_script) != set(SCRIPTS):
        raise CorpusError(f"models must cover exactly {', '.join(SCRIPTS)}")
    docs: list[Document] = []
    split: dict[str, str] = {}
    for split_name, counts in (("train", train_per_script), ("test", test_per_script)):
        for script, n in _counts(counts, SCRIPTS).items():
            if n < 0:
                raise CorpusError(f"negative document count for {script}")
            for i in range(n):
                doc_id = f"{split_name}/{script}/{script}_{i:03d}"
                docs.append(Document(doc_id, script, generate_document(by_script[script], seed, split_name, i)))
                split[doc_id] = split_name
    return Dataset(tuple(docs), split)


def write_dataset(dataset: Dataset, root, force: bool = False) -> Path:
    root = Path(root)
    if root.exists() and any(root.iterdir()) and not force:
        raise CorpusError(f"{root} is not empty (use --force to overwrite)")
    for doc in dataset.documents:
        atomic_write_text(root / f"{doc.doc_id}.txt", doc.text)
    atomic_write_text(root / "manifest.csv", dataset.manifest_csv())
    return root


def read_truth_csv(text: str, split: str | None = None, source: str = "<truth>") -> dict[str, str]:
    """``docId -> script`` from any CSV with those columns (manifest or feature CSV)."""
    reader = csv.DictReader(io.StringIO(text))
    if not {"docId", "script"} <= set(reader.fieldnames or ()):
        raise CorpusError(f"{source}: needs docId and script columns")
    out = {}
    for row in reader:
        if split not in (None, "all") and row.get("split", split) != split:
            continue
        if not row["script"]:
            raise CorpusError(f"{source}: {row['docId']} has no script label")
        out[row["docId"]] = row["script"]
    return out
