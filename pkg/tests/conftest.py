import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from glyphrun import alphabet, corpus, texture  # noqa: E402

SYNTH_SEED = 2024

_acceptance_lines = []


@pytest.fixture(scope="session")
def tables():
    return alphabet.load_tables()


@pytest.fixture(scope="session")
def models():
    return corpus.load_models()


@pytest.fixture(scope="session")
def synthetic(models):
    return corpus.generate_synthetic(models, seed=SYNTH_SEED)


@pytest.fixture(scope="session")
def test_features(synthetic, tables):
    docs = synthetic.subset("test")
    return [
        texture.document_features(alphabet.encode_text(d.text, tables[d.script], d.doc_id, d.script)) for d in docs
    ]


@pytest.fixture(scope="session")
def acceptance_log():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
