import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
REPO_ROOT = TESTS_DIR.parent
CORPUS_DIR = REPO_ROOT / "corpus"
DATA_DIR = TESTS_DIR / "data"

sys.path.insert(0, str(TESTS_DIR))  # makes `oracles` importable


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS_DIR


@pytest.fixture(scope="session")
def figure7_source() -> str:
    return (CORPUS_DIR / "figure7.vif").read_text(encoding="utf-8")


@pytest.fixture()
def figure7_story(figure7_source):
    from vif.script import parse_script

    story, diagnostics = parse_script(figure7_source, "figure7.vif")
    assert not [d for d in diagnostics if d.severity == "error"]
    return story
