import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
if str(TESTS_DIR) not in sys.path:
    sys.path.insert(0, str(TESTS_DIR))

import minicorpus  # noqa: E402

NORM_CORPUS_DIR = TESTS_DIR / "fixtures" / "norm_corpus"
FAKE_SHIM = TESTS_DIR / "fixtures" / "fake_shim.py"


@pytest.fixture(scope="session")
def norm_corpus():
    files = sorted(NORM_CORPUS_DIR.glob("*.py"))
    assert len(files) == 50
    return [f.read_text(encoding="utf-8") for f in files]


@pytest.fixture(scope="session")
def mini_corpus():
    return minicorpus.build_corpus()


@pytest.fixture()
def stub_shim():
    return minicorpus.canned_shim()


@pytest.fixture(scope="session")
def fake_shim_argv():
    return [sys.executable, str(FAKE_SHIM)]
