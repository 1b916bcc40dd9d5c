from pathlib import Path

import pytest

from merlan import parse_source

ROOT = Path(__file__).resolve().parent.parent
CORPUS_DIR = ROOT / "corpus"
HOUSE_PATH = CORPUS_DIR / "house.mln"
GOLDEN_PATH = CORPUS_DIR / "house_agent.golden.py.txt"


@pytest.fixture(scope="session")
def house_source() -> str:
    return HOUSE_PATH.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def house_spec(house_source):
    result = parse_source(house_source)
    assert result.spec is not None, [d.render() for d in result.diagnostics]
    return result.spec
