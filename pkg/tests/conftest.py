import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
CORPUS = HERE / "corpus"
FIXTURES = HERE / "fixtures"
sys.path.insert(0, str(HERE))

from pencilc.parser import parse_source  # noqa: E402


def corpus_files():
    return sorted(CORPUS.glob("*.pencil.c"))


def parse_ok(src, name="<test>"):
    unit, diags = parse_source(src, name)
    assert unit is not None and not diags, [str(d) for d in diags]
    return unit


@pytest.fixture
def corpus():
    return {p.name: p.read_text() for p in corpus_files()}


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
