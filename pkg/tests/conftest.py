from pathlib import Path

import pytest

from qhorn.syntax import SourceUnit, parse_source

CORPUS = Path(__file__).resolve().parents[1] / "corpus"


def load(name: str) -> SourceUnit:
    return parse_source((CORPUS / name).read_text())


@pytest.fixture
def branching() -> SourceUnit:
    return load("branching.qhp")


@pytest.fixture
def looping() -> SourceUnit:
    return load("loop_states.qhp")


# one line per acceptance criterion, shown at the end of the run
ACCEPTANCE: dict[int, str] = {}


def record(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
