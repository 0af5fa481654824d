import pathlib
import sys

import pytest

from dtt.surface import load_file

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
GOLDEN = pathlib.Path(__file__).resolve().parent / "golden"

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))


def golden(name: str) -> str:
    return (GOLDEN / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def corpus():
    cache = {}

    def get(name: str):
        if name not in cache:
            cache[name] = load_file(str(CORPUS / name))
        return cache[name]

    return get


# Filled in by test_acceptance.py, one entry per criterion.
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
