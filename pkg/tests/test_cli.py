import io
import json

import pytest

from conftest import CORPUS, ROOT, golden
from dtt.cli import main

NEGATIVE = sorted(f"corpus/negative/{p.name}" for p in (CORPUS / "negative").glob("*.dtt"))
POSITIVE = ["corpus/" + n for n in ("sst.dtt", "asst.dtt", "int.dtt", "fib.dtt", "fib_prime.dtt", "pt.dtt", "hom.dtt")]


@pytest.fixture(autouse=True)
def in_root(monkeypatch):
    monkeypatch.chdir(ROOT)


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_delta_compose_example():
    assert run("delta", "compose", "1010011", "0110") == (0, "0010010\n", "")


def test_delta_order_lists_dimensions():
    code, out, _ = run("delta", "order", "1")
    assert code == 0 and out == "01 0\n10 0\n11 1\n"


def test_check_positive_corpus():
    code, out, err = run("check", *POSITIVE)
    assert code == 0 and err == ""
    assert out.splitlines() == [f"{p}: ok" for p in POSITIVE]


def test_check_negative_corpus_text():
    code, out, err = run("check", *NEGATIVE)
    assert code == 1 and out == ""
    assert err == golden("negative.txt")


def test_check_negative_corpus_json():
    code, out, _ = run("--json", "check", *NEGATIVE)
    assert code == 1
    assert out == golden("negative.jsonl")
    for line in out.splitlines():
        assert set(json.loads(line)) == {"path", "span", "code", "message"}


def test_check_reports_in_input_order():
    files = list(reversed(NEGATIVE)) + POSITIVE[:2]
    _, out, err = run("check", *files)
    paths = [line.split(":")[0] for line in err.splitlines()]
    assert paths == list(reversed(NEGATIVE))


def test_check_is_deterministic():
    assert run("--json", "check", *NEGATIVE, *POSITIVE) == run("--json", "check", *NEGATIVE, *POSITIVE)


def test_missing_file_is_a_usage_error():
    code, out, err = run("check", "corpus/missing.dtt")
    assert code == 2 and "cannot read corpus/missing.dtt" in err


def test_unknown_subcommand_is_a_usage_error():
    assert run("frobnicate")[0] == 2


def test_fuel_exhaustion_exit_code():
    code, _, err = run("--fuel", "2", "normalize", "corpus/fib.dtt", "--ctx", "(X :^TB Type) (ʒ : X)", "-e", "Z (S (Fib X ʒ) ʒ)")
    assert code == 3 and "error[fuel-exhausted]" in err


@pytest.mark.parametrize("n", [2, 3])
def test_simplices_golden(n):
    assert run("simplices", "corpus/sst.dtt", "-t", "X", "-n", str(n)) == (0, golden(f"sst_simplices_{n}.txt"), "")


def test_normalize_universe_display():
    assert run("normalize", "corpus/sst.dtt", "-e", "Type^d")[1] == "λ a → a → Type\n"


def test_no_unicode_before_or_after_subcommand():
    args = ["normalize", "corpus/fib.dtt", "--ctx", "(X :^TB Type) (ʒ : X)", "-e", "Z (Fib X ʒ)"]
    before = run("--no-unicode", *args)
    after = run(*args, "--no-unicode")
    assert before == after == (0, "X^d z\n", "")


def test_trace_lists_each_step():
    code, out, _ = run("normalize", "corpus/fib.dtt", "--ctx", "(X :^TB Type) (ʒ : X)", "-e", "Z (Fib X ʒ)", "--trace")
    assert code == 0 and out == "Z (Fib X ʒ)\nXᵈ ʒ\n"


def test_no_unicode_diagnostics():
    _, _, err = run("--no-unicode", "check", "corpus/negative/side_condition.dtt")
    assert "X^d is not S X x" in err
    assert all(ord(c) < 128 for c in err)
