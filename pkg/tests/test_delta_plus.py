from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from dtt.delta_plus import (
    BinarySeq,
    boundary_closed,
    campion_order,
    compose,
    count_faces,
    faces,
    identity,
    one_prefix,
    rho,
    sub_labels,
    zero_prefix,
)
from dtt.errors import DttError

N_MAX = 6


def all_maps(n_max=N_MAX):
    """Every morphism ⟨m⟩ → ⟨n⟩ for -1 ≤ m ≤ n ≤ n_max."""
    for n in range(-1, n_max + 1):
        for m in range(-1, n + 1):
            yield from faces(n, m)


def test_worked_composition_example():
    assert compose(BinarySeq.parse("1010011"), BinarySeq.parse("0110")) == BinarySeq.parse("0010010")
    assert compose(BinarySeq.parse("𝟙𝟘𝟙𝟘𝟘𝟙𝟙"), BinarySeq.parse("𝟘𝟙𝟙𝟘")).pretty() == "𝟘𝟘𝟙𝟘𝟘𝟙𝟘"


def test_rho_example():
    assert str(rho(1)) == "011"


def test_empty_sequence():
    assert str(identity(-1)) == "∅"
    assert BinarySeq.parse("∅") == identity(-1)


def test_face_counts():
    for n in range(-1, N_MAX + 1):
        for m in range(-1, n + 1):
            fs = faces(n, m)
            assert len(fs) == count_faces(n, m) == len(set(fs))
            assert all(f.target == n and f.source == m for f in fs)


def test_unit_laws_exhaustive():
    for b in all_maps():
        assert compose(identity(b.target), b) == b
        assert compose(b, identity(b.source)) == b


def test_associativity_exhaustive():
    for n in range(-1, N_MAX + 1):
        for m in range(-1, n + 1):
            for b2 in faces(n, m):
                for k in range(-1, m + 1):
                    for b1 in faces(m, k):
                        for j in range(-1, k + 1):
                            for b0 in faces(k, j):
                                assert compose(compose(b2, b1), b0) == compose(b2, compose(b1, b0))


def test_prefix_rules_exhaustive():
    for n in range(-1, N_MAX):
        for m in range(-1, n + 1):
            for b1 in faces(n, m):
                for k in range(-1, m + 1):
                    for b0 in faces(m, k):
                        assert compose(zero_prefix(b1), b0) == zero_prefix(compose(b1, b0))
                        assert compose(one_prefix(b1), one_prefix(b0)) == one_prefix(compose(b1, b0))
                        assert compose(one_prefix(b1), zero_prefix(b0)) == zero_prefix(compose(b1, b0))


def test_one_prefix_is_a_functor():
    for n in range(-1, N_MAX):
        assert one_prefix(identity(n)) == identity(n + 1)


def test_rho_naturality_exhaustive():
    for n in range(-1, N_MAX):
        for m in range(-1, n + 1):
            for b in faces(n, m):
                assert compose(one_prefix(b), rho(m)) == zero_prefix(b) == compose(rho(n), b)


def test_composition_rejects_mismatch():
    with pytest.raises(DttError) as info:
        compose(BinarySeq.parse("101"), BinarySeq.parse("111"))
    assert info.value.code == "arity-mismatch"


def test_campion_order_small():
    assert [str(lab.seq) for lab in campion_order(1)] == ["01", "10", "11"]
    assert [lab.dimension for lab in campion_order(2)] == [0, 0, 1, 0, 1, 1, 2]


@pytest.mark.parametrize("n", range(0, N_MAX + 1))
def test_campion_order_lists_boundaries_first(n):
    labels = campion_order(n)
    assert len(labels) == 2 ** (n + 1) - 1
    assert boundary_closed(n)


@given(st.integers(min_value=0, max_value=8).flatmap(
    lambda n: st.tuples(st.just(n), st.integers(min_value=1, max_value=2 ** (n + 1) - 1))))
def test_sub_labels_are_the_bitwise_subsets(case):
    n, value = case
    label = BinarySeq.from_number(value, n + 1)
    ones = [i for i, d in enumerate(label.digits) if d]
    want = set()
    for r in range(1, len(ones)):
        for pick in combinations(ones, r):
            want.add(BinarySeq(tuple(1 if i in pick else 0 for i in range(n + 1))))
    assert set(sub_labels(label)) == want


@given(st.lists(st.integers(0, 1), min_size=0, max_size=12))
def test_parse_print_round_trip(bits):
    b = BinarySeq(tuple(bits))
    assert BinarySeq.parse(str(b)) == b
    assert BinarySeq.from_number(b.value, len(b)) == b
