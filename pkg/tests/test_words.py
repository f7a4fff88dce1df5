import pytest
from hypothesis import given, settings, strategies as st

from overcomm.errors import NotInLambdaError, ValidationError
from overcomm.partitions import lambda_up_to, make_partition, preceq
from overcomm.words import (
    apply_letter_map,
    canonical_word,
    content,
    enumerate_transversal,
    format_word,
    in_transversal,
    letter_counts,
    make_word,
    parse_word,
    partition_of,
    transversal_size,
)

from oracles import brute_transversal


def P(*c):
    return make_partition(c)


def test_make_word_validation():
    assert make_word([1, 2]) == (1, 2)
    for bad in [[], [0], [1, -2], [True]]:
        with pytest.raises(ValidationError):
            make_word(bad)


def test_partition_of():
    assert partition_of((1, 1, 2)) == P(2, 1)
    assert partition_of((3, 1, 3, 2)) == P(2, 1, 1)
    single = partition_of((1, 1))
    assert single == P(2) and not single.in_lambda


def test_counts_and_content():
    assert letter_counts((3, 1, 3)) == {1: 1, 3: 2}
    assert content((3, 1, 3)) == {1, 3}


def test_canonical_word():
    assert canonical_word(P(2, 1, 1)) == (1, 1, 2, 3)
    assert canonical_word(P(2, 1)) == (1, 1, 2)
    assert canonical_word(P(3, 2)) == (1, 1, 1, 2, 2)
    with pytest.raises(NotInLambdaError):
        canonical_word(P(3))


def test_enumerate_transversal_examples():
    assert enumerate_transversal(P(2, 1)) == [(1, 1, 2), (1, 2, 1), (2, 1, 1)]
    assert enumerate_transversal(P(1, 1)) == [(1, 2), (2, 1)]
    assert len(enumerate_transversal(P(2, 1, 1))) == 12


@pytest.mark.parametrize("lam", lambda_up_to(7))
def test_transversal_matches_brute(lam):
    words = enumerate_transversal(lam)
    assert words == brute_transversal(lam.components)
    assert len(words) == transversal_size(lam)
    assert all(in_transversal(w, lam) for w in words)
    assert partition_of(canonical_word(lam)) == lam


def test_transversal_sizes_frozen():
    # multinomial totals per bound, from brute-force multiset permutations
    assert sum(len(brute_transversal(l.components)) for l in lambda_up_to(6)) == 1903
    assert sum(transversal_size(l) for l in lambda_up_to(7)) == 13383
    assert sum(transversal_size(l) for l in lambda_up_to(8)) == 108885


def test_in_transversal():
    assert in_transversal((1, 2, 1), P(2, 1))
    assert not in_transversal((2, 2, 1), P(2, 1))
    assert not in_transversal((1, 1, 3), P(2, 1))


def test_parse_format_roundtrip_examples():
    assert parse_word("aab") == (1, 1, 2)
    assert parse_word("x1 x1 x2") == (1, 1, 2)
    assert parse_word("x10x2") == (10, 2)
    assert format_word((1, 1, 2)) == "x1 x1 x2"
    assert format_word((1, 1, 2), "compact") == "aab"
    for bad in ["", "aB", "x0", "a b"]:
        with pytest.raises(ValidationError):
            parse_word(bad)
    with pytest.raises(ValidationError):
        format_word((27,), "compact")


words = st.lists(st.integers(1, 30), min_size=1, max_size=10).map(tuple)


@given(words)
def test_token_roundtrip(w):
    assert parse_word(format_word(w)) == w


@given(st.lists(st.integers(1, 26), min_size=1, max_size=10).map(tuple))
def test_compact_roundtrip(w):
    assert parse_word(format_word(w, "compact")) == w


@settings(max_examples=300)
@given(st.lists(st.integers(1, 5), min_size=1, max_size=8).map(tuple),
       st.dictionaries(st.integers(1, 5), st.integers(1, 5)))
def test_letter_maps_move_up(u, mapping):
    v = apply_letter_map(u, mapping)
    assert len(v) == len(u)
    a, b = partition_of(u), partition_of(v)
    if a.in_lambda and b.in_lambda:
        assert preceq(a, b)
