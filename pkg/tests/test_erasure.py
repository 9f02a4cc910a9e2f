"""Backspace evaluation against an independent pair-deletion oracle."""

import itertools

import pytest
from hypothesis import given, strategies as st

from omegaerase.erasure import (
    UNDEFINED,
    erase_finite,
    erase_lasso,
    erase_nested,
    finite,
    infinite,
    nested_erasure_member,
)
from omegaerase.omega_regular import build_inf_ones
from omegaerase.words import LassoWord, base, eraser, lasso, parse_lasso, parse_word

X = base("x")
Y = base("y")
ZERO = base("0")
ONE = base("1")
POP = eraser(1)
POP2 = eraser(2)


def naive_pair_deletion(word, e):
    """Independent oracle: repeatedly delete the leftmost adjacent
    (ordinary letter, eraser) pair; undefined iff an eraser survives."""
    w = list(word)
    while True:
        for i in range(len(w) - 1):
            if w[i] != e and w[i + 1] == e:
                del w[i : i + 2]
                break
        else:
            break
    if e in w:
        return UNDEFINED
    return finite(tuple(w))


def test_repeated_letter_eraser_pairs_vanish():
    for n in (1, 2, 5):
        assert erase_finite((X, POP) * n, POP) == finite(())


def test_empty_word():
    assert erase_finite((), POP) == finite(())


def test_lone_eraser_underflows():
    assert erase_finite((POP,), POP) == UNDEFINED


def test_survivor_order():
    assert erase_finite((X, Y, POP), POP) == finite((X,))


def test_infinite_pair_stream_erases_to_empty():
    assert erase_lasso(lasso((), (X, POP)), POP) == finite(())


def test_double_eraser_period_underflows():
    # Strict convention: the second eraser of the very first period already
    # pops an empty survivor sequence.
    assert erase_lasso(lasso((), (X, POP, POP)), POP) == UNDEFINED


def test_growing_period_leaves_tail():
    out = erase_lasso(LassoWord((), (X, Y, POP)), POP)
    assert out == infinite(lasso((), (X,)))


def test_stable_floor_is_finite():
    got = erase_lasso(LassoWord((Y, Y), (POP, X)), POP)
    assert got == finite((Y,))


def test_leading_eraser_underflows():
    assert erase_lasso(LassoWord((POP,), (X, POP)), POP) == UNDEFINED


def test_underflow_not_repaired_by_tail():
    assert erase_lasso(LassoWord((X, POP, POP), (X,)), POP) == UNDEFINED


def test_balanced_period_gives_stable_prefix():
    got = erase_lasso(LassoWord((X, Y), (POP, POP, X, Y)), POP)
    assert got == finite(())


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_stage_shift_invariance(k):
    # shifting whole periods into the prefix changes nothing
    for text in ("| x ~1", "y | x x ~1", "| x ~1 ~1 y", "x | ~1 x", "| ~1"):
        w = parse_lasso(text)
        shifted = LassoWord(w.prefix + w.period * k, w.period)
        assert erase_lasso(w, POP) == erase_lasso(shifted, POP)


def exhaustive_words(symbols, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(symbols, repeat=n)


def test_erase_finite_agrees_with_pair_deletion_short():
    for w in exhaustive_words((X, POP), 10):
        assert erase_finite(w, POP) == naive_pair_deletion(w, POP)


@given(st.lists(st.sampled_from([X, Y, POP]), max_size=20).map(tuple))
def test_erase_finite_agrees_with_pair_deletion(w):
    assert erase_finite(w, POP) == naive_pair_deletion(w, POP)


@given(
    st.lists(st.sampled_from([X, Y, POP]), max_size=5).map(tuple),
    st.lists(st.sampled_from([X, Y, POP]), min_size=1, max_size=5).map(tuple),
)
def test_prefix_stability(u, v):
    """If the limit is infinite, every finite prefix shows up stably in
    long enough finite stages."""
    w = LassoWord(u, v)
    out = erase_lasso(w, POP)
    if not out.is_infinite:
        return
    lim = out.infinite_word
    for m in (1, 3, 6):
        want = lim.unroll(m)
        long_stage = erase_finite(w.unroll(len(u) + (m + len(u) + 4) * len(v)), POP)
        assert long_stage.is_finite
        assert long_stage.finite_word[:m] == want


def test_nested_example_rank2():
    w = parse_lasso("| 0 1 ~2 1")
    out = erase_nested(w, 2)
    assert out == infinite(lasso((), (ZERO, ONE)))


def test_nested_no_erasers_is_identity():
    w = lasso((), (ZERO,))
    assert erase_nested(w, 1) == infinite(w)
    assert erase_nested(w, 0) == infinite(w)


def test_nested_underflow_propagates():
    assert erase_nested(parse_lasso("~1 | 0"), 2) == UNDEFINED


def test_nested_rejects_out_of_range_rank():
    with pytest.raises(ValueError):
        erase_nested(parse_lasso("| 0 ~2"), 1)


def test_nested_member_queries():
    b2 = build_inf_ones()
    assert nested_erasure_member(parse_lasso("| 0 1"), b2, 0)
    assert nested_erasure_member(parse_lasso("| 0 1 ~2 1"), b2, 2)
    assert not nested_erasure_member(parse_lasso("| 1 ~1"), b2, 1)


def test_nested_order_is_outermost_first():
    # ~2 erases the ~1 occurrence, so rank 1 never fires; survivors 0 1.
    w = parse_lasso("| 0 ~1 ~2 1")
    assert erase_nested(w, 2) == infinite(lasso((), (ZERO, ONE)))
