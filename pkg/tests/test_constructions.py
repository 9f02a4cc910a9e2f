import random

import pytest

from omegaerase.constructions import (
    DecodeFailure,
    EraserCodec,
    build_guard_part,
    build_inf_ones_okc,
    build_layered_automaton,
    build_layered_mpda,
    decode_lasso,
    encode_lasso,
    exponentiate_mpda,
    exponentiate_okc,
    inf_ones_layered_spec,
    iterate_exponentiation,
    layered_member_oracle,
    muller_fa_to_nba,
    prefix_hits_guard,
    LayeredSpec,
)
from omegaerase.erasure import nested_erasure_member
from omegaerase.omega_regular import (
    MullerFA,
    buchi_member,
    build_inf_ones,
    extend_alphabet,
)
from omegaerase.pushdown import (
    bpda_member,
    buchi_fa_to_bpda,
    muller_to_buchi_pda,
    okc_to_bpda,
)
from omegaerase.words import (
    LassoWord,
    MARK_A,
    MARK_B,
    base,
    eraser,
    lasso,
    lasso_equal,
    parse_lasso,
    parse_word,
)

ZERO = base("0")
ONE = base("1")
E1 = eraser(1)
E2 = eraser(2)

SPEC = inf_ones_layered_spec()
B2 = build_inf_ones()


def pl(text):
    return parse_lasso(text)


# -- codec -------------------------------------------------------------------


def test_encode_single_eraser():
    codec = EraserCodec(1, SPEC.base_alphabet)
    assert encode_lasso(codec, pl("| ~1")) == pl("| alpha B C D E beta")


def test_encode_fixes_plain_letters():
    codec = EraserCodec(1, SPEC.base_alphabet)
    assert encode_lasso(codec, pl("| 0")) == pl("| 0")


def test_encode_rank_two():
    codec = EraserCodec(2, SPEC.base_alphabet)
    got = encode_lasso(codec, pl("0 ~2 | 1"))
    assert got == pl("0 alpha B B C C D D E E beta | 1")


def test_encode_rejects_out_of_range():
    codec = EraserCodec(1, SPEC.base_alphabet)
    with pytest.raises(ValueError):
        encode_lasso(codec, pl("| ~2"))


def test_decode_roundtrip():
    codec = EraserCodec(2, SPEC.base_alphabet)
    rng = random.Random(11)
    letters = [ZERO, ONE, MARK_A, MARK_B, E1, E2]
    for _ in range(120):
        u = tuple(rng.choice(letters) for _ in range(rng.randint(0, 4)))
        v = tuple(rng.choice(letters) for _ in range(rng.randint(1, 4)))
        x = lasso(u, v)
        assert lasso_equal(decode_lasso(codec, encode_lasso(codec, x)), x)


def test_decode_failures():
    codec = EraserCodec(1, SPEC.base_alphabet)
    with pytest.raises(DecodeFailure):
        decode_lasso(codec, pl("| alpha B C C D E beta 0"))
    with pytest.raises(DecodeFailure):
        decode_lasso(codec, pl("alpha B | B"))
    with pytest.raises(DecodeFailure):
        decode_lasso(codec, pl("| alpha B B C C D D E E beta 0"))  # rank 2 > 1
    with pytest.raises(DecodeFailure):
        decode_lasso(codec, pl("B | 0"))
    codec2 = EraserCodec(2, SPEC.base_alphabet)
    got = decode_lasso(codec2, pl("| alpha B B C C D D E E beta 0"))
    assert lasso_equal(got, pl("| ~2 0"))


def test_decode_failure_reports_position():
    codec = EraserCodec(1, SPEC.base_alphabet)
    try:
        decode_lasso(codec, pl("0 1 | alpha B C C D E beta"))
    except DecodeFailure as err:
        assert err.position == 3
        assert "mismatch" in err.reason
    else:
        raise AssertionError("expected a decode failure")


# -- exponentiation, three routes --------------------------------------------


def grammar_route(n):
    okc = iterate_exponentiation(build_inf_ones_okc(), n, alphabet={ZERO, ONE})
    return okc_to_bpda(okc)


def mpda_route(n):
    p = buchi_fa_to_bpda(B2)
    for j in range(1, n + 1):
        p = exponentiate_mpda(p, eraser(j))
    return p


def erase_route(w, n):
    return nested_erasure_member(w, B2, n)


def test_exponentiation_examples_rank1():
    p = grammar_route(1)
    assert bpda_member(p, pl("| 0 1 ~1 1"))
    assert not bpda_member(p, pl("| 0"))
    assert not bpda_member(p, pl("~1 | 0 1"))
    assert not bpda_member(p, pl("| 1 ~1"))


def test_exponentiation_examples_rank2():
    p = grammar_route(2)
    assert bpda_member(p, pl("| 0 1 ~2 1"))
    assert not bpda_member(p, pl("| 1 ~2 ~1"))
    m = mpda_route(2)
    assert bpda_member(m, pl("| 0 1 ~2 1"))
    assert not bpda_member(m, pl("| 1 ~2 ~1"))


def random_eraser_lasso(rng, n, max_len=6):
    letters = [ZERO, ONE] + [eraser(j) for j in range(1, n + 1)]
    u = tuple(rng.choice(letters) for _ in range(rng.randint(0, max_len)))
    v = tuple(rng.choice(letters) for _ in range(rng.randint(1, max_len)))
    return LassoWord(u, v)


def member_words(rng, n, count):
    """Seeded members built by inserting erasable junk around a member of
    the base language, layer by layer."""
    out = []
    for _ in range(count):
        u = [rng.choice((ZERO, ONE)) for _ in range(rng.randint(0, 2))]
        v = [rng.choice((ZERO, ONE)) for _ in range(rng.randint(0, 2))] + [ONE]
        for j in range(1, n + 1):
            letters = [ZERO, ONE] + [eraser(i) for i in range(1, j)]

            def junk():
                if rng.random() < 0.55:
                    return []
                c = rng.choice(letters)
                return [c, eraser(j)]

            def pad(seq):
                new = []
                for s in seq:
                    new.extend(junk())
                    new.append(s)
                return new

            u, v = pad(u), pad(v)
        out.append(LassoWord(tuple(u), tuple(v)))
    return out


@pytest.mark.parametrize("n", [1, 2])
def test_three_routes_agree(n):
    rng = random.Random(100 + n)
    g = grammar_route(n)
    m = mpda_route(n)
    words = [random_eraser_lasso(rng, n) for _ in range(25)] + member_words(
        rng, n, 10
    )
    hits = 0
    for w in words:
        want = erase_route(w, n)
        assert bpda_member(g, w) == want
        assert bpda_member(m, w) == want
        hits += want
    assert hits >= 8  # the constructed members keep the positive side honest


# -- guard prefixes -----------------------------------------------------------


def test_prefix_guard_examples():
    assert prefix_hits_guard(pl("a b | B"))
    assert not prefix_hits_guard(pl("a b | 0"))
    assert not prefix_hits_guard(pl("a a b | alpha B B C C D D E E beta"))
    assert prefix_hits_guard(pl("a b | alpha B B C C D D E E beta"))
    assert prefix_hits_guard(pl("a b 0 | 1 alpha B C C D E beta"))
    assert not prefix_hits_guard(pl("| 0 B"))  # no a-prefix, no group end


def test_prefix_guard_needs_complete_group_or_long_run():
    assert not prefix_hits_guard(pl("a a a b alpha B B | 0"))
    assert prefix_hits_guard(pl("a b alpha B B | 0"))


# -- the layered language ----------------------------------------------------


def enc(n, text):
    codec = EraserCodec(n, SPEC.base_alphabet)
    return encode_lasso(codec, pl(text))


def with_layer_prefix(n, text):
    inner = enc(n, text)
    return lasso((MARK_A,) * n + (MARK_B,) + inner.prefix, inner.period)


def test_oracle_examples():
    w = with_layer_prefix(1, "| 0 1 ~1 1")
    assert layered_member_oracle(SPEC, w)
    assert not layered_member_oracle(SPEC, pl("a b | 0"))
    assert not layered_member_oracle(SPEC, pl("a b B B | 0"))
    assert layered_member_oracle(SPEC, pl("a b | 0 alpha B C C D E beta"))


def test_oracle_closing_identity_on_plain_words():
    rng = random.Random(17)
    letters = sorted(SPEC.base_alphabet, key=lambda s: s.token)
    for _ in range(300):
        u = tuple(rng.choice(letters) for _ in range(rng.randint(0, 6)))
        v = tuple(rng.choice(letters) for _ in range(rng.randint(1, 6)))
        w = lasso(u, v)
        n = 0
        while w.at(n + 1) == MARK_A and n < 14:
            n += 1
        rhs = False
        if 1 <= n and w.at(n + 1) == MARK_B:
            from omegaerase.words import drop_prefix

            rhs = buchi_member(
                extend_alphabet(B2, {MARK_A, MARK_B}), drop_prefix(w, n + 1)
            )
        assert layered_member_oracle(SPEC, w) == rhs


MPDA = build_layered_mpda(SPEC)
FULL = build_layered_automaton(SPEC)


def test_layered_machine_accepts_coded_members():
    for w in (
        with_layer_prefix(1, "| 0 1 ~1 1"),
        with_layer_prefix(1, "| 1"),
        with_layer_prefix(2, "| 0 1 ~2 1"),
        with_layer_prefix(2, "| 1 ~1 ~2 1"),
        pl("a b | 1"),
    ):
        assert bpda_member(MPDA, w), w


def test_layered_machine_rejects_non_members():
    for w in (
        pl("a b | 0"),
        pl("b | 1"),
        pl("a b B B | 0"),
        with_layer_prefix(1, "| 1 ~1"),
        with_layer_prefix(1, "~1 | 1"),
        with_layer_prefix(2, "| 1 ~2 ~1"),
    ):
        assert not bpda_member(MPDA, w), w


def test_rank_order_rule_letters_only_for_rank_one():
    # a rank-1 eraser may erase a letter but never another eraser
    ok = with_layer_prefix(2, "| 0 ~1 ~2 1")
    assert layered_member_oracle(SPEC, ok)
    assert bpda_member(MPDA, ok)
    bad = with_layer_prefix(2, "| 0 ~2 ~1 1")
    assert not layered_member_oracle(SPEC, bad)
    assert not bpda_member(MPDA, bad)


def test_min_rule_blocks_wide_erasure_over_small_rank():
    # inside 0 ... ~2, a rank-1 eraser fires, so ~2 cannot reach the 0;
    # but pairing ~2 with the ~1 itself is legal and keeps the word in
    w = with_layer_prefix(2, "| 0 1 ~1 ~2 1")
    assert layered_member_oracle(SPEC, w)
    assert bpda_member(MPDA, w)
    # here nothing can absorb the erasers: the only candidate victims sit
    # left of a smaller-rank firing, which the order rules forbid
    bad = with_layer_prefix(2, "0 1 ~1 ~2 | 1 ~1 ~2")
    assert layered_member_oracle(SPEC, bad) == bpda_member(MPDA, bad)


def test_full_automaton_matches_oracle_on_samples():
    rng = random.Random(42)
    letters = sorted(SPEC.full_alphabet, key=lambda s: s.token)
    words = []
    for _ in range(60):
        u = tuple(rng.choice(letters) for _ in range(rng.randint(0, 5)))
        v = tuple(rng.choice(letters) for _ in range(rng.randint(1, 5)))
        words.append(LassoWord(u, v))
    words += [
        with_layer_prefix(1, "| 0 1 ~1 1"),
        with_layer_prefix(2, "0 | 1 ~2 0 1"),
        pl("a b | 0 alpha B C C D E beta"),
        pl("a a b | 0 alpha B B B C C C D D D E E E beta 1"),
        pl("a b 0 | 1"),
    ]
    for w in words:
        assert bpda_member(FULL, w) == layered_member_oracle(SPEC, w), w


def test_guard_part_alone():
    guard = build_guard_part(SPEC)
    assert bpda_member(guard, pl("a b | 0 alpha B C C D E beta"))
    assert not bpda_member(guard, pl("a b | 0"))
    assert not bpda_member(guard, pl("| 0 alpha B C C D E beta"))


def test_muller_input_variant():
    t = {}
    states = {"q0", "q1", "dead"}
    for q in ("q0", "q1"):
        t[(q, ZERO)] = "q0"
        t[(q, ONE)] = "q1"
        t[(q, MARK_A)] = "dead"
        t[(q, MARK_B)] = "dead"
    for s in SPEC.base_alphabet:
        t[("dead", s)] = "dead"
    muller = MullerFA(
        states, SPEC.base_alphabet, t, "q0", [{"q1"}, {"q0", "q1"}]
    )
    nba = muller_fa_to_nba(muller)
    rng = random.Random(23)
    letters = sorted(SPEC.base_alphabet, key=lambda s: s.token)
    for _ in range(80):
        u = tuple(rng.choice(letters) for _ in range(rng.randint(0, 5)))
        v = tuple(rng.choice(letters) for _ in range(rng.randint(1, 5)))
        w = LassoWord(u, v)
        assert buchi_member(nba, w) == buchi_member(
            extend_alphabet(B2, {MARK_A, MARK_B}), w
        )
    mspec = LayeredSpec(automaton=muller, base_alphabet=SPEC.base_alphabet)
    m = build_layered_mpda(mspec)
    for w, want in (
        (with_layer_prefix(1, "| 0 1 ~1 1"), True),
        (pl("a b | 0"), False),
        (pl("a a b | 1"), True),
    ):
        assert bpda_member(m, w) == want
        assert layered_member_oracle(mspec, w) == want
