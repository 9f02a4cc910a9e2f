import random
import warnings

import pytest

from omegaerase.cfg import Grammar
from omegaerase.omega_regular import build_inf_ones, buchi_member
from omegaerase.pushdown import (
    BuchiPDS,
    MullerTable,
    OmegaKC,
    PushdownAutomaton,
    bpda_intersect_buchi,
    bpda_member,
    bpda_union,
    buchi_fa_to_bpda,
    buchi_pds_nonempty,
    muller_to_buchi_pda,
    okc_to_bpda,
    product_with_lasso,
)
from omegaerase.words import LassoWord, base, lasso, parse_lasso

from .oracles import bounded_pds_nonempty, okc_member_direct

ZERO = base("0")
ONE = base("1")
P = base("p")
Q = base("q")


def pl(text):
    return parse_lasso(text)


def empty_word_grammar(terminals=()):
    return Grammar([("S", ())], "S", terminals)


def inf_ones_okc():
    v = Grammar([("S", (ZERO, "S")), ("S", (ONE,))], "S")
    return OmegaKC([(empty_word_grammar(), v)])


def single_letter_universe(symbols):
    return OmegaKC(
        [(empty_word_grammar(), Grammar([("S", (s,)) for s in symbols], "S"))]
    )


def test_okc_universe_accepts_everything():
    p = okc_to_bpda(single_letter_universe((ZERO, ONE)))
    rng = random.Random(1)
    for _ in range(15):
        u = tuple(rng.choice((ZERO, ONE)) for _ in range(rng.randint(0, 4)))
        v = tuple(rng.choice((ZERO, ONE)) for _ in range(rng.randint(1, 4)))
        assert bpda_member(p, LassoWord(u, v))


def test_okc_inf_ones_matches_automaton():
    p = okc_to_bpda(inf_ones_okc())
    b2 = build_inf_ones()
    rng = random.Random(2)
    for _ in range(40):
        u = tuple(rng.choice((ZERO, ONE)) for _ in range(rng.randint(0, 6)))
        v = tuple(rng.choice((ZERO, ONE)) for _ in range(rng.randint(1, 6)))
        w = lasso(u, v)
        assert bpda_member(p, w) == buchi_member(b2, w)


def test_okc_single_tail():
    okc = OmegaKC(
        [(Grammar([("S", (P,))], "S"), Grammar([("S", (Q,))], "S"))]
    )
    p = okc_to_bpda(okc)
    assert bpda_member(p, pl("p | q"))
    assert not bpda_member(p, pl("| q"))
    assert not bpda_member(p, pl("p | p q"))
    assert not bpda_member(p, pl("p q | p"))


def test_okc_drops_empty_period_language():
    okc = OmegaKC([(empty_word_grammar((P,)), empty_word_grammar((P,)))])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        p = okc_to_bpda(okc)
    assert any("dropping" in str(w.message) or "empty" in str(w.message) for w in caught)
    assert not bpda_member(p, pl("| p"))


def test_okc_agrees_with_direct_decomposition():
    rng = random.Random(31)
    letters = (P, Q)

    def rnd_grammar():
        nts = ["S", "T", "U"][: rng.randint(1, 3)]
        prods = []
        for nt in nts:
            for _ in range(rng.randint(1, 3)):
                rhs = tuple(
                    rng.choice(list(letters) + nts) for _ in range(rng.randint(0, 3))
                )
                prods.append((nt, rhs))
        return Grammar(prods, "S", letters)

    checked = 0
    for _ in range(12):
        okc = OmegaKC([(rnd_grammar(), rnd_grammar()) for _ in range(rng.randint(1, 2))])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            p = okc_to_bpda(okc)
        for _ in range(8):
            u = tuple(rng.choice(letters) for _ in range(rng.randint(0, 5)))
            v = tuple(rng.choice(letters) for _ in range(rng.randint(1, 5)))
            w = LassoWord(u, v)
            assert bpda_member(p, w) == okc_member_direct(okc, w)
            checked += 1
    assert checked >= 90


def stack_inert(states, alphabet, arrows, initial, finals):
    transitions = {}
    for q, s, q2 in arrows:
        transitions.setdefault((q, s, "Z"), set()).add((q2, ("Z",)))
    return PushdownAutomaton(
        states, alphabet, {"Z"}, transitions, initial, "Z", finals=finals
    )


def test_muller_pda_empty_table_rejects():
    m = PushdownAutomaton(
        {"q"}, {P}, {"Z"}, {("q", P, "Z"): {("q", ("Z",))}}, "q", "Z",
        table=MullerTable(explicit=[]),
    )
    assert not bpda_member(m, pl("| p"))


def test_muller_pda_single_state_table():
    m = PushdownAutomaton(
        {"q"}, {P, Q}, {"Z"}, {("q", P, "Z"): {("q", ("Z",))}}, "q", "Z",
        table=MullerTable(explicit=[{"q"}]),
    )
    assert bpda_member(m, pl("| p"))
    assert not bpda_member(m, pl("| q"))


def test_muller_pda_exact_infinity_sets():
    arrows = [("A", P, "A"), ("A", Q, "B"), ("B", Q, "B"), ("B", P, "A")]
    only_a = PushdownAutomaton(
        {"A", "B"}, {P, Q}, {"Z"},
        {("A", P, "Z"): {("A", ("Z",))}, ("A", Q, "Z"): {("B", ("Z",))},
         ("B", Q, "Z"): {("B", ("Z",))}, ("B", P, "Z"): {("A", ("Z",))}},
        "A", "Z", table=MullerTable(explicit=[{"A"}]),
    )
    assert bpda_member(only_a, pl("| p"))
    assert not bpda_member(only_a, pl("| p q"))
    assert bpda_member(only_a, pl("q p | p"))
    both = PushdownAutomaton(
        only_a.states, only_a.input_alphabet, only_a.stack_alphabet,
        only_a.transitions, "A", "Z", table=MullerTable(explicit=[{"A", "B"}]),
    )
    assert both.table is not None
    assert bpda_member(both, pl("| p q"))
    assert not bpda_member(both, pl("| p"))


def test_hit_set_table_is_buchi_in_disguise():
    p = okc_to_bpda(inf_ones_okc())
    m = PushdownAutomaton(
        p.states, p.input_alphabet, p.stack_alphabet, p.transitions,
        p.initial, p.stack_init, table=MullerTable(hits=p.finals),
    )
    rng = random.Random(4)
    for _ in range(20):
        u = tuple(rng.choice((ZERO, ONE)) for _ in range(rng.randint(0, 5)))
        v = tuple(rng.choice((ZERO, ONE)) for _ in range(rng.randint(1, 5)))
        w = LassoWord(u, v)
        assert bpda_member(m, w) == bpda_member(p, w)


def test_product_trivial_cases():
    zero_tail = stack_inert({"q"}, {ZERO, ONE}, [("q", ZERO, "q")], "q", {"q"})
    assert buchi_pds_nonempty(product_with_lasso(zero_tail, pl("| 0")))
    assert not buchi_pds_nonempty(product_with_lasso(zero_tail, pl("| 1")))


def test_product_period_pump_invariance():
    p = okc_to_bpda(inf_ones_okc())
    rng = random.Random(6)
    for _ in range(20):
        u = tuple(rng.choice((ZERO, ONE)) for _ in range(rng.randint(0, 4)))
        v = tuple(rng.choice((ZERO, ONE)) for _ in range(rng.randint(1, 4)))
        w = LassoWord(u, v)
        pumped = LassoWord(u, v + v)
        assert bpda_member(p, w) == bpda_member(p, pumped)


def test_emptiness_no_transitions():
    s = BuchiPDS({"q"}, (), {"Z"}, {}, "q", "Z", finals={"q"})
    assert not buchi_pds_nonempty(s)


def test_emptiness_self_loop():
    s = BuchiPDS(
        {"q"}, (), {"Z"}, {("q", None, "Z"): {("q", ("Z",))}}, "q", "Z", finals={"q"}
    )
    assert buchi_pds_nonempty(s)
    s2 = BuchiPDS(
        {"q", "f"}, (), {"Z"}, {("q", None, "Z"): {("q", ("Z",))}}, "q", "Z",
        finals={"f"},
    )
    assert not buchi_pds_nonempty(s2)


def test_emptiness_needs_growing_stack():
    # push forever through a final state: nonempty despite unbounded stack
    s = BuchiPDS(
        {"q", "f"}, (), {"Z", "X"},
        {("q", None, "Z"): {("f", ("X", "Z"))},
         ("f", None, "X"): {("q", ("X", "X"))},
         ("q", None, "X"): {("f", ("X", "X"))}},
        "q", "Z", finals={"f"},
    )
    assert buchi_pds_nonempty(s)


def test_emptiness_pop_cycle():
    # push two, pop two through a final: the loop returns to the same head
    s = BuchiPDS(
        {"q", "r", "f"}, (), {"Z", "X"},
        {("q", None, "Z"): {("r", ("X", "X", "Z"))},
         ("r", None, "X"): {("f", ())},
         ("f", None, "X"): {("q", ())},
         ("q", None, "X"): {("r", ("X", "X", "X"))}},
        "q", "Z", finals={"f"},
    )
    assert buchi_pds_nonempty(s)


def test_emptiness_dead_final_unreachable():
    s = BuchiPDS(
        {"q", "f"}, (), {"Z", "X"},
        {("q", None, "Z"): {("q", ("X",))},
         ("f", None, "X"): {("f", ("X",))}},
        "q", "Z", finals={"f"},
    )
    assert not buchi_pds_nonempty(s)


def random_bounded_system(rng):
    """Random input-free system whose stack height is bounded by 6 by
    construction: pushing a pair lifts the level by one, capped."""
    n_states = rng.randint(1, 4)
    states = [f"s{i}" for i in range(n_states)]
    levels = 6
    syms = [(lv, i) for lv in range(levels) for i in range(2)]
    transitions = {}
    n_rules = rng.randint(2, 12)
    for _ in range(n_rules):
        q = rng.choice(states)
        z = rng.choice(syms)
        q2 = rng.choice(states)
        kind = rng.random()
        if kind < 0.35:
            push = ()
        elif kind < 0.7:
            push = ((z[0], rng.randint(0, 1)),)
        else:
            lv = z[0]
            if lv + 1 >= levels:
                push = ((lv, rng.randint(0, 1)),)
            else:
                push = ((lv + 1, rng.randint(0, 1)), (lv, rng.randint(0, 1)))
        transitions.setdefault((q, None, z), set()).add((q2, push))
    finals = {q for q in states if rng.random() < 0.5}
    return BuchiPDS(
        states, (), syms, transitions, states[0], (0, 0), finals=finals
    )


def test_emptiness_agrees_with_bounded_brute_force():
    rng = random.Random(1234)
    agree = 0
    for _ in range(120):
        s = random_bounded_system(rng)
        assert buchi_pds_nonempty(s) == bounded_pds_nonempty(s)
        agree += 1
    assert agree == 120


def test_union_accepts_both_sides():
    pa = stack_inert({"q"}, {P, Q}, [("q", P, "q")], "q", {"q"})
    pb = stack_inert({"q"}, {P, Q}, [("q", Q, "q")], "q", {"q"})
    u = bpda_union(pa, pb)
    assert bpda_member(u, pl("| p"))
    assert bpda_member(u, pl("| q"))
    assert not bpda_member(u, pl("| p q"))


def test_intersect_with_inf_ones():
    universe = okc_to_bpda(single_letter_universe((ZERO, ONE)))
    b2 = build_inf_ones()
    clipped = bpda_intersect_buchi(universe, b2)
    rng = random.Random(8)
    for _ in range(20):
        u = tuple(rng.choice((ZERO, ONE)) for _ in range(rng.randint(0, 5)))
        v = tuple(rng.choice((ZERO, ONE)) for _ in range(rng.randint(1, 5)))
        w = lasso(u, v)
        assert bpda_member(clipped, w) == buchi_member(b2, w)
    assert not bpda_member(clipped, pl("| 0"))


def test_buchi_fa_embedding():
    p = buchi_fa_to_bpda(build_inf_ones())
    assert bpda_member(p, pl("| 0 1"))
    assert not bpda_member(p, pl("| 0"))


def test_member_checks_alphabet():
    p = okc_to_bpda(inf_ones_okc())
    with pytest.raises(ValueError):
        bpda_member(p, pl("| p"))
