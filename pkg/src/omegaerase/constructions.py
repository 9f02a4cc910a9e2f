"""The layered construction pipeline.

Exponentiation sends a language A to the words whose erasure lands in A;
iterating it with erasers of ranks 1..n and coding each rank-j eraser as
the block  alpha B^j C^j D^j E^j beta  over a fixed alphabet yields, for
every depth read off an  a^n b  prefix, a layer of the final language.
The layered language is the union of all coded layers together with the
guard part (envelope words exposing a malformed or out-of-range code).

Membership comes in two independent routes that the test-suite
cross-validates: a declarative oracle (decode, then evaluate the nested
erasure) and explicit pushdown automata (this module builds them).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

from .cfg import (
    Grammar,
    cancellation_grammar,
    concat,
    full_coded_alphabet,
    guard_grammar,
    guard_member_direct,
    single_word_grammar,
    substitute,
)
from .erasure import erase_nested
from .omega_regular import (
    BuchiFA,
    MullerFA,
    buchi_member,
    build_envelope,
    build_inf_ones,
    extend_alphabet,
    muller_member,
)
from .pushdown import (
    MullerTable,
    OmegaKC,
    PushdownAutomaton,
    bpda_intersect_buchi,
    bpda_union,
    muller_to_buchi_pda,
    okc_to_bpda,
)
from .words import (
    ALPHA,
    B,
    BETA,
    C,
    D,
    E,
    ERASER,
    MARK_A,
    MARK_B,
    LassoWord,
    Symbol,
    Word,
    drop_prefix,
    eraser,
    lasso,
)


# -- the eraser coding -------------------------------------------------------


class DecodeFailure(Exception):
    """A word is not in the image of the coding morphism."""

    def __init__(self, position: int, reason: str):
        self.position = position
        self.reason = reason
        super().__init__(f"position {position}: {reason}")


@dataclass(frozen=True)
class EraserCodec:
    """The rank-n coding: rank-j erasers become alpha B^j C^j D^j E^j beta."""

    n: int
    base_alphabet: frozenset

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("codec rank bound must be >= 1")
        for s in self.base_alphabet:
            if s.kind in ("coding", "eraser"):
                raise ValueError(f"{s!r} cannot be a base letter of the coding")

    def encode_symbol(self, s: Symbol) -> Word:
        if s.kind == ERASER:
            if s.rank > self.n:
                raise ValueError(f"eraser rank {s.rank} exceeds codec bound {self.n}")
            j = s.rank
            return (ALPHA,) + (B,) * j + (C,) * j + (D,) * j + (E,) * j + (BETA,)
        if s not in self.base_alphabet:
            raise ValueError(f"{s!r} is not a base letter of the coding")
        return (s,)

    def encode_word(self, w: Word) -> Word:
        out: list[Symbol] = []
        for s in w:
            out.extend(self.encode_symbol(s))
        return tuple(out)


def encode_lasso(codec: EraserCodec, x: LassoWord) -> LassoWord:
    return lasso(codec.encode_word(x.prefix), codec.encode_word(x.period))


def decode_lasso(codec: EraserCodec, w: LassoWord) -> LassoWord:
    """Invert the coding on a lasso word or raise :class:`DecodeFailure`.

    The word is tokenized greedily left to right (groups start exactly at
    alpha and are forced); token boundaries at positions past the prefix
    repeat a period phase after at most period-length many tokens, which
    realigns the decoded word as a lasso.  The unroll window is sized so
    any complete group and the boundary repetition must occur inside it.
    """
    u, v = w.prefix, w.period
    group_cap = 4 * (len(u) + len(v)) + 2
    window = len(u) + (len(v) + 3) * max(group_cap, 1) + 2 * len(v)
    text = w.unroll(window)

    items: list[Symbol] = []
    boundaries: list[int] = []  # item index at each boundary position
    phase_seen: dict[int, int] = {}
    pos = 0
    while pos < window:
        s = text[pos]
        if s in (B, C, D, E, BETA):
            raise DecodeFailure(pos + 1, f"coding letter {s.token} outside a group")
        if s == ALPHA:
            gstart = pos
            pos += 1
            counts = []
            for letter in (B, C, D, E):
                c = 0
                while pos < window and text[pos] == letter:
                    pos += 1
                    c += 1
                counts.append(c)
            if pos >= window:
                raise DecodeFailure(gstart + 1, "group never completes")
            if min(counts) < 1 or text[pos] != BETA:
                raise DecodeFailure(gstart + 1, "malformed group")
            j, k, l, m = counts
            if not (j == k == l == m):
                raise DecodeFailure(gstart + 1, f"mismatched exponents {counts}")
            if j > codec.n:
                raise DecodeFailure(gstart + 1, f"rank {j} exceeds bound {codec.n}")
            pos += 1
            items.append(eraser(j))
        else:
            if s not in codec.base_alphabet:
                raise DecodeFailure(pos + 1, f"{s.token} outside the coded alphabet")
            items.append(s)
            pos += 1
        if pos >= len(u):
            phase = (pos - len(u)) % len(v)
            if phase in phase_seen:
                cut = phase_seen[phase]
                return lasso(tuple(items[:cut]), tuple(items[cut:]))
            phase_seen[phase] = len(items)
        boundaries.append(len(items))
    raise DecodeFailure(window, "no periodic alignment inside the window")


# -- exponentiation ----------------------------------------------------------


def build_inf_ones_okc() -> OmegaKC:
    """The infinitely-many-ones language as { empty } . (0*1)^omega."""
    from .omega_regular import ONE, ZERO

    u = Grammar([("S", ())], "S")
    v = Grammar([("S", (ZERO, "S")), ("S", (ONE,))], "S")
    return OmegaKC([(u, v)])


def exponentiate_okc(okc: OmegaKC, e: Symbol, alphabet=None) -> OmegaKC:
    """Grammar route: substitute (cancellation-language . c) for every
    letter c, so each surviving letter may be preceded by erasable junk."""
    if e.kind != ERASER:
        raise ValueError(f"not an eraser: {e!r}")
    letters = frozenset(alphabet) if alphabet is not None else okc.alphabet
    if e in letters:
        raise ValueError("the fresh eraser is already a letter of the language")
    junk = cancellation_grammar(letters, e)
    padded = {
        c: concat(junk, single_word_grammar((c,), terminals=letters | {e}))
        for c in letters
    }
    pairs = []
    for u_g, v_g in okc.pairs:
        pairs.append(
            (
                substitute(u_g, {t: padded[t] for t in u_g.terminals}),
                substitute(v_g, {t: padded[t] for t in v_g.terminals}),
            )
        )
    return OmegaKC(pairs)


def iterate_exponentiation(okc: OmegaKC, n: int, alphabet=None) -> OmegaKC:
    """Apply exponentiation n times with fresh erasers of ranks 1..n; the
    highest rank is the outermost (first evaluated) one."""
    letters = frozenset(alphabet) if alphabet is not None else okc.alphabet
    for j in range(1, n + 1):
        okc = exponentiate_okc(okc, eraser(j), letters)
        letters = letters | {eraser(j)}
    return okc


def exponentiate_mpda(p: PushdownAutomaton, e: Symbol) -> PushdownAutomaton:
    """Automaton route: simulate p, but at any moment guess that a segment
    of erasable junk starts; a dedicated counter symbol on top of p's stack
    checks the segment cancels to nothing, then the simulation resumes.

    Final states require a genuine simulation step into a final state of p
    (segment exits re-enter the parked state without marking it), so words
    whose erasure is finite cannot cheat their way to acceptance.
    """
    if e.kind != ERASER:
        raise ValueError(f"not an eraser: {e!r}")
    if e in p.input_alphabet:
        raise ValueError("the fresh eraser is already an input letter")
    p = muller_to_buchi_pda(p)
    ctr = f"cnt:{e.token}"
    while ctr in p.stack_alphabet:
        ctr += "&"

    transitions: dict[tuple, set] = {}

    def add(key, target):
        transitions.setdefault(key, set()).add(target)

    states = set()
    for q in p.states:
        states.update({("s", q, 0), ("s", q, 1), ("e", q)})

    for q, a, z, q2, push in p.rules():
        for f in (0, 1):
            add((("s", q, f), a, z), (("s", q2, 1), push))
    for q in p.states:
        for c in p.input_alphabet:
            for z in p.stack_alphabet:
                for f in (0, 1):
                    add((("s", q, f), c, z), (("e", q), (ctr, z)))
            add((("e", q), c, ctr), (("e", q), (ctr, ctr)))
        add((("e", q), e, ctr), (("e", q), ()))
        for z in p.stack_alphabet:
            add((("e", q), None, z), (("s", q, 0), (z,)))

    finals = {("s", q, 1) for q in p.finals}
    return PushdownAutomaton(
        states,
        p.input_alphabet | {e},
        p.stack_alphabet | {ctr},
        transitions,
        ("s", p.initial, 0),
        p.stack_init,
        finals=finals,
    )


# -- the layered language ----------------------------------------------------


@dataclass(frozen=True)
class LayeredSpec:
    """Inputs of the layered construction: the base automaton and its
    alphabet, which must contain the two markers a and b."""

    automaton: object  # BuchiFA or MullerFA over base_alphabet
    base_alphabet: frozenset

    def __post_init__(self):
        letters = frozenset(self.base_alphabet)
        object.__setattr__(self, "base_alphabet", letters)
        if MARK_A not in letters or MARK_B not in letters:
            raise ValueError("the base alphabet must contain the markers a and b")
        if len(letters) < 2:
            raise ValueError("the base alphabet needs at least two letters")
        for s in letters:
            if s.kind in ("coding", "eraser"):
                raise ValueError(f"{s!r} cannot be a base letter")
        if frozenset(self.automaton.alphabet) != letters:
            raise ValueError("the automaton must be over exactly the base alphabet")

    @property
    def full_alphabet(self) -> frozenset:
        return full_coded_alphabet(self.base_alphabet)

    @property
    def plain_letters(self) -> frozenset:
        return self.base_alphabet - {MARK_A, MARK_B}

    def base_member(self, w: LassoWord) -> bool:
        if isinstance(self.automaton, MullerFA):
            return muller_member(self.automaton, w)
        return buchi_member(self.automaton, w)


def inf_ones_layered_spec() -> LayeredSpec:
    """The canonical instance: infinitely-many-ones over {0, 1, a, b}."""
    return LayeredSpec(
        automaton=extend_alphabet(build_inf_ones(), {MARK_A, MARK_B}),
        base_alphabet=frozenset(build_inf_ones().alphabet) | {MARK_A, MARK_B},
    )


@lru_cache(maxsize=16)
def _envelope_for(plain_letters) -> BuchiFA:
    return build_envelope(plain_letters)


def _leading_a_run(w: LassoWord) -> int:
    cap = len(w.prefix) + len(w.period)
    n = 0
    while n < cap and w.at(n + 1) == MARK_A:
        n += 1
    return n


def prefix_hits_guard(w: LassoWord) -> bool:
    """Does some finite prefix of w expose a malformed or out-of-range
    code?  Scanned incrementally over a window that provably contains the
    earliest hit if any exists (runs and groups recur with the period)."""
    n_a = _leading_a_run(w)
    u, v = w.prefix, w.period
    periods = len(u) + 2 * len(v) + n_a + 2
    window = len(u) + periods * len(v)
    text = w.unroll(window)
    prefix_ok = n_a >= 1 and n_a < len(text) and text[n_a] == MARK_B

    run_sym, run_len = None, 0
    group = None  # [phase, countB, countC, countD, countE] of a candidate group
    group_letters = (B, C, D, E)
    for s in text:
        run_len = run_len + 1 if s == run_sym else 1
        run_sym = s
        if group is not None:
            phase = group[0]
            if s == group_letters[phase]:
                group[1 + phase] += 1
            elif phase < 3 and s == group_letters[phase + 1] and group[1 + phase] >= 1:
                group[0] = phase + 1
                group[2 + phase] = 1
            elif phase == 3 and s == BETA and group[4] >= 1:
                j, k, l, m = group[1:5]
                if j != k or k != l or l != m:
                    return True
                group = None
            else:
                group = None
        if group is None and s == ALPHA:
            group = [0, 0, 0, 0, 0]
        if prefix_ok and s in group_letters and run_len > n_a:
            return True
    return False


def layered_member_oracle(spec: LayeredSpec, w: LassoWord) -> bool:
    """Declarative membership in the layered language.

    Either the guard branch fires (w is in the envelope and some prefix is
    malformed or out of range), or w = a^n b w' where w' decodes at rank n
    and its nested erasure is an infinite word accepted by the base
    automaton.  The two branches overlap; the language is their union.
    """
    for s in w.symbols():
        if s not in spec.full_alphabet:
            return False
    envelope = _envelope_for(spec.plain_letters)
    if not buchi_member(envelope, w):
        return False
    if prefix_hits_guard(w):
        return True
    n = _leading_a_run(w)
    if n < 1:
        return False
    rest = drop_prefix(w, n + 1)
    codec = EraserCodec(n, spec.base_alphabet)
    try:
        decoded = decode_lasso(codec, rest)
    except DecodeFailure:
        return False
    outcome = erase_nested(decoded, n)
    if not outcome.is_infinite:
        return False
    return spec.base_member(outcome.infinite_word)


# -- the layered pushdown machine -------------------------------------------


def muller_fa_to_nba(m: MullerFA) -> BuchiFA:
    """Guess-and-track conversion of a finite Muller automaton: jump into a
    copy committed to a table member, record the visited subset, reset on
    full; accepting iff resets recur."""
    table = sorted(m.table, key=lambda s: sorted(map(repr, s)))
    transitions: dict[tuple, set] = {}
    states = {("d", q) for q in m.states}
    finals = set()

    def add(key, target):
        transitions.setdefault(key, set()).add(target)

    def tracked(q2, idx, vis):
        s_set = table[idx]
        vis = vis | {q2}
        if vis == s_set:
            vis = frozenset()
        st = ("t", q2, idx, vis)
        states.add(st)
        if not vis:
            finals.add(st)
        return st

    for (q, s), q2 in m.transitions.items():
        add((("d", q), s), ("d", q2))
        for idx, s_set in enumerate(table):
            if q2 in s_set:
                add((("d", q), s), tracked(q2, idx, frozenset()))

    worklist = [st for st in states if st[0] == "t"]
    seen = set(worklist)
    while worklist:
        st = worklist.pop()
        _, q, idx, vis = st
        s_set = table[idx]
        for s in m.alphabet:
            q2 = m.transitions[(q, s)]
            if q2 not in s_set:
                continue
            st2 = tracked(q2, idx, vis)
            add((st, s), st2)
            if st2 not in seen:
                seen.add(st2)
                worklist.append(st2)
    return BuchiFA(states, m.alphabet, transitions, ("d", m.initial), finals)


def build_layered_mpda(spec: LayeredSpec) -> PushdownAutomaton:
    """The single pushdown machine of the layered construction.

    Sandwich guarantee: it accepts every coded layer member and accepts
    nothing outside the layered language (words it may classify freely all
    sit in the guard part, which the full construction unions in).

    After reading a^n b (one count symbol per a, kept below a separator),
    the machine simulates the base automaton on letters it deems
    survivors, and guesses which items get erased:

    * a doomed letter is pushed; a doomed eraser code is pushed as
      head/counter/foot with one counter per B;
    * an eraser code guessed to really erase checks rank order and the
      erasing-order bound on its four blocks: the B-run is raced against
      the pending min-marker (die on overrun), the C-run pops the victim
      (strictly fewer counters than C's), and the D/E-runs rebuild the
      min-marker below, using overshoot letters when the new rank exceeds
      the stored minimum;
    * survivors are read only with no victims pending, and only those
      steps can hit final states, so stalling forever inside bookkeeping
      never accepts.

    The result is returned with its Muller table in hit-set form.
    """
    aut = spec.automaton
    nba = muller_fa_to_nba(aut) if isinstance(aut, MullerFA) else aut
    letters = sorted(spec.base_alphabet, key=lambda s: s.token)

    def item(c: Symbol) -> str:
        return f"it:{c.token}"

    ITEMS = [item(c) for c in letters] + ["g"]
    RESTS = ["Z1"] + ITEMS + ["L2"]
    stack = {"Z0", "N", "Z1", "g", "Ec", "ef", "S", "L1", "L2", "U"}
    stack.update(item(c) for c in letters)

    transitions: dict[tuple, set] = {}
    states: set = set()

    def add(src, a, z, dst, push):
        states.add(src)
        states.add(dst)
        transitions.setdefault((src, a, z), set()).add((dst, tuple(push)))

    def sim(q, f):
        return ("sim", q, f)

    add("pre0", MARK_A, "Z0", "pre", ("N", "Z0"))
    add("pre", MARK_A, "N", "pre", ("N", "N"))
    add("pre", MARK_B, "N", sim(nba.initial, 0), ("Z1", "N"))

    for q in nba.states:
        for f in (0, 1):
            s0 = sim(q, f)
            # survivors drive the simulated automaton; only these target
            # fresh states, and only fresh final states are accepting
            for c in letters:
                for q2 in nba.succ(q, c):
                    add(s0, c, "Z1", sim(q2, 1), ("Z1",))
                for z in RESTS:
                    add(s0, c, z, sim(q, 0), (item(c), z))
            # dispatch on a group start
            for z in RESTS:
                add(s0, ALPHA, z, ("vB0", q), ("ef", z))
            add(s0, ALPHA, "L2", ("aBC0", q), ())
            for z in ITEMS:
                add(s0, ALPHA, z, ("aBF0", q), (z,))
            add(s0, ALPHA, "Z1", ("wB0", q), ())

        # doomed eraser code: push foot, one counter per B, then the head
        add(("vB0", q), B, "ef", ("vB", q), ("Ec", "ef"))
        add(("vB", q), B, "Ec", ("vB", q), ("Ec", "Ec"))
        add(("vB", q), C, "Ec", ("vC", q), ("g", "Ec"))
        add(("vC", q), C, "g", ("vC", q), ("g",))
        add(("vC", q), D, "g", ("vD", q), ("g",))
        add(("vD", q), D, "g", ("vD", q), ("g",))
        add(("vD", q), E, "g", ("vE", q), ("g",))
        add(("vE", q), E, "g", ("vE", q), ("g",))
        add(("vE", q), BETA, "g", sim(q, 0), ("g",))

        # doomed code at top level with rank verification: race the count
        # block on the B-run (die past it), restore it on the C-run
        add(("wB0", q), B, "N", ("wB", q), ())
        add(("wB", q), B, "N", ("wB", q), ())
        add(("wB", q), C, "N", ("wC", q), ("N", "N"))
        add(("wB", q), C, "Z0", ("wC", q), ("N", "Z0"))
        add(("wC", q), C, "N", ("wC", q), ("N", "N"))
        add(("wC", q), D, "N", ("wD0", q), ("ef", "Z1", "N"))
        add(("wD0", q), D, "ef", ("wD", q), ("Ec", "ef"))
        add(("wD", q), D, "Ec", ("wD", q), ("Ec", "Ec"))
        add(("wD0", q), E, "ef", ("wE", q), ("Ec", "ef"))
        add(("wD", q), E, "Ec", ("wE", q), ("Ec", "Ec"))
        add(("wE", q), E, "Ec", ("wE", q), ("Ec",))
        add(("wE", q), BETA, "Ec", sim(q, 0), ("g", "Ec"))

        # acting eraser over a min-marker: B-run races the stored bound
        add(("aBC0", q), B, "S", ("aBC", q), ())
        add(("aBC", q), B, "S", ("aBC", q), ())
        add(("aBC", q), C, "S", ("aMC", q), ())
        add(("aBC", q), C, "L1", ("aVP", q), ())
        add(("aMC", q), None, "S", ("aMC", q), ())
        add(("aMC", q), None, "L1", ("aVP", q), ())
        add(("aVP", q), None, "g", ("aCE", q), ())
        for c in letters:
            add(("aVP", q), None, item(c), ("aCR", q), ())

        # acting eraser with no marker in the way
        for z in ITEMS:
            add(("aBF0", q), B, z, ("aBF", q), (z,))
            add(("aBF", q), B, z, ("aBF", q), (z,))
        add(("aBF", q), C, "g", ("aCE", q), ())
        for c in letters:
            add(("aBF", q), C, item(c), ("aCR", q), ())

        # C-run consumes the victim's counters: strict rank drop required
        add(("aCE", q), C, "Ec", ("aCE", q), ())
        add(("aCE", q), None, "ef", ("aCR", q), ())
        for z in RESTS:
            add(("aCR", q), C, z, ("aCR", q), (z,))

        # D/E-runs: nothing left (resume), a bare victim (lay a fresh
        # marker), or an old marker (keep the minimum, overshoot with U)
        add(("aCR", q), D, "Z1", ("aDZ", q), ("Z1",))
        add(("aDZ", q), D, "Z1", ("aDZ", q), ("Z1",))
        add(("aDZ", q), E, "Z1", ("aEZ", q), ("Z1",))
        add(("aEZ", q), E, "Z1", ("aEZ", q), ("Z1",))
        add(("aEZ", q), BETA, "Z1", sim(q, 0), ("Z1",))

        for z in ITEMS:
            add(("aCR", q), D, z, ("aDP", q), ("L1", z))
        add(("aDP", q), D, "L1", ("aDP", q), ("S", "L1"))
        add(("aDP", q), D, "S", ("aDP", q), ("S", "S"))
        add(("aDP", q), E, "L1", ("aEPi", q), ("S", "L1"))
        add(("aDP", q), E, "S", ("aEPi", q), ("S", "S"))
        add(("aEPi", q), E, "S", ("aEPi", q), ("S",))
        add(("aEPi", q), BETA, "S", sim(q, 0), ("L2", "S"))

        add(("aCR", q), D, "L2", ("aDC", q), ())
        add(("aDC", q), D, "S", ("aDC", q), ())
        add(("aDC", q), D, "L1", ("aDO", q), ("U", "L1"))
        add(("aDO", q), D, "U", ("aDO", q), ("U", "U"))
        add(("aDC", q), E, "S", ("aEC", q), ("S",))
        add(("aDC", q), E, "L1", ("aES", q), ("L1",))
        add(("aEC", q), None, "S", ("aEC", q), ())
        add(("aEC", q), None, "L1", ("aES", q), ("S", "L1"))
        add(("aES", q), E, "S", ("aES", q), ("S", "S"))
        add(("aES", q), E, "L1", ("aES", q), ("S", "L1"))
        add(("aES", q), BETA, "S", sim(q, 0), ("L2", "S"))
        add(("aDO", q), E, "U", ("aEU", q), ())
        add(("aEU", q), E, "U", ("aEU", q), ())
        add(("aEU", q), E, "L1", ("aES", q), ("L1",))

    finals = {sim(q, 1) for q in nba.finals}
    states.update(finals)
    return PushdownAutomaton(
        states,
        spec.full_alphabet,
        stack,
        transitions,
        "pre0",
        "Z0",
        table=MullerTable(hits=finals),
    )


def build_guard_part(spec: LayeredSpec) -> PushdownAutomaton:
    """Buchi PDA for (guard-language . anything) inside the envelope."""
    guards = guard_grammar(spec.plain_letters)
    anything = Grammar(
        [("S", (s,)) for s in sorted(spec.full_alphabet, key=lambda x: x.token)],
        "S",
    )
    opener = okc_to_bpda(OmegaKC([(guards, anything)]))
    return bpda_intersect_buchi(opener, _envelope_for(spec.plain_letters))


def build_layered_automaton(spec: LayeredSpec) -> PushdownAutomaton:
    """The full construction: the layered machine unioned with the guard
    part; lasso membership equals the declarative oracle."""
    core = muller_to_buchi_pda(build_layered_mpda(spec))
    return bpda_union(core, build_guard_part(spec))
