"""Seeded cross-validation campaigns.

Every suite checks one agreement property between two independently
implemented routes (declarative oracle vs grammar vs automaton vs brute
force).  Campaigns are deterministic functions of the seed; reports are
plain text, one fact per line, so the same seed gives byte-identical
output.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .cfg import (
    cancellation_grammar,
    cfg_member,
    full_coded_alphabet,
    guard_grammar,
    guard_member_direct,
)
from .constructions import (
    DecodeFailure,
    EraserCodec,
    build_inf_ones_okc,
    build_layered_automaton,
    build_layered_mpda,
    encode_lasso,
    exponentiate_mpda,
    inf_ones_layered_spec,
    iterate_exponentiation,
    layered_member_oracle,
)
from .erasure import (
    UNDEFINED,
    erase_finite,
    erase_lasso,
    finite,
    infinite,
    nested_erasure_member,
)
from .omega_regular import buchi_member, build_inf_ones, extend_alphabet
from .pushdown import (
    BuchiPDS,
    bpda_member,
    buchi_fa_to_bpda,
    buchi_pds_nonempty,
    muller_to_buchi_pda,
    okc_to_bpda,
)
from .words import (
    LassoWord,
    MARK_A,
    MARK_B,
    Symbol,
    Word,
    base,
    eraser,
    lasso,
    lasso_str,
    word_str,
)

ZERO = base("0")
ONE = base("1")
X = base("x")
Y = base("y")
E1 = eraser(1)

MAX_REPORTED_FAILURES = 3


@dataclass
class SuiteReport:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def check(self, condition: bool, describe) -> None:
        self.checked += 1
        if not condition and len(self.failures) < MAX_REPORTED_FAILURES:
            self.failures.append(describe() if callable(describe) else describe)

    def lines(self) -> list[str]:
        out = [f"{self.name}: checked {self.checked}, "
               f"{'ok' if self.ok else 'MISMATCH'}"]
        for f in self.failures:
            out.append(f"{self.name}: counterexample: {f}")
        return out


# -- small independent oracles ------------------------------------------------


def naive_pair_deletion(word: Word, e: Symbol):
    """Erase by repeatedly deleting the leftmost adjacent (letter, eraser)
    pair; undefined iff an eraser survives."""
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


def bounded_pds_nonempty(s) -> bool:
    """Exhaustive repeated reachability over the finite configuration
    graph; sound only for stack-height-bounded systems."""
    rules: dict = {}
    for q, a, z, q2, push in s.rules():
        rules.setdefault((q, z), []).append((q2, push))
    start = (s.initial, (s.stack_init,))
    seen = {start}
    order = [start]
    adj = {}
    i = 0
    while i < len(order):
        node = order[i]
        i += 1
        q, stack = node
        succs = []
        if stack:
            for q2, push in rules.get((q, stack[0]), ()):
                node2 = (q2, tuple(push) + stack[1:])
                succs.append(node2)
                if node2 not in seen:
                    seen.add(node2)
                    order.append(node2)
        adj[node] = succs
    for target in (n for n in order if n[0] in s.finals):
        stack = [target]
        visited = set()
        while stack:
            n = stack.pop()
            for m in adj.get(n, ()):
                if m == target:
                    return True
                if m not in visited:
                    visited.add(m)
                    stack.append(m)
    return False


# -- samplers ------------------------------------------------------------------


def sample_lasso(rng: random.Random, letters, max_len: int) -> LassoWord:
    letters = list(letters)
    u = tuple(rng.choice(letters) for _ in range(rng.randint(0, max_len)))
    v = tuple(rng.choice(letters) for _ in range(rng.randint(1, max_len)))
    return LassoWord(u, v)


def sample_eraser_member(rng: random.Random, depth: int, plain=None) -> LassoWord:
    """A member of the depth-iterated erasure language over {0,1} plus
    erasers: start from a word with infinitely many ones and pad each
    layer with erasable junk."""
    plain = list(plain) if plain is not None else [ZERO, ONE]
    u = [rng.choice((ZERO, ONE)) for _ in range(rng.randint(0, 2))]
    v = [rng.choice((ZERO, ONE)) for _ in range(rng.randint(0, 2))] + [ONE]
    for j in range(1, depth + 1):
        erasable = plain + [eraser(i) for i in range(1, j)]

        def pad(seq):
            out = []
            for s in seq:
                if rng.random() < 0.4:
                    out.extend((rng.choice(erasable), eraser(j)))
                out.append(s)
            return out

        u, v = pad(u), pad(v)
    return LassoWord(tuple(u), tuple(v))


def _random_group(rng: random.Random, rank: int, exact: bool) -> list[Symbol]:
    from .words import ALPHA, B, BETA, C, D, E

    counts = [rank] * 4
    if not exact:
        slot = rng.randrange(4)
        counts[slot] = rank + rng.choice((1, 2))
    out = [ALPHA]
    for letter, c in zip((B, C, D, E), counts):
        out.extend([letter] * c)
    out.append(BETA)
    return out


def sample_layer_word(rng: random.Random, spec, kind: str) -> LassoWord:
    """Seeded words over the coded alphabet, biased by kind:
    'member' (in a coded layer), 'guard' (envelope word with a bad code),
    'nonenvelope' (fails the envelope), or 'uniform'."""
    letters = sorted(spec.full_alphabet, key=lambda s: s.token)
    plain = sorted(spec.base_alphabet, key=lambda s: s.token)
    if kind == "uniform":
        return sample_lasso(rng, letters, 5)
    if kind == "member":
        n = rng.randint(1, 2)
        inner = sample_eraser_member(rng, n, plain)
        codec = EraserCodec(n, spec.base_alphabet)
        coded = encode_lasso(codec, LassoWord(tuple(inner.prefix), tuple(inner.period)))
        return LassoWord((MARK_A,) * n + (MARK_B,) + coded.prefix, coded.period)
    if kind == "guard":
        n = rng.randint(1, 2)
        items_u, items_v = [], []
        for target in (items_u, items_v):
            for _ in range(rng.randint(0, 2)):
                if rng.random() < 0.5:
                    target.extend(_random_group(rng, rng.randint(1, n), True))
                else:
                    target.append(rng.choice(plain))
        bad = (
            _random_group(rng, rng.randint(1, n + 1), False)
            if rng.random() < 0.6
            else _random_group(rng, n + rng.randint(1, 2), True)
        )
        (items_u if rng.random() < 0.5 else items_v).extend(bad)
        items_v.append(rng.choice(plain))
        return LassoWord(
            (MARK_A,) * n + (MARK_B,) + tuple(items_u), tuple(items_v)
        )
    if kind == "nonenvelope":
        mode = rng.randrange(4)
        if mode == 0:
            # no leading a-block
            head = rng.choice([s for s in letters if s != MARK_A])
            return LassoWord((head,), tuple(rng.choice(plain) for _ in range(2)))
        if mode == 1:
            # a-block never closed by b
            return LassoWord(
                (MARK_A,) * rng.randint(1, 3) + (rng.choice([ZERO, ONE]),),
                (rng.choice(plain),),
            )
        if mode == 2:
            # stray coding letter outside a group
            from .words import B as CB

            return LassoWord(
                (MARK_A, MARK_B, CB), tuple(rng.choice(plain) for _ in range(2))
            )
        from .words import ALPHA, B as CB

        # group that never completes
        return LassoWord((MARK_A, MARK_B, ALPHA), (CB,))
    raise ValueError(f"unknown kind {kind!r}")


# -- suites --------------------------------------------------------------------


def suite_erasure_examples(seed: int, samples: int) -> SuiteReport:
    """The six fixed backspace evaluations (strict underflow convention:
    the double-eraser period is undefined, see the erasure module notes)."""
    rep = SuiteReport("erasure-examples")
    fin = erase_finite((X, E1) * 3, E1)
    rep.check(fin == finite(()), lambda: f"(x ~1)^3 gave {fin!r}")
    cases = [
        ("| x ~1", finite(())),
        ("| x ~1 ~1", UNDEFINED),
        ("| x y ~1", infinite(lasso((), (X,)))),
        ("y y | ~1 x", finite((Y,))),
        ("~1 | x ~1", UNDEFINED),
        ("x ~1 ~1 | x", UNDEFINED),
    ]
    from .words import parse_lasso

    for text, want in cases:
        got = erase_lasso(parse_lasso(text), E1)
        rep.check(got == want, lambda t=text, g=got, w=want: f"{t}: {g!r} != {w!r}")
    return rep


def suite_erasure(seed: int, samples: int) -> SuiteReport:
    """erase_finite against leftmost pair deletion: exhaustive short words
    over one letter, seeded longer words over two letters."""
    rep = SuiteReport("erasure")

    def agree(w):
        got = erase_finite(w, E1)
        want = naive_pair_deletion(w, E1)
        rep.check(
            got == want, lambda: f"{word_str(w)}: {got!r} != {want!r}"
        )

    for n in range(0, 11):
        for bits in itertools.product((X, E1), repeat=n):
            agree(bits)
    rng = random.Random(seed)
    for _ in range(samples):
        agree(tuple(rng.choice((X, Y, E1)) for _ in range(rng.randint(0, 20))))
    return rep


def suite_cancellation(seed: int, samples: int) -> SuiteReport:
    """Grammar membership = erases-to-empty, exhaustively."""
    rep = SuiteReport("cancellation")
    g = cancellation_grammar((X,), E1)
    for n in range(0, 13):
        for w in itertools.product((X, E1), repeat=n):
            got = cfg_member(g, w)
            want = erase_finite(w, E1) == finite(())
            rep.check(got == want, lambda w=w: f"{word_str(w)}: {got} != {want}")
    return rep


def suite_exponent(seed: int, samples: int) -> SuiteReport:
    """Grammar route, machine route, and erase route of the iterated
    exponentiation agree on seeded lasso words."""
    rep = SuiteReport("exponent")
    rng = random.Random(seed)
    b2 = build_inf_ones()
    for depth in (1, 2):
        grammar = okc_to_bpda(
            iterate_exponentiation(build_inf_ones_okc(), depth, alphabet={ZERO, ONE})
        )
        machine = buchi_fa_to_bpda(b2)
        for j in range(1, depth + 1):
            machine = exponentiate_mpda(machine, eraser(j))
        letters = [ZERO, ONE] + [eraser(j) for j in range(1, depth + 1)]
        per_depth = samples // 2
        for i in range(per_depth):
            if i % 3 == 2:
                w = sample_eraser_member(rng, depth, plain=[ZERO, ONE])
            else:
                w = sample_lasso(rng, letters, 10)
            want = nested_erasure_member(w, b2, depth)
            got_g = bpda_member(grammar, w)
            got_m = bpda_member(machine, w)
            rep.check(
                got_g == want and got_m == want,
                lambda w=w, a=want, g=got_g, m=got_m:
                f"depth {depth} {lasso_str(w)}: erase={a} grammar={g} machine={m}",
            )
    return rep


def random_bounded_system(rng: random.Random) -> BuchiPDS:
    """Input-free system with stack height statically bounded by 6:
    two-symbol pushes climb one level and stop at the top level."""
    n_states = rng.randint(1, 4)
    states = [f"s{i}" for i in range(n_states)]
    levels = 6
    syms = [(lv, i) for lv in range(levels) for i in range(2)]
    transitions: dict = {}
    for _ in range(rng.randint(2, 12)):
        q, z, q2 = rng.choice(states), rng.choice(syms), rng.choice(states)
        kind = rng.random()
        if kind < 0.35:
            push = ()
        elif kind < 0.7 or z[0] + 1 >= levels:
            push = ((z[0], rng.randint(0, 1)),)
        else:
            push = ((z[0] + 1, rng.randint(0, 1)), (z[0], rng.randint(0, 1)))
        transitions.setdefault((q, None, z), set()).add((q2, push))
    finals = {q for q in states if rng.random() < 0.5}
    return BuchiPDS(states, (), syms, transitions, states[0], (0, 0), finals=finals)


def suite_emptiness(seed: int, samples: int) -> SuiteReport:
    """Saturation emptiness = exhaustive configuration-graph search on
    seeded height-bounded systems."""
    rep = SuiteReport("emptiness")
    rng = random.Random(seed)
    for i in range(samples):
        s = random_bounded_system(rng)
        got = buchi_pds_nonempty(s)
        want = bounded_pds_nonempty(s)
        rep.check(got == want, lambda i=i: f"system {i}: saturation={got} brute={want}")
    return rep


def suite_layered(seed: int, samples: int) -> SuiteReport:
    """Full-automaton route = declarative oracle, with sampling biased so
    coded members, guard words, and envelope failures are all exercised."""
    rep = SuiteReport("layered")
    rng = random.Random(seed)
    spec = inf_ones_layered_spec()
    full = build_layered_automaton(spec)
    bucket = max(1, samples // 4)
    kinds = (
        ["member"] * bucket
        + ["guard"] * bucket
        + ["nonenvelope"] * bucket
        + ["uniform"] * (samples - 3 * bucket)
    )
    for kind in kinds:
        w = sample_layer_word(rng, spec, kind)
        want = layered_member_oracle(spec, w)
        got = bpda_member(full, w)
        rep.check(
            got == want,
            lambda w=w, k=kind: f"[{k}] {lasso_str(w)}: oracle={want} automaton={got}",
        )
    return rep


def suite_sandwich(seed: int, samples: int) -> SuiteReport:
    """The layered machine alone accepts every coded member and rejects
    every oracle-rejected word."""
    rep = SuiteReport("sandwich")
    rng = random.Random(seed)
    spec = inf_ones_layered_spec()
    machine = muller_to_buchi_pda(build_layered_mpda(spec))
    half = samples // 2
    for _ in range(half):
        w = sample_layer_word(rng, spec, "member")
        rep.check(
            bpda_member(machine, w),
            lambda w=w: f"coded member rejected by the machine: {lasso_str(w)}",
        )
    rejected = 0
    while rejected < samples - half:
        kind = rng.choice(("uniform", "nonenvelope", "uniform"))
        w = sample_layer_word(rng, spec, kind)
        if layered_member_oracle(spec, w):
            continue
        rejected += 1
        rep.check(
            not bpda_member(machine, w),
            lambda w=w: f"oracle-rejected word accepted by the machine: {lasso_str(w)}",
        )
    return rep


def suite_closing(seed: int, samples: int) -> SuiteReport:
    """On words over the base alphabet the layered language is exactly
    a-block . b . (base language)."""
    rep = SuiteReport("closing")
    rng = random.Random(seed)
    spec = inf_ones_layered_spec()
    b2x = extend_alphabet(build_inf_ones(), {MARK_A, MARK_B})
    letters = sorted(spec.base_alphabet, key=lambda s: s.token)
    from .words import drop_prefix

    for i in range(samples):
        if i % 2 == 0:
            w = sample_lasso(rng, letters, 6)
        else:
            body = sample_lasso(rng, [ZERO, ONE], 5)
            w = LassoWord(
                (MARK_A,) * rng.randint(1, 3) + (MARK_B,) + body.prefix, body.period
            )
        n = 0
        while n < len(w.prefix) + len(w.period) and w.at(n + 1) == MARK_A:
            n += 1
        want = (
            n >= 1
            and w.at(n + 1) == MARK_B
            and buchi_member(b2x, drop_prefix(w, n + 1))
        )
        got = layered_member_oracle(spec, w)
        rep.check(
            got == want, lambda w=w: f"{lasso_str(w)}: oracle={got} identity={want}"
        )
    return rep


def suite_guards(seed: int, samples: int) -> SuiteReport:
    """Direct scanner = guard grammar, on exhaustive slices plus seeded
    words over the full coded alphabet."""
    rep = SuiteReport("guards")
    plain = (ZERO, ONE)
    grammar = guard_grammar(plain)
    alphabet = sorted(full_coded_alphabet(plain), key=lambda s: s.token)
    from .words import B as CB

    def agree(w):
        got = guard_member_direct(w)
        want = cfg_member(grammar, w)
        rep.check(got == want, lambda: f"{word_str(w)}: direct={got} grammar={want}")

    for n in range(0, 5):
        for w in itertools.product(alphabet, repeat=n):
            agree(w)
    for n in range(0, 13):
        for w in itertools.product((MARK_A, CB), repeat=n):
            agree(w)
    for n in range(0, 9):
        for w in itertools.product((MARK_A, MARK_B, CB), repeat=n):
            agree(w)
    rng = random.Random(seed)
    for _ in range(samples):
        agree(tuple(rng.choice(alphabet) for _ in range(rng.randint(0, 20))))
    return rep


SUITES = {
    "erasure-examples": suite_erasure_examples,
    "erasure": suite_erasure,
    "cancellation": suite_cancellation,
    "exponent": suite_exponent,
    "emptiness": suite_emptiness,
    "layered": suite_layered,
    "sandwich": suite_sandwich,
    "closing": suite_closing,
    "guards": suite_guards,
}


def run_suites(names, seed: int, samples: int):
    """Run the named suites; returns (all_ok, report lines)."""
    lines = []
    ok = True
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}")
        rep = SUITES[name](seed, samples)
        ok = ok and rep.ok
        lines.extend(rep.lines())
    return ok, lines
