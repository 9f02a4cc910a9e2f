"""Finite omega-automata (Buchi and Muller) and lasso-word membership.

Only membership of ultimately periodic words is supported; the package
never needs complementation, determinization, or emptiness of general
Buchi automata, because every query it answers is a lasso-membership
query against an explicitly constructed automaton.
"""

from __future__ import annotations

from .words import (
    ALPHA,
    B,
    BETA,
    C,
    D,
    E,
    MARK_A,
    MARK_B,
    CODING_LETTERS,
    LassoWord,
    Symbol,
    base,
)


class BuchiFA:
    """Nondeterministic Buchi automaton: accept iff some run visits a
    final state infinitely often."""

    def __init__(self, states, alphabet, transitions, initial, finals):
        self.states = frozenset(states)
        self.alphabet = frozenset(alphabet)
        self.transitions: dict[tuple, frozenset] = {
            k: frozenset(v) for k, v in dict(transitions).items()
        }
        self.initial = initial
        self.finals = frozenset(finals)
        if self.initial not in self.states:
            raise ValueError("initial state not declared")
        if not self.finals <= self.states:
            raise ValueError("final states not declared")
        for (q, s), targets in self.transitions.items():
            if q not in self.states or not targets <= self.states:
                raise ValueError("transition endpoint not declared")
            if s not in self.alphabet:
                raise ValueError(f"transition on foreign symbol {s!r}")

    def succ(self, q, s: Symbol) -> frozenset:
        return self.transitions.get((q, s), frozenset())

    def is_deterministic(self) -> bool:
        return all(len(v) <= 1 for v in self.transitions.values())


class MullerFA:
    """Deterministic, total Muller automaton: accept iff the set of states
    visited infinitely often is exactly one of the designated table sets."""

    def __init__(self, states, alphabet, transitions, initial, table):
        self.states = frozenset(states)
        self.alphabet = frozenset(alphabet)
        self.transitions = dict(transitions)
        self.initial = initial
        self.table = frozenset(frozenset(s) for s in table)
        if self.initial not in self.states:
            raise ValueError("initial state not declared")
        for entry in self.table:
            if not entry <= self.states:
                raise ValueError("table member mentions an undeclared state")
        for q in self.states:
            for s in self.alphabet:
                if (q, s) not in self.transitions:
                    raise ValueError(f"missing transition ({q!r}, {s.token})")
                if self.transitions[(q, s)] not in self.states:
                    raise ValueError("transition target not declared")


def _check_alphabet(aut, w: LassoWord):
    for s in w.symbols():
        if s not in aut.alphabet:
            raise ValueError(f"word symbol {s!r} outside the automaton alphabet")


def buchi_member(aut: BuchiFA, w: LassoWord) -> bool:
    """Decide membership on the product of the automaton with the lasso
    shape: search for a reachable cycle through a final state within the
    period part."""
    _check_alphabet(aut, w)
    u, v = w.prefix, w.period
    total = len(u) + len(v)

    def sym(pos: int) -> Symbol:
        return u[pos] if pos < len(u) else v[pos - len(u)]

    def nxt(pos: int) -> int:
        return pos + 1 if pos + 1 < total else len(u)

    # forward reachability over (state, position)
    reached = {(aut.initial, 0)}
    frontier = [(aut.initial, 0)]
    while frontier:
        q, pos = frontier.pop()
        for q2 in aut.succ(q, sym(pos)):
            node = (q2, nxt(pos))
            if node not in reached:
                reached.add(node)
                frontier.append(node)

    candidates = [
        (q, pos) for (q, pos) in reached if q in aut.finals and pos >= len(u)
    ]
    for target in candidates:
        seen = set()
        frontier = [target]
        while frontier:
            q, pos = frontier.pop()
            for q2 in aut.succ(q, sym(pos)):
                node = (q2, nxt(pos))
                if node == target:
                    return True
                if node not in seen:
                    seen.add(node)
                    frontier.append(node)
    return False


def muller_member(aut: MullerFA, w: LassoWord) -> bool:
    """Run the unique run; the infinitely-visited set is the state set of
    the cycle the run eventually enters (detected by repetition of the
    state at period boundaries)."""
    _check_alphabet(aut, w)
    q = aut.initial
    for s in w.prefix:
        q = aut.transitions[(q, s)]
    boundary_seen: dict = {}
    visits: list[list] = []
    while q not in boundary_seen:
        boundary_seen[q] = len(visits)
        trace = []
        for s in w.period:
            q = aut.transitions[(q, s)]
            trace.append(q)
        visits.append(trace)
    start = boundary_seen[q]
    inf_set = frozenset(q2 for trace in visits[start:] for q2 in trace)
    return inf_set in aut.table


ZERO = base("0")
ONE = base("1")


def build_inf_ones() -> BuchiFA:
    """Deterministic Buchi automaton for the words over {0, 1} containing
    infinitely many 1s (a canonical set complete for the second
    multiplicative Borel level)."""
    transitions = {
        ("q0", ZERO): {"q0"},
        ("q0", ONE): {"q1"},
        ("q1", ZERO): {"q0"},
        ("q1", ONE): {"q1"},
    }
    return BuchiFA({"q0", "q1"}, {ZERO, ONE}, transitions, "q0", {"q1"})


def extend_alphabet(aut: BuchiFA, letters) -> BuchiFA:
    """Same language, larger alphabet: the new letters have no transitions,
    so any word using them is rejected."""
    return BuchiFA(
        aut.states,
        aut.alphabet | frozenset(letters),
        aut.transitions,
        aut.initial,
        aut.finals,
    )


def buchi_to_muller(aut: BuchiFA) -> MullerFA:
    """Deterministic Buchi -> Muller with the table of all state sets that
    meet the final set.  Partial automata are totalized with a dead sink."""
    if not aut.is_deterministic():
        raise ValueError("only deterministic automata convert directly")
    dead = "&dead"
    while dead in aut.states:
        dead += "&"
    transitions = {}
    need_dead = False
    for q in aut.states:
        for s in aut.alphabet:
            targets = aut.succ(q, s)
            if targets:
                (t,) = targets
            else:
                t, need_dead = dead, True
            transitions[(q, s)] = t
    states = set(aut.states)
    if need_dead:
        states.add(dead)
        for s in aut.alphabet:
            transitions[(dead, s)] = dead
    table = []
    state_list = sorted(states, key=repr)
    for mask in range(1, 1 << len(state_list)):
        subset = frozenset(
            q for i, q in enumerate(state_list) if mask & (1 << i)
        )
        if subset & aut.finals:
            table.append(subset)
    return MullerFA(states, aut.alphabet, transitions, aut.initial, table)


def build_envelope(base_letters) -> BuchiFA:
    """The regular envelope of all coded words:  a-block, then b, then an
    infinite concatenation of plain letters and complete coding groups
    alpha B^+ C^+ D^+ E^+ beta.

    Deterministic; the single final state is the between-items hub, so a
    word is accepted iff it decomposes into infinitely many complete
    items -- equivalently iff it has infinitely many prefixes in the
    finitary version of the envelope.
    """
    from .cfg import full_coded_alphabet

    alphabet = full_coded_alphabet(base_letters)
    plain = [s for s in alphabet if s not in CODING_LETTERS]
    states = {"start", "ablock", "hub", "afterA", "inB", "inC", "inD", "inE", "dead"}
    t: dict[tuple, set] = {(q, s): {"dead"} for q in states for s in alphabet}

    def arrow(q, s, q2):
        t[(q, s)] = {q2}

    arrow("start", MARK_A, "ablock")
    arrow("ablock", MARK_A, "ablock")
    arrow("ablock", MARK_B, "hub")
    for s in plain:
        arrow("hub", s, "hub")
    arrow("hub", ALPHA, "afterA")
    arrow("afterA", B, "inB")
    arrow("inB", B, "inB")
    arrow("inB", C, "inC")
    arrow("inC", C, "inC")
    arrow("inC", D, "inD")
    arrow("inD", D, "inD")
    arrow("inD", E, "inE")
    arrow("inE", E, "inE")
    arrow("inE", BETA, "hub")
    return BuchiFA(states, alphabet, t, "start", {"hub"})
