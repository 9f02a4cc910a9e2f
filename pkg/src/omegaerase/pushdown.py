"""Pushdown automata on omega-words and the lasso membership engine.

The decision route for every automaton-side membership query: build the
product of the automaton with the lasso shape of the queried word (an
input-free Buchi pushdown system), then decide repeated reachability of
final control states by saturation.

Acceptance is over *complete* runs only: a run that eventually reads only
empty-word transitions consumes a finite prefix and never accepts.  The
product construction enforces this with a progress flag, dropped when a
static check shows every transition into a final state consumes input.
"""

from __future__ import annotations

import itertools
import warnings

from .cfg import Grammar, generates_nonempty_word
from .omega_regular import BuchiFA
from .words import LassoWord, Symbol

PushTarget = tuple  # (state, tuple of stack symbols, leftmost on top)


class MullerTable:
    """A set of state sets, stored explicitly or as {S : S meets hits}.

    The hit-set form is the standard presentation of a Buchi condition as
    a Muller condition; listing it explicitly is exponential, so machines
    built from Buchi cores carry the compact form and conversions invert
    it exactly.
    """

    def __init__(self, explicit=None, hits=None):
        if (explicit is None) == (hits is None):
            raise ValueError("give exactly one of explicit= or hits=")
        self.explicit = (
            None if explicit is None else frozenset(frozenset(s) for s in explicit)
        )
        self.hits = None if hits is None else frozenset(hits)

    def __contains__(self, state_set) -> bool:
        s = frozenset(state_set)
        if self.hits is not None:
            return bool(s & self.hits)
        return s in self.explicit

    def __repr__(self):
        if self.hits is not None:
            return f"MullerTable(hits={sorted(map(repr, self.hits))})"
        return f"MullerTable({len(self.explicit)} sets)"


class PushdownAutomaton:
    """Pushdown machine with Buchi finals or a Muller table.

    Transitions map (state, input symbol or None, stack top) to a set of
    (state, pushed word) pairs; every transition pops exactly one stack
    symbol and pushes a finite, possibly empty word, leftmost on top.
    Missing entries are the empty set: such runs die.
    """

    def __init__(
        self,
        states,
        input_alphabet,
        stack_alphabet,
        transitions,
        initial,
        stack_init,
        finals=None,
        table: MullerTable | None = None,
    ):
        self.states = frozenset(states)
        self.input_alphabet = frozenset(input_alphabet)
        self.stack_alphabet = frozenset(stack_alphabet)
        self.transitions: dict[tuple, frozenset] = {
            k: frozenset(v) for k, v in dict(transitions).items()
        }
        self.initial = initial
        self.stack_init = stack_init
        if (finals is None) == (table is None):
            raise ValueError("give exactly one of finals= or table=")
        self.finals = None if finals is None else frozenset(finals)
        self.table = table
        if self.initial not in self.states:
            raise ValueError("initial state not declared")
        if self.stack_init not in self.stack_alphabet:
            raise ValueError("initial stack symbol not declared")
        if self.finals is not None and not self.finals <= self.states:
            raise ValueError("final states not declared")
        for (q, a, z), targets in self.transitions.items():
            if q not in self.states or z not in self.stack_alphabet:
                raise ValueError(f"transition from undeclared ({q!r}, {z!r})")
            if a is not None and a not in self.input_alphabet:
                raise ValueError(f"transition on foreign symbol {a!r}")
            for q2, push in targets:
                if q2 not in self.states:
                    raise ValueError(f"transition into undeclared state {q2!r}")
                for sym in push:
                    if sym not in self.stack_alphabet:
                        raise ValueError(f"pushing undeclared stack symbol {sym!r}")

    @property
    def is_buchi(self) -> bool:
        return self.finals is not None

    def rules(self):
        for (q, a, z), targets in self.transitions.items():
            for q2, push in targets:
                yield q, a, z, q2, tuple(push)


class BuchiPDS(PushdownAutomaton):
    """Input-free Buchi pushdown system (every transition reads nothing)."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        if not self.is_buchi:
            raise ValueError("a Buchi pushdown system carries Buchi finals")
        for (_, a, _) in self.transitions:
            if a is not None:
                raise ValueError("Buchi pushdown systems are input-free")


class OmegaKC:
    """A finite union of pairs (U, V) of grammars denoting U.V^omega."""

    def __init__(self, pairs):
        self.pairs: tuple[tuple[Grammar, Grammar], ...] = tuple(
            (u, v) for u, v in pairs
        )
        if not self.pairs:
            raise ValueError("at least one (U, V) pair is required")
        self.alphabet = frozenset().union(
            *(u.terminals | v.terminals for u, v in self.pairs)
        )


def _grammar_rules(g: Grammar, nt_name, state, term_name):
    """PDA rules simulating leftmost derivation of g within one state."""
    rules = {}

    def add(key, target):
        rules.setdefault(key, set()).add(target)

    for lhs, rhs in g.productions:
        push = tuple(
            term_name(i) if isinstance(i, Symbol) else nt_name(i) for i in rhs
        )
        add((state, None, nt_name(lhs)), (state, push))
    for t in g.terminals:
        add((state, t, term_name(t)), (state, ()))
    return rules


def okc_to_bpda(okc: OmegaKC) -> PushdownAutomaton:
    """A Buchi PDA for the union of the U.V^omega components.

    For each component: run a PDA for U down to the bottom marker, then
    loop PDAs for V-words forever, passing a final state at every V-word
    boundary.  Components whose V has no nonempty word are dropped (their
    omega-power is empty).
    """
    z0 = "Z0"
    states = {"sel"}
    stack = {z0}
    transitions: dict[tuple, set] = {}
    finals = set()

    def add(key, target):
        transitions.setdefault(key, set()).add(target)

    def term_name(t: Symbol) -> str:
        return f"t:{t.token}"

    kept = 0
    for i, (u_g, v_g) in enumerate(okc.pairs):
        if not generates_nonempty_word(v_g):
            warnings.warn(
                f"component {i}: V has no nonempty word, dropping the pair",
                stacklevel=2,
            )
            continue
        kept += 1
        qu, qv, qf = f"u{i}", f"v{i}", f"f{i}"
        states |= {qu, qv, qf}
        finals.add(qf)

        def u_name(nt, i=i):
            return f"u{i}:{nt}"

        def v_name(nt, i=i):
            return f"v{i}:{nt}"

        for g, name, q in ((u_g, u_name, qu), (v_g, v_name, qv)):
            for nt in g.nonterminals:
                stack.add(name(nt))
            for t in g.terminals:
                stack.add(term_name(t))
            for key, targets in _grammar_rules(g, name, q, term_name).items():
                for target in targets:
                    add(key, target)
        add(("sel", None, z0), (qu, (u_name(u_g.start), z0)))
        add((qu, None, z0), (qf, (z0,)))
        add((qf, None, z0), (qv, (v_name(v_g.start), z0)))
        add((qv, None, z0), (qf, (z0,)))

    if not kept:
        warnings.warn("all components dropped: the language is empty", stacklevel=2)
    return PushdownAutomaton(
        states, okc.alphabet, stack, transitions, "sel", z0, finals=finals
    )


def buchi_fa_to_bpda(aut: BuchiFA) -> PushdownAutomaton:
    """Embed a finite Buchi automaton as a stack-inert pushdown automaton."""
    z0 = "Z0"
    transitions: dict[tuple, set] = {}
    for (q, s), targets in aut.transitions.items():
        for q2 in targets:
            transitions.setdefault((q, s, z0), set()).add((q2, (z0,)))
    return PushdownAutomaton(
        aut.states, aut.alphabet, {z0}, transitions, aut.initial, z0,
        finals=aut.finals,
    )


def muller_to_buchi_pda(m: PushdownAutomaton) -> PushdownAutomaton:
    """Language-preserving Muller -> Buchi conversion.

    Hit-set tables are inverted directly (they are Buchi conditions in
    Muller clothing).  Explicit tables use guess-and-track: jump, at any
    transition, into a copy that fixes the guessed table member S and
    tracks the visited subset of S with reset-on-full; final on reset.
    """
    if m.is_buchi:
        return m
    if m.table.hits is not None:
        return PushdownAutomaton(
            m.states,
            m.input_alphabet,
            m.stack_alphabet,
            m.transitions,
            m.initial,
            m.stack_init,
            finals=m.table.hits & m.states,
        )

    table = sorted(m.table.explicit, key=lambda s: sorted(map(repr, s)))
    states: set = {("base", q) for q in m.states}
    transitions: dict[tuple, set] = {}
    finals = set()

    def add(key, target):
        transitions.setdefault(key, set()).add(target)

    def tracked(q2, s_idx, vis):
        s_set = table[s_idx]
        vis = vis | {q2}
        if vis == s_set:
            vis = frozenset()
        st = ("track", q2, s_idx, vis)
        states.add(st)
        if not vis:
            finals.add(st)
        return st

    for q, a, z, q2, push in m.rules():
        add((("base", q), a, z), (("base", q2), push))
        for s_idx, s_set in enumerate(table):
            if q2 in s_set:
                add((("base", q), a, z), (tracked(q2, s_idx, frozenset()), push))

    # close the tracked part under reachability
    worklist = [st for st in states if st[0] == "track"]
    seen = set(worklist)
    while worklist:
        st = worklist.pop()
        _, q, s_idx, vis = st
        s_set = table[s_idx]
        for (q1, a, z), targets in m.transitions.items():
            if q1 != q:
                continue
            for q2, push in targets:
                if q2 not in s_set:
                    continue
                st2 = tracked(q2, s_idx, vis)
                add((st, a, z), (st2, push))
                if st2 not in seen:
                    seen.add(st2)
                    worklist.append(st2)

    return PushdownAutomaton(
        states,
        m.input_alphabet,
        m.stack_alphabet,
        transitions,
        ("base", m.initial),
        m.stack_init,
        finals=finals,
    )


def _finals_need_input(p: PushdownAutomaton) -> bool:
    """Does every transition into a final state consume an input symbol?

    When true, visiting finals infinitely often already forces a complete
    run and the product can skip the progress flag.
    """
    for _, a, _, q2, _ in p.rules():
        if a is None and q2 in p.finals:
            return False
    return True


def product_with_lasso(p: PushdownAutomaton, w: LassoWord) -> BuchiPDS:
    """Input-free product of a Buchi PDA with the lasso shape of w.

    Control states are (automaton state, position in the lasso) plus, when
    needed, a progress counter making acceptance require both final visits
    and input consumption infinitely often (complete runs only).
    """
    if not p.is_buchi:
        raise ValueError("product needs a Buchi automaton; convert Muller first")
    u, v = w.prefix, w.period
    total = len(u) + len(v)

    def sym(pos: int) -> Symbol:
        return u[pos] if pos < len(u) else v[pos - len(u)]

    def nxt(pos: int) -> int:
        return pos + 1 if pos + 1 < total else len(u)

    flagless = _finals_need_input(p)

    lam_rules: dict = {}
    inp_rules: dict = {}
    for q, a, z, q2, push in p.rules():
        if a is None:
            lam_rules.setdefault(q, []).append((z, q2, push))
        else:
            inp_rules.setdefault((q, a), []).append((z, q2, push))

    def advance(flag, to_final, consumed):
        base = 0 if flag == 2 else flag
        if base == 0:
            return 1 if to_final else 0
        return 2 if consumed else 1

    if flagless:
        start = (p.initial, 0)
    else:
        start = (p.initial, 0, 0)

    transitions: dict[tuple, set] = {}
    states = {start}
    finals = set()
    worklist = [start]
    while worklist:
        node = worklist.pop()
        q, pos = node[0], node[1]
        moves = []
        for z, q2, push in lam_rules.get(q, ()):
            moves.append((z, q2, push, pos, False))
        for z, q2, push in inp_rules.get((q, sym(pos)), ()):
            moves.append((z, q2, push, nxt(pos), True))
        for z, q2, push, pos2, consumed in moves:
            if flagless:
                node2 = (q2, pos2)
            else:
                node2 = (q2, pos2, advance(node[2], q2 in p.finals, consumed))
            transitions.setdefault((node, None, z), set()).add((node2, push))
            if node2 not in states:
                states.add(node2)
                worklist.append(node2)

    for node in states:
        if flagless:
            if node[0] in p.finals:
                finals.add(node)
        elif node[2] == 2:
            finals.add(node)

    return BuchiPDS(
        states,
        frozenset(),
        p.stack_alphabet,
        transitions,
        start,
        p.stack_init,
        finals=finals,
    )


def _normalized_int_rules(s: PushdownAutomaton):
    """Index states and stack symbols; split pushes longer than 2."""
    state_ids: dict = {}
    sym_ids: dict = {}

    def sid(q):
        if q not in state_ids:
            state_ids[q] = len(state_ids)
        return state_ids[q]

    def zid(z):
        if z not in sym_ids:
            sym_ids[z] = len(sym_ids)
        return sym_ids[z]

    rules = []
    fresh = itertools.count()
    final_flags: dict[int, bool] = {}

    def mark(q, flag):
        i = sid(q)
        if flag:
            final_flags[i] = True
        return i

    for q, _, z, q2, push in s.rules():
        src = mark(q, q in s.finals)
        dst = mark(q2, q2 in s.finals)
        if len(push) <= 2:
            rules.append((src, zid(z), dst, tuple(zid(x) for x in push)))
        else:
            # build the stack bottom-up through fresh intermediate states
            cur_src, cur_z = src, zid(z)
            k = len(push)
            mid = mark(("&push", next(fresh)), False)
            rules.append((cur_src, cur_z, mid, (zid(push[k - 2]), zid(push[k - 1]))))
            for j in range(k - 3, -1, -1):
                nxt_state = dst if j == 0 else mark(("&push", next(fresh)), False)
                rules.append(
                    (mid, zid(push[j + 1]), nxt_state, (zid(push[j]), zid(push[j + 1])))
                )
                mid = nxt_state
    init = (sid(s.initial), zid(s.stack_init))
    is_final = [final_flags.get(i, False) for i in range(len(state_ids))]
    return rules, init, is_final


def buchi_pds_nonempty(s: PushdownAutomaton) -> bool:
    """Can the system run forever from (initial, stack_init) through final
    control states infinitely often?

    Saturation computes pop summaries T[(p, Z)] = {(q, saw_final)} -- the
    states reachable by popping exactly Z, with a flag telling whether some
    final state was passed.  The summaries induce a finite graph on heads
    (state, top symbol); the system is nonempty iff some head reachable
    from the initial head lies on a cycle whose composed run passes a
    final state, i.e. in a strongly connected component with an internal
    flagged edge.  Cycles pump: the run below the head's level is never
    inspected, so the loop repeats forever.
    """
    for (_, a, _) in s.transitions:
        if a is not None:
            raise ValueError("emptiness is decided for input-free systems only")
    rules, init, is_final = _normalized_int_rules(s)

    pop_rules: dict[tuple, list] = {}
    rep_rules: dict[tuple, list] = {}
    push_rules: dict[tuple, list] = {}
    for src, z, dst, push in rules:
        if not push:
            pop_rules.setdefault((src, z), []).append(dst)
        elif len(push) == 1:
            rep_rules.setdefault((src, z), []).append((dst, push[0]))
        else:
            push_rules.setdefault((src, z), []).append((dst, push[0], push[1]))

    # --- pop summaries -------------------------------------------------
    # T[(p, Z)][q] = bitmask over {without final, with final}
    T: dict[tuple, dict[int, int]] = {}
    rep_listeners: dict[tuple, list] = {}   # (r, Y) -> [(p, Z)]
    push1_listeners: dict[tuple, list] = {} # (r, Y) -> [(p, Z, X)]
    mid_listeners: dict[tuple, list] = {}   # (s, X) -> [(p, Z, flag_so_far)]
    worklist: list[tuple] = []

    def t_add(p, z, q, flag):
        bit = 2 if flag else 1
        cell = T.setdefault((p, z), {})
        old = cell.get(q, 0)
        if old & bit:
            return
        cell[q] = old | bit
        worklist.append((p, z, q, flag))

    # listeners are static per rule set; register them all before seeding
    # so every summary flows through the worklist exactly once
    for (p, z), targets in rep_rules.items():
        for r, y in targets:
            rep_listeners.setdefault((r, y), []).append((p, z))
    for (p, z), targets in push_rules.items():
        for r, y, x in targets:
            push1_listeners.setdefault((r, y), []).append((p, z, x))
    for (p, z), dsts in pop_rules.items():
        for q in dsts:
            t_add(p, z, q, is_final[p] or is_final[q])

    registered_mid = set()
    while worklist:
        r, y, q, flag = worklist.pop()
        for p, z in rep_listeners.get((r, y), ()):
            t_add(p, z, q, is_final[p] or flag)
        for p, z, x in push1_listeners.get((r, y), ()):
            part = is_final[p] or flag
            if (q, x, p, z, part) not in registered_mid:
                registered_mid.add((q, x, p, z, part))
                mid_listeners.setdefault((q, x), []).append((p, z, part))
                for q2, mask in list(T.get((q, x), {}).items()):
                    for bit in (1, 2):
                        if mask & bit:
                            t_add(p, z, q2, part or bit == 2)
        for p, z, part in mid_listeners.get((r, y), ()):
            t_add(p, z, q, part or flag)

    # --- head graph ----------------------------------------------------
    edges: dict[tuple, dict[tuple, bool]] = {}

    def e_add(h1, h2, flag):
        cell = edges.setdefault(h1, {})
        cell[h2] = cell.get(h2, False) or flag

    for (p, z), targets in rep_rules.items():
        for r, y in targets:
            e_add((p, z), (r, y), is_final[p] or is_final[r])
    for (p, z), targets in push_rules.items():
        for r, y, x in targets:
            e_add((p, z), (r, y), is_final[p] or is_final[r])
            for q, mask in T.get((r, y), {}).items():
                if mask & 1:
                    e_add((p, z), (q, x), is_final[p])
                if mask & 2:
                    e_add((p, z), (q, x), True)

    # reachable heads from the initial head
    reach = {init}
    stack = [init]
    while stack:
        h = stack.pop()
        for h2 in edges.get(h, ()):
            if h2 not in reach:
                reach.add(h2)
                stack.append(h2)

    # Tarjan SCC (iterative) over the reachable subgraph
    index: dict[tuple, int] = {}
    low: dict[tuple, int] = {}
    on_stack: set = set()
    scc_of: dict[tuple, int] = {}
    scc_count = 0
    counter = itertools.count()
    tstack: list[tuple] = []
    for root in reach:
        if root in index:
            continue
        work = [(root, iter(edges.get(root, ())))]
        index[root] = low[root] = next(counter)
        tstack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for h2 in it:
                if h2 not in reach:
                    continue
                if h2 not in index:
                    index[h2] = low[h2] = next(counter)
                    tstack.append(h2)
                    on_stack.add(h2)
                    work.append((h2, iter(edges.get(h2, ()))))
                    advanced = True
                    break
                if h2 in on_stack:
                    low[node] = min(low[node], index[h2])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                while True:
                    h = tstack.pop()
                    on_stack.discard(h)
                    scc_of[h] = scc_count
                    if h == node:
                        break
                scc_count += 1

    for h1, targets in edges.items():
        if h1 not in reach:
            continue
        for h2, flag in targets.items():
            if flag and h2 in reach and scc_of[h1] == scc_of[h2]:
                return True
    return False


def bpda_member(p: PushdownAutomaton, w: LassoWord) -> bool:
    """Lasso membership: Muller machines are converted, then the product
    with the word is checked for repeated reachability."""
    for s in w.symbols():
        if s not in p.input_alphabet:
            raise ValueError(f"word symbol {s!r} outside the automaton alphabet")
    if not p.is_buchi:
        p = muller_to_buchi_pda(p)
    return buchi_pds_nonempty(product_with_lasso(p, w))


def bpda_union(p1: PushdownAutomaton, p2: PushdownAutomaton) -> PushdownAutomaton:
    """Accept L(p1) | L(p2) by an initial nondeterministic branch."""
    p1 = muller_to_buchi_pda(p1)
    p2 = muller_to_buchi_pda(p2)
    z0 = "Z&"
    states = {("l", q) for q in p1.states} | {("r", q) for q in p2.states} | {"sel&"}
    stack = {("l", z) for z in p1.stack_alphabet} | {("r", z) for z in p2.stack_alphabet}
    stack.add(z0)
    transitions: dict[tuple, set] = {}

    def load(tag, p):
        for q, a, z, q2, push in p.rules():
            key = ((tag, q), a, (tag, z))
            target = ((tag, q2), tuple((tag, x) for x in push))
            transitions.setdefault(key, set()).add(target)

    load("l", p1)
    load("r", p2)
    transitions[("sel&", None, z0)] = {
        (("l", p1.initial), (("l", p1.stack_init),)),
        (("r", p2.initial), (("r", p2.stack_init),)),
    }
    finals = {("l", q) for q in p1.finals} | {("r", q) for q in p2.finals}
    return PushdownAutomaton(
        states,
        p1.input_alphabet | p2.input_alphabet,
        stack,
        transitions,
        "sel&",
        z0,
        finals=finals,
    )


def bpda_intersect_buchi(p: PushdownAutomaton, r: BuchiFA) -> PushdownAutomaton:
    """Synchronous product with a finite Buchi automaton.

    The standard both-see-finals phase counter: phase 0 waits for a final
    of p, phase 1 waits for a final of r, reaching phase 2 is the accepting
    event and resets."""
    p = muller_to_buchi_pda(p)

    def advance(ph, p_fin, r_fin):
        base = 0 if ph == 2 else ph
        if base == 0:
            return 1 if p_fin else 0
        return 2 if r_fin else 1

    states = set()
    transitions: dict[tuple, set] = {}
    start = (p.initial, r.initial, 0)
    states.add(start)
    worklist = [start]
    lam_rules: dict = {}
    inp_rules: dict = {}
    for q, a, z, q2, push in p.rules():
        if a is None:
            lam_rules.setdefault(q, []).append((z, q2, push))
        else:
            inp_rules.setdefault(q, []).append((a, z, q2, push))
    while worklist:
        node = worklist.pop()
        q, s, ph = node
        moves = []
        for z, q2, push in lam_rules.get(q, ()):
            moves.append((None, z, (q2, s), push))
        for a, z, q2, push in inp_rules.get(q, ()):
            for s2 in r.succ(s, a) if a in r.alphabet else ():
                moves.append((a, z, (q2, s2), push))
        for a, z, (q2, s2), push in moves:
            node2 = (q2, s2, advance(ph, q2 in p.finals, s2 in r.finals))
            transitions.setdefault((node, a, z), set()).add((node2, push))
            if node2 not in states:
                states.add(node2)
                worklist.append(node2)
    finals = {n for n in states if n[2] == 2}
    return PushdownAutomaton(
        states,
        p.input_alphabet,
        p.stack_alphabet,
        transitions,
        start,
        p.stack_init,
        finals=finals,
    )
