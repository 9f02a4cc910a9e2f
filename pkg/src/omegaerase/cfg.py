"""Context-free grammars: membership, closure operations, and the concrete
finitary languages used by the omega-word constructions.

Nonterminals are plain strings, terminals are :class:`~omegaerase.words.Symbol`
values; a production right-hand side mixes the two and the type tells them
apart.  Membership is decided by CYK on a binary normal form computed once
at construction time (grammars are immutable afterwards), with the empty
word tracked by a nullable-start flag since normal forms drop it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

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
    CODING_LETTERS,
    Symbol,
    Word,
)

RhsItem = "str | Symbol"
Production = tuple[str, tuple]


class Grammar:
    def __init__(self, productions, start: str, terminals=None):
        prods = []
        for lhs, rhs in productions:
            prods.append((lhs, tuple(rhs)))
        self.productions: tuple[Production, ...] = tuple(prods)
        self.start = start
        nts = {lhs for lhs, _ in prods} | {start}
        seen_terminals = set()
        for _, rhs in prods:
            for item in rhs:
                if isinstance(item, Symbol):
                    seen_terminals.add(item)
                else:
                    nts.add(item)
        self.nonterminals = frozenset(nts)
        if terminals is None:
            self.terminals = frozenset(seen_terminals)
        else:
            self.terminals = frozenset(terminals)
            if not seen_terminals <= self.terminals:
                raise ValueError("production uses an undeclared terminal")
        self._build_cnf()

    def __repr__(self):
        lines = [f"start: {self.start}"]
        for lhs, rhs in self.productions:
            body = " ".join(i if isinstance(i, str) else i.token for i in rhs) or "eps"
            lines.append(f"{lhs} -> {body}")
        return "\n".join(lines)

    # -- normal form ---------------------------------------------------

    def _build_cnf(self):
        """CYK tables: unit terminal productions and binary productions."""
        useful = _useful_productions(self.productions, self.start)
        nullable = _nullable_set(useful)
        self.accepts_empty = self.start in nullable

        expanded = set()
        for lhs, rhs in useful:
            nullable_positions = [
                i for i, item in enumerate(rhs) if isinstance(item, str) and item in nullable
            ]
            for keep_mask in itertools.product((True, False), repeat=len(nullable_positions)):
                drop = {p for p, keep in zip(nullable_positions, keep_mask) if not keep}
                new_rhs = tuple(item for i, item in enumerate(rhs) if i not in drop)
                if new_rhs:
                    expanded.add((lhs, new_rhs))

        # unit closure: A =>* B through chains of single-nonterminal rules
        unit_next = {}
        for lhs, rhs in expanded:
            if len(rhs) == 1 and isinstance(rhs[0], str):
                unit_next.setdefault(lhs, set()).add(rhs[0])
        reach = {nt: {nt} for nt in self.nonterminals}
        changed = True
        while changed:
            changed = False
            for nt in reach:
                new = set()
                for m in reach[nt]:
                    new |= unit_next.get(m, set())
                if not new <= reach[nt]:
                    reach[nt] |= new
                    changed = True

        term_prods: dict[Symbol, set[str]] = {}
        long_prods = []
        for lhs, rhs in expanded:
            if len(rhs) == 1 and isinstance(rhs[0], str):
                continue
            heads = [nt for nt in self.nonterminals if lhs in reach[nt]]
            if len(rhs) == 1:
                for head in heads:
                    term_prods.setdefault(rhs[0], set()).add(head)
            else:
                for head in heads:
                    long_prods.append((head, rhs))

        # TERM + BIN with fresh helper nonterminals
        bin_prods: dict[tuple[str, str], set[str]] = {}
        counter = itertools.count()
        sym_nt: dict[Symbol, str] = {}

        def as_nt(item) -> str:
            if isinstance(item, str):
                return item
            if item not in sym_nt:
                name = f"&t{next(counter)}"
                sym_nt[item] = name
                term_prods.setdefault(item, set()).add(name)
            return sym_nt[item]

        for lhs, rhs in long_prods:
            parts = [as_nt(item) for item in rhs]
            while len(parts) > 2:
                helper = f"&b{next(counter)}"
                bin_prods.setdefault((parts[-2], parts[-1]), set()).add(helper)
                parts = parts[:-2] + [helper]
            bin_prods.setdefault((parts[0], parts[1]), set()).add(lhs)

        self._term_prods = {sym: frozenset(v) for sym, v in term_prods.items()}
        self._bin_by_left: dict[str, list[tuple[str, str]]] = {}
        for (left, right), heads in bin_prods.items():
            self._bin_by_left.setdefault(left, []).append((right, tuple(heads)))

    def _cyk_table(self, x: Word):
        n = len(x)
        table = [[frozenset() for _ in range(n + 1)] for _ in range(n)]
        for i, s in enumerate(x):
            table[i][i + 1] = self._term_prods.get(s, frozenset())
        for span in range(2, n + 1):
            for i in range(0, n - span + 1):
                k = i + span
                cell = set()
                for j in range(i + 1, k):
                    left_cell = table[i][j]
                    if not left_cell:
                        continue
                    right_cell = table[j][k]
                    if not right_cell:
                        continue
                    for left in left_cell:
                        for right, heads in self._bin_by_left.get(left, ()):
                            if right in right_cell:
                                cell.update(heads)
                table[i][k] = frozenset(cell)
        return table

    def member(self, x: Word) -> bool:
        for s in x:
            if s not in self.terminals:
                raise ValueError(f"symbol {s!r} is not a terminal of this grammar")
        if not x:
            return self.accepts_empty
        return self.start in self._cyk_table(x)[0][len(x)]

    def member_spans(self, x: Word) -> set[tuple[int, int]]:
        """All (i, j) with x[i:j] in the language, foreign symbols allowed
        (spans containing them are simply never members).  One CYK pass."""
        n = len(x)
        spans = set()
        if self.accepts_empty:
            spans.update((i, i) for i in range(n + 1))
        table = self._cyk_table(x)
        for i in range(n):
            for j in range(i + 1, n + 1):
                if self.start in table[i][j]:
                    spans.add((i, j))
        return spans


def _nullable_set(productions) -> set[str]:
    nullable: set[str] = set()
    changed = True
    while changed:
        changed = False
        for lhs, rhs in productions:
            if lhs not in nullable and all(
                isinstance(i, str) and i in nullable for i in rhs
            ):
                nullable.add(lhs)
                changed = True
    return nullable


def _useful_productions(productions, start):
    """Keep only productions whose symbols generate and are reachable."""
    generating: set[str] = set()
    changed = True
    while changed:
        changed = False
        for lhs, rhs in productions:
            if lhs not in generating and all(
                isinstance(i, Symbol) or i in generating for i in rhs
            ):
                generating.add(lhs)
                changed = True
    kept = [
        (lhs, rhs)
        for lhs, rhs in productions
        if lhs in generating
        and all(isinstance(i, Symbol) or i in generating for i in rhs)
    ]
    reachable = {start}
    changed = True
    while changed:
        changed = False
        for lhs, rhs in kept:
            if lhs in reachable:
                for i in rhs:
                    if isinstance(i, str) and i not in reachable:
                        reachable.add(i)
                        changed = True
    return [(lhs, rhs) for lhs, rhs in kept if lhs in reachable]


def cfg_member(g: Grammar, x: Word) -> bool:
    return g.member(x)


def generates_nonempty_word(g: Grammar) -> bool:
    """Does the grammar derive at least one word of length >= 1?"""
    generating: set[str] = set()
    changed = True
    while changed:
        changed = False
        for lhs, rhs in g.productions:
            if lhs not in generating and all(
                isinstance(i, Symbol) or i in generating for i in rhs
            ):
                generating.add(lhs)
                changed = True
    if g.start not in generating:
        return False
    fruitful: set[str] = set()
    changed = True
    while changed:
        changed = False
        for lhs, rhs in g.productions:
            if lhs in fruitful or lhs not in generating:
                continue
            if not all(isinstance(i, Symbol) or i in generating for i in rhs):
                continue
            if any(isinstance(i, Symbol) or i in fruitful for i in rhs):
                fruitful.add(lhs)
                changed = True
    return g.start in fruitful


def _renamed(g: Grammar, tag: str):
    ren = {nt: f"{tag}:{nt}" for nt in g.nonterminals}
    prods = [
        (ren[lhs], tuple(ren[i] if isinstance(i, str) else i for i in rhs))
        for lhs, rhs in g.productions
    ]
    return prods, ren[g.start]


def _compact(productions, start, terminals=None) -> Grammar:
    """Rebuild with short sequential nonterminal names."""
    names: dict[str, str] = {}

    def short(nt: str) -> str:
        if nt not in names:
            names[nt] = f"G{len(names)}"
        return names[nt]

    short(start)
    prods = [
        (short(lhs), tuple(short(i) if isinstance(i, str) else i for i in rhs))
        for lhs, rhs in productions
    ]
    return Grammar(prods, short(start), terminals)


def substitute(g: Grammar, sub: dict[Symbol, Grammar]) -> Grammar:
    """Replace every terminal occurrence by the language of sub[terminal].

    The identity substitution must be passed explicitly: a terminal of g
    without an entry in sub is an error.
    """
    for t in g.terminals:
        if t not in sub:
            raise ValueError(f"no substitution entry for terminal {t!r}")
    prods = []
    starts: dict[Symbol, str] = {}
    terminals = set()
    for i, (t, sg) in enumerate(sub.items()):
        sub_prods, sub_start = _renamed(sg, f"s{i}")
        prods.extend(sub_prods)
        starts[t] = sub_start
        terminals |= sg.terminals
    main_prods, main_start = _renamed(g, "m")
    for lhs, rhs in main_prods:
        prods.append(
            (lhs, tuple(starts[i] if isinstance(i, Symbol) else i for i in rhs))
        )
    return _compact(prods, main_start, terminals)


def concat(g1: Grammar, g2: Grammar) -> Grammar:
    p1, s1 = _renamed(g1, "l")
    p2, s2 = _renamed(g2, "r")
    prods = [("S&", (s1, s2))] + p1 + p2
    return _compact(prods, "S&", g1.terminals | g2.terminals)


def union(g1: Grammar, g2: Grammar) -> Grammar:
    p1, s1 = _renamed(g1, "l")
    p2, s2 = _renamed(g2, "r")
    prods = [("S&", (s1,)), ("S&", (s2,))] + p1 + p2
    return _compact(prods, "S&", g1.terminals | g2.terminals)


def single_word_grammar(w: Word, terminals=None) -> Grammar:
    return Grammar([("S", tuple(w))], "S", terminals)


class DFA:
    """Total deterministic finite automaton over finite words."""

    def __init__(self, states, alphabet, delta, initial, finals):
        self.states = frozenset(states)
        self.alphabet = frozenset(alphabet)
        self.delta = dict(delta)
        self.initial = initial
        self.finals = frozenset(finals)
        if initial not in self.states or not self.finals <= self.states:
            raise ValueError("initial/final states must be declared states")
        for q in self.states:
            for s in self.alphabet:
                if (q, s) not in self.delta:
                    raise ValueError(f"missing transition ({q!r}, {s!r})")
                if self.delta[(q, s)] not in self.states:
                    raise ValueError("transition target not a declared state")

    def accepts(self, x: Word) -> bool:
        q = self.initial
        for s in x:
            q = self.delta[(q, s)]
        return q in self.finals


def intersect_dfa(g: Grammar, dfa: DFA) -> Grammar:
    """Bar-Hillel style triple construction on the binary normal form."""
    tstart = "S&"
    prods: list[Production] = []
    states = sorted(dfa.states, key=repr)

    def triple(p, nt, q) -> str:
        return f"{p}.{nt}.{q}"

    for sym, heads in g._term_prods.items():
        if sym not in dfa.alphabet:
            continue
        for p in states:
            q = dfa.delta[(p, sym)]
            for head in heads:
                prods.append((triple(p, head, q), (sym,)))
    for left, pairs in g._bin_by_left.items():
        for right, heads in pairs:
            for p in states:
                for r in states:
                    for q in states:
                        for head in heads:
                            prods.append(
                                (
                                    triple(p, head, q),
                                    (triple(p, left, r), triple(r, right, q)),
                                )
                            )
    for f in dfa.finals:
        prods.append((tstart, (triple(dfa.initial, g.start, f),)))
    if g.accepts_empty and dfa.initial in dfa.finals:
        prods.append((tstart, ()))
    return _compact(prods, tstart, g.terminals & dfa.alphabet)


# -- concrete languages ----------------------------------------------------


def cancellation_grammar(letters, e: Symbol) -> Grammar:
    """Finite words over letters + e that erase to the empty word.

    Productions  S -> c S e S  (one per letter c)  and  S -> eps.
    """
    if e.kind != ERASER:
        raise ValueError(f"not an eraser: {e!r}")
    letters = tuple(letters)
    if e in letters:
        raise ValueError("the eraser cannot be one of the ordinary letters")
    prods = [("S", (c, "S", e, "S")) for c in letters]
    prods.append(("S", ()))
    return Grammar(prods, "S", frozenset(letters) | {e})


def full_coded_alphabet(base_letters) -> frozenset[Symbol]:
    """base letters + markers a, b + the six coding letters."""
    return frozenset(base_letters) | {MARK_A, MARK_B} | set(CODING_LETTERS)


def guard_grammar(base_letters) -> Grammar:
    """Words exposing a malformed or out-of-range eraser code.

    The union of seven components over the coded alphabet: for each coding
    letter X in B, C, D, E the words  a^n b u X^j  with j > n >= 1, and for
    each adjacent block pair of a trailing complete group
    alpha B^j C^k D^l E^m beta  the words whose two counts differ.
    """
    alphabet = full_coded_alphabet(base_letters)
    prods: list[Production] = [("U", ())]
    for x in sorted(alphabet, key=lambda s: s.token):
        prods.append(("U", (x, "U")))

    for x in (B, C, D, E):
        t = x.token
        prods.append(("L", (f"TOP{t}",)))
        prods.append((f"TOP{t}", (MARK_A, f"IN{t}", x)))
        prods.append((f"IN{t}", (MARK_A, f"IN{t}", x)))
        prods.append((f"IN{t}", (MARK_B, "U", f"PLUS{t}")))

    for x in (B, C, D, E):
        t = x.token
        prods.append((f"PLUS{t}", (x, f"PLUS{t}")))
        prods.append((f"PLUS{t}", (x,)))
        prods.append((f"STAR{t}", (x, f"STAR{t}")))
        prods.append((f"STAR{t}", ()))

    for left, right, mid in ((B, C, "NEQBC"), (C, D, "NEQCD"), (D, E, "NEQDE")):
        lt, rt = left.token, right.token
        prods.append((mid, (left, f"{mid}I", right)))
        prods.append((f"{mid}I", (left, f"{mid}I", right)))
        prods.append((f"{mid}I", (left, f"STAR{lt}")))
        prods.append((f"{mid}I", (f"STAR{rt}", right)))

    prods.append(("L", ("U", ALPHA, "NEQBC", "PLUSD", "PLUSE", BETA)))
    prods.append(("L", ("U", ALPHA, "PLUSB", "NEQCD", "PLUSE", BETA)))
    prods.append(("L", ("U", ALPHA, "PLUSB", "PLUSC", "NEQDE", BETA)))
    return Grammar(prods, "L", alphabet)


def guard_member_direct(x: Word) -> bool:
    """Pattern-matching decision equivalent to the guard grammar.

    Counts the leading a-block, the trailing coding-letter run, and parses
    a trailing complete group back to front; independent of the grammar
    route on purpose (the two are cross-validated).
    """
    n = 0
    while n < len(x) and x[n] == MARK_A:
        n += 1
    prefix_ok = n >= 1 and n < len(x) and x[n] == MARK_B
    if prefix_ok and x and x[-1] in (B, C, D, E):
        run = 1
        while run < len(x) and x[-run - 1] == x[-1]:
            run += 1
        if run > n:
            return True
    if x and x[-1] == BETA:
        i = len(x) - 1
        counts = []
        for letter in (E, D, C, B):
            c = 0
            while i - 1 >= 0 and x[i - 1] == letter:
                i -= 1
                c += 1
            counts.append(c)
        m, l, k, j = counts
        if min(j, k, l, m) >= 1 and i - 1 >= 0 and x[i - 1] == ALPHA:
            if j != k or k != l or l != m:
                return True
    return False
