"""Line-oriented text formats and DOT export.

One format per object kind, all sharing the word token syntax:

grammar     first line ``grammar``, then one production per line
            ``NT -> sym sym ...`` (``eps`` for the empty body).  A token is
            a nonterminal iff it appears on some left-hand side; the start
            symbol is the first production's head.

finite automata    first line ``buchi`` or ``muller``, then ``states:``,
            ``alphabet:``, ``initial:``, and ``finals:`` (Buchi) or
            ``table: {q0 q1} {q1}`` (Muller) headers, then transitions
            ``trans: SRC SYM -> DST [DST ...]``.

pushdown automata  first line ``bpda`` or ``mpda``, headers ``states:``,
            ``alphabet:``, ``stack:``, ``initial:``, ``stackinit:``, then
            ``finals:`` (Buchi), ``table:`` (explicit Muller) or
            ``accept-hits:`` (hit-set Muller), then rules
            ``trans: q, a|eps, Z -> p, PUSHWORD`` (``eps`` pushes nothing).

In-memory state names can be arbitrary values (products build tuples), so
writers rename states that are not plain word-safe tokens; renaming is
deterministic and language-preserving.
"""

from __future__ import annotations

import re

from .cfg import Grammar
from .omega_regular import BuchiFA, MullerFA
from .pushdown import MullerTable, PushdownAutomaton
from .words import Symbol, parse_symbol

_SAFE = re.compile(r"[A-Za-z0-9_.~&:+'-]+")


class ParseError(ValueError):
    def __init__(self, path: str, line: int, message: str):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


def _safe_names(values, prefix: str) -> dict:
    names = {}
    used = set()
    ordered = sorted(values, key=repr)
    for v in ordered:
        if isinstance(v, str) and _SAFE.fullmatch(v) and v not in used:
            names[v] = v
            used.add(v)
    for v in ordered:
        if v in names:
            continue
        i = len(names)
        name = f"{prefix}{i}"
        while name in used:
            i += 1
            name = f"{prefix}{i}"
        names[v] = name
        used.add(name)
    return names


# -- grammars ------------------------------------------------------------------


def grammar_to_text(g: Grammar) -> str:
    lines = ["grammar"]
    ordered = [(g.start, rhs) for lhs, rhs in g.productions if lhs == g.start]
    ordered += [(lhs, rhs) for lhs, rhs in g.productions if lhs != g.start]
    for lhs, rhs in ordered:
        body = " ".join(i if isinstance(i, str) else i.token for i in rhs) or "eps"
        lines.append(f"{lhs} -> {body}")
    used = {i for _, rhs in g.productions for i in rhs if isinstance(i, Symbol)}
    unused = g.terminals - used
    if unused:
        lines.append("terminals: " + " ".join(sorted(s.token for s in unused)))
    return "\n".join(lines) + "\n"


def grammar_from_text(text: str, path: str = "<string>") -> Grammar:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "grammar":
        raise ParseError(path, 1, "expected header line 'grammar'")
    raw = []
    extra_terminals = []
    for no, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("terminals:"):
            extra_terminals.extend(line.split(":", 1)[1].split())
            continue
        if "->" not in line:
            raise ParseError(path, no, "expected 'NT -> body'")
        lhs, _, body = line.partition("->")
        lhs = lhs.strip()
        if not lhs or len(lhs.split()) != 1:
            raise ParseError(path, no, f"bad production head {lhs!r}")
        raw.append((no, lhs, body.split()))
    if not raw:
        raise ParseError(path, 1, "a grammar needs at least one production")
    heads = {lhs for _, lhs, _ in raw}
    prods = []
    for no, lhs, body in raw:
        rhs = []
        for token in body:
            if token == "eps":
                continue
            if token in heads:
                rhs.append(token)
            else:
                try:
                    rhs.append(parse_symbol(token))
                except ValueError as err:
                    raise ParseError(path, no, str(err)) from None
        prods.append((lhs, tuple(rhs)))
    terminals = {i for _, rhs in prods for i in rhs if isinstance(i, Symbol)}
    for token in extra_terminals:
        terminals.add(parse_symbol(token))
    return Grammar(prods, raw[0][1], terminals)


# -- finite automata -----------------------------------------------------------


def fa_to_text(aut) -> str:
    kind = "buchi" if isinstance(aut, BuchiFA) else "muller"
    names = _safe_names(aut.states, "q")
    lines = [kind]
    lines.append("states: " + " ".join(sorted(names.values())))
    lines.append("alphabet: " + " ".join(sorted(s.token for s in aut.alphabet)))
    lines.append(f"initial: {names[aut.initial]}")
    if kind == "buchi":
        lines.append("finals: " + " ".join(sorted(names[q] for q in aut.finals)))
        for (q, s), targets in sorted(
            aut.transitions.items(), key=lambda kv: (names[kv[0][0]], kv[0][1].token)
        ):
            dsts = " ".join(sorted(names[t] for t in targets))
            lines.append(f"trans: {names[q]} {s.token} -> {dsts}")
    else:
        sets = " ".join(
            "{" + " ".join(sorted(names[q] for q in entry)) + "}"
            for entry in sorted(aut.table, key=lambda e: sorted(names[q] for q in e))
        )
        lines.append(f"table: {sets}")
        for (q, s), target in sorted(
            aut.transitions.items(), key=lambda kv: (names[kv[0][0]], kv[0][1].token)
        ):
            lines.append(f"trans: {names[q]} {s.token} -> {names[target]}")
    return "\n".join(lines) + "\n"


def _parse_headers(lines, path, wanted):
    headers = {}
    body = []
    for no, line in enumerate(lines, start=2):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, _, rest = stripped.partition(":")
        if key in wanted and not stripped.startswith("trans"):
            headers[key] = (no, rest.strip())
        elif stripped.startswith("trans:"):
            body.append((no, stripped[len("trans:"):].strip()))
        else:
            raise ParseError(path, no, f"unexpected line {stripped!r}")
    return headers, body


def _parse_table(text: str, path: str, no: int):
    entries = []
    for m in re.finditer(r"\{([^}]*)\}", text):
        entries.append(frozenset(m.group(1).split()))
    if text.strip() and not entries:
        raise ParseError(path, no, "table entries look like {q0 q1}")
    return entries


def fa_from_text(text: str, path: str = "<string>"):
    lines = text.splitlines()
    if not lines:
        raise ParseError(path, 1, "empty file")
    kind = lines[0].strip()
    if kind not in ("buchi", "muller"):
        raise ParseError(path, 1, "expected header 'buchi' or 'muller'")
    wanted = {"states", "alphabet", "initial", "finals", "table"}
    headers, body = _parse_headers(lines[1:], path, wanted)
    for req in ("states", "alphabet", "initial"):
        if req not in headers:
            raise ParseError(path, 1, f"missing '{req}:' header")
    states = set(headers["states"][1].split())
    alphabet = {parse_symbol(t) for t in headers["alphabet"][1].split()}
    initial = headers["initial"][1]
    transitions: dict = {}
    for no, rule in body:
        m = re.fullmatch(r"(\S+)\s+(\S+)\s*->\s*(.+)", rule)
        if not m:
            raise ParseError(path, no, "expected 'trans: SRC SYM -> DST [DST ...]'")
        src, tok, dsts = m.groups()
        sym = parse_symbol(tok)
        if src not in states:
            raise ParseError(path, no, f"undeclared state {src!r}")
        for dst in dsts.split():
            if dst not in states:
                raise ParseError(path, no, f"undeclared state {dst!r}")
            transitions.setdefault((src, sym), set()).add(dst)
    if kind == "buchi":
        finals = set(headers.get("finals", (0, ""))[1].split())
        return BuchiFA(states, alphabet, transitions, initial, finals)
    if "table" not in headers:
        raise ParseError(path, 1, "missing 'table:' header")
    table = _parse_table(headers["table"][1], path, headers["table"][0])
    det = {}
    for (q, s), targets in transitions.items():
        if len(targets) != 1:
            raise ParseError(path, 1, "a Muller automaton must be deterministic")
        det[(q, s)] = next(iter(targets))
    return MullerFA(states, alphabet, det, initial, table)


# -- pushdown automata -----------------------------------------------------------


def pda_to_text(p: PushdownAutomaton) -> str:
    names = _safe_names(p.states, "q")
    znames = _safe_names(p.stack_alphabet, "z")
    lines = ["bpda" if p.is_buchi else "mpda"]
    lines.append("states: " + " ".join(sorted(names.values())))
    lines.append("alphabet: " + " ".join(sorted(s.token for s in p.input_alphabet)))
    lines.append("stack: " + " ".join(sorted(znames.values())))
    lines.append(f"initial: {names[p.initial]}")
    lines.append(f"stackinit: {znames[p.stack_init]}")
    if p.is_buchi:
        lines.append("finals: " + " ".join(sorted(names[q] for q in p.finals)))
    elif p.table.hits is not None:
        lines.append(
            "accept-hits: " + " ".join(sorted(names[q] for q in p.table.hits))
        )
    else:
        sets = " ".join(
            "{" + " ".join(sorted(names[q] for q in entry)) + "}"
            for entry in sorted(
                p.table.explicit, key=lambda e: sorted(names[q] for q in e)
            )
        )
        lines.append(f"table: {sets}")
    rendered = []
    for q, a, z, q2, push in p.rules():
        word = " ".join(znames[x] for x in push) or "eps"
        tok = a.token if a is not None else "eps"
        rendered.append(f"trans: {names[q]}, {tok}, {znames[z]} -> {names[q2]}, {word}")
    lines.extend(sorted(rendered))
    return "\n".join(lines) + "\n"


def pda_from_text(text: str, path: str = "<string>") -> PushdownAutomaton:
    lines = text.splitlines()
    if not lines:
        raise ParseError(path, 1, "empty file")
    kind = lines[0].strip()
    if kind not in ("bpda", "mpda"):
        raise ParseError(path, 1, "expected header 'bpda' or 'mpda'")
    wanted = {"states", "alphabet", "stack", "initial", "stackinit", "finals",
              "table", "accept-hits"}
    headers, body = _parse_headers(lines[1:], path, wanted)
    for req in ("states", "alphabet", "stack", "initial", "stackinit"):
        if req not in headers:
            raise ParseError(path, 1, f"missing '{req}:' header")
    states = set(headers["states"][1].split())
    alphabet = {parse_symbol(t) for t in headers["alphabet"][1].split()}
    stack = set(headers["stack"][1].split())
    initial = headers["initial"][1]
    stack_init = headers["stackinit"][1]
    transitions: dict = {}
    for no, rule in body:
        m = re.fullmatch(r"([^,]+),([^,]+),([^>]+)->([^,]+),(.+)", rule)
        if not m:
            raise ParseError(path, no, "expected 'trans: q, a, Z -> p, PUSHWORD'")
        src, tok, z, dst, word = (part.strip() for part in m.groups())
        if src not in states or dst not in states:
            raise ParseError(path, no, "undeclared state in rule")
        if z not in stack:
            raise ParseError(path, no, f"undeclared stack symbol {z!r}")
        sym = None if tok == "eps" else parse_symbol(tok)
        push = tuple(word.split()) if word != "eps" else ()
        for x in push:
            if x not in stack:
                raise ParseError(path, no, f"undeclared stack symbol {x!r}")
        transitions.setdefault((src, sym, z), set()).add((dst, push))
    if kind == "bpda":
        finals = set(headers.get("finals", (0, ""))[1].split())
        return PushdownAutomaton(
            states, alphabet, stack, transitions, initial, stack_init, finals=finals
        )
    if "accept-hits" in headers:
        table = MullerTable(hits=set(headers["accept-hits"][1].split()))
    elif "table" in headers:
        table = MullerTable(
            explicit=_parse_table(headers["table"][1], path, headers["table"][0])
        )
    else:
        raise ParseError(path, 1, "missing 'table:' or 'accept-hits:' header")
    return PushdownAutomaton(
        states, alphabet, stack, transitions, initial, stack_init, table=table
    )


def load_automaton(text: str, path: str = "<string>"):
    """Dispatch on the header line to the right parser."""
    head = text.splitlines()[0].strip() if text.splitlines() else ""
    if head in ("buchi", "muller"):
        return fa_from_text(text, path)
    if head in ("bpda", "mpda"):
        return pda_from_text(text, path)
    if head == "grammar":
        return grammar_from_text(text, path)
    raise ParseError(path, 1, f"unknown header {head!r}")


# -- DOT export -----------------------------------------------------------------


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(obj) -> str:
    """Control graph of an automaton as graphviz input."""
    out = ["digraph automaton {", "  rankdir=LR;"]
    if isinstance(obj, (BuchiFA, MullerFA)):
        names = _safe_names(obj.states, "q")
        finals = obj.finals if isinstance(obj, BuchiFA) else frozenset()
        for q in sorted(names.values()):
            shape = "doublecircle" if any(
                names[f] == q for f in finals
            ) else "circle"
            out.append(f'  "{_dot_escape(q)}" [shape={shape}];')
        out.append(f'  init [shape=point]; init -> "{_dot_escape(names[obj.initial])}";')
        edges: dict = {}
        items = (
            obj.transitions.items()
            if isinstance(obj, BuchiFA)
            else ((k, {v}) for k, v in obj.transitions.items())
        )
        for (q, s), targets in items:
            for t in targets:
                edges.setdefault((names[q], names[t]), []).append(s.token)
        for (src, dst), labels in sorted(edges.items()):
            label = _dot_escape(",".join(sorted(labels)))
            out.append(f'  "{src}" -> "{dst}" [label="{label}"];')
    elif isinstance(obj, PushdownAutomaton):
        names = _safe_names(obj.states, "q")
        znames = _safe_names(obj.stack_alphabet, "z")
        finals = obj.finals if obj.is_buchi else (
            obj.table.hits if obj.table.hits is not None else frozenset()
        )
        for q in sorted(names.values()):
            shape = "doublecircle" if any(names[f] == q for f in finals) else "circle"
            out.append(f'  "{_dot_escape(q)}" [shape={shape}];')
        out.append(f'  init [shape=point]; init -> "{_dot_escape(names[obj.initial])}";')
        edges: dict = {}
        for q, a, z, q2, push in obj.rules():
            tok = a.token if a is not None else "eps"
            word = " ".join(znames[x] for x in push) or "eps"
            edges.setdefault((names[q], names[q2]), []).append(
                f"{tok},{znames[z]}/{word}"
            )
        for (src, dst), labels in sorted(edges.items()):
            label = _dot_escape("\\n".join(sorted(labels)[:6]))
            if len(labels) > 6:
                label += "\\n..."
            out.append(f'  "{src}" -> "{dst}" [label="{label}"];')
    else:
        raise TypeError(f"no DOT export for {type(obj).__name__}")
    out.append("}")
    return "\n".join(out) + "\n"
