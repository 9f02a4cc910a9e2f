"""Symbols, finite words, and ultimately periodic (lasso) omega-words.

A lasso word ``u | v`` denotes the omega-word u.v.v.v... and is the only
infinite-word representation in this package: every membership question the
package answers is decided on lasso words.

Text syntax (used by the CLI and test fixtures): symbols are whitespace
separated tokens.  ``a`` and ``b`` are the two reserved marker letters,
``alpha beta B C D E`` are the six reserved coding letters, ``~1 ~2 ...``
are erasers of rank 1, 2, ...; any other token is an ordinary base letter.
A lasso word is written ``PREFIX | PERIOD`` (the prefix may be empty), a
finite word is just its tokens, and ``eps`` denotes the empty word.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

BASE = "base"
ERASER = "eraser"
CODING = "coding"
MARKER = "marker"

_CODING_NAMES = ("alpha", "beta", "B", "C", "D", "E")
_MARKER_NAMES = ("a", "b")


@dataclass(frozen=True)
class Symbol:
    """A single alphabet symbol with its kind made explicit.

    Carrying the kind lets alphabet-discipline violations (a coding letter
    used as a base letter, an eraser of rank 0, ...) fail at construction
    time instead of deep inside a construction.
    """

    kind: str
    name: str
    rank: int = 0

    def __post_init__(self):
        if self.kind not in (BASE, ERASER, CODING, MARKER):
            raise ValueError(f"unknown symbol kind {self.kind!r}")
        if self.kind == ERASER:
            if self.rank < 1:
                raise ValueError("eraser rank must be >= 1")
        elif self.rank != 0:
            raise ValueError(f"{self.kind} symbols carry no rank")
        if self.kind == CODING and self.name not in _CODING_NAMES:
            raise ValueError(f"not a coding letter: {self.name!r}")
        if self.kind == MARKER and self.name not in _MARKER_NAMES:
            raise ValueError(f"not a marker letter: {self.name!r}")
        if self.kind == BASE and (
            self.name in _CODING_NAMES
            or self.name in _MARKER_NAMES
            or self.name.startswith("~")
            or self.name in ("eps", "|")
            or not self.name
        ):
            raise ValueError(f"reserved or invalid base-letter name: {self.name!r}")

    @property
    def token(self) -> str:
        return f"~{self.rank}" if self.kind == ERASER else self.name

    def __repr__(self):
        return self.token


def base(name: str) -> Symbol:
    return Symbol(BASE, name)


def eraser(rank: int) -> Symbol:
    return Symbol(ERASER, f"~{rank}", rank)


ALPHA = Symbol(CODING, "alpha")
BETA = Symbol(CODING, "beta")
B = Symbol(CODING, "B")
C = Symbol(CODING, "C")
D = Symbol(CODING, "D")
E = Symbol(CODING, "E")
MARK_A = Symbol(MARKER, "a")
MARK_B = Symbol(MARKER, "b")

CODING_LETTERS = (ALPHA, B, C, D, E, BETA)

#: A finite word is a tuple of symbols; the empty tuple is the empty word.
Word = tuple[Symbol, ...]
EMPTY: Word = ()


def parse_symbol(token: str) -> Symbol:
    if token.startswith("~"):
        try:
            rank = int(token[1:])
        except ValueError:
            raise ValueError(f"bad eraser token {token!r}") from None
        return eraser(rank)
    if token in _CODING_NAMES:
        return Symbol(CODING, token)
    if token in _MARKER_NAMES:
        return Symbol(MARKER, token)
    return base(token)


def parse_word(text: str) -> Word:
    """Parse a finite word; ``eps`` (alone) is the empty word."""
    tokens = text.split()
    if tokens == ["eps"] or not tokens:
        return EMPTY
    return tuple(parse_symbol(t) for t in tokens)


def word_str(w: Word) -> str:
    return " ".join(s.token for s in w) if w else "eps"


def _primitive_root(v: Word) -> Word:
    n = len(v)
    for d in range(1, n + 1):
        if n % d == 0 and v == v[:d] * (n // d):
            return v[:d]
    return v


@dataclass(frozen=True)
class LassoWord:
    """An ultimately periodic omega-word u.v^omega.

    Structural equality (``==``) compares the stored prefix/period pair;
    semantic equality of the denoted omega-words is :func:`lasso_equal`,
    which compares canonical forms.  All builders in this package return
    canonical values, so the two usually coincide.
    """

    prefix: Word
    period: Word

    def __post_init__(self):
        if len(self.period) < 1:
            raise ValueError("lasso period must be nonempty")

    def at(self, i: int) -> Symbol:
        """The i-th letter of the denoted omega-word, 1-based."""
        if i < 1:
            raise ValueError("positions are 1-based")
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        return self.period[(i - len(self.prefix) - 1) % len(self.period)]

    def symbols(self) -> frozenset[Symbol]:
        return frozenset(self.prefix) | frozenset(self.period)

    def unroll(self, length: int) -> Word:
        """The prefix of the denoted omega-word of the given length."""
        w = list(self.prefix)
        while len(w) < length:
            w.extend(self.period)
        return tuple(w[:length])

    def __repr__(self):
        return f"{word_str(self.prefix)} | {word_str(self.period)}"


def normalize(w: LassoWord) -> LassoWord:
    """Canonical form: primitive period, shortest prefix.  Idempotent."""
    period = _primitive_root(w.period)
    prefix = w.prefix
    while prefix and prefix[-1] == period[-1]:
        prefix = prefix[:-1]
        period = period[-1:] + period[:-1]
    return LassoWord(prefix, period)


def lasso(prefix: Word, period: Word) -> LassoWord:
    """Build a canonical lasso word."""
    return normalize(LassoWord(tuple(prefix), tuple(period)))


def lasso_equal(w1: LassoWord, w2: LassoWord) -> bool:
    """Do the two lasso words denote the same omega-word?"""
    return normalize(w1) == normalize(w2)


def prepend(u: Word, w: LassoWord) -> LassoWord:
    return lasso(tuple(u) + w.prefix, w.period)


def drop_prefix(w: LassoWord, m: int) -> LassoWord:
    """The lasso word denoting w with its first m letters removed."""
    if m <= len(w.prefix):
        return lasso(w.prefix[m:], w.period)
    r = (m - len(w.prefix)) % len(w.period)
    return lasso(w.period[r:], w.period)


def parse_lasso(text: str) -> LassoWord:
    """Parse ``PREFIX | PERIOD``; the prefix part may be empty or ``eps``."""
    if "|" not in text:
        raise ValueError("a lasso word needs a '|' between prefix and period")
    pre, _, per = text.partition("|")
    return lasso(parse_word(pre), parse_word(per))


def lasso_str(w: LassoWord) -> str:
    return f"{word_str(w.prefix)} | {word_str(w.period)}"


def equality_check_bound(w1: LassoWord, w2: LassoWord) -> int:
    """Index bound sufficient to decide equality letterwise (for tests)."""
    l = len(w1.period) * len(w2.period) // gcd(len(w1.period), len(w2.period))
    return len(w1.prefix) + len(w2.prefix) + 2 * l
