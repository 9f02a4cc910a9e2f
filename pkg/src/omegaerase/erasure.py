"""Backspace evaluation of words containing erasers.

An eraser symbol evaluates as a backspace: read left to right, every
ordinary symbol is appended to a survivor sequence and every occurrence of
the designated eraser removes the last survivor.  An eraser arriving at an
empty survivor sequence makes the whole evaluation undefined.  On infinite
words the result is the limit of the finite-stage results under prefix
stabilization, which may be finite or infinite.

Convention note: we treat underflow strictly — ``(x ~1 ~1)^omega`` is
undefined, because the second eraser of the first period already arrives at
an empty survivor sequence.  A laxer reading that lets later letters repair
an early underflow would call this the empty word; we document the choice
here and keep the strict rule everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

from .words import ERASER, LassoWord, Symbol, Word, eraser, lasso, word_str, lasso_str

UNDEFINED_TAG = "undefined"
FINITE_TAG = "finite"
INFINITE_TAG = "infinite"


@dataclass(frozen=True)
class EraseOutcome:
    """Result of an erasure: undefined, a finite word, or a lasso word."""

    tag: str
    finite_word: Word | None = None
    infinite_word: LassoWord | None = None

    @property
    def is_undefined(self) -> bool:
        return self.tag == UNDEFINED_TAG

    @property
    def is_finite(self) -> bool:
        return self.tag == FINITE_TAG

    @property
    def is_infinite(self) -> bool:
        return self.tag == INFINITE_TAG

    def __repr__(self):
        if self.is_undefined:
            return "undefined"
        if self.is_finite:
            return f"finite: {word_str(self.finite_word)}"
        return f"infinite: {lasso_str(self.infinite_word)}"


UNDEFINED = EraseOutcome(UNDEFINED_TAG)


def finite(w: Word) -> EraseOutcome:
    return EraseOutcome(FINITE_TAG, finite_word=tuple(w))


def infinite(w: LassoWord) -> EraseOutcome:
    return EraseOutcome(INFINITE_TAG, infinite_word=w)


def erase_finite(x: Word, e: Symbol) -> EraseOutcome:
    """Evaluate the eraser e over a finite word.  Never Infinite.

    Symbols other than e (including erasers of other ranks) are ordinary
    letters.  Undefined is a value, not an error.
    """
    if e.kind != ERASER:
        raise ValueError(f"not an eraser: {e!r}")
    survivors: list[Symbol] = []
    for s in x:
        if s == e:
            if not survivors:
                return UNDEFINED
            survivors.pop()
        else:
            survivors.append(s)
    return finite(tuple(survivors))


def _period_effect(v: Word, e: Symbol) -> tuple[int, Word]:
    """Net effect of one period on a tall survivor stack: pop d, push s.

    Pops never inspect what they pop, so the effect of one period on any
    stack of height >= d is the same fixed pair (d, s).
    """
    net = 0
    low = 0
    for s in v:
        net += -1 if s == e else 1
        low = min(low, net)
    d = -low
    stack: list[Symbol | None] = [None] * d
    for s in v:
        if s == e:
            stack.pop()
        else:
            stack.append(s)
    assert all(s is not None for s in stack)
    return d, tuple(stack)  # type: ignore[arg-type]


def erase_lasso(x: LassoWord, e: Symbol) -> EraseOutcome:
    """Evaluate the eraser e over a lasso word.

    The limit is computed exactly from the per-period effect (pop d symbols,
    push the fixed word s):

    * an underflow while reading the prefix, or any period applied to a
      stack shorter than d, makes some finite stage undefined and poisons
      the whole limit;
    * ``len(s) > d``: the stack grows forever and the limit is the lasso
      word  base . g^omega  with base the untouched part of the prefix
      survivors and g the part of s below each later period's low-water
      mark;
    * ``len(s) == d``: the stack top is rebuilt and re-eaten every period,
      so exactly the part below the low-water mark stabilizes (finite);
    * ``len(s) < d``: the stack drains and some period eventually
      underflows (undefined).
    """
    if e.kind != ERASER:
        raise ValueError(f"not an eraser: {e!r}")
    survivors: list[Symbol] = []
    for s in x.prefix:
        if s == e:
            if not survivors:
                return UNDEFINED
            survivors.pop()
        else:
            survivors.append(s)
    d, pushed = _period_effect(x.period, e)
    h = len(survivors)
    if h < d:
        return UNDEFINED
    if len(pushed) < d:
        return UNDEFINED
    if len(pushed) == d:
        return finite(tuple(survivors[: h - d]))
    growth = pushed[: len(pushed) - d] if d else pushed
    return infinite(lasso(tuple(survivors[: h - d]), growth))


def max_rank(x: LassoWord) -> int:
    return max((s.rank for s in x.symbols() if s.kind == ERASER), default=0)


def erase_nested(x: LassoWord, n: int) -> EraseOutcome:
    """Iterated erasure with erasers of ranks n, n-1, ..., 1, in that order.

    During the rank-j stage, erasers of rank < j are ordinary letters.  A
    stage that comes out Undefined or Finite is returned immediately: a
    finite intermediate can never make the word a member of an
    omega-language, and later stages of the iteration are defined on
    omega-words only.  n = 0 is the identity embedding.
    """
    if n < 0:
        raise ValueError("nesting depth must be >= 0")
    if max_rank(x) > n:
        raise ValueError(f"word contains an eraser of rank > {n}")
    current = x
    for j in range(n, 0, -1):
        outcome = erase_lasso(current, eraser(j))
        if not outcome.is_infinite:
            return outcome
        current = outcome.infinite_word
    return infinite(current)


def nested_erasure_member(x: LassoWord, aut, n: int) -> bool:
    """Is x in the n-fold erasure preimage of the automaton's language?

    True iff the nested erasure of x is infinite and the resulting
    omega-word is accepted by aut (a finite Buchi automaton).
    """
    from .omega_regular import buchi_member

    outcome = erase_nested(x, n)
    if not outcome.is_infinite:
        return False
    return buchi_member(aut, outcome.infinite_word)
