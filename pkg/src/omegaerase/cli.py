"""Command-line front end.

Thin wrappers over the library: every subcommand parses its inputs, calls
one core entry point, and prints a plain-text report (one fact per line).
Exit status: 0 = success / true verdict, 1 = false verdict or a mismatch
found, 2 = usage or parse error.  The default seed comes from the
OMEGAERASE_SEED environment variable when set.
"""

from __future__ import annotations

import argparse
import os
import random
import sys

from . import crosscheck as xk
from .cfg import cancellation_grammar, cfg_member, guard_grammar
from .constructions import (
    build_inf_ones_okc,
    build_layered_automaton,
    build_layered_mpda,
    exponentiate_mpda,
    inf_ones_layered_spec,
    iterate_exponentiation,
)
from .erasure import erase_finite, erase_nested, max_rank
from .formats import (
    ParseError,
    fa_to_text,
    grammar_from_text,
    grammar_to_text,
    load_automaton,
    pda_to_text,
    to_dot,
)
from .omega_regular import (
    BuchiFA,
    MullerFA,
    buchi_member,
    build_envelope,
    build_inf_ones,
    muller_member,
)
from .pushdown import PushdownAutomaton, bpda_member, buchi_fa_to_bpda, okc_to_bpda
from .words import eraser, parse_lasso, parse_symbol, parse_word


def _default_seed() -> int:
    try:
        return int(os.environ.get("OMEGAERASE_SEED", "0"))
    except ValueError:
        return 0


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise ParseError(path, 0, str(err)) from None


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_erase(args) -> int:
    if "|" in args.word:
        w = parse_lasso(args.word)
        depth = args.rank if args.rank is not None else max_rank(w)
        print(repr(erase_nested(w, depth)))
    else:
        w = parse_word(args.word)
        rank = args.rank if args.rank is not None else max(
            (s.rank for s in w if s.kind == "eraser"), default=1
        )
        print(repr(erase_finite(w, eraser(rank))))
    return 0


def cmd_member(args) -> int:
    aut = load_automaton(_read(args.aut), args.aut)
    w = parse_lasso(args.word)
    if isinstance(aut, BuchiFA):
        verdict = buchi_member(aut, w)
    elif isinstance(aut, MullerFA):
        verdict = muller_member(aut, w)
    elif isinstance(aut, PushdownAutomaton):
        verdict = bpda_member(aut, w)
    else:
        raise ParseError(args.aut, 1, "not an automaton file")
    print("true" if verdict else "false")
    return 0 if verdict else 1


def cmd_cfg(args) -> int:
    g = grammar_from_text(_read(args.grammar), args.grammar)
    verdict = cfg_member(g, parse_word(args.word))
    print("true" if verdict else "false")
    return 0 if verdict else 1


BUILDERS = {}


def _builder(name):
    def wrap(fn):
        BUILDERS[name] = fn
        return fn
    return wrap


@_builder("cancellation")
def _build_cancellation(args):
    letters = tuple(parse_symbol(t) for t in args.letters.split())
    return cancellation_grammar(letters, eraser(args.depth))


@_builder("guards")
def _build_guards(args):
    return guard_grammar(tuple(parse_symbol(t) for t in args.letters.split()))


@_builder("envelope")
def _build_envelope_aut(args):
    return build_envelope(tuple(parse_symbol(t) for t in args.letters.split()))


@_builder("inf-ones")
def _build_inf_ones_aut(args):
    return build_inf_ones()


@_builder("exp-okc")
def _build_exp_okc(args):
    letters = frozenset(parse_symbol(t) for t in args.letters.split())
    return okc_to_bpda(
        iterate_exponentiation(build_inf_ones_okc(), args.depth, alphabet=letters)
    )


@_builder("exp-mpda")
def _build_exp_mpda(args):
    p = buchi_fa_to_bpda(build_inf_ones())
    for j in range(1, args.depth + 1):
        p = exponentiate_mpda(p, eraser(j))
    return p


@_builder("layered-mpda")
def _build_layered_mpda(args):
    return build_layered_mpda(inf_ones_layered_spec())


@_builder("layered")
def _build_layered(args):
    return build_layered_automaton(inf_ones_layered_spec())


def cmd_build(args) -> int:
    obj = BUILDERS[args.name](args)
    if args.format == "dot":
        _emit(to_dot(obj), args.out)
    elif isinstance(obj, (BuchiFA, MullerFA)):
        _emit(fa_to_text(obj), args.out)
    elif isinstance(obj, PushdownAutomaton):
        _emit(pda_to_text(obj), args.out)
    else:
        _emit(grammar_to_text(obj), args.out)
    return 0


def cmd_crosscheck(args) -> int:
    names = list(xk.SUITES) if args.suites == ["all"] else args.suites
    ok, lines = xk.run_suites(names, args.seed, args.samples)
    for line in lines:
        print(line)
    return 0 if ok else 1


def cmd_sample(args) -> int:
    rng = random.Random(args.seed)
    spec = inf_ones_layered_spec()
    for _ in range(args.count):
        w = xk.sample_layer_word(rng, spec, args.kind)
        print(repr(w))
    return 0


def cmd_export(args) -> int:
    obj = load_automaton(_read(args.infile), args.infile)
    if args.format == "dot":
        _emit(to_dot(obj), args.out)
    elif isinstance(obj, (BuchiFA, MullerFA)):
        _emit(fa_to_text(obj), args.out)
    elif isinstance(obj, PushdownAutomaton):
        _emit(pda_to_text(obj), args.out)
    else:
        _emit(grammar_to_text(obj), args.out)
    return 0


def make_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="omegaerase",
        description="omega-words with backspace erasers: evaluation, "
        "constructions, and cross-validated membership",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("erase", help="evaluate the erasers of a word")
    p.add_argument("--word", required=True, help="finite word or 'PREFIX | PERIOD'")
    p.add_argument("--rank", type=int, default=None,
                   help="nesting depth (default: highest rank present)")
    p.set_defaults(fn=cmd_erase)

    p = sub.add_parser("member", help="lasso-word membership for an automaton file")
    p.add_argument("--aut", required=True)
    p.add_argument("--word", required=True)
    p.set_defaults(fn=cmd_member)

    p = sub.add_parser("cfg", help="finite-word membership for a grammar file")
    p.add_argument("--grammar", required=True)
    p.add_argument("--word", required=True)
    p.set_defaults(fn=cmd_cfg)

    p = sub.add_parser("build", help="materialize a named construction")
    p.add_argument("name", choices=sorted(BUILDERS))
    p.add_argument("--letters", default="0 1",
                   help="plain base letters (default '0 1')")
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("text", "dot"), default="text")
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("crosscheck", help="run cross-validation campaigns")
    p.add_argument("suites", nargs="+",
                   help="suite names or 'all'; known: " + " ".join(sorted(xk.SUITES)))
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(fn=cmd_crosscheck)

    p = sub.add_parser("sample", help="print seeded sample words")
    p.add_argument("--kind", choices=("uniform", "member", "guard", "nonenvelope"),
                   default="uniform")
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--count", type=int, default=10)
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("export", help="re-emit an automaton or grammar file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--format", choices=("text", "dot"), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_export)
    return top


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
