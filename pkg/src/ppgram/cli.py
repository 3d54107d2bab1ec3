"""Command-line front end.

Subcommands: validate, instantiate, member, enumerate, homogenize,
binarize, adversary, reduce-sat, solve-sat, reduce-factor, factor.

Exit codes: 0 success (domain results like "no" or "unsat" are still
success, reported on stdout), 1 domain failure (validation violations,
unknown symbols, out-of-range settings), 2 usage or parse errors.
All randomized parts take --seed (default 0); identical invocations with
the same seed produce byte-identical output.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import engines, oracles, reductions, textfmt, transforms
from .grammars import (CF, CS, instantiate, render_word, validate)

ADVERSARY_N_GUARD = 14
SOLVE_SAT_VAR_GUARD = 16


class DomainError(Exception):
    """Semantic failure: exit code 1."""


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_grammar(path: str):
    return textfmt.parse_grammar(_read(path))


def _budget(args, word_len: int) -> engines.DerivationBudget:
    length = args.budget_len if args.budget_len else 2 * word_len + 8
    forms = args.budget_forms if args.budget_forms else engines.DEFAULT_MAX_VISITED
    return engines.DerivationBudget(max_form_len=length, max_visited=forms)


def cmd_validate(args) -> int:
    grammar = _load_grammar(args.grammar)
    if args.mode and grammar.mode != args.mode:
        print(f"mode mismatch: file is {grammar.mode}, expected {args.mode}")
        return 1
    report = validate(grammar, allow_heterogeneous=args.allow_heterogeneous)
    if report.ok:
        print("ok")
        return 0
    for violation in report.violations:
        print(violation)
    return 1


def cmd_instantiate(args) -> int:
    grammar = _load_grammar(args.grammar)
    setting = textfmt.parse_setting(args.setting, grammar)
    plain = instantiate(grammar, setting)
    _emit(textfmt.format_plain(plain), args.output)
    return 0


def cmd_member(args) -> int:
    grammar = _load_grammar(args.grammar)
    setting = textfmt.parse_setting(args.setting, grammar)
    plain = instantiate(grammar, setting)
    word = textfmt.parse_word(args.word)
    answer = engines.brute_force_member(plain, word, budget=_budget(args, len(word)))
    print(f"member={answer.verdict}")
    if args.witness and answer.witness is not None:
        print(engines.format_witness(plain, answer.witness))
    return 0


def cmd_enumerate(args) -> int:
    grammar = _load_grammar(args.grammar)
    setting = textfmt.parse_setting(args.setting, grammar)
    plain = instantiate(grammar, setting)
    result = engines.enumerate_language(plain, args.max_len,
                                        budget=_budget(args, args.max_len))
    for word in sorted(result.words, key=lambda w: (len(w), w)):
        print(render_word(word))
    if not result.exact:
        print("# incomplete: derivation budget was exhausted", file=sys.stderr)
    return 0


def _cmd_transform(args, transform) -> int:
    grammar = _load_grammar(args.grammar)
    out_grammar, translation = transform(grammar)
    _emit(textfmt.format_grammar(out_grammar), args.output)
    sidecar = (args.output + ".setting-map") if args.output else None
    _emit(transforms.format_translation(translation), sidecar)
    return 0


def cmd_homogenize(args) -> int:
    return _cmd_transform(args, transforms.homogenize)


def cmd_binarize(args) -> int:
    return _cmd_transform(args, transforms.binarize)


def cmd_adversary(args) -> int:
    if not 1 <= args.n <= ADVERSARY_N_GUARD:
        raise DomainError(f"--n must be in 1..{ADVERSARY_N_GUARD}")
    if args.mode == "literal":
        teacher = oracles.LiteralAdversary(args.n)
    else:
        teacher = oracles.SoundAdversary(args.n)
    bound = 2 ** args.n - 1
    limit = 2 ** args.n + args.n + 8
    run = oracles.run_learner(args.strategy, teacher, limit, seed=args.seed)
    queries = run.transcript.total_queries
    ok = "true" if queries >= bound else "false"
    print(f"N={args.n} strategy={args.strategy} queries={queries} "
          f"bound={bound} ok={ok} outcome={run.outcome}")
    if args.output:
        Path(args.output).write_text(run.transcript.serialize())
    return 0


def cmd_reduce_sat(args) -> int:
    instance = reductions.parse_dimacs(_read(args.cnf), strict_3sat=args.strict_3sat)
    reduction = reductions.sat_to_ppcfg(instance)
    _emit(textfmt.format_grammar(reduction.grammar), args.output)
    return 0


def cmd_solve_sat(args) -> int:
    instance = reductions.parse_dimacs(_read(args.cnf), strict_3sat=args.strict_3sat)
    if instance.num_vars > SOLVE_SAT_VAR_GUARD:
        raise DomainError(
            f"instance has {instance.num_vars} variables; the grammar-side "
            f"search is exhaustive and capped at {SOLVE_SAT_VAR_GUARD}")
    by_grammar = reductions.sat_solve_via_grammar(instance)
    by_dpll = reductions.dpll_solve(instance)
    if (by_grammar is None) != (by_dpll is None):
        raise DomainError("solver disagreement between grammar search and DPLL")
    if by_grammar is None:
        print("sat result=unsat assignment=-")
    else:
        bits = "".join("1" if v else "0" for v in by_grammar.values)
        print(f"sat result=sat assignment={bits or '-'}")
    return 0


def cmd_reduce_factor(args) -> int:
    reduction = reductions.factoring_to_ppcsg(args.n)
    _emit(textfmt.format_grammar(reduction.grammar), args.output)
    return 0


def cmd_factor(args) -> int:
    if args.n < 2:
        raise DomainError("--n must be at least 2")
    pair = reductions.factor_via_ppcsg(args.n)
    if pair is None:
        print(f"factor n={args.n} result=prime-or-unit")
    else:
        print(f"factor n={args.n} p={pair[0]} q={pair[1]}")
    return 0


def _add_budget_flags(sub):
    sub.add_argument("--budget-len", type=int, default=None,
                     help="max sentential form length for cs-mode search")
    sub.add_argument("--budget-forms", type=int, default=None,
                     help="max visited sentential forms")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ppgram",
        description="Parametric grammar workbench: validation, membership, "
                    "transforms, the adversary experiment, and reductions.")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for randomized strategies (default 0)")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("validate", help="check a grammar file")
    sub.add_argument("grammar")
    sub.add_argument("--mode", choices=[CF, CS], default=None,
                     help="require this grammar mode")
    sub.add_argument("--allow-heterogeneous", action="store_true")
    sub.set_defaults(func=cmd_validate)

    sub = subs.add_parser("instantiate", help="apply a parameter setting")
    sub.add_argument("grammar")
    sub.add_argument("--setting", required=True)
    sub.add_argument("-o", "--output", default=None)
    sub.set_defaults(func=cmd_instantiate)

    sub = subs.add_parser("member", help="decide membership of a word")
    sub.add_argument("grammar")
    sub.add_argument("--setting", required=True)
    sub.add_argument("--word", required=True,
                     help="space-separated terminal names; _eps for empty")
    sub.add_argument("--witness", action="store_true",
                     help="print a derivation for yes answers")
    _add_budget_flags(sub)
    sub.set_defaults(func=cmd_member)

    sub = subs.add_parser("enumerate", help="list derivable words up to a length")
    sub.add_argument("grammar")
    sub.add_argument("--setting", required=True)
    sub.add_argument("--max-len", type=int, required=True)
    _add_budget_flags(sub)
    sub.set_defaults(func=cmd_enumerate)

    sub = subs.add_parser("homogenize", help="pad groups to a common arity")
    sub.add_argument("grammar")
    sub.add_argument("-o", "--output", default=None)
    sub.set_defaults(func=cmd_homogenize)

    sub = subs.add_parser("binarize", help="convert arity k>2 to arity 2")
    sub.add_argument("grammar")
    sub.add_argument("-o", "--output", default=None)
    sub.set_defaults(func=cmd_binarize)

    sub = subs.add_parser("adversary", help="run a learner against an adversary")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--strategy", default="exhaustive-equivalence",
                     choices=sorted(oracles.STRATEGIES))
    sub.add_argument("--mode", choices=["literal", "sound"], default="literal")
    sub.add_argument("-o", "--output", default=None,
                     help="write the transcript here")
    sub.set_defaults(func=cmd_adversary)

    sub = subs.add_parser("reduce-sat", help="encode DIMACS CNF as a grammar")
    sub.add_argument("cnf")
    sub.add_argument("--strict-3sat", action="store_true")
    sub.add_argument("-o", "--output", default=None)
    sub.set_defaults(func=cmd_reduce_sat)

    sub = subs.add_parser("solve-sat", help="solve CNF by grammar-side search")
    sub.add_argument("cnf")
    sub.add_argument("--strict-3sat", action="store_true")
    sub.set_defaults(func=cmd_solve_sat)

    sub = subs.add_parser("reduce-factor", help="encode a number as a grammar")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("-o", "--output", default=None)
    sub.set_defaults(func=cmd_reduce_factor)

    sub = subs.add_parser("factor", help="factor a number via the reduction")
    sub.add_argument("--n", type=int, required=True)
    sub.set_defaults(func=cmd_factor)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except textfmt.GrammarFormatError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (engines.UnknownSymbolError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
