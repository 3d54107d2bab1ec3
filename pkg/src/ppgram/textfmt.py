"""Line-oriented text format for parametric grammars, plus CLI literals.

Layout (one grammar per file)::

    ppcfg                              # or: ppcsg
    nonterminals: START X1 X2
    terminals: 0 1
    start: START
    group 1: START -> X1 X2 | START -> X1 X2
    group 2: X1 -> 0 | X1 -> 1

``_eps`` stands for an empty right-hand side.  Group ids must be 1..n in
order.  CS-mode files may put several symbols on a left-hand side.  Symbol
names may use letters, digits and ``_ . # -`` (so fresh names produced by
the transforms round-trip).

Plain (instantiated) grammars are written in the same format with one
alternative per group, which keeps every emitted file valid input for the
``validate`` command.
"""

from __future__ import annotations

import re

from .grammars import (CF, CS, EPSILON_TOKEN, ParameterSetting, PlainGrammar,
                       PPCFG, Production, ProductionGroup, SymbolTable, Word)

_NAME_RE = re.compile(r"^[A-Za-z0-9_.#-]+$")
_MODES = {"ppcfg": CF, "ppcsg": CS}
_MODE_NAMES = {CF: "ppcfg", CS: "ppcsg"}


class GrammarFormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _check_names(names, lineno):
    for name in names:
        if not _NAME_RE.match(name):
            raise GrammarFormatError(lineno, f"bad symbol name {name!r}")
        if name == EPSILON_TOKEN:
            raise GrammarFormatError(
                lineno, f"{EPSILON_TOKEN} is reserved and cannot be declared")
    return names


def _parse_side(text: str, lineno: int, *, allow_eps: bool) -> Word:
    tokens = text.split()
    if not tokens:
        raise GrammarFormatError(lineno, "empty symbol sequence")
    if tokens == [EPSILON_TOKEN]:
        if allow_eps:
            return ()
        raise GrammarFormatError(lineno, f"{EPSILON_TOKEN} not allowed here")
    if EPSILON_TOKEN in tokens:
        raise GrammarFormatError(
            lineno, f"{EPSILON_TOKEN} must stand alone as an entire rhs")
    return tuple(tokens)


def _parse_production(text: str, lineno: int) -> Production:
    if "->" not in text:
        raise GrammarFormatError(lineno, f"missing '->' in {text.strip()!r}")
    lhs_text, rhs_text = text.split("->", 1)
    lhs = _parse_side(lhs_text, lineno, allow_eps=False)
    rhs = _parse_side(rhs_text, lineno, allow_eps=True)
    return Production(lhs, rhs)


def parse_grammar(text: str) -> PPCFG:
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(no, ln) for no, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise GrammarFormatError(1, "empty grammar file")

    (no, head), rest = lines[0], lines[1:]
    if head not in _MODES:
        raise GrammarFormatError(no, f"expected 'ppcfg' or 'ppcsg', got {head!r}")
    mode = _MODES[head]

    fields = {}
    body = []
    for no, ln in rest:
        key, _, value = ln.partition(":")
        key = key.strip()
        if key in ("nonterminals", "terminals", "start") and key not in fields:
            fields[key] = (no, value.strip())
        else:
            body.append((no, ln))
    for key in ("nonterminals", "terminals", "start"):
        if key not in fields:
            raise GrammarFormatError(lines[-1][0], f"missing '{key}:' line")

    no, value = fields["nonterminals"]
    nonterminals = frozenset(_check_names(value.split(), no))
    no, value = fields["terminals"]
    terminals = frozenset(_check_names(value.split(), no))
    no, value = fields["start"]
    start_tokens = value.split()
    if len(start_tokens) != 1:
        raise GrammarFormatError(no, "start must be a single symbol")
    start = start_tokens[0]

    groups = []
    for no, ln in body:
        m = re.match(r"^group\s+(\d+)\s*:\s*(.*)$", ln)
        if not m:
            raise GrammarFormatError(no, f"expected a 'group <id>:' line, got {ln!r}")
        gid = int(m.group(1))
        if gid != len(groups) + 1:
            raise GrammarFormatError(
                no, f"group id {gid} out of order (expected {len(groups) + 1})")
        alts = [a for a in m.group(2).split("|")]
        groups.append(ProductionGroup(
            tuple(_parse_production(a, no) for a in alts)))

    return PPCFG(SymbolTable(nonterminals, terminals), tuple(groups), start, mode)


def _format_production(prod: Production) -> str:
    rhs = " ".join(prod.rhs) if prod.rhs else EPSILON_TOKEN
    return f"{' '.join(prod.lhs)} -> {rhs}"


def format_grammar(grammar: PPCFG) -> str:
    lines = [_MODE_NAMES[grammar.mode]]
    lines.append("nonterminals: " + " ".join(sorted(grammar.symbols.nonterminals)))
    lines.append("terminals: " + " ".join(sorted(grammar.symbols.terminals)))
    lines.append(f"start: {grammar.start}")
    for gi, group in enumerate(grammar.groups, start=1):
        alts = " | ".join(_format_production(p) for p in group.alternatives)
        lines.append(f"group {gi}: {alts}")
    return "\n".join(lines) + "\n"


def plain_as_grammar(plain: PlainGrammar) -> PPCFG:
    """View an instantiated grammar as a one-alternative-per-group grammar."""
    groups = tuple(ProductionGroup((rule,)) for rule in plain.rules)
    return PPCFG(plain.symbols, groups, plain.start, plain.mode)


def format_plain(plain: PlainGrammar) -> str:
    return format_grammar(plain_as_grammar(plain))


def parse_setting(text: str, grammar: PPCFG) -> ParameterSetting:
    """Parse a CLI setting literal.

    Comma-separated 1-based indices always work.  For arity-2 grammars a
    bit string is accepted too (bit '0' means choice 1): its length must be
    either the total group count or the number of choice-bearing groups, in
    which case padded groups are pinned to choice 1.
    """
    text = text.strip()
    if "," in text:
        try:
            return ParameterSetting(tuple(int(t) for t in text.split(",")))
        except ValueError:
            raise ValueError(f"bad setting literal {text!r}") from None
    if set(text) <= {"0", "1"} and text and grammar.k == 2:
        if len(text) == grammar.n:
            return ParameterSetting.from_bits(text)
        choice = grammar.choice_group_indices()
        if len(text) == len(choice):
            choices = [1] * grammar.n
            for bit, gi in zip(text, choice):
                choices[gi] = 1 + int(bit)
            return ParameterSetting(tuple(choices))
        raise ValueError(
            f"bit setting of length {len(text)} matches neither the group "
            f"count ({grammar.n}) nor the choice-group count ({len(choice)})")
    try:
        return ParameterSetting((int(text),))
    except ValueError:
        raise ValueError(f"bad setting literal {text!r}") from None


def parse_word(text: str) -> Word:
    """Words on the CLI are space-separated terminal names; _eps is empty."""
    tokens = text.split()
    if tokens == [EPSILON_TOKEN]:
        return ()
    return tuple(tokens)
