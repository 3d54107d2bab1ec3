"""Core grammar types: production groups, parameter settings, instantiation.

A parametric grammar is an ordinary grammar whose rule set is not fixed:
the productions are organized into groups, and picking one alternative per
group (a "parameter setting") instantiates a plain grammar.  Two modes are
supported:

* ``cf``   -- every left-hand side is a single nonterminal (context-free)
* ``cs``   -- left-hand sides may be arbitrary nonempty symbol strings
              containing at least one nonterminal (general rewriting; this
              is deliberately laxer than the textbook noncontracting
              definition, because the factoring construction needs a
              contracting rule).

All values here are immutable and hashable; operations are pure functions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional

# Reserved token used by the text format (and CLI) for an empty right-hand
# side.  It is not a symbol: internally an empty rhs is just the empty tuple.
EPSILON_TOKEN = "_eps"

# A word (terminal string) / sentential form is a tuple of symbol names.
Word = tuple[str, ...]

CF = "cf"
CS = "cs"


def render_word(word: Word) -> str:
    """Space-joined display form of a word; the empty word prints as _eps."""
    return " ".join(word) if word else EPSILON_TOKEN


@dataclass(frozen=True)
class SymbolTable:
    """Registered nonterminal and terminal alphabets (disjoint by contract)."""

    nonterminals: frozenset[str]
    terminals: frozenset[str]

    def kind(self, name: str) -> Optional[str]:
        if name in self.nonterminals:
            return "nonterminal"
        if name in self.terminals:
            return "terminal"
        return None

    def known(self, name: str) -> bool:
        return name in self.nonterminals or name in self.terminals


@dataclass(frozen=True)
class Production:
    """A rewrite rule lhs -> rhs.  rhs may be empty (an epsilon production)."""

    lhs: Word
    rhs: Word

    def __str__(self) -> str:
        lhs = " ".join(self.lhs)
        return f"{lhs} -> {render_word(self.rhs)}"


@dataclass(frozen=True)
class ProductionGroup:
    """An ordered list of candidate productions; a setting picks exactly one.

    Alternative order is significant: parameter settings index alternatives
    by position (1-based).  Duplicate alternatives are legal and are how
    single-alternative rules get padded into a homogeneous grammar.
    """

    alternatives: tuple[Production, ...]

    @property
    def arity(self) -> int:
        return len(self.alternatives)

    def is_choice(self) -> bool:
        """True if the group has at least two syntactically distinct alternatives."""
        return len(set(self.alternatives)) > 1


@dataclass(frozen=True)
class PPCFG:
    """A parametric grammar: symbol table, ordered production groups, start.

    Group order is significant (settings index groups by position).  The
    grammar is *homogeneous* when every group has the same arity; validate()
    flags heterogeneous grammars unless told otherwise, and
    transforms.homogenize pads them.
    """

    symbols: SymbolTable
    groups: tuple[ProductionGroup, ...]
    start: str
    mode: str = CF

    @property
    def n(self) -> int:
        return len(self.groups)

    @property
    def k(self) -> int:
        """Maximum group arity (== the common arity for homogeneous grammars)."""
        return max((g.arity for g in self.groups), default=0)

    def is_homogeneous(self) -> bool:
        return len({g.arity for g in self.groups}) <= 1

    def choice_group_indices(self) -> tuple[int, ...]:
        """0-based indices of groups where the setting actually matters."""
        return tuple(i for i, g in enumerate(self.groups) if g.is_choice())


@dataclass(frozen=True)
class ParameterSetting:
    """One choice per group: a vector of 1-based alternative indices."""

    choices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.choices)

    @classmethod
    def from_bits(cls, bits: str) -> "ParameterSetting":
        """Bit-string form for arity-2 grammars: bit '0' means choice 1."""
        if not all(b in "01" for b in bits):
            raise ValueError(f"not a bit string: {bits!r}")
        return cls(tuple(1 + int(b) for b in bits))

    def to_bits(self) -> str:
        if any(c not in (1, 2) for c in self.choices):
            raise ValueError("setting has choices outside 1..2, no bit form")
        return "".join(str(c - 1) for c in self.choices)


@dataclass(frozen=True)
class PlainGrammar:
    """An instantiated grammar: one flat rule list, same symbols and mode."""

    symbols: SymbolTable
    rules: tuple[Production, ...]
    start: str
    mode: str = CF


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        return "ok" if self.ok else "\n".join(self.violations)


@dataclass(frozen=True)
class BoundedLanguageSet:
    """The distinct length-bounded languages over all settings of a grammar.

    ``complete`` is False when some cs-mode enumeration was clipped by its
    derivation budget, in which case the family is a lower approximation.
    """

    length_bound: int
    languages: frozenset[frozenset[Word]]
    complete: bool = True

    def __len__(self) -> int:
        return len(self.languages)


def _check_production(symbols: SymbolTable, prod: Production, mode: str,
                      where: str, out: list[str]) -> None:
    if not prod.lhs:
        out.append(f"{where}: empty lhs")
    for name in itertools.chain(prod.lhs, prod.rhs):
        if name == EPSILON_TOKEN:
            out.append(f"{where}: reserved token {EPSILON_TOKEN} used as a symbol")
        elif not symbols.known(name):
            out.append(f"{where}: unregistered symbol {name!r}")
    if mode == CF:
        if len(prod.lhs) != 1:
            out.append(f"{where}: multi-symbol lhs in CF mode")
        elif symbols.kind(prod.lhs[0]) == "terminal":
            out.append(f"{where}: terminal on a CF-mode lhs")
    else:
        if prod.lhs and not any(symbols.kind(s) == "nonterminal" for s in prod.lhs):
            out.append(f"{where}: CS-mode lhs contains no nonterminal")


def validate(grammar: PPCFG, *, allow_heterogeneous: bool = False) -> ValidationReport:
    """Check structural invariants.  Violations are data, not exceptions."""
    out: list[str] = []
    overlap = grammar.symbols.nonterminals & grammar.symbols.terminals
    if overlap:
        out.append(f"symbols both terminal and nonterminal: {sorted(overlap)}")
    if grammar.symbols.kind(grammar.start) != "nonterminal":
        out.append(f"start symbol {grammar.start!r} not a registered nonterminal")
    if grammar.mode not in (CF, CS):
        out.append(f"unknown mode {grammar.mode!r}")
    arities = {g.arity for g in grammar.groups}
    if not allow_heterogeneous and len(arities) > 1:
        out.append(f"group arity: mixed arities {sorted(arities)}")
    for gi, group in enumerate(grammar.groups, start=1):
        if group.arity == 0:
            out.append(f"group {gi}: empty group")
        for ai, prod in enumerate(group.alternatives, start=1):
            _check_production(grammar.symbols, prod, grammar.mode,
                              f"group {gi} alternative {ai}", out)
    return ValidationReport(tuple(out))


def validate_plain(grammar: PlainGrammar) -> ValidationReport:
    """Same structural checks for an instantiated grammar."""
    out: list[str] = []
    overlap = grammar.symbols.nonterminals & grammar.symbols.terminals
    if overlap:
        out.append(f"symbols both terminal and nonterminal: {sorted(overlap)}")
    if grammar.symbols.kind(grammar.start) != "nonterminal":
        out.append(f"start symbol {grammar.start!r} not a registered nonterminal")
    for ri, prod in enumerate(grammar.rules, start=1):
        _check_production(grammar.symbols, prod, grammar.mode, f"rule {ri}", out)
    return ValidationReport(tuple(out))


def instantiate(grammar: PPCFG, setting: ParameterSetting) -> PlainGrammar:
    """Build the plain grammar selected by ``setting``.

    Rule i of the result is alternative setting[i] of group i, in group
    order, so the result always has exactly n rules (duplicates included).
    """
    if len(setting.choices) != grammar.n:
        raise ValueError(
            f"setting length {len(setting.choices)} != group count {grammar.n}")
    rules = []
    for gi, (group, choice) in enumerate(zip(grammar.groups, setting.choices), start=1):
        if not 1 <= choice <= group.arity:
            raise ValueError(
                f"group {gi}: choice {choice} out of range 1..{group.arity}")
        rules.append(group.alternatives[choice - 1])
    return PlainGrammar(grammar.symbols, tuple(rules), grammar.start, grammar.mode)


def enumerate_settings(grammar: PPCFG) -> Iterator[ParameterSetting]:
    """Yield every setting exactly once, in lexicographic order.

    A grammar with no groups has exactly one (empty) setting.
    """
    ranges = [range(1, g.arity + 1) for g in grammar.groups]
    for combo in itertools.product(*ranges):
        yield ParameterSetting(combo)


def enumerate_choice_settings(grammar: PPCFG) -> Iterator[ParameterSetting]:
    """Like enumerate_settings but varying only choice-bearing groups.

    Non-choice (padded) groups are pinned to alternative 1; the yielded
    settings cover every language of the grammar exactly as the full
    enumeration does, in lexicographic order over the choice coordinates.
    """
    choice = set(grammar.choice_group_indices())
    ranges = [range(1, g.arity + 1) if i in choice else range(1, 2)
              for i, g in enumerate(grammar.groups)]
    for combo in itertools.product(*ranges):
        yield ParameterSetting(combo)


def bounded_language_family(grammar: PPCFG, length_bound: int,
                            budget=None) -> BoundedLanguageSet:
    """Deduplicated set of length-bounded languages over all settings.

    CF grammars are enumerated exactly.  CS grammars take a derivation
    budget (see engines.DerivationBudget); settings whose search was
    clipped make the result incomplete rather than wrong.
    """
    from . import engines  # local import: engines depends on this module

    languages = set()
    complete = True
    for setting in enumerate_settings(grammar):
        plain = instantiate(grammar, setting)
        result = engines.enumerate_language(plain, length_bound, budget=budget)
        languages.add(result.words)
        complete = complete and result.exact
    return BoundedLanguageSet(length_bound, frozenset(languages), complete)
