"""Membership engines: CNF+CYK, an independent bounded-derivation oracle,
and a budgeted search for general rewriting grammars.

Two independent paths decide CF membership so that each can serve as the
other's oracle:

* ``to_cnf`` + ``cyk_member``: textbook normal-form conversion and CYK.
* ``brute_force_member``: a length-bounded closure computed directly on the
  raw rules (no normal form).  For CF grammars this is exact -- every
  derivable string of length <= |w| is found, so ``no`` verdicts are
  definite.

CS-mode grammars (general rewriting) get a breadth-first search over
sentential forms.  Because rules may contract, a ``no`` from the search is
*budget-relative*: it means "no derivation whose intermediate forms stay
within the length budget".  Callers probing contracting constructions must
size ``max_form_len`` to the construction (the factoring grammar needs at
least N+2).  ``unknown`` is reported only when the visited-form cap stops
the search with work left.

Before searching, CS membership applies a sound counting refutation: every
rule application shifts the symbol-count vector of the form by a fixed
integer vector, so if the difference between target and start lies outside
the integer lattice spanned by the rule vectors, no derivation exists at
any length.  That turns many hopeless searches into instant definite noes.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .grammars import CF, CS, PlainGrammar, Production, Word

DEFAULT_MAX_VISITED = 1_000_000

# A derivation step: (rule index, position in the sentential form).
Step = tuple[int, int]


@dataclass(frozen=True)
class DerivationBudget:
    """Limits for the rewriting search; both bounds must be positive."""

    max_form_len: int
    max_visited: int = DEFAULT_MAX_VISITED

    def __post_init__(self):
        if self.max_form_len <= 0 or self.max_visited <= 0:
            raise ValueError("budget bounds must be positive")

    @classmethod
    def default_for(cls, word_len: int) -> "DerivationBudget":
        return cls(max_form_len=2 * word_len + 8)


@dataclass(frozen=True)
class MembershipAnswer:
    verdict: str  # "yes" | "no" | "unknown"
    witness: Optional[tuple[Step, ...]] = None

    def __bool__(self) -> bool:
        return self.verdict == "yes"


class UnknownSymbolError(ValueError):
    """A query word used a symbol the grammar does not know."""


def _check_word(grammar: PlainGrammar, word: Word) -> None:
    for name in word:
        if grammar.symbols.kind(name) != "terminal":
            raise UnknownSymbolError(f"not a terminal of this grammar: {name!r}")


# ---------------------------------------------------------------------------
# Chomsky normal form + CYK
# ---------------------------------------------------------------------------

class CnfGrammar:
    """Binary rules A -> B C, terminal rules A -> a, and a nullable-start flag.

    Language equals the source grammar's, with the empty word represented by
    ``nullable_start`` instead of a rule.  ``alphabet`` is the declared
    terminal alphabet of the source grammar (a queried word may use any of
    it, including terminals no rule produces).
    """

    def __init__(self, start: str, binary: dict, terminal: dict,
                 nullable_start: bool, alphabet: frozenset[str]):
        self.start = start
        self.binary = binary        # (B, C) -> set of heads
        self.terminal = terminal    # a -> set of heads
        self.nullable_start = nullable_start
        self.alphabet = alphabet


def to_cnf(grammar: PlainGrammar) -> CnfGrammar:
    """Standard conversion: fresh start, TERM, BIN, epsilon- and unit-elimination."""
    if grammar.mode != CF:
        raise ValueError("to_cnf requires a CF-mode grammar")

    rules: list[tuple[str, Word]] = [(p.lhs[0], p.rhs) for p in grammar.rules]
    terminals = grammar.symbols.terminals
    fresh_counter = itertools.count()

    def fresh(tag: str) -> str:
        return f"<{tag}:{next(fresh_counter)}>"

    # START: guarantee the start symbol never occurs on a rhs.
    start = fresh("S")
    rules.append((start, (grammar.start,)))

    # TERM: in any rhs of length >= 2, replace terminals by wrapper nonterminals.
    wrapper: dict[str, str] = {}
    termed = []
    for lhs, rhs in rules:
        if len(rhs) >= 2:
            new_rhs = []
            for s in rhs:
                if s in terminals:
                    if s not in wrapper:
                        wrapper[s] = fresh(f"T.{s}")
                    new_rhs.append(wrapper[s])
                else:
                    new_rhs.append(s)
            termed.append((lhs, tuple(new_rhs)))
        else:
            termed.append((lhs, rhs))
    for t, w in wrapper.items():
        termed.append((w, (t,)))

    # BIN: split right-hand sides longer than 2.
    binned = []
    for lhs, rhs in termed:
        while len(rhs) > 2:
            mid = fresh("B")
            binned.append((lhs, (rhs[0], mid)))
            lhs, rhs = mid, rhs[1:]
        binned.append((lhs, rhs))

    # DEL: eliminate epsilon productions (rhs lengths are now <= 2).
    nullable = set()
    changed = True
    while changed:
        changed = False
        for lhs, rhs in binned:
            if lhs not in nullable and all(s in nullable for s in rhs):
                nullable.add(lhs)
                changed = True
    delled = set()
    for lhs, rhs in binned:
        keep_masks = itertools.product(
            *[(True, False) if s in nullable else (True,) for s in rhs])
        for mask in keep_masks:
            new_rhs = tuple(s for s, keep in zip(rhs, mask) if keep)
            if new_rhs:
                delled.add((lhs, new_rhs))

    # UNIT: close over unit chains A -> B.
    unit_pairs = {(lhs, rhs[0]) for lhs, rhs in delled
                  if len(rhs) == 1 and rhs[0] not in terminals}
    closure = {(a, a) for pair in unit_pairs for a in pair}
    closure |= unit_pairs
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(closure), repeat=2):
            if b == c and (a, d) not in closure:
                closure.add((a, d))
                changed = True

    binary: dict[tuple[str, str], set[str]] = {}
    terminal_rules: dict[str, set[str]] = {}
    for lhs, rhs in delled:
        if len(rhs) == 1 and rhs[0] not in terminals:
            continue  # unit rule, absorbed by the closure
        heads = {a for (a, b) in closure if b == lhs} | {lhs}
        if len(rhs) == 2:
            binary.setdefault((rhs[0], rhs[1]), set()).update(heads)
        else:
            terminal_rules.setdefault(rhs[0], set()).update(heads)

    return CnfGrammar(start, binary, terminal_rules, start in nullable,
                      frozenset(terminals))


def cyk_member(cnf: CnfGrammar, word: Word) -> bool:
    """True iff the word is derivable; raises on unknown terminals."""
    for name in word:
        if name not in cnf.alphabet:
            raise UnknownSymbolError(f"not a terminal of this grammar: {name!r}")
    n = len(word)
    if n == 0:
        return cnf.nullable_start
    # table[i][l] = heads deriving word[i:i+l+1]
    table = [[set() for _ in range(n - i)] for i in range(n)]
    for i, a in enumerate(word):
        table[i][0] = set(cnf.terminal.get(a, ()))
    for length in range(2, n + 1):
        for i in range(n - length + 1):
            cell = table[i][length - 1]
            for split in range(1, length):
                left = table[i][split - 1]
                right = table[i + split][length - split - 1]
                if not left or not right:
                    continue
                for (b, c), heads in cnf.binary.items():
                    if b in left and c in right:
                        cell |= heads
    return cnf.start in table[0][n - 1]


# ---------------------------------------------------------------------------
# Bounded derivation closure for CF grammars (the independent oracle)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=512)
def _cf_closure(grammar: PlainGrammar, max_len: int):
    """All terminal words of length <= max_len derivable from each nonterminal.

    Computed as a monotone fixpoint directly over the raw rules, so epsilon
    productions and unit cycles need no preprocessing.  Alongside the word
    sets, record for each (nonterminal, word) the rule and rhs split that
    first produced it; the provenance is well-founded by insertion order and
    reconstructs an explicit derivation on demand.
    """
    table: dict[str, set[Word]] = {nt: set() for nt in grammar.symbols.nonterminals}
    prov: dict[tuple[str, Word], tuple[int, tuple[Word, ...]]] = {}

    def splits(rhs: Word) -> list[tuple[Word, ...]]:
        # all ways to realize rhs as a concatenation of known pieces
        options: list[tuple[Word, ...]] = [()]
        for sym in rhs:
            if sym in grammar.symbols.terminals:
                pieces = [(sym,)]
            else:
                pieces = list(table.get(sym, ()))
            options = [prefix + (p,) for prefix in options for p in pieces
                       if sum(map(len, prefix)) + len(p) <= max_len]
        return options

    changed = True
    while changed:
        changed = False
        for ri, rule in enumerate(grammar.rules):
            head = rule.lhs[0]
            for parts in splits(rule.rhs):
                word = tuple(itertools.chain.from_iterable(parts))
                if word not in table[head]:
                    table[head].add(word)
                    prov[(head, word)] = (ri, parts)
                    changed = True
    return table, prov


def _cf_witness(grammar: PlainGrammar, root: str, word: Word, max_len: int) -> tuple[Step, ...]:
    """Leftmost derivation steps for a word known to be in the closure."""
    _, prov = _cf_closure(grammar, max_len)
    steps: list[Step] = []

    def expand(symbol: str, target: Word, pos: int) -> int:
        ri, parts = prov[(symbol, target)]
        rule = grammar.rules[ri]
        steps.append((ri, pos))
        cursor = pos
        for sym, piece in zip(rule.rhs, parts):
            if sym in grammar.symbols.terminals:
                cursor += 1
            else:
                cursor = expand(sym, piece, cursor)
        return cursor

    expand(root, word, 0)
    return tuple(steps)


@dataclass(frozen=True)
class EnumerationResult:
    words: frozenset[Word]
    exact: bool


def enumerate_language(grammar: PlainGrammar, max_len: int,
                       budget: Optional[DerivationBudget] = None) -> EnumerationResult:
    """Derivable terminal words of length <= max_len.

    Exact for CF grammars.  For CS grammars the result is the set found by
    the budgeted search and ``exact`` is False whenever the budget clipped
    anything (a longer intermediate form might have contracted back down).
    """
    if grammar.mode == CF:
        table, _ = _cf_closure(grammar, max_len)
        return EnumerationResult(frozenset(table[grammar.start]), True)

    if budget is None:
        budget = DerivationBudget.default_for(max_len)
    terminals = grammar.symbols.terminals
    closer = _EagerCloser(grammar)
    found: set[Word] = set()
    normalized = closer.normalize((grammar.start,))
    if normalized is None:
        return EnumerationResult(frozenset(), True)
    start_form = normalized[0]
    seen = {start_form}
    queue = deque([start_form])
    clipped = False
    visited = 0
    while queue:
        form = queue.popleft()
        visited += 1
        if visited > budget.max_visited:
            clipped = True
            break
        if all(s in terminals for s in form):
            if len(form) <= max_len:
                found.add(form)
            continue
        for succ in _successors(grammar.rules, form):
            closed = closer.normalize(succ)
            if closed is None:
                continue
            succ = closed[0]
            if len(succ) > budget.max_form_len:
                clipped = True
                continue
            if succ not in seen:
                seen.add(succ)
                queue.append(succ)
    return EnumerationResult(frozenset(found), not clipped)


# ---------------------------------------------------------------------------
# Rewriting search (CS mode) and the unified membership oracle
# ---------------------------------------------------------------------------

def _successors(rules: tuple[Production, ...], form: Word):
    """All single-step rewrites of a sentential form, in deterministic order."""
    for ri, rule in enumerate(rules):
        l = len(rule.lhs)
        for pos in range(len(form) - l + 1):
            if form[pos:pos + l] == rule.lhs:
                yield form[:pos] + rule.rhs + form[pos + l:]


def _successors_with_steps(rules: tuple[Production, ...], form: Word):
    for ri, rule in enumerate(rules):
        l = len(rule.lhs)
        for pos in range(len(form) - l + 1):
            if form[pos:pos + l] == rule.lhs:
                yield form[:pos] + rule.rhs + form[pos + l:], (ri, pos)


class _EagerCloser:
    """Immediate expansion of forced rewrites, to shrink the search space.

    A nonterminal is *forced* when it has exactly one distinct rule, that
    rule's lhs is the symbol alone, and the symbol occurs in no other rule's
    lhs.  Rewriting a forced occurrence commutes with every other step (no
    other rule can ever touch it), so expanding such symbols as soon as they
    appear loses no terminal word.  A forced symbol whose expansion cycles
    can never be eliminated, so forms containing it are dead.

    Note the interaction with the length budget: the search compares its
    cap against fully expanded forms.  A derivation that interleaves forced
    expansion with shrinking steps could stay shorter instantaneously; the
    budget is defined over normalized forms.
    """

    def __init__(self, grammar: PlainGrammar):
        rules = grammar.rules
        in_wide_lhs = {s for rule in rules if len(rule.lhs) > 1 for s in rule.lhs}
        by_head: dict[str, dict[Production, int]] = {}
        for ri, rule in enumerate(rules):
            if len(rule.lhs) == 1:
                by_head.setdefault(rule.lhs[0], {}).setdefault(rule, ri)
        self.rules = rules
        self.forced: dict[str, int] = {
            head: next(iter(variants.values()))
            for head, variants in by_head.items()
            if len(variants) == 1
            and head not in in_wide_lhs
            and head in grammar.symbols.nonterminals}
        # expansion(X) = (fully expanded word, derivation steps rooted at 0),
        # or None when the expansion cycles (the symbol is dead).
        self._expansions: dict[str, Optional[tuple[Word, tuple[Step, ...]]]] = {}

    def _expansion(self, symbol: str, visiting: frozenset):
        if symbol in self._expansions:
            return self._expansions[symbol]
        if symbol in visiting:
            return None
        ri = self.forced[symbol]
        word: list[str] = []
        steps: list[Step] = [(ri, 0)]
        for s in self.rules[ri].rhs:
            if s in self.forced:
                sub = self._expansion(s, visiting | {symbol})
                if sub is None:
                    self._expansions[symbol] = None
                    return None
                steps.extend((sri, len(word) + spos) for sri, spos in sub[1])
                word.extend(sub[0])
            else:
                word.append(s)
        result = (tuple(word), tuple(steps))
        self._expansions[symbol] = result
        return result

    def normalize(self, form: Word) -> Optional[tuple[Word, tuple[Step, ...]]]:
        """Expand every forced symbol; None means the form is dead."""
        if not any(s in self.forced for s in form):
            return form, ()
        out: list[str] = []
        steps: list[Step] = []
        for s in form:
            if s in self.forced:
                sub = self._expansion(s, frozenset())
                if sub is None:
                    return None
                steps.extend((ri, len(out) + pos) for ri, pos in sub[1])
                out.extend(sub[0])
            else:
                out.append(s)
        return tuple(out), tuple(steps)


def _hermite_reduce(rows: list[list[int]]) -> list[list[int]]:
    """Integer row echelon form (Hermite-style) of the given lattice basis."""
    rows = [r[:] for r in rows if any(r)]
    if not rows:
        return []
    ncols = len(rows[0])
    basis: list[list[int]] = []
    col = 0
    while col < ncols and rows:
        pivot_rows = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        if not pivot_rows:
            col += 1
            continue
        # gcd-combine all rows with a nonzero entry in this column
        while len(pivot_rows) > 1:
            pivot_rows.sort(key=lambda r: abs(r[col]))
            a, b = pivot_rows[0], pivot_rows[1]
            q = b[col] // a[col]
            for i in range(ncols):
                b[i] -= q * a[i]
            if not any(b):
                pivot_rows.pop(1)
            elif b[col] == 0:
                rest.append(pivot_rows.pop(1))
        pivot = pivot_rows[0]
        if pivot[col] < 0:
            pivot = [-x for x in pivot]
        basis.append(pivot)
        rows = rest
        col += 1
    return basis


def _lattice_member(basis: list[list[int]], vec: list[int]) -> bool:
    """Is vec in the integer span of the (echelonized) basis rows?"""
    v = vec[:]
    ncols = len(v)
    for row in basis:
        col = next(i for i in range(ncols) if row[i] != 0)
        if v[col] % row[col] != 0:
            return False
        q = v[col] // row[col]
        for i in range(ncols):
            v[i] -= q * row[i]
    return not any(v)


def counting_refutes(grammar: PlainGrammar, source: Word, target: Word) -> bool:
    """Sound unreachability test by symbol counting.

    Each rule application adds a fixed vector (rhs counts minus lhs counts)
    to the form's symbol-count vector.  If target - source is outside the
    integer lattice generated by the rule vectors, target is unreachable.
    The converse does not hold: False means "inconclusive".
    """
    symbols = sorted(grammar.symbols.nonterminals | grammar.symbols.terminals)
    index = {s: i for i, s in enumerate(symbols)}

    def count(word: Word) -> list[int]:
        v = [0] * len(symbols)
        for s in word:
            v[index[s]] += 1
        return v

    deltas = []
    for rule in set(grammar.rules):
        d = count(rule.rhs)
        for i, x in enumerate(count(rule.lhs)):
            d[i] -= x
        deltas.append(d)
    goal = count(target)
    for i, x in enumerate(count(source)):
        goal[i] -= x
    return not _lattice_member(_hermite_reduce(deltas), goal)


def brute_force_member(grammar: PlainGrammar, word: Word,
                       budget: Optional[DerivationBudget] = None,
                       root: Optional[str] = None) -> MembershipAnswer:
    """Decide membership by bounded derivation, independently of CYK.

    CF mode: exact.  The closure over the raw rules finds every derivable
    word of length <= |word|, so both verdicts are definite and a ``yes``
    carries a leftmost derivation witness.

    CS mode: breadth-first search over sentential forms from the root,
    applying every rule at every position, memoizing visited forms.  Forms
    longer than ``budget.max_form_len`` are discarded (see the module
    docstring for what that means for ``no``); exhausting
    ``budget.max_visited`` yields ``unknown``.  A counting refutation runs
    first and can return a definite ``no`` without searching.
    """
    _check_word(grammar, word)
    if root is None:
        root = grammar.start
    if grammar.symbols.kind(root) != "nonterminal":
        raise ValueError(f"root {root!r} is not a nonterminal")

    if grammar.mode == CF:
        max_len = max(len(word), 1)
        table, _ = _cf_closure(grammar, max_len)
        if word in table[root]:
            return MembershipAnswer("yes", _cf_witness(grammar, root, word, max_len))
        return MembershipAnswer("no")

    if budget is None:
        budget = DerivationBudget.default_for(len(word))
    if counting_refutes(grammar, (root,), word):
        return MembershipAnswer("no")

    closer = _EagerCloser(grammar)
    normalized = closer.normalize((root,))
    if normalized is None:
        return MembershipAnswer("no")
    start_form, start_steps = normalized
    if start_form == word:
        return MembershipAnswer("yes", start_steps)
    parents: dict[Word, tuple[Word, tuple[Step, ...]]] = {}
    seen = {start_form}
    queue = deque([start_form])
    visited = 0

    def assemble(node: Word) -> tuple[Step, ...]:
        chunks = []
        while node != start_form:
            node, steps = parents[node]
            chunks.append(steps)
        chunks.append(start_steps)
        return tuple(s for chunk in reversed(chunks) for s in chunk)

    while queue:
        form = queue.popleft()
        visited += 1
        if visited > budget.max_visited:
            return MembershipAnswer("unknown")
        for succ, step in _successors_with_steps(grammar.rules, form):
            closed = closer.normalize(succ)
            if closed is None:
                continue
            succ, extra = closed
            if len(succ) > budget.max_form_len:
                continue
            if succ in seen:
                continue
            seen.add(succ)
            parents[succ] = (form, (step, *extra))
            if succ == word:
                return MembershipAnswer("yes", assemble(succ))
            queue.append(succ)
    return MembershipAnswer("no")


def nonterminal_member(grammar: PlainGrammar, nonterminal: str, word: Word,
                       budget: Optional[DerivationBudget] = None) -> bool:
    """Does the given nonterminal derive the word?

    Exact for CF grammars.  For CS grammars this roots the budgeted search
    at the nonterminal and refuses to coerce an ``unknown`` into an answer.
    """
    if grammar.symbols.kind(nonterminal) != "nonterminal":
        raise ValueError(f"unknown nonterminal {nonterminal!r}")
    answer = brute_force_member(grammar, word, budget=budget, root=nonterminal)
    if answer.verdict == "unknown":
        raise RuntimeError(
            f"membership from {nonterminal!r} undecided within budget")
    return answer.verdict == "yes"


# ---------------------------------------------------------------------------
# Witness handling
# ---------------------------------------------------------------------------

def replay_witness(grammar: PlainGrammar, steps: tuple[Step, ...],
                   word: Word, root: Optional[str] = None) -> bool:
    """Re-run a derivation witness step by step; True iff it lands on word."""
    try:
        forms = witness_forms(grammar, steps, root=root)
    except ValueError:
        return False
    return forms[-1] == word


def witness_forms(grammar: PlainGrammar, steps: tuple[Step, ...],
                  root: Optional[str] = None) -> list[Word]:
    """Expand (rule, position) steps into the sentential-form sequence."""
    form: Word = (root or grammar.start,)
    forms = [form]
    for ri, pos in steps:
        rule = grammar.rules[ri]
        l = len(rule.lhs)
        if form[pos:pos + l] != rule.lhs:
            raise ValueError(
                f"step ({ri}, {pos}) does not apply: {rule} at {form}")
        form = form[:pos] + rule.rhs + form[pos + l:]
        forms.append(form)
    return forms


def format_witness(grammar: PlainGrammar, steps: tuple[Step, ...],
                   root: Optional[str] = None) -> str:
    """One sentential form per line, annotated with the rule that produced it."""
    forms = witness_forms(grammar, steps, root=root)
    from .grammars import render_word
    lines = [render_word(forms[0])]
    for (ri, pos), form in zip(steps, forms[1:]):
        lines.append(f"{render_word(form)}    # rule {ri + 1}: {grammar.rules[ri]} @ {pos}")
    return "\n".join(lines)
