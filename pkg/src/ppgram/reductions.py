"""Certificate-level reductions: 3SAT to CF parameter learning, integer
factoring to CS parameter learning.

SAT side: a clause set becomes a grammar whose terminal alphabet is the
clause names.  Only the per-variable truth groups are choice-bearing; a
setting covers the clause set iff every clause name is derivable, and such
a setting exists iff the instance is satisfiable.  A DPLL solver provides
the independent verdict.

Factoring side: a number N becomes a rewriting grammar whose bit groups
encode a candidate divisor P.  The start symbol pumps out copies of an
A-chain, each chain expands to P unary counters, and adjacent counters
merge pairwise into a binary representation; the target word (the binary
digits of N, highest first) is derivable iff P divides N.  Trial division
provides the independent verdict.

The published form of the merge cascade
(``C C -> C Z``, ``C Z -> C' Z``, ``C' Z -> C'``) is unsound: the promoted
counter can absorb markers from unrelated merges, e.g. ``C0 C0 C0`` rewrites
via ``C0 Z0 Z0`` and ``C1 Z0 Z0`` down to ``C1``, silently dropping one unit
so that target words become derivable for non-divisors.  This module uses
the conserving cascade ``C C -> C Z``, ``C Z -> Z Z``, ``Z Z -> C'`` instead:
every rule preserves the total weight 2^k per index-k symbol, which is what
makes membership equivalent to divisibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from . import engines
from .grammars import (CF, CS, ParameterSetting, PlainGrammar, PPCFG,
                       Production, ProductionGroup, SymbolTable, Word,
                       enumerate_choice_settings, instantiate)

# Verify returned factors against the actual rewriting grammar up to here.
DERIVATION_CHECK_LIMIT = 12


# ---------------------------------------------------------------------------
# SAT instances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SatInstance:
    """Clauses as tuples of signed 1-based variable indices (DIMACS style)."""

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for ci, clause in enumerate(self.clauses, start=1):
            if not clause:
                raise ValueError(f"clause {ci} is empty")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"clause {ci}: literal {lit} out of range")


@dataclass(frozen=True)
class Assignment:
    values: tuple[bool, ...]  # values[i] is variable i+1

    def satisfies(self, inst: SatInstance) -> bool:
        return all(
            any(self.values[abs(lit) - 1] == (lit > 0) for lit in clause)
            for clause in inst.clauses)


def parse_dimacs(text: str, strict_3sat: bool = False) -> SatInstance:
    """Parse DIMACS CNF.  With strict_3sat, clauses over 3 literals are errors."""
    num_vars = None
    declared_clauses = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"line {lineno}: malformed header {line!r}")
            try:
                num_vars, declared_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise ValueError(f"line {lineno}: malformed header {line!r}") from None
            continue
        if num_vars is None:
            raise ValueError(f"line {lineno}: clause before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ValueError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if num_vars is None:
        raise ValueError("missing 'p cnf' header")
    if current:
        raise ValueError("last clause not terminated by 0")
    if strict_3sat:
        for ci, clause in enumerate(clauses, start=1):
            if len(clause) > 3:
                raise ValueError(f"clause {ci} has {len(clause)} literals (strict 3SAT)")
    return SatInstance(num_vars, tuple(clauses))


def format_dimacs(inst: SatInstance) -> str:
    lines = [f"p cnf {inst.num_vars} {len(inst.clauses)}"]
    for clause in inst.clauses:
        lines.append(" ".join(str(lit) for lit in clause) + " 0")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# SAT -> parametric grammar
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SatReduction:
    instance: SatInstance
    grammar: PPCFG
    var_choice_groups: tuple[int, ...]  # 0-based group index per variable


def _pad(production: Production) -> ProductionGroup:
    return ProductionGroup((production, production))


def sat_to_ppcfg(inst: SatInstance) -> SatReduction:
    """Encode an instance as a grammar over clause-name terminals.

    Group layout: the start group, one truth-choice group per variable (the
    only choice-bearing groups), one erase group per variable, then one
    unary group per (clause, satisfying literal) pair, positives first.
    """
    n = inst.num_vars
    xs = [f"x{i}" for i in range(1, n + 1)]
    xts = [f"x{i}T" for i in range(1, n + 1)]
    xfs = [f"x{i}F" for i in range(1, n + 1)]
    cs = [f"c{i}" for i in range(1, len(inst.clauses) + 1)]

    groups: list[ProductionGroup] = [_pad(Production(("START",), tuple(xs)))]
    var_choice = []
    for i, x in enumerate(xs):
        var_choice.append(len(groups))
        groups.append(ProductionGroup((
            Production((x,), (xts[i],)),
            Production((x,), (xfs[i],)))))
    for x in xs:
        groups.append(_pad(Production((x,), ())))
    seen = set()
    for polarity, heads in ((1, xts), (-1, xfs)):
        for ci, clause in enumerate(inst.clauses):
            for lit in clause:
                if lit * polarity > 0 and (ci, lit) not in seen:
                    seen.add((ci, lit))
                    groups.append(_pad(Production((heads[abs(lit) - 1],), (cs[ci],))))

    symbols = SymbolTable(frozenset(["START", *xs, *xts, *xfs]), frozenset(cs))
    grammar = PPCFG(symbols, tuple(groups), "START", CF)
    return SatReduction(inst, grammar, tuple(var_choice))


def assignment_to_setting(reduction: SatReduction, assignment: Assignment) -> ParameterSetting:
    """True picks the T-branch (alternative 1); padded groups are pinned to 1."""
    if len(assignment.values) != reduction.instance.num_vars:
        raise ValueError("assignment arity mismatch")
    choices = [1] * reduction.grammar.n
    for gi, value in zip(reduction.var_choice_groups, assignment.values):
        choices[gi] = 1 if value else 2
    return ParameterSetting(tuple(choices))


def setting_to_assignment(reduction: SatReduction, setting: ParameterSetting) -> Assignment:
    if len(setting.choices) != reduction.grammar.n:
        raise ValueError("setting arity mismatch")
    return Assignment(tuple(
        setting.choices[gi] == 1 for gi in reduction.var_choice_groups))


def covers_all_clauses(reduction: SatReduction, setting: ParameterSetting) -> bool:
    """True iff every clause name is a one-word member of the set language."""
    plain = instantiate(reduction.grammar, setting)
    derivable = engines.enumerate_language(plain, 1).words
    return all((f"c{i}",) in derivable
               for i in range(1, len(reduction.instance.clauses) + 1))


def dpll_solve(inst: SatInstance) -> Optional[Assignment]:
    """Standard DPLL with unit propagation; None means unsatisfiable."""

    def propagate(clauses, assign):
        while True:
            unit = None
            for clause in clauses:
                unassigned = [l for l in clause if abs(l) not in assign]
                if any(assign.get(abs(l)) == (l > 0) for l in clause):
                    continue
                if not unassigned:
                    return None  # conflict
                if len(unassigned) == 1:
                    unit = unassigned[0]
                    break
            if unit is None:
                return assign
            assign = dict(assign)
            assign[abs(unit)] = unit > 0

    def search(assign):
        assign = propagate(inst.clauses, assign)
        if assign is None:
            return None
        satisfied = all(
            any(assign.get(abs(l)) == (l > 0) for l in clause)
            for clause in inst.clauses)
        if satisfied:
            return assign
        var = next(v for v in range(1, inst.num_vars + 1) if v not in assign)
        for value in (True, False):
            result = search({**assign, var: value})
            if result is not None:
                return result
        return None

    result = search({})
    if result is None:
        return None
    return Assignment(tuple(result.get(v, False)
                            for v in range(1, inst.num_vars + 1)))


def sat_solve_via_grammar(inst: SatInstance) -> Optional[Assignment]:
    """Search the truth-choice settings for one covering every clause.

    Exhaustive over 2^(variables) settings, so callers enforce the budget.
    Agrees with dpll_solve on satisfiability by construction of the
    reduction; the test suite checks that agreement wholesale.
    """
    reduction = sat_to_ppcfg(inst)
    for setting in enumerate_choice_settings(reduction.grammar):
        if covers_all_clauses(reduction, setting):
            return setting_to_assignment(reduction, setting)
    return None


# ---------------------------------------------------------------------------
# Factoring -> parametric rewriting grammar
# ---------------------------------------------------------------------------

def ceil_log2(n: int) -> int:
    if n < 1:
        raise ValueError("need a positive integer")
    return (n - 1).bit_length() if n > 1 else 0


def ceil_sqrt(n: int) -> int:
    root = math.isqrt(n)
    return root if root * root == n else root + 1


@dataclass(frozen=True)
class FactoringReduction:
    n_value: int
    grammar: PPCFG
    target: Word
    bit_width: int       # bits 0..bit_width index the divisor candidate
    digit_width: int     # counter indices 0..digit_width
    pump_group: int
    stop_group: int
    bit_groups: tuple[tuple[int, int], ...]   # per bit j: (group, alt meaning 1)
    expand_groups: tuple[tuple[str, int], ...]  # (symbol, group) for A/B closure
    merge_groups: tuple[tuple[int, int, int], ...]  # per k: the 3-step cascade
    emit_groups: tuple[int, ...]              # per k: counter -> terminal


def target_string(n: int) -> Word:
    """Terminal word spelling n in binary, highest set bit first."""
    if n < 1:
        raise ValueError("need a positive integer")
    return tuple(f"c{i}" for i in range(n.bit_length() - 1, -1, -1)
                 if n >> i & 1)


def factoring_to_ppcsg(n: int) -> FactoringReduction:
    """Build the rewriting grammar whose bit groups encode a divisor of n.

    Index ranges: the A-chain runs to the bit length of ceil(sqrt(n)) minus
    one, counters and markers to ceil(log2(n)).  Merge cascades stop one
    index short of the top counter (promoting past it would need an
    unregistered symbol).
    """
    if n < 4:
        raise ValueError("need n >= 4")
    m = ceil_sqrt(n).bit_length() - 1
    top = ceil_log2(n)
    a = [f"A{j}" for j in range(m + 1)]
    b = [f"B{k}" for k in range(top + 1)]
    c = [f"C{k}" for k in range(top + 1)]
    z = [f"Z{k}" for k in range(top + 1)]
    terminals = [f"c{k}" for k in range(top + 1)]

    groups: list[ProductionGroup] = []
    pump_group = len(groups)
    groups.append(_pad(Production(("S",), (a[m], "S"))))
    stop_group = len(groups)
    groups.append(_pad(Production(("S",), ())))

    bit_groups = [(len(groups), 1)]  # bit 0: the B-branch is alternative 1
    groups.append(ProductionGroup((
        Production((a[0],), (b[0],)),
        Production((a[0],), ()))))
    for j in range(1, m + 1):
        bit_groups.append((len(groups), 2))
        groups.append(ProductionGroup((
            Production((a[j],), (a[j - 1],)),
            Production((a[j],), (b[j], a[j - 1])))))

    expand_groups = []
    for j in range(1, m + 1):
        expand_groups.append((b[j], len(groups)))
        groups.append(_pad(Production((b[j],), (b[j - 1], b[j - 1]))))
    expand_groups.append((b[0], len(groups)))
    groups.append(_pad(Production((b[0],), (c[0],))))

    merge_groups = []
    for k in range(top):
        mark = len(groups)
        groups.append(_pad(Production((c[k], c[k]), (c[k], z[k]))))
        spread = len(groups)
        groups.append(_pad(Production((c[k], z[k]), (z[k], z[k]))))
        promote = len(groups)
        groups.append(_pad(Production((z[k], z[k]), (c[k + 1],))))
        merge_groups.append((mark, spread, promote))

    emit_groups = []
    for k in range(top + 1):
        emit_groups.append(len(groups))
        groups.append(_pad(Production((c[k],), (terminals[k],))))

    symbols = SymbolTable(frozenset(["S", *a, *b, *c, *z]), frozenset(terminals))
    grammar = PPCFG(symbols, tuple(groups), "S", CS)
    return FactoringReduction(
        n_value=n, grammar=grammar, target=target_string(n),
        bit_width=m, digit_width=top,
        pump_group=pump_group, stop_group=stop_group,
        bit_groups=tuple(bit_groups), expand_groups=tuple(expand_groups),
        merge_groups=tuple(merge_groups), emit_groups=tuple(emit_groups))


def max_divisor_candidate(reduction: FactoringReduction) -> int:
    return 2 ** (reduction.bit_width + 1) - 1


def number_to_setting(reduction: FactoringReduction, p: int) -> ParameterSetting:
    """Setting whose bit groups spell p; all padded groups pinned to 1."""
    if not 1 <= p <= max_divisor_candidate(reduction):
        raise ValueError(
            f"p must be in 1..{max_divisor_candidate(reduction)}, got {p}")
    choices = [1] * reduction.grammar.n
    for j, (group, alt_one) in enumerate(reduction.bit_groups):
        bit = p >> j & 1
        choices[group] = alt_one if bit else 3 - alt_one
    return ParameterSetting(tuple(choices))


def setting_to_number(reduction: FactoringReduction, setting: ParameterSetting) -> int:
    if len(setting.choices) != reduction.grammar.n:
        raise ValueError("setting arity mismatch")
    p = 0
    for j, (group, alt_one) in enumerate(reduction.bit_groups):
        if setting.choices[group] == alt_one:
            p |= 1 << j
    return p


def divisor_membership(n: int, p: int) -> bool:
    """The arithmetic stand-in for target-word membership: does p divide n?"""
    if p < 1:
        raise ValueError("p must be positive")
    return n % p == 0


def divisibility_witness(reduction: FactoringReduction, p: int) -> tuple[engines.Step, ...]:
    """An explicit derivation of the target word in the p-setting grammar.

    Requires p | n.  Pump n/p chain copies, expand each to p unary counters,
    merge the counter row into binary blocks (highest block leftmost), then
    emit the terminals.  Every step names an instantiated rule and position,
    so engines.replay_witness can check the whole thing mechanically.
    """
    n = reduction.n_value
    if p < 1 or n % p != 0:
        raise ValueError(f"{p} does not divide {n}")
    plain = instantiate(reduction.grammar, number_to_setting(reduction, p))
    rules = plain.rules
    steps: list[engines.Step] = []
    form: list[str] = ["S"]

    def apply(group: int, pos: int) -> None:
        rule = rules[group]
        span = len(rule.lhs)
        if tuple(form[pos:pos + span]) != rule.lhs:
            raise AssertionError(f"witness construction broke at {rule} @ {pos}")
        form[pos:pos + span] = list(rule.rhs)
        steps.append((group, pos))

    for _ in range(n // p):
        apply(reduction.pump_group, len(form) - 1)
    apply(reduction.stop_group, len(form) - 1)

    expandable = {f"A{j}": group for j, (group, _) in enumerate(reduction.bit_groups)}
    expandable.update(dict(reduction.expand_groups))
    while True:
        idx = next((i for i, s in enumerate(form) if s in expandable), None)
        if idx is None:
            break
        apply(expandable[form[idx]], idx)
    if form != ["C0"] * n:
        raise AssertionError("expansion did not reach the unary counter row")

    def collapse(pos: int, power: int) -> None:
        if power == 0:
            return
        collapse(pos, power - 1)
        collapse(pos + 1, power - 1)
        mark, spread, promote = reduction.merge_groups[power - 1]
        apply(mark, pos)
        apply(spread, pos)
        apply(promote, pos)

    pos = 0
    for digit in range(n.bit_length() - 1, -1, -1):
        if n >> digit & 1:
            collapse(pos, digit)
            pos += 1

    for i, symbol in enumerate(form):
        apply(reduction.emit_groups[int(symbol[1:])], i)
    if tuple(form) != reduction.target:
        raise AssertionError("witness construction missed the target word")
    return tuple(steps)


def derivation_verdict(reduction: FactoringReduction, p: int,
                       budget: Optional[engines.DerivationBudget] = None) -> tuple[str, str]:
    """Decide target-word membership by derivation-level evidence only.

    Returns (verdict, method).  A counting refutation gives a definite
    ``no`` at any scale; when a divisor-shaped derivation exists, replaying
    it proves ``yes`` at any scale.  Anything the two miss falls back to
    the budgeted search.  Arithmetic only guides the witness construction;
    the verdict itself always rests on the grammar's own rules.
    """
    n = reduction.n_value
    plain = instantiate(reduction.grammar, number_to_setting(reduction, p))
    if engines.counting_refutes(plain, ("S",), reduction.target):
        return "no", "counting-refutation"
    if n % p == 0:
        steps = divisibility_witness(reduction, p)
        if not engines.replay_witness(plain, steps, reduction.target):
            raise AssertionError("constructed witness failed to replay")
        return "yes", "witness-replay"
    if budget is None:
        budget = engines.DerivationBudget(max_form_len=n + 4)
    answer = engines.brute_force_member(plain, reduction.target, budget=budget)
    if answer.verdict == "unknown":
        raise RuntimeError(
            f"membership for n={n} p={p} undecided within budget")
    return answer.verdict, "search"


def factor_via_ppcsg(n: int,
                     derivation_check_limit: int = DERIVATION_CHECK_LIMIT
                     ) -> Optional[tuple[int, int]]:
    """Smallest nontrivial factor pair of n, or None for prime-or-unit.

    The divisor sweep is plain trial division (the arithmetic oracle); for
    small n the winning divisor is double-checked against the rewriting
    grammar by an explicit derivation.
    """
    if n < 2:
        return None
    for p in range(2, math.isqrt(n) + 1):
        if n % p == 0:
            if 4 <= n <= derivation_check_limit:
                reduction = factoring_to_ppcsg(n)
                verdict, _ = derivation_verdict(reduction, p)
                if verdict != "yes":
                    raise AssertionError(
                        f"grammar membership contradicts {p} | {n}")
            return p, n // p
    return None
