"""Seeded instance generators for experiments and the acceptance sweeps,
plus a small corpus of handcrafted unsatisfiable formulas."""

from __future__ import annotations

import random

from .grammars import (CF, PlainGrammar, PPCFG, Production, ProductionGroup,
                       SymbolTable)
from .reductions import SatInstance

_NONTERMINALS = ["S", "A", "B", "D", "E"]
_TERMINALS = ["a", "b", "t"]


def random_plain_cf_grammar(rng: random.Random, max_nonterminals: int = 3,
                            max_terminals: int = 3, max_rules: int = 6,
                            max_rhs_len: int = 3) -> PlainGrammar:
    nts = _NONTERMINALS[:rng.randint(1, max_nonterminals)]
    ts = _TERMINALS[:rng.randint(1, max_terminals)]
    pool = nts + ts
    rules = []
    for _ in range(rng.randint(2, max_rules)):
        lhs = rng.choice(nts)
        rhs = tuple(rng.choice(pool) for _ in range(rng.randint(0, max_rhs_len)))
        rules.append(Production((lhs,), rhs))
    rules = tuple(dict.fromkeys(rules))
    symbols = SymbolTable(frozenset(nts), frozenset(ts))
    return PlainGrammar(symbols, rules, "S", CF)


def random_ppcfg(rng: random.Random, max_groups: int = 3, max_arity: int = 4,
                 max_rhs_len: int = 3, homogeneous: bool = False,
                 min_arity: int = 1) -> PPCFG:
    """Random parametric grammar with one distinct head symbol per group.

    Heterogeneous by default (arities drawn per group); pass homogeneous to
    draw one arity for all groups.  Heads are distinct so the result is
    always binarizable after homogenization.
    """
    n = rng.randint(1, max_groups)
    heads = _NONTERMINALS[:n]
    ts = _TERMINALS[:rng.randint(1, 3)]
    pool = heads + ts
    common = rng.randint(max(min_arity, 1), max_arity)
    groups = []
    for head in heads:
        arity = common if homogeneous else rng.randint(max(min_arity, 1), max_arity)
        alts = tuple(
            Production((head,),
                       tuple(rng.choice(pool)
                             for _ in range(rng.randint(0, max_rhs_len))))
            for _ in range(arity))
        groups.append(ProductionGroup(alts))
    symbols = SymbolTable(frozenset(heads), frozenset(ts))
    return PPCFG(symbols, tuple(groups), heads[0], CF)


def random_sat_instance(rng: random.Random, max_vars: int = 10,
                        max_clauses: int = 15) -> SatInstance:
    num_vars = rng.randint(1, max_vars)
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        size = rng.randint(1, 3)
        variables = rng.sample(range(1, num_vars + 1), min(size, num_vars))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in variables))
    return SatInstance(num_vars, tuple(clauses))


def crafted_unsat_instances() -> list[SatInstance]:
    """Twenty small unsatisfiable formulas (pigeonhole, parity, chains...)."""

    def inst(num_vars, clauses):
        return SatInstance(num_vars, tuple(tuple(c) for c in clauses))

    out = [
        inst(1, [(1,), (-1,)]),
        inst(2, [(1, 2), (1, -2), (-1, 2), (-1, -2)]),
        inst(3, [(1, 2, 3), (1, 2, -3), (1, -2, 3), (1, -2, -3),
                 (-1, 2, 3), (-1, 2, -3), (-1, -2, 3), (-1, -2, -3)]),
        # pigeonhole: 2 pigeons, 1 hole
        inst(2, [(1,), (2,), (-1, -2)]),
        # pigeonhole: 3 pigeons, 2 holes (variables p_ij = 2*(i-1)+j)
        inst(6, [(1, 2), (3, 4), (5, 6),
                 (-1, -3), (-1, -5), (-3, -5),
                 (-2, -4), (-2, -6), (-4, -6)]),
        # implication chain closing on its own negation
        inst(3, [(1,), (-1, 2), (-2, 3), (-3, -1)]),
        inst(4, [(1,), (-1, 2), (-2, 3), (-3, 4), (-4, -1)]),
        # xor chains: x1^x2 = 1 and x1^x2 = 0
        inst(2, [(1, 2), (-1, -2), (1, -2), (-1, 2)]),
        inst(3, [(1, 2, 3), (1, -2, -3), (-1, 2, -3), (-1, -2, 3),
                 (-1, -2, -3), (-1, 2, 3), (1, -2, 3), (1, 2, -3)]),
        # unit forcing a contradiction through two branches
        inst(3, [(1,), (-1, 2), (-1, 3), (-2, -3), (-1, -2, 3)]),
        inst(2, [(1,), (2,), (-1, -2), (1, 2)]),
        inst(3, [(-1, 2), (1, -2), (1, 2), (-1, -2), (3,), (-3, 1)]),
        inst(4, [(1, 2), (-1, 2), (1, -2), (-1, -2), (3, 4)]),
        inst(3, [(1,), (2,), (3,), (-1, -2, -3)]),
        inst(5, [(1,), (-1, 2), (-2, 3), (-3, 4), (-4, 5), (-5, -1)]),
        inst(4, [(1, 2, 3), (-1,), (-2,), (-3,), (4,)]),
        inst(3, [(1, 2), (-2, 3), (-3, -1), (-2, -3), (2, 3), (-1, 2)]),
        inst(6, [(1, 2), (-1, 3), (-2, 3), (-3, 4), (-4, 5), (-5, 6), (-6, -3)]),
        inst(2, [(-1,), (1, 2), (-2,)]),
        inst(4, [(1, -2), (2, -3), (3, -4), (4, -1), (1, 2, 3), (-1, -4), (4, -1), (1,), (-4,), (2,), (-3,)]),
    ]
    assert len(out) == 20
    return out
