import itertools

import pytest
from hypothesis import given, settings, strategies as st

import ppgram as pg
from ppgram.grammars import (ParameterSetting, PPCFG, Production,
                             ProductionGroup, SymbolTable)
from ppgram.randgen import random_ppcfg
import random


def two_symbol_table():
    return SymbolTable(frozenset({"S", "A"}), frozenset({"a", "b"}))


def test_validate_adversary_grammar_ok():
    report = pg.validate(pg.build_adversary_grammar(2))
    assert report.ok
    assert str(report) == "ok"


def test_validate_flags_mixed_group_arity():
    g = PPCFG(
        two_symbol_table(),
        (ProductionGroup((Production(("S",), ("a",)), Production(("S",), ("b",)))),
         ProductionGroup((Production(("A",), ("a",)),))),
        "S")
    report = pg.validate(g)
    assert not report.ok
    assert any("group arity" in v for v in report.violations)
    assert pg.validate(g, allow_heterogeneous=True).ok


def test_validate_flags_multi_symbol_lhs_in_cf_mode():
    table = SymbolTable(frozenset({"S", "C0", "Z0"}), frozenset({"c0"}))
    rule = Production(("C0", "C0"), ("C0", "Z0"))
    g = PPCFG(table, (ProductionGroup((rule, rule)),), "S", pg.grammars.CF)
    report = pg.validate(g)
    assert any("multi-symbol lhs in CF mode" in v for v in report.violations)
    # the same rule is fine as a rewriting grammar
    g_cs = PPCFG(table, (ProductionGroup((rule, rule)),), "S", pg.grammars.CS)
    assert pg.validate(g_cs).ok


def test_validate_flags_unregistered_symbol_and_bad_start():
    g = PPCFG(
        two_symbol_table(),
        (ProductionGroup((Production(("S",), ("missing",)),
                          Production(("S",), ("a",)))),),
        "nowhere")
    report = pg.validate(g)
    assert any("unregistered symbol" in v for v in report.violations)
    assert any("start symbol" in v for v in report.violations)


def test_validate_flags_terminal_lhs_and_reserved_token():
    g = PPCFG(
        two_symbol_table(),
        (ProductionGroup((Production(("a",), ("a",)),
                          Production(("S",), ("_eps",)))),),
        "S")
    report = pg.validate(g)
    assert any("terminal on a CF-mode lhs" in v for v in report.violations)
    assert any("reserved token" in v for v in report.violations)


def test_instantiate_adversary_choices():
    g = pg.build_adversary_grammar(2)
    plain = pg.instantiate(g, ParameterSetting((1, 1, 2)))
    assert plain.rules == (
        Production(("START",), ("X1", "X2")),
        Production(("X1",), ("0",)),
        Production(("X2",), ("1",)))
    assert pg.validate_plain(plain).ok


def test_instantiate_all_ones_picks_first_alternatives():
    rng = random.Random(7)
    g = random_ppcfg(rng, homogeneous=True)
    plain = pg.instantiate(g, ParameterSetting((1,) * g.n))
    assert plain.rules == tuple(grp.alternatives[0] for grp in g.groups)


def test_instantiate_truth_choice_selects_one_branch():
    inst = pg.SatInstance(1, ((1,),))
    reduction = pg.sat_to_ppcfg(inst)
    setting = pg.assignment_to_setting(reduction, pg.Assignment((True,)))
    plain = pg.instantiate(reduction.grammar, setting)
    assert Production(("x1",), ("x1T",)) in plain.rules
    assert Production(("x1",), ("x1F",)) not in plain.rules


def test_instantiate_errors():
    g = pg.build_adversary_grammar(2)
    with pytest.raises(ValueError, match="setting length"):
        pg.instantiate(g, ParameterSetting((1, 1)))
    with pytest.raises(ValueError, match="out of range"):
        pg.instantiate(g, ParameterSetting((1, 3, 1)))


def test_enumerate_settings_order_and_count():
    g = pg.build_adversary_grammar(2)  # three groups of arity 2
    settings_list = list(pg.enumerate_settings(g))
    assert len(settings_list) == 8
    assert settings_list[0].choices == (1, 1, 1)
    assert settings_list[-1].choices == (2, 2, 2)
    assert settings_list == sorted(settings_list, key=lambda s: s.choices)


def test_enumerate_settings_single_group_arity_three():
    table = SymbolTable(frozenset({"S"}), frozenset({"a"}))
    g = PPCFG(table, (ProductionGroup(tuple(
        Production(("S",), ("a",) * i) for i in range(3))),), "S")
    assert [s.choices for s in pg.enumerate_settings(g)] == [(1,), (2,), (3,)]


def test_enumerate_settings_empty_grammar():
    table = SymbolTable(frozenset({"S"}), frozenset())
    g = PPCFG(table, (), "S")
    assert [s.choices for s in pg.enumerate_settings(g)] == [()]


def test_bounded_family_adversary_singletons():
    fam = pg.bounded_language_family(pg.build_adversary_grammar(3), 3)
    assert len(fam) == 8
    assert all(len(lang) == 1 for lang in fam.languages)
    words = {next(iter(lang)) for lang in fam.languages}
    assert words == {tuple(bits) for bits in itertools.product("01", repeat=3)}


def test_bounded_family_duplicate_alternatives_collapse():
    table = SymbolTable(frozenset({"S"}), frozenset({"a"}))
    rule = Production(("S",), ("a",))
    g = PPCFG(table, (ProductionGroup((rule, rule)),), "S")
    assert len(pg.bounded_language_family(g, 3)) == 1


def test_bounded_family_one_variable_one_clause():
    # Both settings of the single-variable instance, enumerated exhaustively:
    # the T branch derives the clause name (and the empty word via erasure),
    # the F branch derives only the empty word.
    reduction = pg.sat_to_ppcfg(pg.SatInstance(1, ((1,),)))
    fam = pg.bounded_language_family(reduction.grammar, 1)
    assert fam.languages == frozenset({
        frozenset({(), ("c1",)}),
        frozenset({()})})


def test_parameter_setting_bits_round_trip():
    s = ParameterSetting.from_bits("010")
    assert s.choices == (1, 2, 1)
    assert s.to_bits() == "010"
    with pytest.raises(ValueError):
        ParameterSetting.from_bits("012")
    with pytest.raises(ValueError):
        ParameterSetting((1, 3)).to_bits()


@given(st.integers(0, 2**30), st.integers(1, 40))
def test_rule_count_matches_group_count(seed, groups_hint):
    rng = random.Random(seed)
    g = random_ppcfg(rng, max_groups=min(3, groups_hint))
    for setting in pg.enumerate_settings(g):
        assert len(pg.instantiate(g, setting).rules) == g.n


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**30))
def test_family_cardinality_and_monotonicity(seed):
    rng = random.Random(seed)
    g = random_ppcfg(rng, max_groups=2, max_arity=3, max_rhs_len=2)
    total = 1
    for group in g.groups:
        total *= group.arity
    small = pg.bounded_language_family(g, 2)
    large = pg.bounded_language_family(g, 4)
    assert len(small) <= total and len(large) <= total
    # every short-bounded language is the truncation of some longer one
    truncated = {frozenset(w for w in lang if len(w) <= 2)
                 for lang in large.languages}
    assert truncated == set(small.languages)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**30))
def test_instantiate_injective_on_distinct_alternatives(seed):
    rng = random.Random(seed)
    g = random_ppcfg(rng, max_groups=2, max_arity=3)
    if any(len(set(grp.alternatives)) != grp.arity for grp in g.groups):
        return
    plains = [pg.instantiate(g, s) for s in pg.enumerate_settings(g)]
    assert len({p.rules for p in plains}) == len(plains)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**30))
def test_instantiation_of_valid_grammar_is_valid(seed):
    rng = random.Random(seed)
    g = random_ppcfg(rng, homogeneous=True)
    assert pg.validate(g).ok
    for setting in pg.enumerate_settings(g):
        assert pg.validate_plain(pg.instantiate(g, setting)).ok
