"""Parametric production-group grammars and the machinery around them:
instantiation, membership engines, transforms, teacher/learner oracles,
and the SAT / factoring reductions."""

from .grammars import (BoundedLanguageSet, EPSILON_TOKEN, ParameterSetting,
                       PlainGrammar, PPCFG, Production, ProductionGroup,
                       SymbolTable, ValidationReport, Word,
                       bounded_language_family, enumerate_choice_settings,
                       enumerate_settings, instantiate, render_word, validate,
                       validate_plain)
from .engines import (CnfGrammar, DerivationBudget, EnumerationResult,
                      MembershipAnswer, UnknownSymbolError, brute_force_member,
                      counting_refutes, cyk_member, enumerate_language,
                      format_witness, nonterminal_member, replay_witness,
                      to_cnf, witness_forms)
from .transforms import (SettingTranslation, binarize, format_translation,
                         homogenize, translate_setting)
from .oracles import (HonestTeacher, LiteralAdversary, OracleAnswer, Query,
                      SoundAdversary, Teacher, Transcript,
                      build_adversary_grammar, run_learner, STRATEGIES)
from .reductions import (Assignment, FactoringReduction, SatInstance,
                         SatReduction, assignment_to_setting,
                         covers_all_clauses, derivation_verdict,
                         divisibility_witness, divisor_membership, dpll_solve,
                         factor_via_ppcsg, factoring_to_ppcsg, format_dimacs,
                         number_to_setting, parse_dimacs, sat_solve_via_grammar,
                         sat_to_ppcfg, setting_to_assignment, setting_to_number,
                         target_string)

__all__ = [name for name in dir() if not name.startswith("_")]
