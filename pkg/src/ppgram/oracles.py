"""Teachers, adversaries, learner strategies, and query transcripts.

A teacher answers two kinds of query about a hidden target language drawn
from a known parametric grammar:

* equivalence: "is this hypothesis setting/grammar the target?"  Answered
  ``true`` or with a counterexample word from the symmetric difference.
* membership: "is this word in the target?"

The honest teacher compares length-bounded languages (exact for every
family used here, since each has a natural finite bound).  The adversarial
teachers answer so as to maximize the number of queries a learner needs on
the N-bit grammar family from ``build_adversary_grammar``:

* ``literal`` mode replays the counting pseudocode exactly: a fixed counter
  of fresh queries, ``false`` until the counter reaches 2^N - 1, then
  ``true`` to whatever comes next.
* ``sound`` mode instead tracks the set of settings consistent with every
  answer given so far and keeps that set as large as possible, answering
  ``true`` only when a single consistent setting remains and the hypothesis
  names it.

Teachers are single-owner mutable (one transcript per teacher).  Run one
teacher per learner run; runs are independent.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Union

from . import engines
from .grammars import (ParameterSetting, PlainGrammar, PPCFG, Production,
                       ProductionGroup, SymbolTable, Word,
                       enumerate_choice_settings, instantiate, render_word)

EQUIVALENCE = "equivalence"
MEMBERSHIP = "membership"

Hypothesis = Union[ParameterSetting, PlainGrammar]


@dataclass(frozen=True)
class Query:
    seq: int
    kind: str
    payload: object  # Hypothesis for equivalence, Word for membership


@dataclass(frozen=True)
class OracleAnswer:
    value: object  # True | False | "unknown"
    counterexample: Optional[Word] = None

    def render(self) -> str:
        if self.value is True:
            return "true"
        if self.value is False:
            if self.counterexample is not None:
                return f"false {render_word(self.counterexample)}"
            return "false"
        return "unknown"


@dataclass(frozen=True)
class TranscriptEntry:
    query: Query
    answer: OracleAnswer
    fresh: bool


class Transcript:
    """Ordered query/answer log; the distinct counter ignores repeats."""

    def __init__(self):
        self.entries: list[TranscriptEntry] = []
        self.distinct_count = 0

    def record(self, kind: str, payload, answer: OracleAnswer, fresh: bool) -> None:
        query = Query(len(self.entries) + 1, kind, payload)
        if fresh:
            self.distinct_count += 1
        self.entries.append(TranscriptEntry(query, answer, fresh))

    @property
    def total_queries(self) -> int:
        return len(self.entries)

    def first_true_distinct_index(self) -> Optional[int]:
        """Distinct-query count at the moment the first ``true`` was answered."""
        distinct = 0
        for entry in self.entries:
            if entry.fresh:
                distinct += 1
            if entry.answer.value is True:
                return distinct
        return None

    def false_answers_before_first_true(self) -> int:
        count = 0
        for entry in self.entries:
            if entry.answer.value is True:
                break
            if entry.answer.value is False:
                count += 1
        return count

    def serialize(self) -> str:
        lines = []
        for entry in self.entries:
            if entry.query.kind == EQUIVALENCE:
                payload = _render_hypothesis(entry.query.payload)
            else:
                payload = render_word(entry.query.payload)
            lines.append("\t".join([str(entry.query.seq), entry.query.kind,
                                    payload, entry.answer.render()]))
        return "\n".join(lines) + ("\n" if lines else "")


def _render_hypothesis(hyp: Hypothesis) -> str:
    if isinstance(hyp, ParameterSetting):
        return ",".join(str(c) for c in hyp.choices)
    return f"grammar[{len(hyp.rules)} rules]"


def build_adversary_grammar(n_bits: int) -> PPCFG:
    """The N-bit family: every setting derives exactly one N-bit word.

    One padded start group (both alternatives identical) plus one two-way
    choice group per bit position, so the 2^N choice settings derive the
    2^N distinct words.
    """
    if n_bits < 1:
        raise ValueError("need at least one bit")
    xs = [f"X{i}" for i in range(1, n_bits + 1)]
    start_rule = Production(("START",), tuple(xs))
    groups = [ProductionGroup((start_rule, start_rule))]
    for x in xs:
        groups.append(ProductionGroup((
            Production((x,), ("0",)),
            Production((x,), ("1",)))))
    symbols = SymbolTable(frozenset(["START", *xs]), frozenset(["0", "1"]))
    return PPCFG(symbols, tuple(groups), "START", "cf")


class Teacher:
    """Shared query bookkeeping: caching, replay, and transcript recording."""

    def __init__(self, grammar: PPCFG):
        self.grammar = grammar
        self.transcript = Transcript()
        self._cache: dict = {}

    def ask_equivalence(self, hypothesis: Hypothesis) -> OracleAnswer:
        key = (EQUIVALENCE, hypothesis)
        fresh = key not in self._cache
        if fresh:
            self._cache[key] = self._answer_equivalence(hypothesis, fresh=True)
        answer = self._cache[key]
        self.transcript.record(EQUIVALENCE, hypothesis, answer, fresh)
        return answer

    def ask_membership(self, word: Word) -> OracleAnswer:
        key = (MEMBERSHIP, word)
        fresh = key not in self._cache
        if fresh:
            self._cache[key] = self._answer_membership(word, fresh=True)
        answer = self._cache[key]
        self.transcript.record(MEMBERSHIP, word, answer, fresh)
        return answer

    def _answer_equivalence(self, hypothesis, fresh):
        raise NotImplementedError

    def _answer_membership(self, word, fresh):
        raise NotImplementedError

    def _hypothesis_language(self, hypothesis: Hypothesis, bound: int,
                             budget=None) -> frozenset[Word]:
        if isinstance(hypothesis, ParameterSetting):
            plain = instantiate(self.grammar, hypothesis)
        else:
            plain = hypothesis
        return engines.enumerate_language(plain, bound, budget=budget).words


def shortest_lex(words) -> Word:
    """Deterministic counterexample tiebreak: shortest first, then lexicographic."""
    return min(words, key=lambda w: (len(w), w))


class HonestTeacher(Teacher):
    """Answers truthfully about a fixed target setting, up to a length bound.

    The bound makes equivalence decidable; for every grammar family in this
    package there is a natural bound at which the bounded comparison is
    exact (the bit family: N; the clause family: 1; the factoring family:
    the target word length).
    """

    def __init__(self, grammar: PPCFG, target: ParameterSetting,
                 length_bound: int, budget: Optional[engines.DerivationBudget] = None):
        super().__init__(grammar)
        self.target = target
        self.length_bound = length_bound
        self.budget = budget
        self._target_plain = instantiate(grammar, target)
        self._target_language = engines.enumerate_language(
            self._target_plain, length_bound, budget=budget).words

    def _answer_equivalence(self, hypothesis, fresh):
        hyp_language = self._hypothesis_language(
            hypothesis, self.length_bound, self.budget)
        delta = self._target_language ^ hyp_language
        if not delta:
            return OracleAnswer(True)
        return OracleAnswer(False, shortest_lex(delta))

    def _answer_membership(self, word, fresh):
        answer = engines.brute_force_member(self._target_plain, word,
                                            budget=self.budget)
        if answer.verdict == "unknown":
            return OracleAnswer("unknown")
        return OracleAnswer(answer.verdict == "yes")


class LiteralAdversary(Teacher):
    """The counting adversary, replayed verbatim.

    Fresh queries of either kind bump a counter and get ``false`` (with the
    hypothesis's single word as equivalence counterexample) until the
    counter reaches 2^N - 1; after that any query is answered ``true``.
    Repeats replay their original answer without advancing the counter.
    """

    def __init__(self, n_bits: int):
        super().__init__(build_adversary_grammar(n_bits))
        self.n_bits = n_bits
        self.bound = 2 ** n_bits - 1
        self.fresh_queries = 0

    def _single_word(self, hypothesis) -> Word:
        language = self._hypothesis_language(hypothesis, self.n_bits)
        if len(language) != 1:
            raise ValueError("hypothesis does not derive exactly one word")
        return next(iter(language))

    def _answer_equivalence(self, hypothesis, fresh):
        if self.fresh_queries < self.bound:
            self.fresh_queries += 1
            return OracleAnswer(False, self._single_word(hypothesis))
        return OracleAnswer(True)

    def _answer_membership(self, word, fresh):
        self._check_word(word)
        if self.fresh_queries < self.bound:
            self.fresh_queries += 1
            return OracleAnswer(False)
        return OracleAnswer(True)

    def _check_word(self, word: Word) -> None:
        for name in word:
            if name not in self.grammar.symbols.terminals:
                raise engines.UnknownSymbolError(
                    f"query over the wrong alphabet: {name!r}")


class SoundAdversary(Teacher):
    """Adversary that stays consistent with at least one setting.

    Maintains the set of candidate target words (one per choice setting)
    and always gives the answer that eliminates the fewest candidates:
    ``false`` everywhere until a single candidate remains, then the truth
    about that candidate.
    """

    def __init__(self, n_bits: int):
        super().__init__(build_adversary_grammar(n_bits))
        self.n_bits = n_bits
        self.bound = 2 ** n_bits - 1
        self.fresh_queries = 0
        self.candidates: set[Word] = {
            tuple(format(v, f"0{n_bits}b"))
            for v in range(2 ** n_bits)}

    def _single_word(self, hypothesis) -> Word:
        language = self._hypothesis_language(hypothesis, self.n_bits)
        if len(language) != 1:
            raise ValueError("hypothesis does not derive exactly one word")
        return next(iter(language))

    def _answer_equivalence(self, hypothesis, fresh):
        self.fresh_queries += 1
        word = self._single_word(hypothesis)
        if len(self.candidates) > 1:
            self.candidates.discard(word)
            return OracleAnswer(False, word)
        target = next(iter(self.candidates))
        if word == target:
            return OracleAnswer(True)
        return OracleAnswer(False, shortest_lex({word, target}))

    def _answer_membership(self, word, fresh):
        self._check_word(word)
        self.fresh_queries += 1
        if len(self.candidates) > 1:
            self.candidates.discard(word)
            return OracleAnswer(False)
        return OracleAnswer(word in self.candidates)

    def _check_word(self, word: Word) -> None:
        for name in word:
            if name not in self.grammar.symbols.terminals:
                raise engines.UnknownSymbolError(
                    f"query over the wrong alphabet: {name!r}")


@dataclass
class LearnerRun:
    outcome: str  # "identified" | "gave-up"
    setting: Optional[ParameterSetting]
    transcript: Transcript


def _sweep_equivalence(teacher: Teacher, remaining: int) -> tuple[Optional[ParameterSetting], int]:
    for setting in enumerate_choice_settings(teacher.grammar):
        if remaining <= 0:
            return None, remaining
        remaining -= 1
        if teacher.ask_equivalence(setting).value is True:
            return setting, remaining
    return None, remaining


def _strategy_exhaustive(teacher, rng, max_queries):
    found, _ = _sweep_equivalence(teacher, max_queries)
    return found


def _strategy_random_membership(teacher, rng, max_queries):
    terminals = sorted(teacher.grammar.symbols.terminals)
    probes = len(teacher.grammar.choice_group_indices())
    length = probes
    remaining = max_queries
    if terminals:
        for _ in range(min(probes, remaining)):
            word = tuple(rng.choice(terminals) for _ in range(length))
            remaining -= 1
            teacher.ask_membership(word)
    found, _ = _sweep_equivalence(teacher, remaining)
    return found


def _strategy_bitwise_probe(teacher, rng, max_queries):
    terminals = sorted(teacher.grammar.symbols.terminals)
    positions = len(teacher.grammar.choice_group_indices())
    remaining = max_queries
    if len(terminals) >= 2:
        lo, hi = terminals[0], terminals[1]
        for i in range(min(positions, remaining)):
            word = tuple(hi if j == i else lo for j in range(positions))
            remaining -= 1
            teacher.ask_membership(word)
    found, _ = _sweep_equivalence(teacher, remaining)
    return found


STRATEGIES = {
    "exhaustive-equivalence": _strategy_exhaustive,
    "random-membership-then-equivalence": _strategy_random_membership,
    "bitwise-probe": _strategy_bitwise_probe,
}


def run_learner(strategy: str, teacher: Teacher, max_queries: int,
                seed: int = 0) -> LearnerRun:
    """Drive a learner strategy against a teacher until true or the cap."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; "
                         f"choose from {sorted(STRATEGIES)}")
    rng = random.Random(seed)
    found = STRATEGIES[strategy](teacher, rng, max_queries)
    if found is None:
        return LearnerRun("gave-up", None, teacher.transcript)
    return LearnerRun("identified", found, teacher.transcript)
