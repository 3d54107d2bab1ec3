"""Equivalence transforms on parametric grammars.

* ``homogenize`` pads groups with fewer alternatives by repeating their last
  alternative, so every group reaches the same arity.  A heterogeneous
  grammar is an ordinary PPCFG whose groups differ in arity (validate flags
  it unless told to allow it).

* ``binarize`` rewrites an arity-k grammar (k > 2) into an arity-2 grammar
  with n*(k-1) groups: each group becomes a chain of two-way choices through
  fresh continuation nonterminals.  The first chain link keeps the original
  head symbol, so no other production needs rewriting.

Both return a ``SettingTranslation`` mapping settings across the transform.
Forward translation is total and canonical (after a chain commits to a
concrete alternative, the remaining links are pinned to choice 1); backward
translation ignores those don't-care entries, so forward(backward(q)) may
differ from q syntactically while always selecting the same language.
"""

from __future__ import annotations

from dataclasses import dataclass

from .grammars import (ParameterSetting, PPCFG, Production, ProductionGroup,
                       SymbolTable, validate)

FORWARD = "forward"
BACKWARD = "backward"


@dataclass(frozen=True)
class GroupTranslation:
    """How one source group maps onto a span of target groups."""

    source_group: int                      # 0-based
    target_groups: tuple[int, ...]         # 0-based, in target order
    source_arity: int
    forward: tuple[tuple[int, ...], ...]   # forward[j-1] = target choices


@dataclass(frozen=True)
class SettingTranslation:
    kind: str  # "homogenize" | "binarize"
    source_n: int
    target_n: int
    groups: tuple[GroupTranslation, ...]

    def translate_forward(self, setting: ParameterSetting) -> ParameterSetting:
        if len(setting.choices) != self.source_n:
            raise ValueError(
                f"setting length {len(setting.choices)} != source n {self.source_n}")
        out = [1] * self.target_n
        for gt, choice in zip(self.groups, setting.choices):
            if not 1 <= choice <= gt.source_arity:
                raise ValueError(
                    f"group {gt.source_group + 1}: choice {choice} out of "
                    f"range 1..{gt.source_arity}")
            for ti, tc in zip(gt.target_groups, gt.forward[choice - 1]):
                out[ti] = tc
        return ParameterSetting(tuple(out))

    def translate_backward(self, setting: ParameterSetting) -> ParameterSetting:
        if len(setting.choices) != self.target_n:
            raise ValueError(
                f"setting length {len(setting.choices)} != target n {self.target_n}")
        out = []
        for gt in self.groups:
            chain = [setting.choices[ti] for ti in gt.target_groups]
            if self.kind == "homogenize":
                out.append(min(chain[0], gt.source_arity))
            else:
                out.append(_decode_chain(chain, gt.source_arity))
        return ParameterSetting(tuple(out))


def _decode_chain(chain: list[int], k: int) -> int:
    for t, choice in enumerate(chain, start=1):
        if t < len(chain):
            if choice == 1:
                return t
        else:
            return k - 1 if choice == 1 else k
    raise AssertionError("empty chain")


def translate_setting(translation: SettingTranslation, setting: ParameterSetting,
                      direction: str) -> ParameterSetting:
    if direction == FORWARD:
        return translation.translate_forward(setting)
    if direction == BACKWARD:
        return translation.translate_backward(setting)
    raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")


def homogenize(grammar: PPCFG) -> tuple[PPCFG, SettingTranslation]:
    """Pad every group to the maximum arity by repeating its last alternative."""
    report = validate(grammar, allow_heterogeneous=True)
    if not report.ok:
        raise ValueError(f"invalid grammar:\n{report}")
    k = grammar.k
    groups = []
    translations = []
    for gi, group in enumerate(grammar.groups):
        padded = group.alternatives + (group.alternatives[-1],) * (k - group.arity)
        groups.append(ProductionGroup(padded))
        translations.append(GroupTranslation(
            source_group=gi,
            target_groups=(gi,),
            source_arity=group.arity,
            forward=tuple((j,) for j in range(1, group.arity + 1))))
    out = PPCFG(grammar.symbols, tuple(groups), grammar.start, grammar.mode)
    return out, SettingTranslation("homogenize", grammar.n, grammar.n,
                                   tuple(translations))


def binarize(grammar: PPCFG) -> tuple[PPCFG, SettingTranslation]:
    """Convert an arity-k grammar (k > 2) to arity 2 with n*(k-1) chained groups.

    Requires a homogeneous grammar whose groups each have a single-symbol
    left-hand side shared by all alternatives, distinct across groups.  The
    original head starts each chain; fresh continuation nonterminals are
    named ``<head>#<group>#<position>``.
    """
    report = validate(grammar)
    if not report.ok:
        raise ValueError(f"invalid grammar:\n{report}")
    k = grammar.k
    if k <= 2:
        raise ValueError(f"binarize needs arity > 2, got {k}")
    heads = []
    for gi, group in enumerate(grammar.groups, start=1):
        lhss = {p.lhs for p in group.alternatives}
        if len(lhss) != 1 or len(next(iter(lhss))) != 1:
            raise ValueError(
                f"group {gi}: binarize needs a single shared one-symbol lhs")
        heads.append(next(iter(lhss))[0])
    if len(set(heads)) != len(heads):
        raise ValueError("binarize needs distinct head symbols across groups")

    nonterminals = set(grammar.symbols.nonterminals)
    groups: list[ProductionGroup] = []
    translations = []
    for gi, (group, head) in enumerate(zip(grammar.groups, heads)):
        chain = [head]
        for pos in range(2, k):
            name = f"{head}#{gi + 1}#{pos}"
            if name in nonterminals or name in grammar.symbols.terminals:
                raise ValueError(f"fresh nonterminal {name!r} collides")
            nonterminals.add(name)
            chain.append(name)
        first_target = len(groups)
        alts = group.alternatives
        for t in range(1, k):
            link = (chain[t - 1],)
            if t < k - 1:
                groups.append(ProductionGroup((
                    Production(link, alts[t - 1].rhs),
                    Production(link, (chain[t],)))))
            else:
                groups.append(ProductionGroup((
                    Production(link, alts[k - 2].rhs),
                    Production(link, alts[k - 1].rhs))))
        forward = []
        for j in range(1, k + 1):
            if j < k:
                forward.append(tuple(2 if t < j else 1 for t in range(1, k)))
            else:
                forward.append(tuple(2 for _ in range(1, k)))
        translations.append(GroupTranslation(
            source_group=gi,
            target_groups=tuple(range(first_target, first_target + k - 1)),
            source_arity=k,
            forward=tuple(forward)))

    out = PPCFG(SymbolTable(frozenset(nonterminals), grammar.symbols.terminals),
                tuple(groups), grammar.start, grammar.mode)
    return out, SettingTranslation("binarize", grammar.n, out.n, tuple(translations))


def format_translation(translation: SettingTranslation) -> str:
    """Sidecar text: one line per source group with its explicit index tables."""
    lines = [f"translation {translation.kind}",
             f"source-groups {translation.source_n}",
             f"target-groups {translation.target_n}"]
    for gt in translation.groups:
        targets = ",".join(str(t + 1) for t in gt.target_groups)
        cells = " ; ".join(
            f"{j} => {','.join(str(c) for c in gt.forward[j - 1])}"
            for j in range(1, gt.source_arity + 1))
        lines.append(f"group {gt.source_group + 1}: targets {targets} ; {cells}")
    return "\n".join(lines) + "\n"
