"""Pruning of a labeled transition system into a deterministic, realizable one.

Pipeline: case 1 (merge equivalent states) once over the whole system, then
case 2 (ambiguous shared symbols) and case 3 (ineffectual symbols) per state,
then emptyCleanup and a closing case-1 merge. Every removal is recorded in a
PruneReport.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, NamedTuple, Optional, Tuple

import networkx as nx

from ltlcompose.tsys import EMPTY, TransitionSystem

logger = logging.getLogger(__name__)

CASE1 = "case1"
CASE2 = "case2"
CASE3 = "case3"
EMPTY_CLEANUP = "emptyCleanup"
REALIZE = "realize"


class SymbolRemoval(NamedTuple):
    source: str
    target: str
    symbol: str
    case: str


class TransitionRemoval(NamedTuple):
    source: str
    target: str
    case: str


@dataclass
class PruneReport:
    merged_state_groups: List[Tuple[str, ...]] = field(default_factory=list)
    removed_symbols: List[SymbolRemoval] = field(default_factory=list)
    removed_transitions: List[TransitionRemoval] = field(default_factory=list)
    # unpruned state id -> state id in the pruned system
    representative: Dict[str, str] = field(default_factory=dict)
    # one full quotient map per case-1 merge, in the order they were applied
    rounds: List[Dict[str, str]] = field(default_factory=list)

    def to_document(self) -> dict:
        return {
            "merged_state_groups": [list(g) for g in self.merged_state_groups],
            "removed_symbols": [r._asdict() for r in self.removed_symbols],
            "removed_transitions": [r._asdict() for r in self.removed_transitions],
        }


def _strip(labels, edge, symbol, case, report):
    labels[edge] = labels[edge] - {symbol}
    if report is not None:
        report.removed_symbols.append(SymbolRemoval(edge[0], edge[1], symbol, case))


# --------------------------------------------------
# Case 1: equivalent states
# --------------------------------------------------

def _renumber(keys, states):
    numbering = {}
    blocks = {}
    for s in states:
        blocks[s.id] = numbering.setdefault(keys[s.id], len(numbering))
    return blocks


def equivalence_blocks(ts: TransitionSystem) -> Dict[str, int]:
    """Coarsest partition that respects state labels and labeled in/out edges."""
    incoming = {s.id: [] for s in ts.states}
    outgoing = {s.id: [] for s in ts.states}
    for (src, dst), label in ts.transitions.items():
        outgoing[src].append((label, dst))
        incoming[dst].append((label, src))

    blocks = _renumber({s.id: s.label for s in ts.states}, ts.states)
    while True:
        keys = {}
        for s in ts.states:
            out = frozenset((label, blocks[dst]) for label, dst in outgoing[s.id])
            inc = frozenset((label, blocks[src]) for label, src in incoming[s.id])
            keys[s.id] = (blocks[s.id], out, inc)
        refined = _renumber(keys, ts.states)
        if len(set(refined.values())) == len(set(blocks.values())):
            return refined
        blocks = refined


def _quotient(ts: TransitionSystem, rep: Dict[str, str]) -> TransitionSystem:
    states = tuple(s for s in ts.states if rep[s.id] == s.id)
    transitions = {}
    for (src, dst), label in ts.transitions.items():
        edge = (rep[src], rep[dst])
        if edge[0] == edge[1]:
            continue
        transitions[edge] = transitions.get(edge, frozenset()) | label
    initial = rep[ts.initial] if ts.initial is not None else None
    return replace(ts, states=states, transitions=transitions, initial=initial)


def _merge_once(ts: TransitionSystem, report: Optional[PruneReport]) -> Dict[str, str]:
    blocks = equivalence_blocks(ts)
    members = {}
    for s in ts.states:
        members.setdefault(blocks[s.id], []).append(s.id)

    rep = {}
    for group in members.values():
        for sid in group:
            rep[sid] = group[0]
        if len(group) > 1 and report is not None:
            report.merged_state_groups.append(tuple(group))
    if report is not None:
        for src, dst in ts.edges():
            if rep[src] != src or rep[dst] != dst:
                report.removed_transitions.append(TransitionRemoval(src, dst, CASE1))
    return rep


def case1_merge_equivalent(ts: TransitionSystem, report: Optional[PruneReport] = None) -> TransitionSystem:
    """Quotient by equivalence until no two states are equivalent; dropping the
    edges inside a merged block can make further states equivalent."""
    merged = ts
    total = {s.id: s.id for s in ts.states}
    while True:
        rep = _merge_once(merged, report)
        total = {s: rep[r] for s, r in total.items()}
        before = len(merged.states)
        merged = _quotient(merged, rep)
        if len(merged.states) == before:
            break

    if report is not None:
        report.rounds.append(dict(total))
        if report.representative:
            report.representative = {s: total[r] for s, r in report.representative.items()}
        else:
            report.representative = dict(total)
    logger.debug("case1: %d -> %d states", len(ts.states), len(merged.states))
    return merged


# --------------------------------------------------
# Case 2: ambiguous shared symbols
# --------------------------------------------------

def case2_disambiguate(ts: TransitionSystem, state: str, symbols=None, distances=None,
                       report: Optional[PruneReport] = None) -> TransitionSystem:
    """Keep a symbol shared by several outgoing transitions only on the one whose
    end state is uniquely nearest to a state carrying that symbol; on a tie the
    symbol is deleted from all of them."""
    if distances is None:
        distances = dict(nx.all_pairs_shortest_path_length(ts.graph()))
    if symbols is None:
        symbols = ts.task_symbols()

    labels = dict(ts.transitions)
    outgoing = ts.outgoing(state)
    shared = sorted({sym for _, label in outgoing for sym in label} & set(symbols))
    for sym in shared:
        ends = [dst for dst, label in outgoing if sym in label]
        if len(ends) < 2:
            continue
        targets = [s.id for s in ts.states if sym in s.tasks]
        scores = {}
        for end in ends:
            reach = [distances[end][t] for t in targets if t in distances[end]]
            scores[end] = min(reach) if reach else float("inf")
        best = min(scores.values())
        winners = [end for end in ends if scores[end] == best]
        keep = winners[0] if len(winners) == 1 else None
        for end in ends:
            if end != keep:
                _strip(labels, (state, end), sym, CASE2, report)
    return ts.with_transitions(labels)


# --------------------------------------------------
# Case 3: ineffectual symbols
# --------------------------------------------------

def case3_remove_ineffectual(ts: TransitionSystem, state: str,
                             report: Optional[PruneReport] = None) -> TransitionSystem:
    own = ts.state(state).tasks
    labels = dict(ts.transitions)
    for dst, label in ts.outgoing(state):
        for sym in sorted(label & own):
            _strip(labels, (state, dst), sym, CASE3, report)
    return ts.with_transitions(labels)


# --------------------------------------------------
# emptyCleanup
# --------------------------------------------------

def empty_cleanup(ts: TransitionSystem, report: Optional[PruneReport] = None) -> TransitionSystem:
    labels = dict(ts.transitions)
    for edge in ts.edges():
        if EMPTY in labels[edge]:
            _strip(labels, edge, EMPTY, EMPTY_CLEANUP, report)
        if not labels[edge]:
            del labels[edge]
            if report is not None:
                report.removed_transitions.append(TransitionRemoval(edge[0], edge[1], EMPTY_CLEANUP))
    return ts.with_transitions(labels)


# --------------------------------------------------
# Full pipeline
# --------------------------------------------------

def prune(ts: TransitionSystem, symbols=None, order=None) -> Tuple[TransitionSystem, PruneReport]:
    report = PruneReport()
    pruned = case1_merge_equivalent(ts, report)
    distances = dict(nx.all_pairs_shortest_path_length(pruned.graph()))
    if symbols is None:
        symbols = pruned.task_symbols()

    kept = {s.id for s in pruned.states}
    sequence = [s.id for s in pruned.states] if order is None else [s for s in order if s in kept]
    for state in sequence:
        pruned = case2_disambiguate(pruned, state, symbols, distances, report)
        pruned = case3_remove_ineffectual(pruned, state, report)
    pruned = empty_cleanup(pruned, report)
    # removals can leave states that are now equivalent
    pruned = case1_merge_equivalent(pruned, report)

    logger.info("pruned TS: %d states, %d transitions (%d symbols removed)",
                len(pruned.states), len(pruned.transitions), len(report.removed_symbols))
    return pruned, report


def prune_stages(ts: TransitionSystem) -> List[TransitionSystem]:
    """Snapshots after case 1, all of case 2, all of case 3 and emptyCleanup."""
    stage1 = case1_merge_equivalent(ts)
    distances = dict(nx.all_pairs_shortest_path_length(stage1.graph()))
    symbols = stage1.task_symbols()
    stage2 = stage1
    for s in stage1.states:
        stage2 = case2_disambiguate(stage2, s.id, symbols, distances)
    stage3 = stage2
    for s in stage2.states:
        stage3 = case3_remove_ineffectual(stage3, s.id)
    return [stage1, stage2, stage3, case1_merge_equivalent(empty_cleanup(stage3))]


def _apply_removals(ts: TransitionSystem, report: PruneReport, cases) -> TransitionSystem:
    labels = dict(ts.transitions)
    for r in report.removed_symbols:
        if r.case in cases:
            labels[(r.source, r.target)] = labels[(r.source, r.target)] - {r.symbol}
    for r in report.removed_transitions:
        if r.case in cases and r.case != CASE1:
            del labels[(r.source, r.target)]
    return ts.with_transitions(labels)


def replay_report(ts: TransitionSystem, report: PruneReport) -> TransitionSystem:
    """Re-apply a recorded prune to the unpruned system."""
    rounds = report.rounds or [report.representative]
    replayed = _quotient(ts, {s.id: rounds[0].get(s.id, s.id) for s in ts.states})
    replayed = _apply_removals(replayed, report, (CASE2, CASE3, EMPTY_CLEANUP))
    for rep in rounds[1:]:
        replayed = _quotient(replayed, {s.id: rep.get(s.id, s.id) for s in replayed.states})
    return _apply_removals(replayed, report, (REALIZE,))
