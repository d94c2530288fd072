"""Policy-aware transition systems built from a region map."""

import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Tuple

import networkx as nx

from ltlcompose.errors import UnknownStateError

logger = logging.getLogger(__name__)

# The empty-label policy. Kept as a label element until emptyCleanup removes it.
EMPTY = "{}"

Edge = Tuple[str, str]


def composite_symbol(label: Iterable[str]) -> str:
    """Name of the conjunction task for a label set, e.g. ``b&square``."""
    return "&".join(sorted(label))


def sort_label(label: Iterable[str]) -> List[str]:
    # "{" sorts after every identifier character, so the sentinel prints last
    return sorted(label)


@dataclass(frozen=True)
class State:
    id: str
    label: FrozenSet[str]
    tasks: FrozenSet[str]


@dataclass(frozen=True)
class TransitionSystem:
    states: Tuple[State, ...]
    transitions: Dict[Edge, FrozenSet[str]] = field(default_factory=dict)
    initial: Optional[str] = None
    alphabet: FrozenSet[str] = frozenset()
    composite: bool = False

    @cached_property
    def order(self) -> Dict[str, int]:
        return {s.id: i for i, s in enumerate(self.states)}

    @cached_property
    def _by_id(self) -> Dict[str, State]:
        return {s.id: s for s in self.states}

    def state(self, state_id: str) -> State:
        try:
            return self._by_id[state_id]
        except KeyError:
            raise UnknownStateError(f"unknown state {state_id!r}") from None

    def edges(self) -> List[Edge]:
        return sorted(self.transitions, key=lambda e: (self.order[e[0]], self.order[e[1]]))

    def outgoing(self, state_id: str) -> List[Tuple[str, FrozenSet[str]]]:
        out = [(dst, lab) for (src, dst), lab in self.transitions.items() if src == state_id]
        return sorted(out, key=lambda item: self.order[item[0]])

    def graph(self) -> nx.Graph:
        """Undirected topology graph, the one hop distances are measured on."""
        g = nx.Graph()
        g.add_nodes_from(s.id for s in self.states)
        g.add_edges_from(self.transitions)
        return g

    def task_symbols(self) -> FrozenSet[str]:
        return frozenset(t for s in self.states for t in s.tasks)

    def with_transitions(self, transitions: Dict[Edge, FrozenSet[str]]) -> "TransitionSystem":
        return replace(self, transitions=dict(transitions))


class Violation(NamedTuple):
    state: str
    symbol: str
    targets: Tuple[str, ...]


def build_initial_ts(regions, adjacency, initial_region, alphabet=None, composite=False):
    """One state per region, one unlabeled transition per ordered adjacent pair."""
    regions = sorted(regions, key=lambda r: r.index)
    ids = {r.id for r in regions}
    if initial_region is None:
        if regions:
            raise UnknownStateError("an initial region is required for a non-empty map")
    elif initial_region not in ids:
        raise UnknownStateError(f"unknown initial region {initial_region!r}")

    states = []
    for r in regions:
        if composite:
            tasks = frozenset([composite_symbol(r.label)]) if r.label else frozenset()
        else:
            tasks = r.label
        states.append(State(r.id, r.label, tasks))

    transitions = {}
    for src in (r.id for r in regions):
        for dst in adjacency.get(src, ()):
            if src == dst:
                continue
            if src not in adjacency.get(dst, ()):
                raise ValueError(f"adjacency is not symmetric for {src}-{dst}")
            transitions[(src, dst)] = frozenset()

    if alphabet is None:
        alphabet = frozenset(a for r in regions for a in r.label)
    ts = TransitionSystem(tuple(states), transitions, initial_region, frozenset(alphabet), composite)
    logger.info("initial TS: %d states, %d transitions", len(states), len(transitions))
    return ts


def generate_ts_labels(ts: TransitionSystem, qualifying=None) -> TransitionSystem:
    """Label every transition with the tasks whose states it approaches.

    For t=(start, end) and each state s: when d(start, s) > d(end, s) the tasks
    of s join L[t], or the empty-label policy when s has no tasks.
    ``qualifying`` restricts which states may contribute.
    """
    dist = dict(nx.all_pairs_shortest_path_length(ts.graph()))
    contributors = ts.states if qualifying is None else [s for s in ts.states if s.id in qualifying]

    labels = {}
    for start, end in ts.edges():
        label = set()
        d_start, d_end = dist[start], dist[end]
        for s in contributors:
            # start and end are adjacent, so s is reachable from both or from neither
            if s.id not in d_start:
                continue
            if d_start[s.id] > d_end[s.id]:
                label |= s.tasks if s.tasks else {EMPTY}
        labels[(start, end)] = frozenset(label)
    return ts.with_transitions(labels)


def is_deterministic(ts: TransitionSystem) -> Tuple[bool, List[Violation]]:
    violations = []
    for s in ts.states:
        targets_by_symbol = {}
        for dst, label in ts.outgoing(s.id):
            for sym in label:
                if sym != EMPTY:
                    targets_by_symbol.setdefault(sym, []).append(dst)
        for sym in sorted(targets_by_symbol):
            targets = targets_by_symbol[sym]
            if len(targets) > 1:
                violations.append(Violation(s.id, sym, tuple(targets)))
    return not violations, violations


def drop_unreachable(ts: TransitionSystem) -> TransitionSystem:
    """Remove states that cannot be reached from the initial state."""
    if ts.initial is None:
        return ts
    g = nx.DiGraph()
    g.add_nodes_from(s.id for s in ts.states)
    g.add_edges_from(ts.transitions)
    keep = nx.descendants(g, ts.initial) | {ts.initial}
    states = tuple(s for s in ts.states if s.id in keep)
    transitions = {e: lab for e, lab in ts.transitions.items() if e[0] in keep and e[1] in keep}
    logger.info("dropped %d unreachable states", len(ts.states) - len(states))
    return replace(ts, states=states, transitions=transitions)


def to_document(ts: TransitionSystem) -> dict:
    states = []
    for s in ts.states:
        entry = {"id": s.id, "label": sort_label(s.label)}
        if ts.composite:
            entry["tasks"] = sort_label(s.tasks)
        states.append(entry)
    return {
        "states": states,
        "transitions": [{"from": src, "to": dst, "label": sort_label(ts.transitions[(src, dst)])}
                        for src, dst in ts.edges()],
        "initial": ts.initial,
    }
