"""Product of a pruned transition system with a Büchi automaton, and plan search.

A plan is a sequence of task policies. A policy keeps running until the agent
is in a state that satisfies it, so the search only switches to a different
policy where the current one is complete. A plan either ends in a state from
which the automaton accepts the empty word forever (co-safe) or closes a cycle
through an accepting state.
"""

import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, List, Optional, Tuple

from ltlcompose.buchi import BuchiAutomaton
from ltlcompose.errors import AlphabetMismatchError
from ltlcompose.tsys import EMPTY, TransitionSystem, is_deterministic, sort_label

logger = logging.getLogger(__name__)

PAState = Tuple[str, str]
# (product state, policy still running or None)
Node = Tuple[PAState, Optional[str]]


@dataclass(frozen=True)
class ProductAutomaton:
    ts: TransitionSystem
    aut: BuchiAutomaton
    states: Tuple[PAState, ...]
    initial: Tuple[PAState, ...]
    accepting: FrozenSet[PAState]
    transitions: Dict[PAState, Tuple[Tuple[str, PAState], ...]]

    @cached_property
    def _aut_order(self) -> Dict[str, int]:
        return {q: i for i, q in enumerate(self.aut.states)}

    def key(self, state: PAState) -> Tuple[int, int]:
        return self.ts.order[state[0]], self._aut_order[state[1]]

    def is_final(self, state: PAState) -> bool:
        """The plan may stop here: the automaton accepts empty letters from now on."""
        return state[1] in self.aut.empty_suffix_states

    def completes(self, symbol: str, state: PAState) -> bool:
        return symbol in self.ts.state(state[0]).tasks

    def to_document(self) -> dict:
        return {
            "states": [list(p) for p in self.states],
            "initial": [list(p) for p in self.initial],
            "accepting": [list(p) for p in self.states if p in self.accepting],
            "transitions": [{"from": list(p), "policy": sym, "to": list(q)}
                            for p in self.states for sym, q in self.transitions[p]],
        }


@dataclass(frozen=True)
class Plan:
    prefix: Tuple[str, ...]
    cycle: Tuple[str, ...]
    pa_path: Tuple[PAState, ...]
    # letters the plan produces when executed, when they differ from the visited TS labels
    word: Optional[Tuple[Tuple[str, ...], ...]] = None

    def __len__(self):
        return len(self.prefix) + len(self.cycle)

    def to_document(self) -> dict:
        return {"prefix": list(self.prefix), "cycle": list(self.cycle),
                "pa_path": [list(p) for p in self.pa_path]}


def build_product(ts: TransitionSystem, aut: BuchiAutomaton) -> ProductAutomaton:
    missing = aut.atoms - ts.alphabet
    if missing:
        raise AlphabetMismatchError(f"formula atoms {sorted(missing)} are not in the map alphabet "
                                    f"{sorted(ts.alphabet)}")
    deterministic, violations = is_deterministic(ts)
    if not deterministic:
        logger.warning("product over a non-deterministic TS (%d violations)", len(violations))

    aut_order = {q: i for i, q in enumerate(aut.states)}

    def order(p):
        return ts.order[p[0]], aut_order[p[1]]

    initial = []
    if ts.initial is not None:
        start_label = ts.state(ts.initial).label
        initial = sorted({(ts.initial, q) for q in aut.step(aut.initial, start_label)}, key=order)

    transitions = {}
    queue = deque(initial)
    seen = set(initial)
    while queue:
        s, q = queue.popleft()
        moves = []
        for dst, label in ts.outgoing(s):
            symbols = sorted(label - {EMPTY})
            if not symbols:
                continue
            for q2 in aut.step(q, ts.state(dst).label):
                for sym in symbols:
                    moves.append((sym, (dst, q2)))
        moves.sort(key=lambda m: (order(m[1]), m[0]))
        transitions[(s, q)] = tuple(moves)
        for _, p in moves:
            if p not in seen:
                seen.add(p)
                queue.append(p)

    states = tuple(sorted(seen, key=order))
    accepting = frozenset(p for p in states if p[1] in aut.accepting)
    logger.info("product: %d states, %d accepting", len(states), len(accepting))
    return ProductAutomaton(ts, aut, states, tuple(initial), accepting, transitions)


# --------------------------------------------------
# Plan search
# --------------------------------------------------

def _moves(pa: ProductAutomaton, node: Node):
    state, running = node
    for sym, nxt in pa.transitions[state]:
        if running is not None and sym != running:
            continue
        yield sym, (nxt, None if pa.completes(sym, nxt) else sym)


def _search(pa: ProductAutomaton, sources: List[Node]):
    parent: Dict[Node, Optional[Tuple[Node, str]]] = {s: None for s in sources}
    dist = {s: 0 for s in sources}
    queue = deque(sources)
    while queue:
        node = queue.popleft()
        for sym, nxt in _moves(pa, node):
            if nxt not in dist:
                dist[nxt] = dist[node] + 1
                parent[nxt] = (node, sym)
                queue.append(nxt)
    return dist, parent


def _shortest_cycle(pa: ProductAutomaton, node: Node):
    parent = {}
    queue = deque()
    for sym, nxt in _moves(pa, node):
        if nxt == node:
            return [sym], [node]
        if nxt not in parent:
            parent[nxt] = (node, sym)
            queue.append(nxt)
    while queue:
        cur = queue.popleft()
        for sym, nxt in _moves(pa, cur):
            if nxt == node:
                symbols, path = _unwind(parent, cur, node)
                return symbols + [sym], path + [node]
            if nxt not in parent:
                parent[nxt] = (cur, sym)
                queue.append(nxt)
    return None


def _unwind(parent, node: Node, stop=None):
    symbols, path = [], [node]
    while node != stop and parent.get(node) is not None:
        node, sym = parent[node]
        symbols.append(sym)
        path.append(node)
    return symbols[::-1], path[::-1]


def find_plan(pa: ProductAutomaton) -> Optional[Plan]:
    """Shortest accepting lasso, by number of policies; None when infeasible."""
    sources = [(p, None) for p in pa.initial]
    dist, parent = _search(pa, sources)

    best = None
    for node in sorted((n for n in dist if n[1] is None), key=lambda n: pa.key(n[0])):
        state = node[0]
        if pa.is_final(state):
            candidate = (dist[node], pa.key(state), node, None)
        elif state in pa.accepting:
            if best is not None and dist[node] + 1 > best[0]:
                continue
            cycle = _shortest_cycle(pa, node)
            if cycle is None:
                continue
            candidate = (dist[node] + len(cycle[0]), pa.key(state), node, cycle)
        else:
            continue
        if best is None or candidate[:2] < best[:2]:
            best = candidate

    if best is None:
        logger.info("no accepting lasso in a product of %d states", len(pa.states))
        return None

    _, _, node, cycle = best
    prefix, path = _unwind(parent, node)
    pa_path = [n[0] for n in path]
    cycle_symbols = []
    if cycle is not None:
        cycle_symbols = cycle[0]
        pa_path += [n[0] for n in cycle[1][1:]]
    plan = Plan(tuple(prefix), tuple(cycle_symbols), tuple(pa_path))
    logger.info("plan: prefix %s, cycle %s", list(plan.prefix), list(plan.cycle))
    return plan


def plan_is_valid(pa: ProductAutomaton, plan: Plan) -> bool:
    """Replay a plan through the product's transition relation."""
    if not plan.pa_path or plan.pa_path[0] not in pa.initial:
        return False
    symbols = list(plan.prefix) + list(plan.cycle)
    if len(plan.pa_path) != len(symbols) + 1:
        return False
    node: Node = (plan.pa_path[0], None)
    for sym, target in zip(symbols, plan.pa_path[1:]):
        nxt = next((n for s, n in _moves(pa, node) if s == sym and n[0] == target), None)
        if nxt is None:
            return False
        node = nxt
    if node[1] is not None:
        return False
    end = plan.pa_path[len(plan.prefix)]
    if not plan.cycle:
        return pa.is_final(end)
    return end in pa.accepting and plan.pa_path[-1] == end


def plan_word(pa: ProductAutomaton, plan: Plan) -> List[List[str]]:
    """Labels of the visited TS states, the word the plan is expected to produce."""
    if plan.word is not None:
        return [list(letter) for letter in plan.word]
    return [sort_label(pa.ts.state(s).label) for s, _ in plan.pa_path]
