"""Checks of the abstraction against what the policies actually do on the grid.

Hop distances between regions cannot see how a policy crosses free space, so
two things are settled here by running the policy oracle itself:

``realize_transitions`` drops every transition (s, σ, s') whose policy, started
from some cell of s, first leaves s somewhere other than s'.

``find_executable_plan`` searches policy sequences over executed cells and
automaton states directly. The planner falls back to it when the product plan,
executed, does not produce the word it was planned for.
"""

import logging
from collections import deque
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ltlcompose.buchi import BuchiAutomaton
from ltlcompose.errors import UnreachableTargetError
from ltlcompose.gridworld import Cell, GridMap, Region, region_lookup
from ltlcompose.ltl import Ltl
from ltlcompose.mvpolicy import PolicySpec, check_trace, execute_plan, mv_path
from ltlcompose.product import Plan, ProductAutomaton, plan_word
from ltlcompose.pruner import REALIZE, PruneReport, SymbolRemoval, TransitionRemoval
from ltlcompose.tsys import EMPTY, TransitionSystem, sort_label

logger = logging.getLogger(__name__)

# (cell where a policy starts or ends, automaton state)
CellNode = Tuple[Cell, str]


def _row_major(cells: Iterable[Cell]) -> List[Cell]:
    return sorted(cells, key=lambda c: (c[1], c[0]))


class PolicyOracle:
    """mv_path, memoized per (cell, policy symbol); None when the target is unreachable."""

    def __init__(self, grid: GridMap):
        self.grid = grid
        self._paths: Dict[Tuple[Cell, str], Optional[List[Cell]]] = {}

    def path(self, cell: Cell, symbol: str) -> Optional[List[Cell]]:
        key = (cell, symbol)
        if key not in self._paths:
            try:
                self._paths[key] = mv_path(self.grid, cell, PolicySpec.parse(symbol))
            except UnreachableTargetError:
                self._paths[key] = None
        return self._paths[key]

    def letters(self, path: Sequence[Cell]) -> List[frozenset]:
        """Labels the path produces after its first cell."""
        label = self.grid.label
        return [label(c) for prev, c in zip(path, path[1:]) if label(c) != label(prev)]


# --------------------------------------------------
# Realizable transitions
# --------------------------------------------------

def realize_transitions(ts: TransitionSystem, grid: GridMap, regions: Sequence[Region],
                        representative: Dict[str, str], report: Optional[PruneReport] = None,
                        oracle: Optional[PolicyOracle] = None) -> TransitionSystem:
    oracle = oracle or PolicyOracle(grid)
    owner = region_lookup(regions)
    members: Dict[str, List[Cell]] = {}
    for r in sorted(regions, key=lambda r: r.index):
        members.setdefault(representative.get(r.id, r.id), []).extend(_row_major(r.cells))

    def lands_in(cell, symbol, dst):
        path = oracle.path(cell, symbol)
        if path is None:
            return False
        first = next((c for c in path if owner[c] != owner[cell]), None)
        return first is not None and representative.get(owner[first], owner[first]) == dst

    labels = dict(ts.transitions)
    for src, dst in ts.edges():
        for sym in sort_label(labels[(src, dst)]):
            if sym == EMPTY:
                continue
            if not all(lands_in(cell, sym, dst) for cell in members.get(src, ())):
                labels[(src, dst)] = labels[(src, dst)] - {sym}
                if report is not None:
                    report.removed_symbols.append(SymbolRemoval(src, dst, sym, REALIZE))
        if not labels[(src, dst)]:
            del labels[(src, dst)]
            if report is not None:
                report.removed_transitions.append(TransitionRemoval(src, dst, REALIZE))

    removed = len(ts.transitions) - len(labels)
    if removed:
        logger.info("realize: %d transitions not reproduced by the policies", removed)
    return ts.with_transitions(labels)


# --------------------------------------------------
# Plans checked against execution
# --------------------------------------------------

def executes_as_planned(grid: GridMap, start: Cell, pa: ProductAutomaton, plan: Plan,
                        formula: Ltl) -> bool:
    """The executed word is the planned one, a cycle returns to the cell it left,
    and the trace satisfies the formula."""
    try:
        trace = execute_plan(grid, start, plan)
    except UnreachableTargetError:
        return False
    if [sort_label(letter) for letter in trace.word] != plan_word(pa, plan):
        return False
    if plan.cycle:
        begin = trace.segments[len(plan.prefix)].start_index
        if trace.cells[-1] != trace.cells[begin]:
            return False
    return check_trace(trace, formula)


def _runs(aut: BuchiAutomaton, q: str, letters) -> List[Tuple[str, bool]]:
    """(state reached, whether an accepting state was passed) for every run over letters."""
    runs = {(q, False)}
    for letter in letters:
        runs = {(q2, acc or q2 in aut.accepting) for q1, acc in runs for q2 in aut.step(q1, letter)}
    return sorted(runs)


def find_executable_plan(grid: GridMap, start: Cell, aut: BuchiAutomaton, symbols: Iterable[str],
                         state_of: Dict[Cell, str],
                         oracle: Optional[PolicyOracle] = None) -> Optional[Plan]:
    """Shortest policy sequence whose execution from ``start`` is accepted."""
    oracle = oracle or PolicyOracle(grid)
    symbols = sorted(symbols)
    aut_order = {q: i for i, q in enumerate(aut.states)}
    moves: Dict[CellNode, List[Tuple[str, CellNode, bool, Tuple[frozenset, ...]]]] = {}

    def edges(node: CellNode):
        if node not in moves:
            cell, q = node
            found = []
            for sym in symbols:
                path = oracle.path(cell, sym)
                if path is None:
                    continue
                letters = tuple(oracle.letters(path))
                if not letters:
                    continue
                for q2, acc in _runs(aut, q, letters):
                    found.append((sym, (path[-1], q2), acc, letters))
            moves[node] = found
        return moves[node]

    def key(node: CellNode):
        return node[0][1], node[0][0], aut_order[node[1]]

    sources = sorted({(start, q) for q in aut.step(aut.initial, grid.label(start))}, key=key)
    parent: Dict[CellNode, Optional[Tuple[CellNode, str, tuple]]] = {s: None for s in sources}
    dist = {s: 0 for s in sources}
    queue = deque(sources)
    while queue:
        node = queue.popleft()
        for sym, nxt, _, letters in edges(node):
            if nxt not in dist:
                dist[nxt] = dist[node] + 1
                parent[nxt] = (node, sym, letters)
                queue.append(nxt)

    best = None
    for node in sorted(dist, key=lambda n: (dist[n], key(n))):
        if best is not None and dist[node] >= best[0]:
            break
        if node[1] in aut.empty_suffix_states:
            best = (dist[node], node, None)
            break
        cycle = _accepting_cycle(edges, node)
        if cycle is not None and (best is None or dist[node] + len(cycle[0]) < best[0]):
            best = (dist[node] + len(cycle[0]), node, cycle)

    if best is None:
        logger.info("no executable plan from %s", start)
        return None

    _, node, cycle = best
    prefix, path, word = [], [node], []
    while parent[path[0]] is not None:
        prev, sym, letters = parent[path[0]]
        prefix.insert(0, sym)
        word[:0] = letters
        path.insert(0, prev)
    cycle_symbols = []
    if cycle is not None:
        cycle_symbols, cycle_path, cycle_letters = cycle
        path += cycle_path[1:]
        word += cycle_letters
    word.insert(0, grid.label(start))

    plan = Plan(tuple(prefix), tuple(cycle_symbols),
                tuple((state_of[cell], q) for cell, q in path),
                tuple(tuple(sort_label(letter)) for letter in word))
    logger.info("executable plan: prefix %s, cycle %s", list(plan.prefix), list(plan.cycle))
    return plan


def _accepting_cycle(edges, node: CellNode):
    """Shortest return to ``node`` that passes an accepting automaton state."""
    start = (node, False)
    parent = {start: None}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for sym, nxt, acc, letters in edges(cur[0]):
            state = (nxt, cur[1] or acc)
            if state == (node, True):
                symbols, path, word = [sym], [node], list(letters)
                while parent[cur] is not None:
                    prev, s, lets = parent[cur]
                    symbols.insert(0, s)
                    path.insert(0, cur[0])
                    word[:0] = lets
                    cur = prev
                path.insert(0, node)
                return symbols, path, word
            if state not in parent:
                parent[state] = (cur, sym, letters)
                queue.append(state)
    return None
