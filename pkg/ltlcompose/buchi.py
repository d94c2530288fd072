"""Büchi automata for LTL formulas and acceptance of ultimately periodic words.

The automaton is built with the tableau construction of Gerth, Peled, Vardi
and Wolper, then degeneralized with the counter construction. A transition
into a tableau node reads one letter (a set of atoms) and is guarded by the
literals the node holds, so the first letter is read on the edge out of the
initial state.
"""

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Sequence, Set, Tuple

import networkx as nx

from ltlcompose.ltl import (Always, And, Atom, Eventually, Ltl, NotAtom, Or, Top, Until,
                            atoms, to_text)

logger = logging.getLogger(__name__)

Literal = Tuple[str, bool]


@dataclass(frozen=True)
class Guard:
    """Boolean combination of atoms in disjunctive normal form."""
    clauses: FrozenSet[FrozenSet[Literal]]

    @classmethod
    def true(cls) -> "Guard":
        return cls(frozenset([frozenset()]))

    @classmethod
    def conjunction(cls, literals: Iterable[Literal]) -> "Guard":
        return cls(frozenset([frozenset(literals)]))

    def holds(self, letter: Iterable[str]) -> bool:
        letter = frozenset(letter)
        return any(all((name in letter) == positive for name, positive in clause)
                   for clause in self.clauses)

    def atoms(self) -> FrozenSet[str]:
        return frozenset(name for clause in self.clauses for name, _ in clause)

    def __or__(self, other: "Guard") -> "Guard":
        return Guard(self.clauses | other.clauses)

    def __str__(self) -> str:
        if not self.clauses:
            return "false"
        rendered = []
        for clause in self.clauses:
            lits = sorted(clause, key=lambda lit: (lit[0], not lit[1]))
            rendered.append(" & ".join(n if pos else f"!{n}" for n, pos in lits) or "true")
        return " | ".join(sorted(rendered))


@dataclass(frozen=True)
class BuchiAutomaton:
    states: Tuple[str, ...]
    initial: str
    accepting: FrozenSet[str]
    transitions: Tuple[Tuple[str, Guard, str], ...]
    atoms: FrozenSet[str] = frozenset()

    @cached_property
    def _successors(self) -> Dict[str, List[Tuple[Guard, str]]]:
        succ = {q: [] for q in self.states}
        for src, guard, dst in self.transitions:
            succ[src].append((guard, dst))
        return succ

    def successors(self, state: str) -> List[Tuple[Guard, str]]:
        return self._successors[state]

    def step(self, state: str, letter) -> List[str]:
        return [dst for guard, dst in self._successors[state] if guard.holds(letter)]

    @cached_property
    def empty_suffix_states(self) -> FrozenSet[str]:
        """States from which the word of empty letters is accepted."""
        g = nx.DiGraph()
        g.add_nodes_from(self.states)
        g.add_edges_from((src, dst) for src, guard, dst in self.transitions
                         if guard.holds(frozenset()))
        good = set()
        for scc in nx.strongly_connected_components(g):
            cyclic = len(scc) > 1 or any(g.has_edge(q, q) for q in scc)
            if cyclic and scc & self.accepting:
                good |= scc
        for q in list(good):
            good |= nx.ancestors(g, q)
        return frozenset(good)

    def to_document(self) -> dict:
        return {
            "states": list(self.states),
            "initial": self.initial,
            "accepting": [q for q in self.states if q in self.accepting],
            "transitions": [{"from": s, "to": d, "guard": str(g)} for s, g, d in self.transitions],
        }


# --------------------------------------------------
# Tableau construction
# --------------------------------------------------

_INIT = -1


@dataclass
class _Node:
    name: int
    incoming: Set[int]
    new: Set[Ltl] = field(default_factory=set)
    old: Set[Ltl] = field(default_factory=set)
    next: Set[Ltl] = field(default_factory=set)

    def split(self, name: int) -> "_Node":
        return _Node(name, set(self.incoming), set(self.new), set(self.old), set(self.next))


def _negated(literal: Ltl) -> Ltl:
    if isinstance(literal, Atom):
        return NotAtom(literal.name)
    return Atom(literal.name)


def _expand(formula: Ltl) -> List[_Node]:
    names = itertools.count()
    nodes: List[_Node] = []
    stack = [_Node(next(names), {_INIT}, {formula})]
    while stack:
        node = stack.pop()
        if not node.new:
            twin = next((n for n in nodes if n.old == node.old and n.next == node.next), None)
            if twin is not None:
                twin.incoming |= node.incoming
                continue
            nodes.append(node)
            stack.append(_Node(next(names), {node.name}, set(node.next)))
            continue

        eta = min(node.new, key=to_text)
        node.new.discard(eta)
        if eta in node.old:
            stack.append(node)
            continue

        match eta:
            case Top():
                node.old.add(eta)
                stack.append(node)
            case Atom() | NotAtom():
                if _negated(eta) in node.old:
                    continue
                node.old.add(eta)
                stack.append(node)
            case And(l, r):
                node.new |= {l, r} - node.old
                node.old.add(eta)
                stack.append(node)
            case Or(l, r):
                other = node.split(next(names))
                node.new |= {l} - node.old
                other.new |= {r} - other.old
                node.old.add(eta)
                other.old.add(eta)
                stack.extend([other, node])
            case Until(l, r):
                other = node.split(next(names))
                node.new |= {l} - node.old
                node.next.add(eta)
                other.new |= {r} - other.old
                node.old.add(eta)
                other.old.add(eta)
                stack.extend([other, node])
            case Eventually(f):
                other = node.split(next(names))
                node.next.add(eta)
                other.new |= {f} - other.old
                node.old.add(eta)
                other.old.add(eta)
                stack.extend([other, node])
            case Always(f):
                node.new |= {f} - node.old
                node.next.add(eta)
                node.old.add(eta)
                stack.append(node)
            case _:
                raise ValueError(f"Unsupported LTL construct: {eta}")
    return nodes


def _obligations(formula: Ltl) -> List[Tuple[Ltl, Ltl]]:
    """(until-like subformula, its goal) pairs, in a stable order."""
    found = {}

    def visit(f):
        match f:
            case Until(l, r):
                found[f] = r
                visit(l)
                visit(r)
            case Eventually(g):
                found[f] = g
                visit(g)
            case Always(g):
                visit(g)
            case And(l, r) | Or(l, r):
                visit(l)
                visit(r)

    visit(formula)
    return sorted(found.items(), key=lambda item: to_text(item[0]))


def _node_guard(node: _Node) -> Guard:
    literals = [(f.name, isinstance(f, Atom)) for f in node.old if isinstance(f, (Atom, NotAtom))]
    return Guard.conjunction(literals)


def to_buchi(formula: Ltl) -> BuchiAutomaton:
    nodes = _expand(formula)
    by_name = {n.name: n for n in nodes}
    obligations = _obligations(formula)
    if obligations:
        fair = [frozenset(n.name for n in nodes if u not in n.old or goal in n.old)
                for u, goal in obligations]
    else:
        fair = [frozenset(by_name)]
    k = len(fair)

    succ = {name: [] for name in list(by_name) + [_INIT]}
    for n in nodes:
        for m in n.incoming:
            succ[m].append(n.name)

    # degeneralize: (node, counter); the counter advances when leaving a fair node
    start = (_INIT, 0)
    ids = {start: "s0"}
    queue = [start]
    transitions = []
    for cur in queue:
        name, i = cur
        j = (i + 1) % k if name != _INIT and name in fair[i] else i
        for target in sorted(succ[name]):
            nxt = (target, j)
            if nxt not in ids:
                ids[nxt] = f"s{len(ids)}"
                queue.append(nxt)
            transitions.append((ids[cur], _node_guard(by_name[target]), ids[nxt]))

    accepting = frozenset(ids[(name, i)] for name, i in ids if name != _INIT and i == 0
                          and name in fair[0])
    aut = BuchiAutomaton(tuple(ids.values()), "s0", accepting, tuple(transitions), atoms(formula))
    logger.debug("automaton for %s: %d tableau nodes, %d states, %d accepting",
                 to_text(formula), len(nodes), len(aut.states), len(accepting))
    return aut


# --------------------------------------------------
# Acceptance of lasso words
# --------------------------------------------------

def accepts_from(aut: BuchiAutomaton, starts: Iterable[str], prefix: Sequence, cycle: Sequence) -> bool:
    """True iff prefix . cycle^omega has an accepting run from one of ``starts``."""
    if not cycle:
        raise ValueError("cycle must be non-empty")
    word = [frozenset(letter) for letter in list(prefix) + list(cycle)]
    n, total = len(prefix), len(prefix) + len(cycle)

    g = nx.DiGraph()
    frontier = [(q, 0) for q in starts]
    g.add_nodes_from(frontier)
    while frontier:
        q, p = frontier.pop()
        nxt = p + 1 if p + 1 < total else n
        for dst in aut.step(q, word[p]):
            node = (dst, nxt)
            if node not in g:
                frontier.append(node)
            g.add_edge((q, p), node)

    for scc in nx.strongly_connected_components(g):
        cyclic = len(scc) > 1 or any(g.has_edge(v, v) for v in scc)
        if cyclic and any(q in aut.accepting for q, _ in scc):
            return True
    return False


def accepts_lasso(aut: BuchiAutomaton, prefix: Sequence, cycle: Sequence) -> bool:
    return accepts_from(aut, [aut.initial], prefix, cycle)
