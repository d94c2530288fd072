"""Minimum-violation execution of task policies over a labeled grid.

A policy targets a conjunction of literals such as ``b&!square``. Its path
stops at the first cell whose label satisfies the conjunction and, among all
such paths, enters the fewest labeled regions that do not satisfy it, then
takes the fewest steps. Equal-cost paths are ordered by the action order
up, down, left, right.
"""

import heapq
import itertools
import logging
from dataclasses import dataclass
from typing import FrozenSet, List, NamedTuple, Optional, Sequence, Tuple

from ltlcompose.buchi import accepts_lasso, to_buchi
from ltlcompose.errors import PlanError, UnreachableTargetError
from ltlcompose.gridworld import Cell, GridMap
from ltlcompose.ltl import Ltl
from ltlcompose.product import Plan
from ltlcompose.tsys import sort_label

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PolicySpec:
    positive: FrozenSet[str]
    negative: FrozenSet[str] = frozenset()

    @classmethod
    def parse(cls, symbol: str) -> "PolicySpec":
        positive, negative = set(), set()
        for literal in symbol.split("&"):
            literal = literal.strip()
            if literal.startswith("!"):
                negative.add(literal[1:].strip())
            elif literal:
                positive.add(literal)
        if not positive:
            raise PlanError(f"policy {symbol!r} needs at least one positive literal")
        if "" in negative or positive & negative:
            raise PlanError(f"policy {symbol!r} is not a satisfiable conjunction")
        return cls(frozenset(positive), frozenset(negative))

    def satisfied_by(self, label) -> bool:
        return self.positive <= label and not (self.negative & label)

    def __str__(self) -> str:
        return "&".join(sorted(self.positive) + [f"!{n}" for n in sorted(self.negative)])


def _violates(grid: GridMap, spec: PolicySpec, prev: Cell, cell: Cell) -> bool:
    # adjacent cells with equal labels belong to one region
    label = grid.label(cell)
    return bool(label) and label != grid.label(prev) and not spec.satisfied_by(label)


def _search(grid: GridMap, start: Cell, spec: PolicySpec) -> Tuple[List[Cell], int]:
    if not grid.is_free(start):
        raise PlanError(f"start cell {start} is not a free cell")
    if spec.satisfied_by(grid.label(start)):
        return [start], 0

    counter = itertools.count()
    best = {start: (0, 0)}
    parent = {start: None}
    heap = [((0, 0), next(counter), start)]
    done = set()
    while heap:
        cost, _, cell = heapq.heappop(heap)
        if cell in done:
            continue
        done.add(cell)
        if spec.satisfied_by(grid.label(cell)):
            path = []
            while cell is not None:
                path.append(cell)
                cell = parent[cell]
            return path[::-1], cost[0]
        violations, steps = cost
        for nxt in grid.neighbors(cell):
            new = (violations + _violates(grid, spec, cell, nxt), steps + 1)
            if nxt not in best or new < best[nxt]:
                best[nxt] = new
                parent[nxt] = cell
                heapq.heappush(heap, (new, next(counter), nxt))
    raise UnreachableTargetError(f"no cell satisfying {spec} is reachable from {start}")


def mv_path(grid: GridMap, start: Cell, spec: PolicySpec) -> List[Cell]:
    path, violations = _search(grid, start, spec)
    logger.debug("policy %s from %s: %d steps, %d violations", spec, start, len(path) - 1, violations)
    return path


def min_violations(grid: GridMap, start: Cell, spec: PolicySpec) -> int:
    return _search(grid, start, spec)[1]


# --------------------------------------------------
# Traces
# --------------------------------------------------

class Segment(NamedTuple):
    policy: str
    start_index: int


class UnsafeEntry(NamedTuple):
    segment: int
    index: int
    cell: Cell
    label: Tuple[str, ...]
    forced: bool


@dataclass(frozen=True)
class Trace:
    cells: Tuple[Cell, ...]
    word: Tuple[FrozenSet[str], ...]
    segments: Tuple[Segment, ...]
    unsafe: Tuple[UnsafeEntry, ...]
    # segment index where the last repetition of the plan's cycle begins
    period_start: Optional[int] = None
    # index into word of the letter each cell belongs to
    positions: Tuple[int, ...] = ()

    @property
    def unsafe_count(self) -> int:
        return len(self.unsafe)

    @property
    def forced(self) -> int:
        return sum(1 for e in self.unsafe if e.forced)

    @property
    def unforced(self) -> int:
        return self.unsafe_count - self.forced

    def segment_cells(self, i: int) -> Tuple[Cell, ...]:
        start = self.segments[i].start_index
        end = self.segments[i + 1].start_index if i + 1 < len(self.segments) else len(self.cells) - 1
        return self.cells[start:end + 1]

    def to_document(self) -> dict:
        return {
            "cells": [{"x": x, "y": y} for x, y in self.cells],
            "word": [sort_label(letter) for letter in self.word],
            "segments": [{"policy": s.policy, "start_index": s.start_index} for s in self.segments],
            "period_start": self.period_start,
            "unsafe": {
                "count": self.unsafe_count,
                "forced": self.forced,
                "unforced": self.unforced,
                "entries": [{"segment": e.segment, "index": e.index, "x": e.cell[0], "y": e.cell[1],
                             "label": list(e.label), "forced": e.forced} for e in self.unsafe],
            },
        }


def _word_positions(grid: GridMap, cells: Sequence[Cell]) -> List[int]:
    positions = [0]
    for prev, cell in zip(cells, cells[1:]):
        positions.append(positions[-1] + (grid.label(cell) != grid.label(prev)))
    return positions


def trace_from_cells(grid: GridMap, cells: Sequence[Cell], segments: Sequence[Segment],
                     period_start: Optional[int] = None) -> Trace:
    """Build a trace from an executed cell path split into policy segments."""
    cells = [tuple(c) for c in cells]
    if not cells:
        raise PlanError("a trace needs at least one cell")
    for cell in cells:
        if not grid.is_free(cell):
            raise PlanError(f"trace cell {cell} is not a free cell")
    for prev, cell in zip(cells, cells[1:]):
        if abs(prev[0] - cell[0]) + abs(prev[1] - cell[1]) != 1:
            raise PlanError(f"trace cells {prev} and {cell} are not adjacent")
    starts = [s.start_index for s in segments]
    if starts and (starts[0] != 0 or starts != sorted(starts) or starts[-1] >= len(cells)):
        raise PlanError(f"segment start indices {starts} do not fit a trace of {len(cells)} cells")
    if period_start is not None and not 0 <= period_start < len(segments):
        raise PlanError(f"period start {period_start} is not a segment index")

    positions = _word_positions(grid, cells)
    word = [grid.label(cells[0])]
    word += [grid.label(cells[j]) for j in range(1, len(cells)) if positions[j] != positions[j - 1]]

    unsafe = []
    for i, seg in enumerate(segments):
        spec = PolicySpec.parse(seg.policy)
        end = starts[i + 1] if i + 1 < len(starts) else len(cells) - 1
        entries = [j for j in range(seg.start_index + 1, end)
                   if _violates(grid, spec, cells[j - 1], cells[j])]
        forced = min_violations(grid, cells[seg.start_index], spec)
        for k, j in enumerate(entries):
            unsafe.append(UnsafeEntry(i, j, cells[j], tuple(sort_label(grid.label(cells[j]))), k < forced))

    return Trace(tuple(cells), tuple(word), tuple(segments), tuple(unsafe), period_start,
                 tuple(positions))


def execute_plan(grid: GridMap, start: Cell, plan: Plan, cycles: int = 1) -> Trace:
    """Run every policy of the plan in turn, repeating the cycle ``cycles`` times."""
    if plan.cycle and cycles < 1:
        raise PlanError(f"cycles must be >= 1 for a plan with a cycle, got {cycles}")
    policies = list(plan.prefix)
    period_start = None
    if plan.cycle:
        period_start = len(policies) + (cycles - 1) * len(plan.cycle)
        policies += list(plan.cycle) * cycles

    cells = [start]
    segments = []
    for symbol in policies:
        segments.append(Segment(symbol, len(cells) - 1))
        cells += mv_path(grid, cells[-1], PolicySpec.parse(symbol))[1:]
    trace = trace_from_cells(grid, cells, segments, period_start)
    logger.info("executed %d policies: %d cells, %d unsafe", len(segments), len(cells), trace.unsafe_count)
    return trace


def trace_from_document(grid: GridMap, doc: dict) -> Trace:
    try:
        cells = [(c["x"], c["y"]) for c in doc["cells"]]
        segments = [Segment(s["policy"], s["start_index"]) for s in doc.get("segments", [])]
    except (KeyError, TypeError) as e:
        raise PlanError(f"invalid trace document: {e}") from e
    return trace_from_cells(grid, cells, segments, doc.get("period_start"))


def check_trace(trace: Trace, formula: Ltl) -> bool:
    """Decide whether the executed word satisfies the formula.

    Without a cycle the word is extended with empty letters forever. With one,
    the word produced during the last cycle repetition is the period.
    """
    aut = to_buchi(formula)
    word = list(trace.word)
    if trace.period_start is None:
        return accepts_lasso(aut, word, [frozenset()])
    split = trace.positions[trace.segments[trace.period_start].start_index] + 1
    prefix, period = word[:split], word[split:]
    if not period:
        period = [word[-1]]
    return accepts_lasso(aut, prefix, period)


def unsafe_symbols(trace: Trace) -> Tuple[int, List[UnsafeEntry]]:
    return trace.unsafe_count, list(trace.unsafe)
