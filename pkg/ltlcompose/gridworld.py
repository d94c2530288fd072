"""Labeled grid environments: map loading, region extraction, hop distances.

Two input formats are accepted. The structured JSON document is canonical::

    {"width": 5, "height": 3,
     "cells": [{"x": 0, "y": 0, "labels": ["b"]}, ...],
     "obstacles": [{"x": 0, "y": 1}, ...],
     "start": {"x": 2, "y": 1},            # optional
     "alphabet": ["a", "b", "c"],          # optional
     "task_mode": "primitive"}             # optional

The ASCII grid is a convenience loader: one line per row, ``.`` is free,
``#`` is an obstacle and any letter or ``_`` is a one-symbol label.
"""

import json
import logging
import os
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple

import networkx as nx

from ltlcompose.errors import MapSyntaxError, UnknownStateError
from ltlcompose.ltl import is_atom_name

logger = logging.getLogger(__name__)

Cell = Tuple[int, int]

FREE = "."
OBSTACLE = "#"
TASK_MODES = ("primitive", "composite")

# up, down, left, right
ACTIONS = ((0, -1), (0, 1), (-1, 0), (1, 0))


@dataclass(frozen=True)
class GridMap:
    width: int
    height: int
    labels: Tuple[Tuple[FrozenSet[str], ...], ...]
    obstacles: FrozenSet[Cell]
    alphabet: FrozenSet[str]
    start: Optional[Cell] = None
    task_mode: Optional[str] = None

    def label(self, cell: Cell) -> FrozenSet[str]:
        x, y = cell
        return self.labels[y][x]

    def in_bounds(self, cell: Cell) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def is_free(self, cell: Cell) -> bool:
        return self.in_bounds(cell) and cell not in self.obstacles

    def cells(self):
        for y in range(self.height):
            for x in range(self.width):
                yield (x, y)

    def free_cells(self):
        return [c for c in self.cells() if c not in self.obstacles]

    def neighbors(self, cell: Cell):
        x, y = cell
        for dx, dy in ACTIONS:
            nxt = (x + dx, y + dy)
            if self.is_free(nxt):
                yield nxt

    @property
    def start_cell(self) -> Optional[Cell]:
        if self.start is not None:
            return self.start
        free = self.free_cells()
        return free[0] if free else None

    @property
    def composite(self) -> bool:
        if self.task_mode is not None:
            return self.task_mode == "composite"
        return any(len(self.label(c)) > 1 for c in self.free_cells())


@dataclass(frozen=True)
class Region:
    id: str
    index: int
    cells: FrozenSet[Cell]
    label: FrozenSet[str]


# --------------------------------------------------
# Parsing
# --------------------------------------------------

def _check_symbol(name, line=None, column=None):
    # symbols must be writable as formula atoms: identifiers other than F, G, U and true
    if not is_atom_name(name):
        raise MapSyntaxError(f"symbol {name!r} is not a formula identifier", line, column)
    return name


def _parse_ascii(text: str) -> GridMap:
    rows = text.splitlines()
    while rows and not rows[-1].strip():
        rows.pop()
    if not rows:
        raise MapSyntaxError("empty map document", 1, 1)

    width = len(rows[0])
    labels = []
    obstacles = set()
    alphabet = set()
    for y, row in enumerate(rows):
        if len(row) != width:
            raise MapSyntaxError(
                f"non-rectangular grid: row has {len(row)} cells, expected {width}",
                y + 1, min(len(row), width) + 1)
        label_row = []
        for x, ch in enumerate(row):
            if ch == OBSTACLE:
                obstacles.add((x, y))
                label_row.append(frozenset())
            elif ch == FREE:
                label_row.append(frozenset())
            else:
                _check_symbol(ch, y + 1, x + 1)
                alphabet.add(ch)
                label_row.append(frozenset([ch]))
        labels.append(tuple(label_row))

    return GridMap(width, len(rows), tuple(labels), frozenset(obstacles), frozenset(alphabet))


def _xy(entry, what):
    if not isinstance(entry, dict) or not isinstance(entry.get("x"), int) \
            or not isinstance(entry.get("y"), int):
        raise MapSyntaxError(f"{what} entry needs integer x and y: {entry!r}")
    return entry["x"], entry["y"]


def _parse_document(text: str) -> GridMap:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise MapSyntaxError(f"invalid map document: {e.msg}", e.lineno, e.colno) from e
    if not isinstance(doc, dict):
        raise MapSyntaxError("map document must be an object", 1, 1)

    width, height = doc.get("width"), doc.get("height")
    if not isinstance(width, int) or not isinstance(height, int) or width < 1 or height < 1:
        raise MapSyntaxError(f"width and height must be integers >= 1, got {width!r}x{height!r}")

    grid = [[frozenset() for _ in range(width)] for _ in range(height)]
    seen = set()
    used = set()
    for entry in doc.get("cells", []):
        x, y = _xy(entry, "cell")
        if not (0 <= x < width and 0 <= y < height):
            raise MapSyntaxError(f"cell ({x},{y}) outside {width}x{height} grid")
        if (x, y) in seen:
            raise MapSyntaxError(f"cell ({x},{y}) listed twice")
        seen.add((x, y))
        names = entry.get("labels", [])
        if not isinstance(names, list):
            raise MapSyntaxError(f"labels of cell ({x},{y}) must be a list")
        label = frozenset(_check_symbol(n) for n in names)
        used |= label
        grid[y][x] = label

    obstacles = set()
    for entry in doc.get("obstacles", []):
        cell = _xy(entry, "obstacle")
        if not (0 <= cell[0] < width and 0 <= cell[1] < height):
            raise MapSyntaxError(f"obstacle {cell} outside {width}x{height} grid")
        if grid[cell[1]][cell[0]]:
            raise MapSyntaxError(f"obstacle {cell} carries labels")
        obstacles.add(cell)

    alphabet = used
    if "alphabet" in doc:
        alphabet = frozenset(_check_symbol(n) for n in doc["alphabet"])
        missing = used - alphabet
        if missing:
            raise MapSyntaxError(f"cells use undeclared symbols: {sorted(missing)}")

    start = None
    if doc.get("start") is not None:
        start = _xy(doc["start"], "start")
        if not (0 <= start[0] < width and 0 <= start[1] < height) or start in obstacles:
            raise MapSyntaxError(f"start cell {start} is not a free cell")

    task_mode = doc.get("task_mode")
    if task_mode is not None and task_mode not in TASK_MODES:
        raise MapSyntaxError(f"task_mode must be one of {TASK_MODES}, got {task_mode!r}")

    return GridMap(width, height, tuple(tuple(r) for r in grid), frozenset(obstacles),
                   frozenset(alphabet), start, task_mode)


def parse_map(text: str) -> GridMap:
    """Parse a structured map document or an ASCII grid."""
    if text.lstrip().startswith("{"):
        return _parse_document(text)
    return _parse_ascii(text)


def load_map(path: str) -> GridMap:
    with open(path, "r", encoding="utf-8") as f:
        grid = parse_map(f.read())
    logger.info("loaded %s: %dx%d, alphabet %s", os.path.basename(path),
                grid.width, grid.height, sorted(grid.alphabet))
    return grid


def to_document(grid: GridMap) -> dict:
    doc = {
        "width": grid.width,
        "height": grid.height,
        "cells": [{"x": x, "y": y, "labels": sorted(grid.label((x, y)))}
                  for x, y in grid.cells() if grid.label((x, y))],
        "obstacles": [{"x": x, "y": y} for x, y in sorted(grid.obstacles, key=lambda c: (c[1], c[0]))],
        "alphabet": sorted(grid.alphabet),
    }
    if grid.start is not None:
        doc["start"] = {"x": grid.start[0], "y": grid.start[1]}
    if grid.task_mode is not None:
        doc["task_mode"] = grid.task_mode
    return doc


# --------------------------------------------------
# Regions
# --------------------------------------------------

def extract_regions(grid: GridMap) -> Tuple[List[Region], Dict[str, Tuple[str, ...]]]:
    """Split free cells into maximal 4-connected equal-label regions.

    Region ids follow the row-major order of each region's topmost-leftmost
    cell. Returns the regions and a symmetric adjacency map.
    """
    owner: Dict[Cell, int] = {}
    regions: List[Region] = []
    for cell in grid.cells():
        if cell in grid.obstacles or cell in owner:
            continue
        index = len(regions)
        label = grid.label(cell)
        members = {cell}
        owner[cell] = index
        queue = deque([cell])
        while queue:
            cur = queue.popleft()
            for nxt in grid.neighbors(cur):
                if nxt not in owner and grid.label(nxt) == label:
                    owner[nxt] = index
                    members.add(nxt)
                    queue.append(nxt)
        regions.append(Region(f"q{index}", index, frozenset(members), label))

    links = {r.index: set() for r in regions}
    for cell, index in owner.items():
        for nxt in grid.neighbors(cell):
            other = owner[nxt]
            if other != index:
                links[index].add(other)

    adjacency = {f"q{i}": tuple(f"q{j}" for j in sorted(links[i])) for i in sorted(links)}
    logger.debug("extracted %d regions", len(regions))
    return regions, adjacency


def region_lookup(regions) -> Dict[Cell, str]:
    return {cell: r.id for r in regions for cell in r.cells}


def region_graph(regions, adjacency) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(r.id for r in regions)
    for a, neighbors in adjacency.items():
        graph.add_edges_from((a, b) for b in neighbors)
    return graph


def hop_distance(ts_graph: nx.Graph, s1: str, s2: str) -> Optional[int]:
    """Unweighted shortest-path length between two states, None if disconnected."""
    for s in (s1, s2):
        if s not in ts_graph:
            raise UnknownStateError(f"unknown state {s!r}")
    try:
        return nx.shortest_path_length(ts_graph, s1, s2)
    except nx.NetworkXNoPath:
        return None
