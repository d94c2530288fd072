import itertools
import json

import pytest
from hypothesis import HealthCheck, given, settings

from ltlcompose.errors import MapSyntaxError, UnknownStateError
from ltlcompose.gridworld import (extract_regions, hop_distance, parse_map, region_graph,
                                  region_lookup, to_document)

from .strategies import grids


def test_single_free_cell():
    grid = parse_map(".")
    assert (grid.width, grid.height) == (1, 1)
    assert grid.label((0, 0)) == frozenset()
    assert grid.obstacles == frozenset()


def test_center_obstacle():
    grid = parse_map("...\n.#.\n...\n")
    assert grid.obstacles == {(1, 1)}
    assert not grid.is_free((1, 1))
    assert list(grid.neighbors((1, 0))) == [(0, 0), (2, 0)]


def test_non_rectangular_grid_reports_line():
    with pytest.raises(MapSyntaxError) as err:
        parse_map("...\n..\n")
    assert err.value.line == 2


def test_reserved_character_is_rejected():
    with pytest.raises(MapSyntaxError) as err:
        parse_map("a&.\n")
    assert (err.value.line, err.value.column) == (1, 2)


@pytest.mark.parametrize("text", ["a*.\n", "a1.\n", "aF.\n", "aU.\n"])
def test_symbols_a_formula_cannot_name_are_rejected(text):
    with pytest.raises(MapSyntaxError) as err:
        parse_map(text)
    assert (err.value.line, err.value.column) == (1, 2)


@pytest.mark.parametrize("names", [["*"], ["2b"], ["true"], ["G"], ["a b"]])
def test_document_symbols_must_be_identifiers(names):
    with pytest.raises(MapSyntaxError):
        parse_map(json.dumps({"width": 1, "height": 1,
                              "cells": [{"x": 0, "y": 0, "labels": names}]}))


def test_identifier_symbols_are_accepted():
    grid = parse_map(json.dumps({"width": 2, "height": 1,
                                 "cells": [{"x": 0, "y": 0, "labels": ["dock_2"]},
                                           {"x": 1, "y": 0, "labels": ["_tmp"]}]}))
    assert grid.alphabet == frozenset({"dock_2", "_tmp"})


def test_blank_text_is_a_syntax_error():
    with pytest.raises(MapSyntaxError):
        parse_map("\n\n")


def test_structured_document():
    text = json.dumps({
        "width": 3, "height": 2,
        "cells": [{"x": 0, "y": 0, "labels": ["b", "square"]}],
        "obstacles": [{"x": 1, "y": 1}],
        "start": {"x": 2, "y": 1},
    })
    grid = parse_map(text)
    assert grid.label((0, 0)) == {"b", "square"}
    assert grid.obstacles == {(1, 1)}
    assert grid.start_cell == (2, 1)
    assert grid.composite
    assert parse_map(json.dumps(to_document(grid))) == grid


def test_structured_document_errors():
    with pytest.raises(MapSyntaxError) as err:
        parse_map('{"width": 2,\n "height": }')
    assert err.value.line == 2
    with pytest.raises(MapSyntaxError):
        parse_map(json.dumps({"width": 0, "height": 1}))
    with pytest.raises(MapSyntaxError):
        parse_map(json.dumps({"width": 1, "height": 1,
                              "cells": [{"x": 3, "y": 0, "labels": ["a"]}]}))
    with pytest.raises(MapSyntaxError):
        parse_map(json.dumps({"width": 1, "height": 1, "alphabet": ["b"],
                              "cells": [{"x": 0, "y": 0, "labels": ["a"]}]}))
    with pytest.raises(MapSyntaxError):
        parse_map(json.dumps({"width": 1, "height": 1, "obstacles": [{"x": 0, "y": 0}],
                              "start": {"x": 0, "y": 0}}))


def test_declared_alphabet_may_exceed_used_symbols():
    grid = parse_map(json.dumps({"width": 1, "height": 1, "alphabet": ["a", "z"]}))
    assert grid.alphabet == {"a", "z"}


def test_rooms_regions(rooms):
    regions, adjacency = extract_regions(rooms)
    assert [r.id for r in regions] == [f"q{i}" for i in range(8)]
    assert [sorted(r.label) for r in regions] == [["b"], ["a"], [], ["a"], ["c"], ["a"], ["a"], ["c"]]
    assert regions[2].cells == {(2, 0), (2, 1), (2, 2)}
    assert adjacency == {
        "q0": ("q1",), "q1": ("q0", "q2"), "q2": ("q1", "q3", "q5", "q6"),
        "q3": ("q2", "q4"), "q4": ("q3",), "q5": ("q2",), "q6": ("q2", "q7"), "q7": ("q6",),
    }


def test_uniform_map_is_one_region():
    regions, adjacency = extract_regions(parse_map("\n".join(["....."] * 5)))
    assert len(regions) == 1
    assert adjacency == {"q0": ()}


def test_diagonal_blocks_are_not_adjacent():
    regions, adjacency = extract_regions(parse_map("a.\n.b\n"))
    by_label = {next(iter(r.label)): r.id for r in regions if r.label}
    assert by_label["b"] not in adjacency[by_label["a"]]


def test_all_obstacle_map_has_no_regions():
    regions, adjacency = extract_regions(parse_map("##\n##\n"))
    assert regions == [] and adjacency == {}


def test_rooms_hop_distances(rooms):
    graph = region_graph(*extract_regions(rooms))
    assert hop_distance(graph, "q0", "q0") == 0
    assert hop_distance(graph, "q0", "q4") == 4
    assert hop_distance(graph, "q0", "q2") == 2
    with pytest.raises(UnknownStateError):
        hop_distance(graph, "q0", "q9")


def test_disconnected_states_are_unreachable():
    graph = region_graph(*extract_regions(parse_map("a#b\n")))
    assert hop_distance(graph, "q0", "q1") is None


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(grids(max_side=8))
def test_regions_partition_free_cells(grid):
    regions, adjacency = extract_regions(grid)
    cells = [c for r in regions for c in r.cells]
    assert len(cells) == len(set(cells))
    assert set(cells) == set(grid.free_cells())
    for r in regions:
        assert all(grid.label(c) == r.label for c in r.cells)
    for a, neighbors in adjacency.items():
        assert all(a in adjacency[b] for b in neighbors)
    assert extract_regions(grid) == (regions, adjacency)


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(grids(max_side=6))
def test_hop_distance_is_a_metric(grid):
    regions, adjacency = extract_regions(grid)
    graph = region_graph(regions, adjacency)
    ids = [r.id for r in regions][:8]
    for a, b in itertools.product(ids, repeat=2):
        assert hop_distance(graph, a, b) == hop_distance(graph, b, a)
    for a, b, c in itertools.product(ids, repeat=3):
        ab, bc, ac = hop_distance(graph, a, b), hop_distance(graph, b, c), hop_distance(graph, a, c)
        if ab is not None and bc is not None:
            assert ac <= ab + bc


def test_region_lookup_covers_every_free_cell(courtyard):
    regions, _ = extract_regions(courtyard)
    lookup = region_lookup(regions)
    assert set(lookup) == set(courtyard.free_cells())
    assert lookup[(3, 2)] == lookup[(3, 1)] == "q2"
