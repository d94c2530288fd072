import pytest
from hypothesis import HealthCheck, given, settings

from ltlcompose.errors import PlanError, UnreachableTargetError
from ltlcompose.gridworld import parse_map
from ltlcompose.ltl import parse_ltl
from ltlcompose.mvpolicy import (PolicySpec, Segment, check_trace, execute_plan, min_violations,
                                 mv_path, trace_from_cells, trace_from_document, unsafe_symbols)
from ltlcompose.product import Plan

from .strategies import grids


def test_policy_spec_parsing():
    spec = PolicySpec.parse("b&!square")
    assert spec.positive == {"b"} and spec.negative == {"square"}
    assert spec.satisfied_by({"b", "circle"})
    assert not spec.satisfied_by({"b", "square"})
    assert str(PolicySpec.parse("square&b")) == "b&square"
    with pytest.raises(PlanError):
        PolicySpec.parse("!a")
    with pytest.raises(PlanError):
        PolicySpec.parse("a&!a")


def test_start_already_satisfies(shelf):
    assert mv_path(shelf, (6, 0), PolicySpec.parse("b&square")) == [(6, 0)]


def test_strip_crosses_the_a_cell(strip):
    spec = PolicySpec.parse("b")
    assert mv_path(strip, (0, 0), spec) == [(0, 0), (1, 0), (2, 0), (3, 0)]
    assert min_violations(strip, (0, 0), spec) == 1

    trace = execute_plan(strip, (0, 0), Plan(("b",), (), ()))
    count, entries = unsafe_symbols(trace)
    assert count == 1
    assert entries[0].cell == (1, 0) and entries[0].forced
    assert (trace.forced, trace.unforced) == (1, 0)


def test_detour_is_preferred_over_violation():
    grid = parse_map("....\n.a#.\n.ab.\n")
    path = mv_path(grid, (0, 2), PolicySpec.parse("b"))
    assert path[-1] == (2, 2)
    assert all(grid.label(c) != {"a"} for c in path)


def test_unreachable_target():
    grid = parse_map("a#b\n")
    with pytest.raises(UnreachableTargetError):
        mv_path(grid, (0, 0), PolicySpec.parse("b"))
    with pytest.raises(UnreachableTargetError):
        mv_path(grid, (0, 0), PolicySpec.parse("c"))


def test_recorded_segment_with_unreachable_target():
    grid = parse_map("a#b\n")
    with pytest.raises(UnreachableTargetError):
        trace_from_cells(grid, [(0, 0)], [Segment("b", 0)])


def test_obstacle_start_is_rejected():
    grid = parse_map("a#b\n")
    with pytest.raises(PlanError):
        mv_path(grid, (1, 0), PolicySpec.parse("b"))


def test_shelf_execution(shelf):
    trace = execute_plan(shelf, (0, 2), Plan(("b&square",), (), ()))
    assert trace.cells[0] == (0, 2) and trace.cells[-1] == (6, 0)
    assert [sorted(letter) for letter in trace.word] == [[], ["b", "square"]]
    assert trace.unsafe_count == 0
    assert check_trace(trace, parse_ltl("F square"))
    assert not check_trace(trace, parse_ltl("F b & G !square"))


def test_courtyard_execution_detours_around_the_obstacle(courtyard):
    plan = Plan(("b&circle", "b&square", "p&square"), (), ())
    trace = execute_plan(courtyard, (0, 2), plan)
    assert trace.unsafe_count == 0
    first = trace.segment_cells(0)
    assert first[-1] == (4, 3)
    assert all(not courtyard.label(c) for c in first[:-1])
    assert len(first) - 1 == 7
    assert [s.start_index for s in trace.segments] == [0, 7, 8]
    assert check_trace(trace, parse_ltl("F (b & !square) & F p"))


def test_segments_chain(courtyard):
    trace = execute_plan(courtyard, (0, 2), Plan(("p&square",), ("b&square", "circle&w", "b&square",
                                                            "p&square"), ()), cycles=2)
    assert len(trace.segments) == 9
    for i in range(len(trace.segments) - 1):
        assert trace.segment_cells(i)[-1] == trace.segment_cells(i + 1)[0]
    assert trace.period_start == 5
    assert check_trace(trace, parse_ltl("G F p & G F w"))
    assert not check_trace(trace, parse_ltl("G F (p & circle)"))


def test_cycles_must_be_positive(courtyard):
    with pytest.raises(PlanError):
        execute_plan(courtyard, (0, 2), Plan((), ("p&square",), ()), cycles=0)


def test_empty_plan(shelf):
    trace = execute_plan(shelf, (0, 2), Plan((), (), ()))
    assert trace.cells == ((0, 2),)
    assert trace.word == (frozenset(),)
    assert check_trace(trace, parse_ltl("true"))


def test_single_cell_trace(shelf):
    trace = trace_from_cells(shelf, [(2, 0)], [])
    assert check_trace(trace, parse_ltl("F (p & circle)"))


def test_saved_trace_round_trip(courtyard):
    trace = execute_plan(courtyard, (0, 2), Plan(("b&circle", "b&square", "p&square"), (), ()))
    assert trace_from_document(courtyard, trace.to_document()) == trace
    doc = trace.to_document()
    assert doc["unsafe"] == {"count": 0, "forced": 0, "unforced": 0, "entries": []}


def test_unforced_violations_are_reported(shelf):
    # walking through the white circle on the way to the blue square is avoidable
    cells = [(0, 1), (0, 0), (0, 1), (1, 1), (2, 1), (3, 1), (4, 1), (5, 1), (6, 1), (6, 0)]
    trace = trace_from_cells(shelf, cells, [Segment("b&square", 0)])
    assert trace.unsafe_count == 1
    assert (trace.forced, trace.unforced) == (0, 1)
    assert trace.unsafe[0].label == ("circle", "w")


def test_invalid_traces(shelf):
    with pytest.raises(PlanError):
        trace_from_cells(shelf, [(0, 2), (2, 2)], [])
    with pytest.raises(PlanError):
        trace_from_cells(shelf, [(1, 1), (1, 0)], [])
    with pytest.raises(PlanError):
        trace_from_cells(shelf, [], [])
    with pytest.raises(PlanError):
        trace_from_document(shelf, {"segments": []})


# --------------------------------------------------
# Optimality against violation-bounded search
# --------------------------------------------------

def _violations(grid, spec, path):
    count = 0
    for prev, cell in zip(path, path[1:]):
        label = grid.label(cell)
        if label and label != grid.label(prev) and not spec.satisfied_by(label):
            count += 1
    return count


def bounded_optimum(grid, start, spec):
    """(violations, steps) of the best path, by breadth-first layers under a violation budget."""
    if spec.satisfied_by(grid.label(start)):
        return 0, 0
    for budget in range(len(grid.free_cells()) + 1):
        seen = {(start, 0)}
        layer = [(start, 0)]
        steps = 0
        while layer:
            steps += 1
            nxt_layer = []
            for cell, used in layer:
                for nxt in grid.neighbors(cell):
                    cost = used + _violations(grid, spec, [cell, nxt])
                    if cost > budget or (nxt, cost) in seen:
                        continue
                    if spec.satisfied_by(grid.label(nxt)):
                        return budget, steps
                    seen.add((nxt, cost))
                    nxt_layer.append((nxt, cost))
            layer = nxt_layer
    return None


@settings(max_examples=80, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(grids(max_side=5, max_symbols=3))
def test_mv_path_is_optimal(grid):
    start = grid.start_cell
    spec = PolicySpec.parse(sorted(grid.alphabet)[0])
    expected = bounded_optimum(grid, start, spec)
    if expected is None:
        with pytest.raises(UnreachableTargetError):
            mv_path(grid, start, spec)
        return
    path = mv_path(grid, start, spec)
    assert (_violations(grid, spec, path), len(path) - 1) == expected
    assert spec.satisfied_by(grid.label(path[-1]))
    assert not any(spec.satisfied_by(grid.label(c)) for c in path[:-1])
