import os

import pytest

from ltlcompose.gridworld import extract_regions, load_map, parse_map
from ltlcompose.pipeline import Pipeline
from ltlcompose.tsys import build_initial_ts, generate_ts_labels

MAPS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "maps")


def map_path(name):
    return os.path.join(MAPS_DIR, name)


def labeled_ts(grid, initial="q0"):
    regions, adjacency = extract_regions(grid)
    return generate_ts_labels(build_initial_ts(regions, adjacency, initial, grid.alphabet, grid.composite))


@pytest.fixture
def make_ts():
    return labeled_ts


@pytest.fixture
def maps_dir():
    return MAPS_DIR


@pytest.fixture
def rooms():
    return load_map(map_path("rooms.txt"))


@pytest.fixture
def shelf():
    return load_map(map_path("shelf.json"))


@pytest.fixture
def courtyard():
    return load_map(map_path("courtyard.json"))


@pytest.fixture
def rooms_ts(rooms):
    return labeled_ts(rooms)


@pytest.fixture
def strip():
    # start, a, free, b, free
    return parse_map(".a.b.\n")


@pytest.fixture
def shelf_pipeline(shelf):
    return Pipeline(shelf)


@pytest.fixture
def courtyard_pipeline(courtyard):
    return Pipeline(courtyard)
