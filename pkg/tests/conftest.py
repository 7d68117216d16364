"""Shared fixtures: reference graphs, random DAG corpus, flagship session."""

import os
import random
from types import SimpleNamespace

import pytest
from hypothesis import strategies as st

from lineal.datasets import load_dataset_text
from lineal.graph import DepGraph
from lineal.session import Session, run

HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.dirname(HERE)

MAVG_PROGRAM = os.path.join(ROOT, "programs", "mavg.lin")
MAVG_CSV = os.path.join(ROOT, "data", "emissions.csv")
BENCH_SUITE = os.path.join(ROOT, "programs", "bench", "suite.cfg")


def read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


# ---------------------------------------------------------------------------
# the moving-average reference graph
#
# Four input cells, two divisor constants, five intermediate sums, three
# averages.  Both o1 and o2 start from the same pair of cells, so the two
# sum vertices a1 and a2 carry the same number with different addresses.
#
#   i1 i2 -> a1 -> o1 (/ d2)
#   i1 i2 -> a2 -> a3 (+ i3) -> o2 (/ d3)
#   i2 i3 -> a4 -> a5 (+ i4) -> o3 (/ d3)

FIGURE_NAMES = "i1 i2 i3 i4 d2 d3 a1 a2 a3 a4 a5 o1 o2 o3".split()

FIGURE_EDGES = [
    ("i1", "a1"), ("i2", "a1"), ("a1", "o1"), ("d2", "o1"),
    ("i1", "a2"), ("i2", "a2"), ("a2", "a3"), ("i3", "a3"),
    ("a3", "o2"), ("d3", "o2"),
    ("i2", "a4"), ("i3", "a4"), ("a4", "a5"), ("i4", "a5"),
    ("a5", "o3"), ("d3", "o3"),
]

CELLS = (18.17, 22.13, 37.14, 61.27)


def figure_labels() -> dict[str, str]:
    """Vertex labels of the reference figure, from plain float arithmetic."""
    c1, c2, c3, c4 = CELLS
    by_name = {
        "i1": c1, "i2": c2, "i3": c3, "i4": c4,
        "d2": 2, "d3": 3,
        "a1": c1 + c2, "a2": c1 + c2, "a3": (c1 + c2) + c3,
        "a4": c2 + c3, "a5": (c2 + c3) + c4,
        "o1": (c1 + c2) / 2, "o2": ((c1 + c2) + c3) / 3,
        "o3": ((c2 + c3) + c4) / 3,
    }
    return {name: repr(value) for name, value in by_name.items()}


@pytest.fixture(scope="session")
def fig() -> SimpleNamespace:
    ids = {name: k for k, name in enumerate(FIGURE_NAMES)}
    g = DepGraph.from_edges(
        [(ids[a], ids[b]) for a, b in FIGURE_EDGES], vertices=ids.values()
    )
    return SimpleNamespace(g=g, labels=figure_labels(), **ids)


# ---------------------------------------------------------------------------
# the 7-vertex availability example: x5 = f(x1, x2), x6 = g(x5, x3),
# x7 = h(x3, x4).  From {x1, x2, x3} exactly x6 is computable.

SUFFICES_EDGES = [
    ("x1", "x5"), ("x2", "x5"), ("x3", "x6"), ("x3", "x7"),
    ("x4", "x7"), ("x5", "x6"),
]


@pytest.fixture(scope="session")
def avail_fig() -> SimpleNamespace:
    names = [f"x{i}" for i in range(1, 8)]
    ids = {name: k for k, name in enumerate(names)}
    g = DepGraph.from_edges(
        [(ids[a], ids[b]) for a, b in SUFFICES_EDGES], vertices=ids.values()
    )
    return SimpleNamespace(g=g, **ids)


# ---------------------------------------------------------------------------
# random DAG corpus (edges always point from lower to higher index)


def random_dag(rng: random.Random, max_vertices: int = 12) -> DepGraph:
    n = rng.randint(1, max_vertices)
    density = rng.uniform(0.1, 0.5)
    edges = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < density
    ]
    return DepGraph.from_edges(edges, vertices=range(n))


def dag_corpus(count: int, seed: int = 20240811):
    rng = random.Random(seed)
    for _ in range(count):
        yield random_dag(rng)


@st.composite
def dags(draw, max_vertices: int = 10) -> DepGraph:
    n = draw(st.integers(min_value=1, max_value=max_vertices))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = (
        draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    )
    return DepGraph.from_edges(edges, vertices=range(n))


# ---------------------------------------------------------------------------
# flagship session, shared because evaluation spawns a worker thread


@pytest.fixture(scope="session")
def mavg_session() -> Session:
    data = load_dataset_text(read(MAVG_CSV), "csv")
    return run(read(MAVG_PROGRAM), {"data": data})
