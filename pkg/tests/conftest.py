from __future__ import annotations

from itertools import combinations
from pathlib import Path
from typing import TYPE_CHECKING

import pytest

from dissect.adjacency.graph import Graph, oracle_adjacent

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from dissect.adjacency.bits import BitString


def absolute_path(filename: str) -> Path:
    return Path(__file__).parent / filename


def assert_oracle_equivalent(
    graph: Graph, decoder: Callable[[BitString, BitString], bool], labels: Sequence[BitString]
) -> None:
    assert len(labels) == graph.n
    for u, v in combinations(range(graph.n), 2):
        expected = oracle_adjacent(graph, u, v)
        assert decoder(labels[u], labels[v]) == expected, (u, v)
        assert decoder(labels[v], labels[u]) == expected, (v, u)

    for u in range(graph.n):
        assert not decoder(labels[u], labels[u])


@pytest.fixture
def path_graph() -> Graph:
    return Graph(6, [(i, i + 1) for i in range(5)])


@pytest.fixture
def triangle() -> Graph:
    return Graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def star() -> Graph:
    return Graph(4, [(0, 1), (0, 2), (0, 3)], delta=3)


@pytest.fixture
def cycle4() -> Graph:
    return Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)], order=[0, 1, 2, 3])


@pytest.fixture
def k4() -> Graph:
    return Graph(4, list(combinations(range(4), 2)))


@pytest.fixture
def grid() -> Graph:
    # 4x4 grid, vertex r * 4 + c
    edges = []
    for r in range(4):
        for c in range(4):
            v = r * 4 + c
            if c < 3:
                edges.append((v, v + 1))
            if r < 3:
                edges.append((v, v + 4))
    return Graph(16, edges, delta=4)
