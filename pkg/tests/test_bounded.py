from __future__ import annotations

from itertools import combinations

import networkx as nx
import pytest

from dissect.adjacency.bits import BitString
from dissect.adjacency.bounded import (
    NeighborListCodec,
    decode_concat,
    decode_neighborlist,
    encode_concat,
    encode_neighborlist,
    euler_orient,
    forest_decompose,
)
from dissect.adjacency.exceptions import CorruptLabelError, DegreeBoundError
from dissect.adjacency.graph import Family, Graph, generate, is_forest
from tests.conftest import assert_oracle_equivalent


def assert_valid_orientation(graph: Graph) -> None:
    orientation = euler_orient(graph)
    directed = [(u, v) for u, out in enumerate(orientation.out_sets) for v in out]

    assert sorted((min(e), max(e)) for e in directed) == list(graph.edges)
    for vertex in range(graph.n):
        assert len(orientation.out_sets[vertex]) <= (graph.degree(vertex) + 1) // 2

    assert orientation.max_out_degree <= (graph.max_degree + 1) // 2


def test_euler_orient(triangle: Graph, star: Graph, k4: Graph, grid: Graph) -> None:
    for graph in (triangle, star, k4, grid, Graph(3, delta=1), Graph(2, [(0, 1)])):
        assert_valid_orientation(graph)

    orientation = euler_orient(star)
    assert orientation.matching == ((0, 1), (2, 3))


@pytest.mark.parametrize("family", list(Family))
def test_euler_orient_random(family: Family) -> None:
    for seed in range(5):
        assert_valid_orientation(generate(family, 150, 5, seed))


@pytest.mark.parametrize("delta", range(2, 9))
def test_euler_orient_instances(delta: int) -> None:
    families = list(Family)
    for seed in range(200):
        graph = generate(families[seed % len(families)], 10 + seed % 70, delta, seed)
        assert_valid_orientation(graph)
        assert euler_orient(graph).max_out_degree <= (delta + 1) // 2


def test_neighborlist(triangle: Graph) -> None:
    labels = encode_neighborlist(triangle)
    assert all(len(label) == 4 for label in labels)
    assert_oracle_equivalent(triangle, NeighborListCodec(3, 2).decode, labels)
    assert decode_neighborlist(labels[0], labels[1], 3, 2)

    codec = NeighborListCodec(3, 2)
    with pytest.raises(CorruptLabelError):
        codec.parse(BitString("11"))

    # Vertex id 3 does not exist
    with pytest.raises(CorruptLabelError):
        codec.parse(BitString("1100"))


@pytest.mark.parametrize("family", list(Family))
@pytest.mark.parametrize("delta", [3, 4, 7])
def test_neighborlist_random(family: Family, delta: int) -> None:
    graph = generate(family, 90, delta, seed=delta)
    codec = NeighborListCodec(graph.n, delta)
    labels = codec.encode(graph)

    assert codec.label_length == ((delta + 1) // 2 + 1) * graph.n.bit_length()
    assert_oracle_equivalent(graph, codec.decode, labels)


def test_neighborlist_degree_bound(star: Graph) -> None:
    with pytest.raises(DegreeBoundError):
        encode_neighborlist(star, delta=2)


def assert_valid_decomposition(graph: Graph, forests: tuple[tuple[tuple[int, int], ...], ...]) -> None:
    assert sorted(edge for forest in forests for edge in forest) == list(graph.edges)
    for forest in forests:
        assert is_forest(Graph(graph.n, forest))


def test_forest_decompose(k4: Graph, grid: Graph) -> None:
    decomposition = forest_decompose(k4)
    assert len(decomposition) == 2
    assert_valid_decomposition(k4, decomposition.forests)

    decomposition = forest_decompose(grid)
    assert len(decomposition) == 2
    assert_valid_decomposition(grid, decomposition.forests)

    graphs = decomposition.graphs(grid.n, grid.delta)
    assert all(graph.n == grid.n for graph in graphs)


@pytest.mark.parametrize("delta", [3, 4, 5, 6])
def test_forest_decompose_random(delta: int) -> None:
    for family in (Family.PLANAR, Family.GENERAL):
        graph = generate(family, 120, delta, seed=delta)
        decomposition = forest_decompose(graph)
        assert_valid_decomposition(graph, decomposition.forests)

        # An odd degree bound always leaves room, an even one only fails on dense pieces like K5
        if delta % 2:
            assert len(decomposition) == (delta + 1) // 2
        else:
            assert len(decomposition) >= (delta + 1) // 2


def test_forest_decompose_overflow(caplog: pytest.LogCaptureFixture) -> None:
    # K5 has arboricity 3 but only degree 4, so a third forest has to be opened
    k5 = Graph(5, list(combinations(range(5), 2)))
    decomposition = forest_decompose(k5)

    assert len(decomposition) == 3
    assert_valid_decomposition(k5, decomposition.forests)
    assert "opening another forest" in caplog.text


def test_concat(grid: Graph) -> None:
    labels, forests = encode_concat(grid)
    assert forests == 2
    assert len({len(label) for label in labels}) == 1
    assert_oracle_equivalent(grid, lambda a, b: decode_concat(a, b, grid.delta, forests), labels)


@pytest.mark.parametrize("family", [Family.PLANAR, Family.GENERAL])
def test_concat_random(family: Family) -> None:
    graph = generate(family, 80, 5, seed=11)
    labels, forests = encode_concat(graph, 5)
    assert_oracle_equivalent(graph, lambda a, b: decode_concat(a, b, 5, forests), labels)


def test_concat_invalid(grid: Graph) -> None:
    labels, forests = encode_concat(grid)

    with pytest.raises(CorruptLabelError):
        decode_concat(labels[0], labels[1], grid.delta, 0)

    with pytest.raises(CorruptLabelError):
        decode_concat(labels[0] + BitString("0"), labels[1] + BitString("0"), grid.delta, forests)

    with pytest.raises(CorruptLabelError):
        decode_concat(labels[0], labels[1][:-2], grid.delta, forests)


def test_concat_grid() -> None:
    graph = Graph.from_networkx(nx.grid_2d_graph(6, 6))
    labels, forests = encode_concat(graph)
    assert forests <= (graph.max_degree + 1) // 2
    assert_oracle_equivalent(graph, lambda a, b: decode_concat(a, b, graph.delta, forests), labels)
