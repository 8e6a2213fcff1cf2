from __future__ import annotations

import math

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dissect.adjacency.exceptions import ClusterAddressError, InfeasibleInstanceError
from dissect.adjacency.universal import ClusterAddr, Flavor, UniversalParams


def test_cluster_addr() -> None:
    addr = ClusterAddr(3, 4)
    assert addr.parent() == ClusterAddr(2, 2)
    assert addr.sibling() == ClusterAddr(3, 3)
    assert ClusterAddr(3, 1).sibling() == ClusterAddr(3, 2)
    assert ClusterAddr(2, 2).children() == (ClusterAddr(3, 3), ClusterAddr(3, 4))
    assert addr.ancestor(0) == addr
    assert addr.ancestor(2) == ClusterAddr(1, 1)
    assert repr(addr) == "<ClusterAddr 3#4>"

    with pytest.raises(ClusterAddressError):
        ClusterAddr(1, 1).parent()

    with pytest.raises(ClusterAddressError):
        addr.ancestor(3)


def test_params() -> None:
    params = UniversalParams(1000, 3)
    assert params.k == 10
    assert params.N == 1023
    assert params.c == 60
    assert params.g == 6
    assert params == UniversalParams.from_levels(10, 3)
    assert params != UniversalParams(1000, 3, Flavor.PL)
    assert params != UniversalParams(1000, 3, c=61)
    assert hash(params) == hash(UniversalParams(1023, 3))

    assert UniversalParams(1, 1).k == 1
    assert UniversalParams(7, 1).k == 3
    assert UniversalParams(8, 1).k == 4

    with pytest.raises(InfeasibleInstanceError):
        UniversalParams(0, 3)

    with pytest.raises(InfeasibleInstanceError):
        UniversalParams(10, 0)


@pytest.mark.parametrize("flavor", [Flavor.H, Flavor.PL])
def test_cluster_sizes(flavor: Flavor) -> None:
    params = UniversalParams(4095, 2, flavor)
    log_n = math.log2(params.N)

    for t in range(1, params.k + 1):
        if flavor == Flavor.H:
            expected = max(1, math.ceil(params.c * (log_n - t)))
        else:
            expected = max(1, math.ceil(params.c * math.sqrt(params.N / 2**t)))
        assert params.cluster_size(t) == expected

    # Both shapes shrink towards the leaves
    sizes = [params.cluster_size(t) for t in range(1, params.k + 1)]
    assert sizes == sorted(sizes, reverse=True)

    with pytest.raises(ClusterAddressError):
        params.cluster_size(0)

    with pytest.raises(ClusterAddressError):
        params.cluster_size(params.k + 1)


def test_id_layout() -> None:
    params = UniversalParams(100, 2)
    assert params.level_range(1) == (1, params.cluster_size(1))
    assert params.level_range(params.k)[1] == params.total_vertices
    assert params.max_id(params.k) == params.total_vertices

    expected = 1
    for t in range(1, params.k + 1):
        for pos in range(1, (1 << (t - 1)) + 1):
            addr = ClusterAddr(t, pos)
            lo, hi = params.cluster_range(addr)
            assert lo == expected
            assert hi - lo + 1 == params.cluster_size(t)
            assert params.id_to_cluster(lo) == (addr, 1)
            assert params.id_to_cluster(hi) == (addr, params.cluster_size(t))
            expected = hi + 1

    assert expected == params.total_vertices + 1

    for vertex in (0, params.total_vertices + 1):
        with pytest.raises(ClusterAddressError):
            params.id_to_cluster(vertex)

    for addr in (ClusterAddr(0, 1), ClusterAddr(2, 3), ClusterAddr(params.k + 1, 1)):
        with pytest.raises(ClusterAddressError):
            params.cluster_range(addr)


@settings(max_examples=200)
@given(st.data())
def test_id_to_cluster_inverse(data: st.DataObject) -> None:
    params = UniversalParams(5000, 3)
    vertex = data.draw(st.integers(min_value=1, max_value=params.total_vertices))

    addr, offset = params.id_to_cluster(vertex)
    lo, hi = params.cluster_range(addr)
    assert lo <= vertex <= hi
    assert vertex == lo + offset - 1


def test_tree_navigation() -> None:
    params = UniversalParams(100, 1)
    assert params.children(ClusterAddr(1, 1)) == (ClusterAddr(2, 1), ClusterAddr(2, 2))
    assert params.parent(ClusterAddr(3, 3)) == ClusterAddr(2, 2)

    with pytest.raises(ClusterAddressError):
        params.children(ClusterAddr(params.k, 1))

    with pytest.raises(ClusterAddressError):
        params.parent(ClusterAddr(1, 1))


@pytest.mark.parametrize("delta", [1, 3, 5])
def test_clusters_adjacent(delta: int) -> None:
    params = UniversalParams.from_levels(7, delta)
    tree = nx.balanced_tree(2, params.k - 1)
    distances = dict(nx.all_pairs_shortest_path_length(tree))

    def addr_of(node: int) -> ClusterAddr:
        t = (node + 1).bit_length()
        return ClusterAddr(t, node + 2 - (1 << (t - 1)))

    for a in tree:
        for b in tree:
            assert params.clusters_adjacent(addr_of(a), addr_of(b)) == (distances[a][b] <= params.g)


@pytest.mark.parametrize("flavor", [Flavor.H, Flavor.PL])
@pytest.mark.parametrize("delta", [1, 2])
def test_arithmetic_matches_materialized(flavor: Flavor, delta: int) -> None:
    params = UniversalParams.from_levels(4, delta, flavor)
    graph = params.materialize()
    assert graph.number_of_nodes() == params.total_vertices

    for vertex in graph:
        addr, _ = params.id_to_cluster(vertex)
        assert graph.degree(vertex) == params.neighbor_count(addr)

        if vertex % 7:
            continue

        for rank, neighbor in enumerate(sorted(graph[vertex]), 1):
            assert params.edge_rank(vertex, neighbor) == rank


def test_edge_rank_invalid() -> None:
    params = UniversalParams.from_levels(10, 1)
    with pytest.raises(ClusterAddressError):
        params.edge_rank(1, params.total_vertices)

    with pytest.raises(ClusterAddressError):
        params.edge_rank(1, 1)


def test_materialize_limit() -> None:
    with pytest.raises(ValueError, match="Refusing"):
        UniversalParams(1 << 16, 3).materialize()


@pytest.mark.parametrize("delta", [1, 2, 3, 4, 8])
@pytest.mark.parametrize("n", [1 << 10, 1 << 16, (1 << 20) - 1])
def test_field_widths(n: int, delta: int) -> None:
    params = UniversalParams(n, delta)
    log_n = math.log2(params.N)

    for t in range(1, params.k + 1):
        alpha, beta = params.alpha_beta(t)
        assert alpha == params.max_id(t).bit_length()

        # Ids grow by one bit per level plus a log log n term
        assert alpha <= t + math.log2(params.c) + math.log2(log_n) + 3

        bound = 3 * 2**params.g * (params.c * (log_n - t + params.g) + 1)
        assert params.neighbor_count(ClusterAddr(t, 1)) <= bound
        assert beta == params.neighbor_count(ClusterAddr(t, 1 << (t - 1))).bit_length()


@pytest.mark.parametrize("delta", [1, 3, 4])
def test_planar_field_widths(delta: int) -> None:
    params = UniversalParams(1 << 16, delta, Flavor.PL)

    for t in range(1, params.k + 1):
        root = math.sqrt(params.N / 2**t)
        bound = 3 * 2**params.g * (params.c * 2 ** (params.g / 2) + 2) * root
        assert params.neighbor_count(ClusterAddr(t, 1)) <= bound


def test_table() -> None:
    params = UniversalParams(1000, 2)
    rows = params.table()
    assert len(rows) == params.k
    assert rows[0][:3] == (1, params.cluster_size(1), 1)
    assert rows[-1][3] == params.total_vertices
    assert all(row[4:6] == params.alpha_beta(row[0]) for row in rows)
