from __future__ import annotations

import logging
from collections import deque
from typing import TYPE_CHECKING, NamedTuple

import networkx as nx

from dissect.adjacency.bits import BitString
from dissect.adjacency.exceptions import CorruptLabelError, DegreeBoundError
from dissect.adjacency.graph import Graph
from dissect.adjacency.outerplanar import SlotMode, decode, encode
from dissect.adjacency.universal import UniversalParams

if TYPE_CHECKING:
    from dissect.adjacency.outerplanar import DecodeStats

log = logging.getLogger(__name__)


class Orientation(NamedTuple):
    """Direction of every edge of a graph.

    ``out_sets[v]`` holds the heads of the edges directed away from ``v``. ``matching`` holds the pairs of odd
    degree vertices joined to make every degree even. They are not edges of the graph and never part of an
    out-set.
    """

    out_sets: tuple[tuple[int, ...], ...]
    matching: tuple[tuple[int, int], ...]

    @property
    def max_out_degree(self) -> int:
        return max((len(out) for out in self.out_sets), default=0)


def euler_orient(graph: Graph) -> Orientation:
    """Orient every edge such that no vertex has more than ``⌈deg/2⌉`` outgoing edges.

    Odd degree vertices are paired up in increasing order and joined by extra edges, which makes every degree of the
    resulting multigraph even. Following an Euler circuit of every component then enters and leaves each vertex
    equally often.
    """
    multi = nx.MultiGraph()
    multi.add_nodes_from(range(graph.n))
    multi.add_edges_from(graph.edges, original=True)

    odd = [vertex for vertex in range(graph.n) if graph.degree(vertex) % 2]
    matching = tuple(zip(odd[::2], odd[1::2]))
    multi.add_edges_from(matching, original=False)

    out_sets = [[] for _ in range(graph.n)]
    for component in sorted(nx.connected_components(multi), key=min):
        if len(component) == 1:
            continue

        circuit = nx.eulerian_circuit(multi.subgraph(component), source=min(component), keys=True)
        for u, v, key in circuit:
            if multi.edges[u, v, key]["original"]:
                out_sets[u].append(v)

    return Orientation(tuple(tuple(sorted(out)) for out in out_sets), matching)


def _check_degree(graph: Graph, delta: int) -> None:
    if graph.max_degree > delta:
        raise DegreeBoundError(f"Maximum degree {graph.max_degree} exceeds delta={delta}")


class NeighborListCodec:
    """Labels made of the vertex id followed by the ids of its out-neighbors in an Euler orientation.

    Every field is ``⌈log2(n+1)⌉`` bits wide and stores an id plus one, so zero marks an empty field.

    Args:
        n: The number of vertices.
        delta: The degree bound.
    """

    def __init__(self, n: int, delta: int):
        self.n = n
        self.delta = delta
        self.width = n.bit_length()
        self.fields = (delta + 1) // 2

    def __repr__(self) -> str:
        return f"<NeighborListCodec n={self.n} delta={self.delta} length={self.label_length}>"

    @property
    def label_length(self) -> int:
        return (self.fields + 1) * self.width

    def encode(self, graph: Graph) -> list[BitString]:
        """Label every vertex of a graph.

        Raises:
            DegreeBoundError: If a vertex degree exceeds the degree bound.
        """
        _check_degree(graph, self.delta)

        labels = []
        for vertex, out in enumerate(euler_orient(graph).out_sets):
            label = BitString().append_field(vertex, self.width)
            for other in list(out) + [-1] * (self.fields - len(out)):
                label = label.append_field(other + 1, self.width)
            labels.append(label)
        return labels

    def parse(self, label: BitString) -> tuple[int, tuple[int, ...]]:
        """Return the vertex id and the stored neighbor fields of a label.

        Raises:
            CorruptLabelError: If the label has the wrong length or a field is out of range.
        """
        if len(label) != self.label_length:
            raise CorruptLabelError(f"Label of {len(label)} bits, expected {self.label_length}")

        fields = [label.read_field(i * self.width, self.width) for i in range(self.fields + 1)]
        if fields[0] >= self.n or any(value > self.n for value in fields[1:]):
            raise CorruptLabelError(f"Label field out of range for n={self.n}: {fields}")
        return fields[0], tuple(fields[1:])

    def decode(self, a: BitString, b: BitString) -> bool:
        u, u_fields = self.parse(a)
        v, v_fields = self.parse(b)
        return u != v and (v + 1 in u_fields or u + 1 in v_fields)


def encode_neighborlist(graph: Graph, delta: int | None = None) -> list[BitString]:
    delta = graph.delta if delta is None else delta
    return NeighborListCodec(graph.n, delta).encode(graph)


def decode_neighborlist(a: BitString, b: BitString, n: int, delta: int) -> bool:
    return NeighborListCodec(n, delta).decode(a, b)


class ForestDecomposition(NamedTuple):
    """Edge-disjoint forests covering all edges of a graph, each an ascending tuple of edges."""

    forests: tuple[tuple[tuple[int, int], ...], ...]

    def __len__(self) -> int:
        return len(self.forests)

    def graphs(self, n: int, delta: int | None = None) -> list[Graph]:
        """Return every forest as a graph on ``n`` vertices."""
        return [Graph(n, forest, delta=delta) for forest in self.forests]


def forest_decompose(graph: Graph, delta: int | None = None) -> ForestDecomposition:
    """Partition the edges of a graph into ``⌈Δ/2⌉`` forests where possible.

    Edges are inserted one at a time. An edge that closes a cycle in every forest starts a breadth first search for
    an exchange sequence: an edge on the cycle it closes in some forest moves to another forest, which may in turn
    displace an edge on a cycle there, until some edge fits without closing a cycle. Shortest exchange sequences keep
    every forest acyclic. Only when no sequence exists, i.e. the arboricity really exceeds the forest count, an
    extra forest is opened.

    Args:
        graph: The graph to decompose.
        delta: The degree bound, defaults to the declared bound of the graph.

    Raises:
        DegreeBoundError: If a vertex degree exceeds ``delta``.
    """
    delta = graph.delta if delta is None else delta
    _check_degree(graph, delta)

    forests: list[nx.Graph] = []
    owner: dict[tuple[int, int], int] = {}

    def open_forest() -> None:
        forest = nx.Graph()
        forest.add_nodes_from(range(graph.n))
        forests.append(forest)

    for _ in range(max(1, (delta + 1) // 2)):
        open_forest()

    def move(edge: tuple[int, int], index: int) -> None:
        if edge in owner:
            forests[owner[edge]].remove_edge(*edge)
        forests[index].add_edge(*edge)
        owner[edge] = index

    for edge in graph.edges:
        # Each reached edge remembers the edge whose cycle it lies on, and the forest of that cycle
        reached = {edge: None}
        queue = deque([edge])
        found = None

        while queue and found is None:
            current = queue.popleft()
            for index, forest in enumerate(forests):
                if owner.get(current) == index:
                    continue

                if not nx.has_path(forest, *current):
                    found = (current, index)
                    break

                path = nx.shortest_path(forest, *current)
                for cycle_edge in zip(path, path[1:]):
                    cycle_edge = (min(cycle_edge), max(cycle_edge))
                    if cycle_edge not in reached:
                        reached[cycle_edge] = (current, index)
                        queue.append(cycle_edge)

        if found is None:
            log.warning("No exchange places edge %r in %d forests, opening another forest", edge, len(forests))
            open_forest()
            found = (edge, len(forests) - 1)

        current, index = found
        while current is not None:
            previous = reached[current]
            move(current, index)
            if previous is None:
                break
            current, index = previous

    log.debug("Decomposed %d edges into %d forests", graph.m, len(forests))
    return ForestDecomposition(
        tuple(tuple(sorted((min(e), max(e)) for e in forest.edges)) for forest in forests)
    )


def encode_concat(graph: Graph, delta: int | None = None) -> tuple[list[BitString], int]:
    """Label every vertex with one tree scheme label per forest of a forest decomposition.

    All forests share the universal graph of ``(n, Δ)``, so all blocks have the same length and a decoder can split
    a label knowing only the forest count.

    Returns:
        The labels and the number of forests.

    Raises:
        DegreeBoundError: If a vertex degree exceeds ``delta``.
    """
    delta = graph.delta if delta is None else delta
    decomposition = forest_decompose(graph, delta)
    params = UniversalParams(graph.n, delta)

    labels = [BitString() for _ in range(graph.n)]
    for forest in decomposition.graphs(graph.n, delta):
        for vertex, block in enumerate(encode(forest, SlotMode.TREE, delta, params)):
            labels[vertex] = labels[vertex] + block

    return labels, len(decomposition)


def decode_concat(a: BitString, b: BitString, delta: int, forests: int, stats: DecodeStats | None = None) -> bool:
    """Return whether two concatenated labels belong to adjacent vertices, i.e. adjacent in any forest.

    Raises:
        CorruptLabelError: If the labels cannot be split into ``forests`` blocks or a block is malformed.
    """
    if forests < 1 or len(a) % forests or len(a) != len(b):
        raise CorruptLabelError(f"Labels of {len(a)} and {len(b)} bits do not split into {forests} blocks")

    size = len(a) // forests
    return any(
        decode(a[i * size : (i + 1) * size], b[i * size : (i + 1) * size], delta, SlotMode.TREE, stats)
        for i in range(forests)
    )
