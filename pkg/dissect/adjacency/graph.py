from __future__ import annotations

import logging
import random
from enum import Enum
from functools import cached_property
from math import isqrt
from typing import TYPE_CHECKING

import networkx as nx

from dissect.adjacency.exceptions import (
    DegreeBoundError,
    GraphFormatError,
    InfeasibleInstanceError,
    VertexRangeError,
)

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

log = logging.getLogger(__name__)

# Probability of keeping a candidate edge in the planar generator
PLANAR_KEEP_PROBABILITY = 0.9


class Family(Enum):
    TREE = "tree"
    OUTERPLANAR = "outerplanar"
    PLANAR = "planar"
    GENERAL = "general"


class Graph:
    """Simple undirected graph on the vertices ``0 .. n-1`` with a declared degree bound.

    Edges are normalized to ``(u, v)`` with ``u < v`` and kept sorted, so two graphs with the same edge set compare
    equal regardless of the order the edges were given in.

    Args:
        n: The number of vertices.
        edges: The edges as vertex pairs.
        delta: The declared degree bound, defaults to the maximum degree.
        order: Optional outer-cycle order of an outerplanar graph, a permutation of all vertices.

    Raises:
        GraphFormatError: If an edge is a self-loop, a duplicate or refers to a vertex outside the graph.
        DegreeBoundError: If a vertex degree exceeds ``delta``.
    """

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]] = (),
        delta: int | None = None,
        order: Sequence[int] | None = None,
    ):
        if n < 1:
            raise GraphFormatError(f"A graph needs at least one vertex, got n={n}")

        normalized = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"Edge ({u}, {v}) refers to a vertex outside [0, {n - 1}]")
            if u == v:
                raise GraphFormatError(f"Self-loop on vertex {u}")

            edge = (u, v) if u < v else (v, u)
            if edge in normalized:
                raise GraphFormatError(f"Duplicate edge {edge}")
            normalized.add(edge)

        adj = [[] for _ in range(n)]
        for u, v in normalized:
            adj[u].append(v)
            adj[v].append(u)

        self.n = n
        self.edges = tuple(sorted(normalized))
        self.adj = tuple(tuple(sorted(neighbors)) for neighbors in adj)
        self.delta = self.max_degree if delta is None else delta

        if self.max_degree > self.delta:
            vertex = next(v for v in range(n) if len(self.adj[v]) > self.delta)
            raise DegreeBoundError(f"Vertex {vertex} has degree {len(self.adj[vertex])} > delta {self.delta}")

        if order is not None:
            order = tuple(order)
            if sorted(order) != list(range(n)):
                raise GraphFormatError("Outer-cycle order is not a permutation of the vertices")
        self.order = order

    def __repr__(self) -> str:
        return f"<Graph n={self.n} m={self.m} delta={self.delta}>"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n, self.edges, self.delta, self.order) == (other.n, other.edges, other.delta, other.order)

    def __hash__(self) -> int:
        return hash((self.n, self.edges, self.delta, self.order))

    @classmethod
    def from_networkx(cls, graph: nx.Graph, delta: int | None = None) -> Graph:
        """Build a graph from a networkx graph, relabeling its nodes ``0 .. n-1`` in sorted node order.

        Args:
            graph: The networkx graph to convert.
            delta: The declared degree bound, defaults to the maximum degree.
        """
        index = {node: i for i, node in enumerate(sorted(graph.nodes))}
        return cls(len(index), ((index[u], index[v]) for u, v in graph.edges), delta)

    @property
    def m(self) -> int:
        """Return the number of edges."""
        return len(self.edges)

    @cached_property
    def max_degree(self) -> int:
        """Return the maximum vertex degree."""
        return max(len(neighbors) for neighbors in self.adj)

    @cached_property
    def _edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def degree(self, vertex: int) -> int:
        return len(self.adj[vertex])

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._edge_set

    def to_networkx(self) -> nx.Graph:
        """Return a new networkx graph with the same vertices and edges."""
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges)
        return graph

    def serialize(self) -> str:
        """Serialize to the graph file format, see :func:`parse_graph`."""
        lines = [f"{self.n} {self.m} {self.delta}"]
        lines.extend(f"{u} {v}" for u, v in self.edges)
        if self.order is not None:
            lines.append("order: " + " ".join(map(str, self.order)))
        return "\n".join(lines) + "\n"


def parse_graph(text: bytes | str) -> Graph:
    """Parse a graph file.

    The format is line based. The first line holds ``n m delta``, followed by ``m`` lines ``u v``. Lines starting
    with ``#`` are comments. An optional trailing line ``order: v0 v1 ...`` gives the outer-cycle order of an
    outerplanar graph.

    Args:
        text: The contents of the graph file.

    Raises:
        GraphFormatError: If the file is malformed.
        DegreeBoundError: If a vertex degree exceeds the declared bound.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode()
        except UnicodeDecodeError:
            raise GraphFormatError("Graph file is not valid UTF-8")

    lines = [
        (lineno, line.strip())
        for lineno, line in enumerate(text.splitlines(), 1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not lines:
        raise GraphFormatError("Graph file is empty")

    n, m, delta = _parse_ints(*lines[0], 3)
    if len(lines) < m + 1:
        raise GraphFormatError(f"Expected {m} edge lines, found {len(lines) - 1}")

    edges = [_parse_ints(lineno, line, 2) for lineno, line in lines[1 : m + 1]]

    order = None
    trailer = lines[m + 1 :]
    if trailer:
        lineno, line = trailer[0]
        if len(trailer) > 1 or not line.startswith("order:"):
            raise GraphFormatError(f"Line {lineno}: unexpected content {line!r}")
        try:
            order = [int(value) for value in line[len("order:") :].split()]
        except ValueError:
            raise GraphFormatError(f"Line {lineno}: malformed order line")

    return Graph(n, edges, delta, order)


def _parse_ints(lineno: int, line: str, count: int) -> tuple[int, ...]:
    fields = line.split()
    if len(fields) != count or not all(field.isascii() and field.isdigit() for field in fields):
        raise GraphFormatError(f"Line {lineno}: expected {count} non-negative integers, got {line!r}")
    return tuple(int(field) for field in fields)


def serialize(graph: Graph) -> str:
    """Serialize a graph to the graph file format."""
    return graph.serialize()


def oracle_adjacent(graph: Graph, u: int, v: int) -> bool:
    """Brute-force adjacency test used as ground truth for every labeling scheme.

    Args:
        graph: The graph to test in.
        u: The first vertex.
        v: The second vertex.

    Raises:
        VertexRangeError: If either vertex is outside the graph.
    """
    for vertex in (u, v):
        if not 0 <= vertex < graph.n:
            raise VertexRangeError(f"Vertex {vertex} outside [0, {graph.n - 1}]")

    return u != v and graph.has_edge(u, v)


def validate_family(graph: Graph, family: Family | str) -> bool:
    """Return whether a graph belongs to a graph family.

    Outerplanarity is tested as planarity of the graph extended with an apex vertex adjacent to every vertex.

    Args:
        graph: The graph to validate.
        family: The family to validate against.
    """
    family = Family(family)

    if family == Family.TREE:
        return graph.m == graph.n - 1 and nx.is_connected(graph.to_networkx())

    if family == Family.OUTERPLANAR:
        extended = graph.to_networkx()
        extended.add_edges_from((graph.n, v) for v in range(graph.n))
        return nx.check_planarity(extended)[0]

    if family == Family.PLANAR:
        return nx.check_planarity(graph.to_networkx())[0]

    return True


def is_forest(graph: Graph) -> bool:
    """Return whether a graph is acyclic."""
    return nx.is_forest(graph.to_networkx())


def generate(family: Family | str, n: int, delta: int, seed: int) -> Graph:
    """Generate a random graph of a family with ``n`` vertices and maximum degree at most ``delta``.

    The result is a pure function of the arguments.

    Args:
        family: The graph family to generate.
        n: The number of vertices.
        delta: The degree bound.
        seed: The random seed.

    Raises:
        InfeasibleInstanceError: If no graph of the family satisfies the parameters.
    """
    family = Family(family)

    if n < 1 or delta < 1:
        raise InfeasibleInstanceError(f"Need n >= 1 and delta >= 1, got n={n}, delta={delta}")
    if family == Family.TREE and n >= 3 and delta < 2:
        raise InfeasibleInstanceError(f"A tree on {n} vertices needs delta >= 2")

    rng = random.Random(seed)
    log.debug("Generating %s graph with n=%d, delta=%d, seed=%d", family.value, n, delta, seed)

    if family == Family.TREE:
        return Graph(n, _random_tree(n, delta, rng), delta)
    if family == Family.OUTERPLANAR:
        order, edges = _random_outerplanar(n, delta, rng)
        return Graph(n, edges, delta, order)
    if family == Family.PLANAR:
        return Graph(n, _random_planar(n, delta, rng), delta)
    return Graph(n, _random_general(n, delta, rng), delta)


def _random_tree(n: int, delta: int, rng: random.Random) -> list[tuple[int, int]]:
    # Random attachment, every vertex attaches to an earlier vertex with residual capacity
    edges = []
    degree = [0] * n
    available = [0]

    for v in range(1, n):
        i = rng.randrange(len(available))
        u = available[i]

        edges.append((u, v))
        degree[u] += 1
        degree[v] += 1

        if degree[u] == delta:
            available[i] = available[-1]
            available.pop()
        if degree[v] < delta:
            available.append(v)

    return edges


def _random_outerplanar(n: int, delta: int, rng: random.Random) -> tuple[list[int], list[tuple[int, int]]]:
    order = list(range(n))
    rng.shuffle(order)

    if n == 1:
        return order, []
    if n == 2:
        sides = [(order[0], order[1])]
    else:
        sides = [(order[i], order[(i + 1) % n]) for i in range(n)]

    # Random ear decomposition of the convex polygon
    chords = []
    polygon = list(order)
    while len(polygon) > 3:
        i = rng.randrange(len(polygon))
        chords.append((polygon[i - 1], polygon[(i + 1) % len(polygon)]))
        del polygon[i]

    degree = [0] * n
    for u, v in sides + chords:
        degree[u] += 1
        degree[v] += 1

    rng.shuffle(chords)
    edges = []
    # Chords go first, sides only need to go when delta < 2
    for u, v in chords + sides:
        if degree[u] > delta or degree[v] > delta:
            degree[u] -= 1
            degree[v] -= 1
        else:
            edges.append((u, v))

    return order, edges


def _random_planar(n: int, delta: int, rng: random.Random) -> list[tuple[int, int]]:
    # Square grid with at most one diagonal per cell, so every candidate set is planar
    width = isqrt(n - 1) + 1
    candidates = []
    for v in range(n):
        column = v % width
        if column + 1 < width and v + 1 < n:
            candidates.append((v, v + 1))
        if v + width < n:
            candidates.append((v, v + width))
        if column + 1 < width and v + width + 1 < n:
            candidates.append((v, v + width + 1) if rng.random() < 0.5 else (v + 1, v + width))

    rng.shuffle(candidates)
    degree = [0] * n
    edges = []
    for u, v in candidates:
        if degree[u] < delta and degree[v] < delta and rng.random() < PLANAR_KEEP_PROBABILITY:
            degree[u] += 1
            degree[v] += 1
            edges.append((u, v))

    relabel = list(range(n))
    rng.shuffle(relabel)
    return [(relabel[u], relabel[v]) for u, v in edges]


def _random_general(n: int, delta: int, rng: random.Random) -> list[tuple[int, int]]:
    # Configuration model, loops and parallel edges are rejected
    stubs = []
    for v in range(n):
        stubs.extend([v] * rng.randint(0, delta))
    rng.shuffle(stubs)

    edges = set()
    for i in range(0, len(stubs) - 1, 2):
        u, v = stubs[i], stubs[i + 1]
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return sorted(edges)
