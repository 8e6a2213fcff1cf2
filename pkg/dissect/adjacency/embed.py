from __future__ import annotations

import logging
import math
from collections import Counter, deque
from functools import cached_property
from typing import TYPE_CHECKING, NamedTuple

import networkx as nx
from networkx.algorithms.approximation import treewidth_min_degree

from dissect.adjacency.c_adjacency import (
    BISECTOR_BUDGET,
    PLANAR_BISECTOR_BUDGET,
    bisector_colors,
    ceil_log2,
)
from dissect.adjacency.exceptions import (
    BisectorBudgetError,
    ClusterOverflowError,
    EdgeStretchError,
    FamilyError,
    InfeasibleInstanceError,
)
from dissect.adjacency.graph import Family, is_forest, validate_family
from dissect.adjacency.universal import ClusterAddr

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Mapping, Sequence

    from dissect.adjacency.graph import Graph
    from dissect.adjacency.universal import UniversalParams

log = logging.getLogger(__name__)


class Coloring:
    """Assignment of every vertex of a subgraph to one of ``colors`` color classes, numbered from 1.

    Args:
        color_of: The color of every vertex.
        colors: The number of color classes.

    Raises:
        ValueError: If a vertex has a color outside ``[1, colors]``.
    """

    __slots__ = ("_color_of", "colors")

    def __init__(self, color_of: Mapping[int, int], colors: int):
        for vertex, color in color_of.items():
            if not 1 <= color <= colors:
                raise ValueError(f"Vertex {vertex} has color {color} outside [1, {colors}]")

        self._color_of = dict(color_of)
        self.colors = colors

    @classmethod
    def uniform(cls, vertices: Iterable[int], colors: int = 1) -> Coloring:
        """Return a coloring that puts every vertex in the last color class."""
        return cls(dict.fromkeys(vertices, colors), colors)

    def __repr__(self) -> str:
        return f"<Coloring vertices={len(self._color_of)} colors={self.colors}>"

    def __getitem__(self, vertex: int) -> int:
        return self._color_of[vertex]

    def __contains__(self, vertex: int) -> bool:
        return vertex in self._color_of

    def count(self, vertices: Iterable[int], color: int) -> int:
        """Return how many of ``vertices`` have ``color``."""
        return sum(1 for vertex in vertices if self._color_of[vertex] == color)


class BisectionResult(NamedTuple):
    """A separator and the two sides it leaves. No edge joins the sides, and every color class is split evenly
    between them up to one vertex."""

    separator: frozenset[int]
    side_a: frozenset[int]
    side_b: frozenset[int]

    def imbalance(self, coloring: Coloring) -> int:
        """Return the largest difference between the two sides over all color classes."""
        return max(
            (abs(coloring.count(self.side_a, color) - coloring.count(self.side_b, color))
             for color in range(1, coloring.colors + 1)),
            default=0,
        )  # fmt: skip


def separator_budget(family: Family | str, size: int, colors: int) -> int:
    """Return the largest separator a bisector may return for a subgraph of ``size`` vertices.

    Args:
        family: The graph family of the subgraph.
        size: The number of vertices of the subgraph.
        colors: The number of color classes to balance.
    """
    size = max(size, 1)
    if Family(family) == Family.PLANAR:
        return PLANAR_BISECTOR_BUDGET * colors * math.ceil(math.sqrt(2 * size))
    return BISECTOR_BUDGET * colors * (ceil_log2(size) + 1)


def _tree_centroid(piece: nx.Graph) -> set[int]:
    root = min(piece)
    order = list(nx.dfs_preorder_nodes(piece, root))
    parent = nx.dfs_predecessors(piece, root)

    size = dict.fromkeys(order, 1)
    heaviest = dict.fromkeys(order, 0)
    for vertex in reversed(order[1:]):
        size[parent[vertex]] += size[vertex]
        heaviest[parent[vertex]] = max(heaviest[parent[vertex]], size[vertex])

    total = len(order)
    return {min(order, key=lambda v: (max(total - size[v], heaviest[v]), v))}


def _decomposition_centroid(piece: nx.Graph) -> set[int]:
    """Return the bag of a tree decomposition that leaves components of at most half the piece.

    Every vertex is weighted onto the topmost bag containing it. Walking from the root into the heavier subtree
    while it holds more than half the weight ends at a bag whose removal splits the piece into halves.
    """
    if len(piece) == 1:
        return set(piece)

    _, decomposition = treewidth_min_degree(piece)
    root = min(decomposition, key=sorted)

    parent = {root: None}
    worklist = [root]
    for bag in worklist:
        for other in sorted(decomposition[bag], key=sorted):
            if other not in parent:
                parent[other] = bag
                worklist.append(other)

    weight = Counter()
    homed = set()
    for bag in worklist:
        for vertex in bag - homed:
            weight[bag] += 1
            homed.add(vertex)

    children = {bag: [] for bag in worklist}
    for bag in reversed(worklist[1:]):
        weight[parent[bag]] += weight[bag]
        children[parent[bag]].append(bag)

    half = len(piece) / 2
    bag = root
    while True:
        heavy = max(children[bag], key=lambda child: (weight[child], [-v for v in sorted(child)]), default=None)
        if heavy is None or weight[heavy] <= half:
            return set(bag)
        bag = heavy


def _layer_separator(piece: nx.Graph) -> set[int]:
    start = min(piece)
    distance = nx.single_source_shortest_path_length(piece, start)
    peripheral = max(distance, key=lambda v: (distance[v], -v))

    total = len(piece)
    best = None
    before = 0
    for layer in nx.bfs_layers(piece, peripheral):
        after = total - before - len(layer)
        if 3 * before <= 2 * total and 3 * after <= 2 * total and (best is None or len(layer) < len(best)):
            best = layer
        before += len(layer)

    return set(best)


_SPLITTERS: dict[Family, Callable[[nx.Graph], set[int]]] = {
    Family.TREE: _tree_centroid,
    Family.OUTERPLANAR: _decomposition_centroid,
    Family.PLANAR: _layer_separator,
}


def _pieces(graph: nx.Graph, side: set[int]) -> list[list[int]]:
    return sorted(sorted(component) for component in nx.connected_components(graph.subgraph(side)))


def _balance_color(
    graph: nx.Graph,
    coloring: Coloring,
    color: int,
    sides: tuple[set[int], set[int]],
    separator: set[int],
    splitter: Callable[[nx.Graph], set[int]],
) -> None:
    side_a, side_b = sides
    while True:
        diff = coloring.count(side_b, color) - coloring.count(side_a, color)
        if abs(diff) <= 1:
            return

        heavy, light = (side_b, side_a) if diff > 0 else (side_a, side_b)
        remaining = abs(diff) // 2

        # Move whole pieces of the heavy side while they fit, otherwise cut the smallest piece that is too heavy
        moved = False
        deferred = []
        for piece in _pieces(graph, heavy):
            weight = coloring.count(piece, color)
            if weight == 0:
                continue

            if weight <= remaining:
                heavy.difference_update(piece)
                light.update(piece)
                remaining -= weight
                moved = True
            else:
                deferred.append((weight, len(piece), piece[0], piece))

        if moved:
            continue

        *_, piece = min(deferred)
        cut = splitter(graph.subgraph(piece))
        heavy.difference_update(cut)
        separator.update(cut)


def bisect(graph: nx.Graph, coloring: Coloring, family: Family | str, rounds: int = 2) -> BisectionResult:
    """Compute a separator that bisects every color class of a subgraph.

    All vertices start on the second side. Every color class is then balanced in turn by moving whole connected
    pieces to the lighter side, cutting a piece with the family's splitter when none fits. Pieces never touch the
    other side, so no edge can cross. Whatever imbalance remains after the last round is absorbed into the
    separator, taking the smallest vertices of the heavier side first.

    Args:
        graph: The subgraph to bisect, its nodes are the vertices.
        coloring: The colors of the vertices, the last color is balanced last in every round.
        family: The graph family, selects the splitter.
        rounds: The number of balancing rounds over all colors.

    Raises:
        FamilyError: If there is no bisector for the family.
        BisectorBudgetError: If the separator is larger than :func:`separator_budget` allows.
    """
    family = Family(family)
    if family not in _SPLITTERS:
        raise FamilyError(f"No bisector for graph family {family.value}")
    splitter = _SPLITTERS[family]

    separator: set[int] = set()
    side_a: set[int] = set()
    side_b: set[int] = set(graph)

    for _ in range(rounds):
        for color in range(1, coloring.colors + 1):
            _balance_color(graph, coloring, color, (side_a, side_b), separator, splitter)

    for color in range(1, coloring.colors + 1):
        in_a = sorted(v for v in side_a if coloring[v] == color)
        in_b = sorted(v for v in side_b if coloring[v] == color)
        heavy, members = (side_a, in_a) if len(in_a) > len(in_b) else (side_b, in_b)
        excess = abs(len(in_a) - len(in_b)) - 1
        if excess > 0:
            heavy.difference_update(members[:excess])
            separator.update(members[:excess])

    budget = separator_budget(family, len(graph), coloring.colors)
    if len(separator) > budget:
        raise BisectorBudgetError(
            f"Separator of {len(separator)} vertices exceeds the budget of {budget} for a {family.value} subgraph "
            f"of {len(graph)} vertices"
        )

    return BisectionResult(frozenset(separator), frozenset(side_a), frozenset(side_b))


class Embedding:
    """Injective map of the vertices of a graph to vertex ids of a universal graph.

    Args:
        params: The universal graph.
        phi: The universal vertex id of every vertex.
    """

    def __init__(self, params: UniversalParams, phi: Sequence[int]):
        self.params = params
        self.phi = tuple(phi)

    def __repr__(self) -> str:
        return f"<Embedding vertices={len(self.phi)} params={self.params!r}>"

    def __len__(self) -> int:
        return len(self.phi)

    def cluster_of(self, vertex: int) -> ClusterAddr:
        return self.params.id_to_cluster(self.phi[vertex])[0]

    @cached_property
    def usage(self) -> Counter[ClusterAddr]:
        """Return the number of vertices placed in every occupied cluster."""
        return Counter(self.cluster_of(vertex) for vertex in range(len(self.phi)))

    def audit(self) -> list[tuple[int, int, int, int, int]]:
        """Return per-level occupancy rows: level, cluster capacity, number of clusters, largest occupancy and total
        occupancy."""
        largest = Counter()
        total = Counter()
        for addr, count in self.usage.items():
            largest[addr.t] = max(largest[addr.t], count)
            total[addr.t] += count

        return [
            (t, self.params.cluster_size(t), 1 << (t - 1), largest[t], total[t])
            for t in range(1, self.params.k + 1)
        ]

    def check(self, graph: Graph) -> None:
        """Check that the embedding is injective, respects cluster capacities and preserves every edge of ``graph``.

        Raises:
            ClusterOverflowError: If two vertices share an id or a cluster holds more vertices than its capacity.
            EdgeStretchError: If an edge lands on clusters that are not adjacent.
        """
        if len(set(self.phi)) != len(self.phi):
            raise ClusterOverflowError("Two vertices share a universal vertex id")

        for addr, count in self.usage.items():
            if count > self.params.cluster_size(addr.t):
                raise ClusterOverflowError(f"Cluster {addr!r} holds {count} vertices")

        for u, v in graph.edges:
            a, b = self.cluster_of(u), self.cluster_of(v)
            if not self.params.clusters_adjacent(a, b):
                raise EdgeStretchError(
                    f"Edge {u}-{v} lands on clusters {a!r} and {b!r} beyond distance {self.params.g}"
                )


def embed(graph: Graph, params: UniversalParams, family: Family | str) -> Embedding:
    """Embed a graph into the universal graph described by ``params``.

    The cluster tree is processed breadth first, every node holding a job of vertices that still need a cluster.
    A node places the separator of a multi-color bisection of its job, together with every job vertex adjacent to
    the vertices placed ``k(Δ)`` levels up, and hands the two sides to its children. The color of a job vertex is
    the distance to the farthest ancestor holding one of its neighbors, the last color holding vertices without
    placed neighbors, so every edge ends up spanning at most ``k(Δ)`` tree levels. Vertices within a cluster are numbered in
    increasing vertex order.

    Args:
        graph: The graph to embed.
        params: The universal graph, with ``params.n >= graph.n``.
        family: The graph family, selects the bisector. The tree family accepts forests.

    Raises:
        FamilyError: If the graph is not in the family.
        InfeasibleInstanceError: If the graph has more vertices than the universal graph is built for.
        ClusterOverflowError: If a cluster receives more vertices than its capacity.
        EdgeStretchError: If an edge ends up on clusters that are not adjacent.
        BisectorBudgetError: If a bisector exceeds its separator budget.
    """
    family = Family(family)
    valid = is_forest(graph) if family == Family.TREE else validate_family(graph, family)
    if not valid or family not in _SPLITTERS:
        raise FamilyError(f"Graph is not a valid {family.value} graph")

    if graph.n > params.n:
        raise InfeasibleInstanceError(f"Graph of {graph.n} vertices does not fit {params!r}")

    colors = bisector_colors(params.delta)
    full = graph.to_networkx()

    phi = [0] * graph.n
    cluster_of: dict[int, ClusterAddr] = {}

    jobs = deque([(ClusterAddr(1, 1), list(range(graph.n)))])
    while jobs:
        addr, job = jobs.popleft()
        capacity = params.cluster_size(addr.t)

        # Distance from this cluster to the farthest ancestor holding a neighbor, per job vertex
        oldest = {}
        for vertex in job:
            distances = [addr.t - cluster_of[other].t for other in graph.adj[vertex] if other in cluster_of]
            if distances:
                oldest[vertex] = max(distances)

        forced = [vertex for vertex in job if oldest.get(vertex, 0) >= colors]
        if addr.t == params.k or (addr.t >= params.k - 1 and len(job) <= capacity):
            placed, sides = job, ()
        else:
            rest = [vertex for vertex in job if oldest.get(vertex, 0) < colors]
            coloring = Coloring({vertex: oldest.get(vertex, colors) for vertex in rest}, colors)
            result = bisect(full.subgraph(rest), coloring, family)
            placed = sorted(result.separator.union(forced))
            sides = (sorted(result.side_a), sorted(result.side_b))

        log.debug(
            "Cluster %r: job of %d vertices, %d forced, %d placed", addr, len(job), len(forced), len(placed)
        )

        if len(placed) > capacity:
            raise ClusterOverflowError(
                f"Cluster {addr!r} receives {len(placed)} vertices but has capacity {capacity}"
            )

        lo, _ = params.cluster_range(addr)
        for offset, vertex in enumerate(placed):
            phi[vertex] = lo + offset
            cluster_of[vertex] = addr

        for child, side in zip(addr.children(), sides):
            if side:
                jobs.append((child, side))

    embedding = Embedding(params, phi)
    embedding.check(graph)
    return embedding
