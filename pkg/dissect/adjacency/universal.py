from __future__ import annotations

import math
from bisect import bisect_left
from enum import Enum
from functools import cached_property
from typing import NamedTuple

import networkx as nx

from dissect.adjacency.c_adjacency import (
    MATERIALIZE_LIMIT,
    cluster_constant,
    cluster_radius,
    planar_cluster_constant,
)
from dissect.adjacency.exceptions import ClusterAddressError, InfeasibleInstanceError


class Flavor(Enum):
    """Shape of the universal graph: logarithmic clusters for trees and outerplanar graphs, square-root clusters for
    planar graphs."""

    H = "H"
    PL = "PL"


class ClusterAddr(NamedTuple):
    """Address of a cluster: a node of the complete binary tree, given by its level and its 1-based position in that
    level from left to right. The root is ``(1, 1)``."""

    t: int
    pos: int

    def __repr__(self) -> str:
        return f"<ClusterAddr {self.t}#{self.pos}>"

    def parent(self) -> ClusterAddr:
        """Return the address of the parent cluster.

        Raises:
            ClusterAddressError: If this is the root.
        """
        if self.t <= 1:
            raise ClusterAddressError("The root cluster has no parent")
        return ClusterAddr(self.t - 1, (self.pos + 1) // 2)

    def children(self) -> tuple[ClusterAddr, ClusterAddr]:
        """Return the addresses of the left and right child clusters.

        Use :meth:`UniversalParams.children` to also check against the depth of the tree.
        """
        return ClusterAddr(self.t + 1, 2 * self.pos - 1), ClusterAddr(self.t + 1, 2 * self.pos)

    def sibling(self) -> ClusterAddr:
        return ClusterAddr(self.t, self.pos + 1 if self.pos % 2 else self.pos - 1)

    def ancestor(self, distance: int) -> ClusterAddr:
        """Return the ancestor ``distance`` levels up.

        Raises:
            ClusterAddressError: If the ancestor would lie above the root.
        """
        if distance >= self.t:
            raise ClusterAddressError(f"{self!r} has no ancestor at distance {distance}")
        return ClusterAddr(self.t - distance, ((self.pos - 1) >> distance) + 1)


class UniversalParams:
    """Closed-form arithmetic of an edge-universal graph for graphs on ``n`` vertices with degree bound ``Δ``.

    The universal graph is a complete binary tree of ``k`` levels, ``k`` being the smallest integer with
    ``2^k - 1 >= n``. Every tree node is a cluster of vertices, and two vertices are adjacent if and only if their
    clusters are at distance at most ``g`` in the tree. Vertices are numbered level by level and left to right
    starting at 1, so every question about the graph reduces to arithmetic on a table of ``k`` cluster sizes. The
    graph itself is never built, except by :meth:`materialize` for small debug instances.

    Cluster sizes are ``⌈c·log2(N/2^t)⌉`` for :attr:`Flavor.H` and ``⌈c'·√(N/2^t)⌉`` for :attr:`Flavor.PL`,
    both clamped to at least one vertex.

    Args:
        n: The number of vertices of the graphs to embed.
        delta: The degree bound.
        flavor: The shape of the universal graph.
        c: Override for the cluster constant, the fixed table in :mod:`dissect.adjacency.c_adjacency` is used by
           default.

    Raises:
        InfeasibleInstanceError: If ``n`` or ``delta`` is smaller than one.
    """

    def __init__(self, n: int, delta: int, flavor: Flavor = Flavor.H, c: float | None = None):
        if n < 1 or delta < 1:
            raise InfeasibleInstanceError(f"Need n >= 1 and delta >= 1, got n={n}, delta={delta}")

        self.n = n
        self.delta = delta
        self.flavor = Flavor(flavor)
        self.k = n.bit_length()
        self.N = (1 << self.k) - 1
        self.g = cluster_radius(delta)

        if c is None:
            c = cluster_constant(delta) if self.flavor == Flavor.H else planar_cluster_constant(delta)
        self.c = c

        # Index 0 is unused so levels index directly
        sizes = [0]
        log_n = math.log2(self.N)
        for t in range(1, self.k + 1):
            if self.flavor == Flavor.H:
                size = math.ceil(c * (log_n - t))
            else:
                size = math.ceil(c * math.sqrt(self.N / 2**t))
            sizes.append(max(1, size))
        self._sizes = tuple(sizes)

        # _level_start[t] is the number of vertices on the levels above level t
        starts = [0, 0]
        for t in range(1, self.k + 1):
            starts.append(starts[-1] + (1 << (t - 1)) * sizes[t])
        self._level_start = tuple(starts)

    @classmethod
    def from_levels(cls, k: int, delta: int, flavor: Flavor = Flavor.H) -> UniversalParams:
        """Return the parameters of a universal graph with ``k`` levels.

        The arithmetic only depends on ``k``, so this is what a decoder uses when it recovers the level count from a
        label instead of knowing ``n``.
        """
        return cls((1 << k) - 1, delta, flavor)

    def __repr__(self) -> str:
        return f"<UniversalParams {self.flavor.value} n={self.n} k={self.k} delta={self.delta} c={self.c} g={self.g}>"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UniversalParams):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    @property
    def _key(self) -> tuple:
        return (self.k, self.delta, self.flavor, self.c)

    @property
    def total_vertices(self) -> int:
        """Return the number of vertices of the universal graph."""
        return self._level_start[self.k + 1]

    def validate(self, addr: ClusterAddr) -> None:
        """Check that a cluster address lies within the tree.

        Raises:
            ClusterAddressError: If the address is invalid.
        """
        if not 1 <= addr.t <= self.k or not 1 <= addr.pos <= 1 << (addr.t - 1):
            raise ClusterAddressError(f"Invalid cluster address {addr!r} for a tree of {self.k} levels")

    def cluster_size(self, t: int) -> int:
        """Return the number of vertices in every cluster on level ``t``.

        Raises:
            ClusterAddressError: If the level is out of range.
        """
        if not 1 <= t <= self.k:
            raise ClusterAddressError(f"Level {t} outside [1, {self.k}]")
        return self._sizes[t]

    def level_range(self, t: int) -> tuple[int, int]:
        """Return the first and last vertex id on level ``t``."""
        last = self.max_id(t)
        return self._level_start[t] + 1, last

    def max_id(self, t: int) -> int:
        """Return the largest vertex id on levels ``1 .. t``, also the number of vertices on those levels."""
        if not 1 <= t <= self.k:
            raise ClusterAddressError(f"Level {t} outside [1, {self.k}]")
        return self._level_start[t + 1]

    def cluster_range(self, addr: ClusterAddr) -> tuple[int, int]:
        """Return the first and last vertex id of a cluster.

        Raises:
            ClusterAddressError: If the address is invalid.
        """
        self.validate(addr)
        size = self._sizes[addr.t]
        lo = self._level_start[addr.t] + (addr.pos - 1) * size + 1
        return lo, lo + size - 1

    def id_to_cluster(self, vertex: int) -> tuple[ClusterAddr, int]:
        """Return the cluster of a vertex id and its 1-based offset within that cluster.

        Raises:
            ClusterAddressError: If the id is out of range.
        """
        if not 1 <= vertex <= self.total_vertices:
            raise ClusterAddressError(f"Vertex id {vertex} outside [1, {self.total_vertices}]")

        t = bisect_left(self._level_start, vertex, 1) - 1
        pos, offset = divmod(vertex - self._level_start[t] - 1, self._sizes[t])
        return ClusterAddr(t, pos + 1), offset + 1

    def parent(self, addr: ClusterAddr) -> ClusterAddr:
        self.validate(addr)
        return addr.parent()

    def children(self, addr: ClusterAddr) -> tuple[ClusterAddr, ClusterAddr]:
        """Return the child clusters of a cluster.

        Raises:
            ClusterAddressError: If the cluster is a leaf.
        """
        self.validate(addr)
        if addr.t >= self.k:
            raise ClusterAddressError(f"Leaf cluster {addr!r} has no children")
        return addr.children()

    def clusters_adjacent(self, a: ClusterAddr, b: ClusterAddr) -> bool:
        """Return whether two clusters are at tree distance at most ``g``.

        Walks at most ``g`` parent steps in total, meeting at the lowest common ancestor.
        """
        distance = 0
        (ta, pa), (tb, pb) = a, b

        while ta > tb:
            ta, pa, distance = ta - 1, (pa + 1) // 2, distance + 1
        while tb > ta:
            tb, pb, distance = tb - 1, (pb + 1) // 2, distance + 1

        while pa != pb and distance <= self.g:
            pa, pb, distance = (pa + 1) // 2, (pb + 1) // 2, distance + 2

        return distance <= self.g

    def nearby_runs(self, addr: ClusterAddr) -> list[tuple[int, int, int]]:
        """Return all clusters within distance ``g`` of a cluster as runs ``(level, first pos, last pos)``.

        Clusters of one run are consecutive on their level and therefore cover one consecutive range of vertex ids.
        There are ``O(g^2)`` runs, covering at most ``3·2^g`` clusters.
        """
        self.validate(addr)
        runs = []

        # The subtree below the cluster itself
        for depth in range(min(self.g, self.k - addr.t) + 1):
            runs.append((addr.t + depth, ((addr.pos - 1) << depth) + 1, addr.pos << depth))

        # Every ancestor, plus the subtree hanging off its other child
        node = addr
        for up in range(1, min(self.g, addr.t - 1) + 1):
            sibling = node.sibling()
            node = node.parent()
            runs.append((node.t, node.pos, node.pos))

            for depth in range(min(self.g - up - 1, self.k - sibling.t) + 1):
                runs.append((sibling.t + depth, ((sibling.pos - 1) << depth) + 1, sibling.pos << depth))

        return runs

    def _run_ids(self, level: int, first: int, last: int) -> tuple[int, int]:
        size = self._sizes[level]
        start = self._level_start[level]
        return start + (first - 1) * size + 1, start + last * size

    @cached_property
    def _neighbor_counts(self) -> tuple[int, ...]:
        # The neighborhood shape only depends on the level, so the leftmost cluster is representative
        counts = [0]
        for t in range(1, self.k + 1):
            runs = self.nearby_runs(ClusterAddr(t, 1))
            counts.append(sum((last - first + 1) * self._sizes[level] for level, first, last in runs) - 1)
        return tuple(counts)

    def neighbor_count(self, addr: ClusterAddr) -> int:
        """Return the degree of every vertex in a cluster: the number of vertices in clusters within distance ``g``,
        excluding the vertex itself."""
        self.validate(addr)
        return self._neighbor_counts[addr.t]

    def edge_rank(self, vertex: int, neighbor: int) -> int:
        """Return the 1-based rank of ``neighbor`` among all universal graph neighbors of ``vertex``, ordered by id.

        Counted per run of nearby clusters, never per vertex.

        Raises:
            ClusterAddressError: If the two vertices are not adjacent in the universal graph.
        """
        a, _ = self.id_to_cluster(vertex)
        b, _ = self.id_to_cluster(neighbor)
        if vertex == neighbor or not self.clusters_adjacent(a, b):
            raise ClusterAddressError(f"Vertices {vertex} and {neighbor} are not adjacent in the universal graph")

        smaller = 0
        for run in self.nearby_runs(a):
            lo, hi = self._run_ids(*run)
            if neighbor > lo:
                smaller += min(neighbor, hi + 1) - lo

        if vertex < neighbor:
            smaller -= 1
        return smaller + 1

    def alpha_beta(self, t: int) -> tuple[int, int]:
        """Return the field widths ``(α_t, β_t)`` of a label on level ``t``.

        ``α_t`` is the width of the largest vertex id on levels ``1 .. t``. ``β_t`` is the width of the largest edge
        rank of a level ``t`` vertex, i.e. of the neighbor count of a level ``t`` cluster.
        """
        return self.max_id(t).bit_length(), self._neighbor_counts[t].bit_length()

    def table(self) -> list[tuple[int, ...]]:
        """Return one row per level: level, cluster size, first id, last id, α, β and neighbor count."""
        rows = []
        for t in range(1, self.k + 1):
            alpha, beta = self.alpha_beta(t)
            rows.append(
                (t, self._sizes[t], self._level_start[t] + 1, self._level_start[t + 1], alpha, beta,
                 self._neighbor_counts[t])
            )  # fmt: skip
        return rows

    def materialize(self) -> nx.Graph:
        """Build the universal graph explicitly, for cross-checking the arithmetic on small instances.

        Raises:
            ValueError: If the graph has more than ``MATERIALIZE_LIMIT`` vertices.
        """
        if self.total_vertices > MATERIALIZE_LIMIT:
            raise ValueError(f"Refusing to materialize {self.total_vertices} vertices")

        graph = nx.Graph()
        graph.add_nodes_from(range(1, self.total_vertices + 1))
        for vertex in range(1, self.total_vertices + 1):
            addr, _ = self.id_to_cluster(vertex)
            for run in self.nearby_runs(addr):
                lo, hi = self._run_ids(*run)
                graph.add_edges_from((vertex, other) for other in range(max(lo, vertex + 1), hi + 1))
        return graph
