from __future__ import annotations

import math
from typing import TYPE_CHECKING, NamedTuple

from dissect.adjacency.bits import BitString
from dissect.adjacency.bounded import euler_orient
from dissect.adjacency.embed import embed
from dissect.adjacency.exceptions import CorruptLabelError, DegreeBoundError, FamilyError
from dissect.adjacency.graph import Family, validate_family
from dissect.adjacency.outerplanar import ParsedLabel, decode_parsed
from dissect.adjacency.universal import Flavor, UniversalParams

if TYPE_CHECKING:
    from collections.abc import Sequence

    from dissect.adjacency.graph import Graph


class PlanarCodec:
    """Labels for bounded degree planar graphs over the square-root clustered universal graph.

    A label is the level of the vertex, its universal vertex id and ``⌈Δ/2⌉`` edge slots holding the out-edges of an
    Euler orientation. Labels are not padded: the level is read first from a fixed width field and determines the
    widths of everything after it, so deep vertices get short labels.

    Args:
        n: The number of vertices.
        delta: The degree bound.
    """

    def __init__(self, n: int, delta: int):
        self.params = UniversalParams(n, delta, Flavor.PL)
        self.slots = (delta + 1) // 2
        self.level_width = self.params.k.bit_length()

    def __repr__(self) -> str:
        return f"<PlanarCodec {self.params!r} slots={self.slots}>"

    def label_length(self, t: int) -> int:
        """Return the length of a label on level ``t``."""
        alpha, beta = self.params.alpha_beta(t)
        return self.level_width + alpha + self.slots * beta

    def encode(self, graph: Graph) -> list[BitString]:
        """Label every vertex of a planar graph.

        Raises:
            DegreeBoundError: If a vertex degree exceeds the degree bound.
            FamilyError: If the graph is not planar.
            EmbeddingError: If the graph could not be embedded.
        """
        if graph.max_degree > self.params.delta:
            raise DegreeBoundError(f"Maximum degree {graph.max_degree} exceeds delta={self.params.delta}")
        if not validate_family(graph, Family.PLANAR):
            raise FamilyError("The planar scheme needs a planar graph")

        embedding = embed(graph, self.params, Family.PLANAR)
        phi = embedding.phi

        labels = []
        for vertex, out in enumerate(euler_orient(graph).out_sets):
            t = embedding.cluster_of(vertex).t
            alpha, beta = self.params.alpha_beta(t)
            ranks = sorted(self.params.edge_rank(phi[vertex], phi[other]) for other in out)

            label = BitString().append_field(t, self.level_width).append_field(phi[vertex], alpha)
            for value in ranks + [0] * (self.slots - len(ranks)):
                label = label.append_field(value, beta)
            labels.append(label)

        return labels

    def parse(self, label: BitString) -> ParsedLabel:
        """Split a label into level, universal vertex id and edge slots.

        Raises:
            CorruptLabelError: If the label is malformed.
        """
        t = label.read_field(0, self.level_width)
        if not 1 <= t <= self.params.k:
            raise CorruptLabelError(f"Level {t} outside [1, {self.params.k}]")
        if len(label) != self.label_length(t):
            raise CorruptLabelError(f"Label of {len(label)} bits, level {t} needs {self.label_length(t)}")

        alpha, beta = self.params.alpha_beta(t)
        vertex = label.read_field(self.level_width, alpha)
        first, last = self.params.level_range(t)
        if not first <= vertex <= last:
            raise CorruptLabelError(f"Vertex id {vertex} is not on level {t}")

        offset = self.level_width + alpha
        return ParsedLabel(t, vertex, tuple(label.read_field(offset + i * beta, beta) for i in range(self.slots)))

    def decode(self, a: BitString, b: BitString) -> bool:
        return decode_parsed(self.params, True, self.parse(a), self.parse(b))


def encode_planar(graph: Graph, delta: int | None = None) -> list[BitString]:
    delta = graph.delta if delta is None else delta
    return PlanarCodec(graph.n, delta).encode(graph)


def decode_planar(a: BitString, b: BitString, n: int, delta: int) -> bool:
    return PlanarCodec(n, delta).decode(a, b)


class SizeReport(NamedTuple):
    max_bits: int
    mean_bits: float

    def fitted_constant(self, n: int, delta: int) -> float:
        """Return the constant ``C`` for which the largest label meets ``((⌈Δ/2⌉+1)/2)·log2 n + C·log2 log2 n``."""
        log_n = math.log2(max(n, 4))
        return (self.max_bits - ((delta + 1) // 2 + 1) / 2 * log_n) / math.log2(log_n)


def size_report(labels: Sequence[BitString]) -> SizeReport:
    """Return the largest and the mean label length in bits."""
    if not labels:
        return SizeReport(0, 0.0)

    lengths = [len(label) for label in labels]
    return SizeReport(max(lengths), sum(lengths) / len(lengths))
