from __future__ import annotations

import logging
from enum import Enum
from functools import cached_property, lru_cache
from typing import TYPE_CHECKING, NamedTuple

import networkx as nx

from dissect.adjacency.bits import BitString
from dissect.adjacency.c_adjacency import ambiguity_range
from dissect.adjacency.embed import embed
from dissect.adjacency.exceptions import (
    CorruptLabelError,
    DegreeBoundError,
    FamilyError,
    PaddingError,
)
from dissect.adjacency.graph import Family, is_forest, validate_family
from dissect.adjacency.universal import UniversalParams

if TYPE_CHECKING:
    from dissect.adjacency.embed import Embedding
    from dissect.adjacency.graph import Graph

log = logging.getLogger(__name__)

# Largest level count the decoder considers when recovering an instance from a label length
MAX_LEVELS = 64


class SlotMode(Enum):
    """Which edges a label stores, and therefore how many edge slots it has."""

    TREE = "tree"
    OUTERPLANAR = "outerplanar"
    SPLIT = "outerplanar-split"

    def slots(self, delta: int) -> int:
        if self == SlotMode.TREE:
            return 1
        if self == SlotMode.OUTERPLANAR:
            return delta
        return delta // 2 + 1

    @property
    def symmetric(self) -> bool:
        """Whether an edge is stored by only one endpoint, so decoding has to look at both labels."""
        return self != SlotMode.OUTERPLANAR


class LevelKind(Enum):
    SHALLOW_EARLY = "shallow-early"
    SHALLOW_LATE = "shallow-late"
    DEEP = "deep"


class LevelClass(NamedTuple):
    kind: LevelKind
    type: int = 0


class DecodeStats:
    """Caller-owned counters for decoder work. Decoders only ever add to them."""

    __slots__ = ("decodes", "probes")

    def __init__(self):
        self.decodes = 0
        self.probes = 0

    def __repr__(self) -> str:
        return f"<DecodeStats decodes={self.decodes} probes={self.probes}>"

    @property
    def probes_per_decode(self) -> float:
        return self.probes / self.decodes if self.decodes else 0.0


class ParsedLabel(NamedTuple):
    level: int
    vertex: int
    slots: tuple[int, ...]


class SchemeConfig:
    """Layout of the labels of one outerplanar family instance.

    A label is ``D ∘ R ∘ Type ∘ Id ∘ slots``, padded to a length that is uniform across the instance. ``D`` marks a
    deep level, whose distance to the deepest level is stored in ``Type``. A shallow level is recovered from the
    length of the rest of the label, with ``R`` choosing between the at most two shallow levels that share a length.

    Args:
        params: The universal graph the labels refer to.
        mode: The edges stored per label.
    """

    def __init__(self, params: UniversalParams, mode: SlotMode | str):
        self.params = params
        self.mode = SlotMode(mode)
        self.delta = params.delta
        self.slots = self.mode.slots(self.delta)
        self.r = ambiguity_range(self.delta)
        self.type_width = self.r.bit_length()
        self.prefix_width = 2 + self.type_width

        # Window of levels that can produce a suffix length, as offsets F(t) - t
        offsets = [self._lengths[t] - t for t in range(1, self.params.k + 1)]
        self._offsets = (min(offsets), max(offsets))
        shallow = offsets[: self.shallow_levels]
        self._shallow_offsets = (min(shallow), max(shallow)) if shallow else (0, -1)

    def __repr__(self) -> str:
        return (
            f"<SchemeConfig mode={self.mode.value} k={self.params.k} delta={self.delta} slots={self.slots} "
            f"length={self.uniform_length}>"
        )

    @cached_property
    def _lengths(self) -> tuple[int, ...]:
        lengths = [0]
        for t in range(1, self.params.k + 1):
            alpha, beta = self.params.alpha_beta(t)
            lengths.append(alpha + self.slots * beta)
        return tuple(lengths)

    @property
    def shallow_levels(self) -> int:
        """Return the number of shallow levels, levels ``1 .. k - r``."""
        return max(0, self.params.k - self.r)

    @cached_property
    def max_length(self) -> int:
        return max(self._lengths[1:])

    @property
    def uniform_length(self) -> int:
        """Return the padded length of every label of the instance."""
        return uniform_length(self.params.k, self.delta, self.slots)

    def length_fn(self, t: int) -> int:
        """Return the suffix length ``F(t) = α_t + s·β_t`` of a label on level ``t``."""
        self.params.cluster_size(t)
        return self._lengths[t]

    def preimages(self, length: int, shallow: bool = False, stats: DecodeStats | None = None) -> list[int]:
        """Return all levels with suffix length ``length`` in ascending order.

        Only the levels in a window of ``O(log log N)`` around ``length`` are evaluated.

        Args:
            length: The suffix length.
            shallow: Only consider shallow levels.
            stats: Optional counters, receives the number of evaluated levels.
        """
        lo_offset, hi_offset = self._shallow_offsets if shallow else self._offsets
        last = self.shallow_levels if shallow else self.params.k

        candidates = range(max(1, length - hi_offset), min(last, length - lo_offset) + 1)
        if stats is not None:
            stats.probes += len(candidates)

        return [t for t in candidates if self._lengths[t] == length]

    def classify(self, t: int) -> LevelClass:
        """Classify a level as deep with its type, or as the first or second shallow level of its suffix length.

        Raises:
            CorruptLabelError: If more than two shallow levels share a suffix length.
        """
        self.params.cluster_size(t)
        if t > self.params.k - self.r:
            return LevelClass(LevelKind.DEEP, self.params.k - t)

        index = self.preimages(self._lengths[t], shallow=True).index(t)
        if index > 1:
            raise CorruptLabelError(f"Level {t} shares its label length with {index} shallower levels")
        return LevelClass(LevelKind.SHALLOW_EARLY if index == 0 else LevelKind.SHALLOW_LATE)

    def build(self, vertex: int, slots: list[int]) -> BitString:
        """Assemble and pad the label of universal vertex ``vertex`` with the given edge ranks."""
        addr, _ = self.params.id_to_cluster(vertex)
        alpha, beta = self.params.alpha_beta(addr.t)
        level = self.classify(addr.t)

        deep = level.kind == LevelKind.DEEP
        late = level.kind == LevelKind.SHALLOW_LATE

        label = BitString().append_field(int(deep), 1).append_field(int(late), 1)
        label = label.append_field(level.type, self.type_width).append_field(vertex, alpha)
        for value in slots + [0] * (self.slots - len(slots)):
            label = label.append_field(value, beta)

        return label.pad_unambiguous(self.uniform_length)

    def parse(self, label: BitString, stats: DecodeStats | None = None) -> ParsedLabel:
        """Split a padded label into level, universal vertex id and edge slots.

        Raises:
            CorruptLabelError: If the label does not belong to this instance or is malformed.
        """
        if len(label) != self.uniform_length:
            raise CorruptLabelError(f"Label of {len(label)} bits, expected {self.uniform_length}")

        try:
            bits = label.strip_padding()
        except PaddingError as e:
            raise CorruptLabelError(str(e))

        if len(bits) < self.prefix_width:
            raise CorruptLabelError(f"Label of {len(bits)} bits is shorter than its prefix")

        deep, late = bits.read_field(0, 1), bits.read_field(1, 1)
        type_ = bits.read_field(2, self.type_width)
        suffix = len(bits) - self.prefix_width

        if deep:
            if late or type_ >= min(self.r, self.params.k):
                raise CorruptLabelError(f"Invalid deep label prefix: R={late} Type={type_}")
            t = self.params.k - type_
            if self._lengths[t] != suffix:
                raise CorruptLabelError(f"Suffix of {suffix} bits does not match level {t}")
        else:
            if type_:
                raise CorruptLabelError(f"Shallow label with non-zero type {type_}")
            levels = self.preimages(suffix, shallow=True, stats=stats)
            if late >= len(levels):
                raise CorruptLabelError(f"No shallow level for a suffix of {suffix} bits with R={late}")
            t = levels[late]

        alpha, beta = self.params.alpha_beta(t)
        vertex = bits.read_field(self.prefix_width, alpha)
        first, last = self.params.level_range(t)
        if not first <= vertex <= last:
            raise CorruptLabelError(f"Vertex id {vertex} is not on level {t}")

        offset = self.prefix_width + alpha
        slots = tuple(bits.read_field(offset + i * beta, beta) for i in range(self.slots))
        return ParsedLabel(t, vertex, slots)


@lru_cache(1024)
def _max_length(k: int, delta: int, slots: int) -> int:
    params = UniversalParams.from_levels(k, delta)
    lengths = (alpha + slots * beta for alpha, beta in map(params.alpha_beta, range(1, k + 1)))
    return max(lengths)


@lru_cache(256)
def length_gap(delta: int, slots: int) -> int:
    """Return the largest excess of an unpadded label over the level count ``k``, over all supported ``k``."""
    return max(_max_length(k, delta, slots) - k for k in range(1, MAX_LEVELS + 1))


@lru_cache(1024)
def uniform_length(k: int, delta: int, slots: int) -> int:
    """Return the padded label length of an instance with ``k`` levels and ``slots`` edge slots per label.

    Labels are padded to ``k`` plus a gap that depends on ``delta`` and ``slots`` only, so the length exceeds
    ``log2 n`` by the same amount at every instance size. Strictly increasing in ``k``, which is what lets a decoder
    recover ``k`` from a label.
    """
    prefix_width = 2 + ambiguity_range(delta).bit_length()
    return prefix_width + k + length_gap(delta, slots) + 1


def infer_instance(padded_length: int, delta: int, slots: int) -> UniversalParams:
    """Recover the universal graph of an instance from the padded length of its labels.

    Raises:
        CorruptLabelError: If no instance has labels of this length.
    """
    for k in range(1, MAX_LEVELS + 1):
        length = uniform_length(k, delta, slots)
        if length == padded_length:
            return UniversalParams.from_levels(k, delta)
        if length > padded_length:
            break

    raise CorruptLabelError(f"No instance with delta={delta} and {slots} slots has labels of {padded_length} bits")


def length_fn(cfg: SchemeConfig, t: int) -> int:
    return cfg.length_fn(t)


def preimages(cfg: SchemeConfig, length: int, stats: DecodeStats | None = None) -> list[int]:
    return cfg.preimages(length, stats=stats)


def classify(cfg: SchemeConfig, t: int) -> LevelClass:
    return cfg.classify(t)


def _check_input(graph: Graph, mode: SlotMode, delta: int) -> Family:
    if graph.max_degree > delta:
        raise DegreeBoundError(f"Maximum degree {graph.max_degree} exceeds delta={delta}")

    if mode == SlotMode.TREE:
        if not is_forest(graph):
            raise FamilyError("The tree scheme needs a forest")
        return Family.TREE

    if not validate_family(graph, Family.OUTERPLANAR):
        raise FamilyError("The outerplanar scheme needs an outerplanar graph")
    return Family.OUTERPLANAR


def forest_parents(graph: Graph) -> dict[int, int]:
    """Return the parent of every non-root vertex of a forest, every tree rooted at its smallest vertex."""
    full = graph.to_networkx()
    parents = {}
    for component in nx.connected_components(full):
        parents.update(nx.bfs_predecessors(full, min(component)))
    return parents


def edge_slots(graph: Graph, embedding: Embedding, mode: SlotMode | str) -> list[list[int]]:
    """Return the sorted edge ranks every vertex stores in the given mode.

    The tree mode stores the edge to the parent, the outerplanar mode every incident edge, and the split mode the
    out-edges of an Euler orientation.
    """
    mode = SlotMode(mode)
    params, phi = embedding.params, embedding.phi

    if mode == SlotMode.TREE:
        parents = forest_parents(graph)
        targets = [[parents[v]] if v in parents else [] for v in range(graph.n)]
    elif mode == SlotMode.OUTERPLANAR:
        targets = [list(graph.adj[v]) for v in range(graph.n)]
    else:
        from dissect.adjacency.bounded import euler_orient

        targets = [list(out) for out in euler_orient(graph).out_sets]

    return [sorted(params.edge_rank(phi[v], phi[w]) for w in targets[v]) for v in range(graph.n)]


def encode(
    graph: Graph,
    mode: SlotMode | str = SlotMode.OUTERPLANAR,
    delta: int | None = None,
    params: UniversalParams | None = None,
) -> list[BitString]:
    """Label every vertex of a forest or outerplanar graph with ``log n + O(1)`` bits.

    Args:
        graph: The graph to label.
        mode: The edges stored per label. The tree mode needs a forest.
        delta: The degree bound, defaults to the declared bound of the graph.
        params: The universal graph to embed into, defaults to the one for ``(graph.n, delta)``.

    Raises:
        DegreeBoundError: If a vertex degree exceeds ``delta``.
        FamilyError: If the graph is not a forest or outerplanar graph as ``mode`` requires.
        EmbeddingError: If the graph could not be embedded.
    """
    mode = SlotMode(mode)
    delta = graph.delta if delta is None else delta
    family = _check_input(graph, mode, delta)

    params = params or UniversalParams(graph.n, delta)
    cfg = SchemeConfig(params, mode)
    embedding = embed(graph, params, family)
    slots = edge_slots(graph, embedding, mode)

    labels = [cfg.build(embedding.phi[v], slots[v]) for v in range(graph.n)]
    log.debug("Encoded %d vertices with %r", graph.n, cfg)
    return labels


class LabelDecoder:
    """Decoder for the labels of any outerplanar family instance with a given degree bound and slot mode.

    The instance is recovered from the label length, and the configuration per length is cached. The cache is the
    only state, so a decoder can be shared between threads.

    Args:
        delta: The degree bound of the scheme.
        mode: The slot mode of the scheme.
        params: The universal graph, when it is not the default one for the label length.
    """

    def __init__(self, delta: int, mode: SlotMode | str = SlotMode.OUTERPLANAR, params: UniversalParams | None = None):
        self.delta = delta
        self.mode = SlotMode(mode)
        self.params = params
        self.config = lru_cache(64)(self.config)

    def __repr__(self) -> str:
        return f"<LabelDecoder mode={self.mode.value} delta={self.delta}>"

    def config(self, padded_length: int) -> SchemeConfig:
        params = self.params or infer_instance(padded_length, self.delta, self.mode.slots(self.delta))
        return SchemeConfig(params, self.mode)

    def parse(self, label: BitString, stats: DecodeStats | None = None) -> ParsedLabel:
        return self.config(len(label)).parse(label, stats)

    def decode(self, a: BitString, b: BitString, stats: DecodeStats | None = None) -> bool:
        """Return whether the vertices of two labels of the same instance are adjacent.

        Raises:
            CorruptLabelError: If a label is malformed or the labels belong to different instances.
        """
        if len(a) != len(b):
            raise CorruptLabelError(f"Labels of {len(a)} and {len(b)} bits belong to different instances")

        if stats is not None:
            stats.decodes += 1

        cfg = self.config(len(a))
        u, v = cfg.parse(a, stats), cfg.parse(b, stats)
        return decode_parsed(cfg.params, self.mode.symmetric, u, v)

    __call__ = decode


def decode_parsed(params: UniversalParams, symmetric: bool, u: ParsedLabel, v: ParsedLabel) -> bool:
    """Return whether two parsed labels of one universal graph belong to adjacent vertices.

    The first label has to store the edge, or with ``symmetric`` either label.
    """
    if u.vertex == v.vertex:
        return False

    a, _ = params.id_to_cluster(u.vertex)
    b, _ = params.id_to_cluster(v.vertex)
    if not params.clusters_adjacent(a, b):
        return False

    if params.edge_rank(u.vertex, v.vertex) in u.slots:
        return True
    return symmetric and params.edge_rank(v.vertex, u.vertex) in v.slots


@lru_cache(64)
def _decoder(delta: int, mode: SlotMode) -> LabelDecoder:
    return LabelDecoder(delta, mode)


def decode(
    a: BitString,
    b: BitString,
    delta: int,
    mode: SlotMode | str = SlotMode.OUTERPLANAR,
    stats: DecodeStats | None = None,
) -> bool:
    """Return whether the vertices of two labels are adjacent, see :class:`LabelDecoder`."""
    return _decoder(delta, SlotMode(mode)).decode(a, b, stats)


class NaiveCodec:
    """Fixed-width labels over the same universal graph: the universal vertex id followed by the edge slots, every
    field as wide as the widest level needs. No prefix and no padding.

    Args:
        params: The universal graph.
        mode: The edges stored per label.
    """

    def __init__(self, params: UniversalParams, mode: SlotMode | str = SlotMode.OUTERPLANAR):
        self.params = params
        self.mode = SlotMode(mode)
        self.slots = self.mode.slots(params.delta)
        self.id_width = params.total_vertices.bit_length()
        self.rank_width = max(row[-1] for row in params.table()).bit_length()

    def __repr__(self) -> str:
        return f"<NaiveCodec mode={self.mode.value} length={self.label_length}>"

    @property
    def label_length(self) -> int:
        return self.id_width + self.slots * self.rank_width

    def encode(self, graph: Graph) -> list[BitString]:
        """Label every vertex of a graph.

        Raises:
            DegreeBoundError: If a vertex degree exceeds the degree bound of the universal graph.
            FamilyError: If the graph is not a forest or outerplanar graph as the mode requires.
        """
        family = _check_input(graph, self.mode, self.params.delta)
        embedding = embed(graph, self.params, family)
        slots = edge_slots(graph, embedding, self.mode)

        labels = []
        for vertex in range(graph.n):
            label = BitString().append_field(embedding.phi[vertex], self.id_width)
            for value in slots[vertex] + [0] * (self.slots - len(slots[vertex])):
                label = label.append_field(value, self.rank_width)
            labels.append(label)
        return labels

    def parse(self, label: BitString) -> ParsedLabel:
        if len(label) != self.label_length:
            raise CorruptLabelError(f"Label of {len(label)} bits, expected {self.label_length}")

        vertex = label.read_field(0, self.id_width)
        if not 1 <= vertex <= self.params.total_vertices:
            raise CorruptLabelError(f"Vertex id {vertex} out of range")

        addr, _ = self.params.id_to_cluster(vertex)
        slots = tuple(label.read_field(self.id_width + i * self.rank_width, self.rank_width) for i in range(self.slots))
        return ParsedLabel(addr.t, vertex, slots)

    def decode(self, a: BitString, b: BitString) -> bool:
        return decode_parsed(self.params, self.mode.symmetric, self.parse(a), self.parse(b))
