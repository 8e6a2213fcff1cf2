from __future__ import annotations

import math
from functools import lru_cache
from typing import TYPE_CHECKING, NamedTuple

from dissect.adjacency.bits import BitString
from dissect.adjacency.bounded import euler_orient
from dissect.adjacency.exceptions import CorruptLabelError, DegreeBoundError, RankError

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from dissect.adjacency.graph import Graph


@lru_cache(65536)
def binomial(n: int, k: int) -> int:
    """Return the exact binomial coefficient ``C(n, k)``, zero when ``k > n``."""
    if k < 0 or n < 0:
        return 0
    return math.comb(n, k)


def sigma(seq: Sequence[int], n: int | None = None) -> int:
    """Return the rank ``Σ C(t_i, i)`` of a strictly increasing sequence in the combinatorial number system.

    Ranks enumerate all sequences of one length in colexicographic order, starting at 0.

    Args:
        seq: The strictly increasing sequence ``t_1 < t_2 < ...``.
        n: Optional universe size, every value must be below it.

    Raises:
        RankError: If the sequence is not strictly increasing or a value lies outside the universe.
    """
    rank = 0
    previous = -1
    for i, value in enumerate(seq, 1):
        if value <= previous:
            raise RankError(f"Sequence is not strictly increasing: {list(seq)}")
        if n is not None and value >= n:
            raise RankError(f"Value {value} outside the universe of {n}")

        rank += binomial(value, i)
        previous = value

    return rank


def unrank(rank: int, length: int, n: int) -> tuple[int, ...]:
    """Return the strictly increasing sequence of ``length`` values below ``n`` with the given rank.

    Raises:
        RankError: If ``rank`` is not below ``C(n, length)``.
    """
    if length < 0 or not 0 <= rank < binomial(n, length):
        raise RankError(f"Rank {rank} outside [0, C({n}, {length}))")

    seq = []
    upper = n - 1
    for i in range(length, 0, -1):
        # Largest t with C(t, i) <= rank, C(i - 1, i) = 0 always qualifies
        lo, hi = i - 1, upper
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if binomial(mid, i) <= rank:
                lo = mid
            else:
                hi = mid - 1

        seq.append(lo)
        rank -= binomial(lo, i)
        upper = lo - 1

    return tuple(reversed(seq))


class BigLabel(NamedTuple):
    """Fields of a combinadic label. ``flag`` selects whether ``rank`` ranks the out-neighbors of the vertex or the
    complement of its neighborhood."""

    flag: int
    vertex: int
    set_size: int
    rank: int


class CombinadicCodec:
    """Labels for graphs whose degree bound ``k`` grows with ``n``.

    A vertex stores its out-neighbors of an Euler orientation as one combinadic rank. A vertex of degree at least
    ``2n/3`` instead stores the complement of its neighborhood within the other vertices, which is smaller.

    Args:
        n: The number of vertices.
        k: The degree bound, at most ``n``.
    """

    def __init__(self, n: int, k: int):
        if not 1 <= k <= max(n, 1):
            raise DegreeBoundError(f"Degree bound {k} outside [1, {n}]")

        self.n = n
        self.k = k
        self.id_width = (n - 1).bit_length()
        self.rank_width = (binomial(n, (k + 1) // 2) - 1).bit_length()

    def __repr__(self) -> str:
        return f"<CombinadicCodec n={self.n} k={self.k} length={self.label_length}>"

    @property
    def label_length(self) -> int:
        return 1 + 2 * self.id_width + self.rank_width

    def encode(self, graph: Graph) -> list[BitString]:
        """Label every vertex of a graph.

        Raises:
            DegreeBoundError: If a vertex degree exceeds ``k``.
        """
        if graph.max_degree > self.k:
            raise DegreeBoundError(f"Maximum degree {graph.max_degree} exceeds k={self.k}")

        out_sets = euler_orient(graph).out_sets
        labels = []
        for vertex in range(graph.n):
            if 3 * graph.degree(vertex) >= 2 * self.n:
                flag = 1
                stored = sorted(set(range(self.n)) - set(graph.adj[vertex]) - {vertex})
            else:
                flag = 0
                stored = out_sets[vertex]

            label = BitString().append_field(flag, 1).append_field(vertex, self.id_width)
            label = label.append_field(len(stored), self.id_width)
            labels.append(label.append_field(sigma(stored, self.n), self.rank_width))

        return labels

    def parse(self, label: BitString) -> BigLabel:
        """Split a label into its fields.

        Raises:
            CorruptLabelError: If the label has the wrong length or a field is out of range.
        """
        if len(label) != self.label_length:
            raise CorruptLabelError(f"Label of {len(label)} bits, expected {self.label_length}")

        flag = label.read_field(0, 1)
        vertex = label.read_field(1, self.id_width)
        set_size = label.read_field(1 + self.id_width, self.id_width)
        rank = label.read_field(1 + 2 * self.id_width, self.rank_width)

        if vertex >= self.n:
            raise CorruptLabelError(f"Vertex id {vertex} outside [0, {self.n - 1}]")
        if rank >= binomial(self.n, set_size):
            raise CorruptLabelError(f"Rank {rank} outside [0, C({self.n}, {set_size}))")

        return BigLabel(flag, vertex, set_size, rank)

    def _contains(self, label: BigLabel, other: int) -> bool:
        members = unrank(label.rank, label.set_size, self.n)
        if label.flag:
            return other != label.vertex and other not in members
        return other in members

    def decode(self, a: BitString, b: BitString) -> bool:
        u, v = self.parse(a), self.parse(b)
        return u.vertex != v.vertex and (self._contains(u, v.vertex) or self._contains(v, u.vertex))


def encode_big(graph: Graph, k: int) -> list[BitString]:
    return CombinadicCodec(graph.n, k).encode(graph)


def decode_big(a: BitString, b: BitString, n: int, k: int) -> bool:
    return CombinadicCodec(n, k).decode(a, b)


class AdvantageReport(NamedTuple):
    """Size ``f(n, k)`` of a combinadic label next to the sizes it is compared against."""

    n: int
    k: int
    size: float
    half_n: float
    list_size: float
    sum_size: float
    in_range: bool

    @property
    def beats_half(self) -> bool:
        return self.size < self.half_n

    @property
    def beats_list(self) -> bool:
        """Whether the label is smaller than ``⌈k/2⌉`` ids of ``log2 n`` bits."""
        return self.size < self.list_size

    @property
    def beats_sum(self) -> bool:
        """Whether the label is smaller than ``⌈k/2⌉ + 2·log2 n``, the literal reading of the bound."""
        return self.size < self.sum_size


def advantage_range_check(n: int, k: int) -> AdvantageReport:
    """Compare the label size ``f(n, k) = log2 C(n, ⌈k/2⌉) + log2 k + log2 n`` against ``n/2`` and against
    ``⌈k/2⌉·log2 n``.

    The binomial is computed exactly; only the logarithms are floating point. ``in_range`` tells whether ``k`` lies
    in ``[(e+1)·√n, n/5]``, where the label is expected to win both comparisons.

    Raises:
        DegreeBoundError: If ``k`` is outside ``[1, n]``.
    """
    if not 1 <= k <= n:
        raise DegreeBoundError(f"Degree bound {k} outside [1, {n}]")

    half = (k + 1) // 2
    size = math.log2(binomial(n, half)) + math.log2(k) + math.log2(n)
    return AdvantageReport(
        n=n,
        k=k,
        size=size,
        half_n=n / 2,
        list_size=half * math.log2(n),
        sum_size=half + 2 * math.log2(n),
        in_range=(math.e + 1) * math.sqrt(n) <= k <= n / 5,
    )


def advantage_table(n_values: Iterable[int], k_values: Iterable[int]) -> list[AdvantageReport]:
    """Return :func:`advantage_range_check` for every valid combination of ``n`` and ``k``."""
    k_values = list(k_values)
    return [advantage_range_check(n, k) for n in n_values for k in k_values if 1 <= k <= n]
