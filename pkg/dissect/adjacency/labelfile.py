from __future__ import annotations

import logging
from enum import Enum
from functools import cached_property, partial
from typing import TYPE_CHECKING, BinaryIO

from dissect.util.stream import RangeStream

from dissect.adjacency.bits import BitString
from dissect.adjacency.bounded import NeighborListCodec, decode_concat, encode_concat
from dissect.adjacency.c_adjacency import ARCHIVE_MAGIC, ARCHIVE_VERSION, LABEL_SCHEME, c_adjacency
from dissect.adjacency.combinadics import CombinadicCodec
from dissect.adjacency.exceptions import CorruptLabelError, LabelFileError, VertexRangeError
from dissect.adjacency.outerplanar import LabelDecoder, NaiveCodec, SlotMode, encode
from dissect.adjacency.planar import PlanarCodec
from dissect.adjacency.universal import UniversalParams

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from dissect.adjacency.graph import Graph

log = logging.getLogger(__name__)


class Scheme(Enum):
    TREE = "tree"
    OUTERPLANAR = "outerplanar"
    OUTERPLANAR_SPLIT = "outerplanar-split"
    BOUNDED_CONCAT = "bounded-concat"
    BOUNDED_LIST = "bounded-list"
    COMBINADIC = "combinadic"
    PLANAR = "planar"
    NAIVE = "naive"


SLOT_MODES = {
    Scheme.TREE: SlotMode.TREE,
    Scheme.OUTERPLANAR: SlotMode.OUTERPLANAR,
    Scheme.OUTERPLANAR_SPLIT: SlotMode.SPLIT,
    Scheme.NAIVE: SlotMode.OUTERPLANAR,
}


def make_decoder(scheme: Scheme | str, n: int, delta: int, extra: int = 0) -> Callable[[BitString, BitString], bool]:
    """Return the two-label decoder of a scheme instance.

    Args:
        scheme: The labeling scheme.
        n: The number of vertices.
        delta: The degree bound, ``k`` for the combinadic scheme.
        extra: The forest count of the bounded-concat scheme.
    """
    scheme = Scheme(scheme)

    if scheme == Scheme.NAIVE:
        return NaiveCodec(UniversalParams(n, delta), SLOT_MODES[scheme]).decode
    if scheme in SLOT_MODES:
        return LabelDecoder(delta, SLOT_MODES[scheme]).decode
    if scheme == Scheme.BOUNDED_CONCAT:
        return partial(decode_concat, delta=delta, forests=extra)
    if scheme == Scheme.BOUNDED_LIST:
        return NeighborListCodec(n, delta).decode
    if scheme == Scheme.COMBINADIC:
        return CombinadicCodec(n, delta).decode
    return PlanarCodec(n, delta).decode


class LabelSet:
    """The labels of all vertices of one graph, together with the scheme parameters a decoder needs.

    Args:
        scheme: The labeling scheme.
        n: The number of vertices.
        delta: The degree bound, ``k`` for the combinadic scheme.
        labels: The label of every vertex.
        extra: The forest count of the bounded-concat scheme.
    """

    def __init__(self, scheme: Scheme | str, n: int, delta: int, labels: Sequence[BitString], extra: int = 0):
        if len(labels) != n:
            raise LabelFileError(f"Expected {n} labels, got {len(labels)}")

        self.scheme = Scheme(scheme)
        self.n = n
        self.delta = delta
        self.labels = list(labels)
        self.extra = extra

    def __repr__(self) -> str:
        return f"<LabelSet scheme={self.scheme.value} n={self.n} delta={self.delta}>"

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, vertex: int) -> BitString:
        if not 0 <= vertex < self.n:
            raise VertexRangeError(f"Vertex {vertex} outside [0, {self.n - 1}]")
        return self.labels[vertex]

    @classmethod
    def encode(cls, graph: Graph, scheme: Scheme | str, delta: int | None = None) -> LabelSet:
        """Label every vertex of a graph with the given scheme.

        Args:
            graph: The graph to label.
            scheme: The labeling scheme.
            delta: The degree bound, ``k`` for the combinadic scheme. Defaults to the declared bound of the graph.
        """
        scheme = Scheme(scheme)
        delta = graph.delta if delta is None else delta
        extra = 0

        if scheme == Scheme.NAIVE:
            labels = NaiveCodec(UniversalParams(graph.n, delta), SLOT_MODES[scheme]).encode(graph)
        elif scheme in SLOT_MODES:
            labels = encode(graph, SLOT_MODES[scheme], delta)
        elif scheme == Scheme.BOUNDED_CONCAT:
            labels, extra = encode_concat(graph, delta)
        elif scheme == Scheme.BOUNDED_LIST:
            labels = NeighborListCodec(graph.n, delta).encode(graph)
        elif scheme == Scheme.COMBINADIC:
            labels = CombinadicCodec(graph.n, delta).encode(graph)
        else:
            labels = PlanarCodec(graph.n, delta).encode(graph)

        log.info("Encoded %d vertices with the %s scheme", graph.n, scheme.value)
        return cls(scheme, graph.n, delta, labels, extra)

    @cached_property
    def decoder(self) -> Callable[[BitString, BitString], bool]:
        return make_decoder(self.scheme, self.n, self.delta, self.extra)

    def query(self, u: int, v: int) -> bool:
        """Return whether vertices ``u`` and ``v`` are adjacent, looking at their labels only."""
        return self.decoder(self[u], self[v])

    def header(self) -> str:
        if self.scheme == Scheme.COMBINADIC:
            return f"scheme={self.scheme.value} n={self.n} k={self.delta}"

        header = f"scheme={self.scheme.value} n={self.n} delta={self.delta}"
        if self.scheme == Scheme.BOUNDED_CONCAT:
            header += f" forests={self.extra}"
        return header

    def dumps(self) -> str:
        """Serialize to the text label file format, a header line followed by ``<vertex> <bitlen>:<hex>`` lines."""
        lines = [self.header()]
        lines.extend(f"{vertex} {label.to_hex()}" for vertex, label in enumerate(self.labels))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: bytes | str) -> LabelSet:
        """Parse the text label file format.

        Raises:
            LabelFileError: If the file is malformed.
        """
        if isinstance(text, bytes):
            try:
                text = text.decode()
            except UnicodeDecodeError as e:
                raise LabelFileError(f"Label file is not text: {e}")

        lines = [line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")]
        if not lines:
            raise LabelFileError("Empty label file")

        fields = {}
        for token in lines[0].split():
            key, sep, value = token.partition("=")
            if not sep:
                raise LabelFileError(f"Invalid header token: {token!r}")
            fields[key] = value

        try:
            scheme = Scheme(fields["scheme"])
            n = int(fields["n"])
            delta = int(fields["k" if scheme == Scheme.COMBINADIC else "delta"])
            extra = int(fields.get("forests", 0))
        except (KeyError, ValueError) as e:
            raise LabelFileError(f"Invalid label file header {lines[0]!r}: {e}")

        labels: list[BitString | None] = [None] * n
        for line in lines[1:]:
            vertex, _, encoded = line.partition(" ")
            if not (vertex.isascii() and vertex.isdigit()) or int(vertex) >= n or labels[int(vertex)] is not None:
                raise LabelFileError(f"Invalid or duplicate vertex in line {line!r}")

            try:
                labels[int(vertex)] = BitString.from_hex(encoded)
            except CorruptLabelError as e:
                raise LabelFileError(f"Invalid label in line {line!r}: {e}")

        if None in labels:
            raise LabelFileError(f"Missing label for vertex {labels.index(None)}")

        return cls(scheme, n, delta, labels, extra)

    def write_archive(self, fh: BinaryIO) -> None:
        """Write the labels as a binary archive: a header, one entry per label and the packed label bits."""
        data = [label.to_bytes() for label in self.labels]
        table_offset = len(c_adjacency._LABEL_ARCHIVE_HEADER)

        header = c_adjacency._LABEL_ARCHIVE_HEADER(
            Magic=ARCHIVE_MAGIC,
            Version=ARCHIVE_VERSION,
            Scheme=LABEL_SCHEME[self.scheme.name],
            Reserved=0,
            VertexCount=self.n,
            Delta=self.delta,
            Extra=self.extra,
            DataOffset=table_offset + self.n * len(c_adjacency._LABEL_ENTRY),
        )
        fh.write(header.dumps())

        offset = 0
        for label, packed in zip(self.labels, data):
            fh.write(c_adjacency._LABEL_ENTRY(BitLength=len(label), Offset=offset).dumps())
            offset += len(packed)

        for packed in data:
            fh.write(packed)


class LabelArchive:
    """Random access to the labels of a binary label archive.

    Only the header is read up front. Every label lookup reads one table entry and the bytes of that one label.

    Args:
        fh: A file-like object of the archive.

    Raises:
        LabelFileError: If the archive header is invalid.
    """

    def __init__(self, fh: BinaryIO):
        self.fh = fh
        fh.seek(0)
        try:
            self.header = c_adjacency._LABEL_ARCHIVE_HEADER(fh)
        except EOFError:
            raise LabelFileError("Truncated label archive header")

        if self.header.Magic != ARCHIVE_MAGIC:
            raise LabelFileError(f"Invalid label archive magic: {self.header.Magic!r}")
        if self.header.Version != ARCHIVE_VERSION:
            raise LabelFileError(f"Unsupported label archive version: {self.header.Version}")

        try:
            self.scheme = Scheme[self.header.Scheme.name]
        except (KeyError, TypeError):
            raise LabelFileError(f"Unknown label scheme: {self.header.Scheme!r}")

        self.n = self.header.VertexCount
        self.delta = self.header.Delta
        self.extra = self.header.Extra

    def __repr__(self) -> str:
        return f"<LabelArchive scheme={self.scheme.value} n={self.n} delta={self.delta}>"

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, vertex: int) -> BitString:
        return self.label(vertex)

    def label(self, vertex: int) -> BitString:
        """Read the label of a single vertex.

        Raises:
            VertexRangeError: If the vertex is out of range.
            LabelFileError: If the archive is truncated.
        """
        if not 0 <= vertex < self.n:
            raise VertexRangeError(f"Vertex {vertex} outside [0, {self.n - 1}]")

        self.fh.seek(len(c_adjacency._LABEL_ARCHIVE_HEADER) + vertex * len(c_adjacency._LABEL_ENTRY))
        try:
            entry = c_adjacency._LABEL_ENTRY(self.fh)
        except EOFError:
            raise LabelFileError(f"Truncated label table at vertex {vertex}")

        size = (entry.BitLength + 7) // 8
        data = RangeStream(self.fh, self.header.DataOffset + entry.Offset, size).read()
        try:
            return BitString.from_bytes(data, entry.BitLength)
        except CorruptLabelError as e:
            raise LabelFileError(f"Truncated label data for vertex {vertex}: {e}")

    @cached_property
    def decoder(self) -> Callable[[BitString, BitString], bool]:
        return make_decoder(self.scheme, self.n, self.delta, self.extra)

    def query(self, u: int, v: int) -> bool:
        return self.decoder(self.label(u), self.label(v))

    def load(self) -> LabelSet:
        """Read all labels."""
        return LabelSet(self.scheme, self.n, self.delta, [self.label(v) for v in range(self.n)], self.extra)


def open_labels(fh: BinaryIO) -> LabelSet | LabelArchive:
    """Open a text label file or a binary label archive, whichever ``fh`` holds."""
    magic = fh.read(len(ARCHIVE_MAGIC))
    if magic == ARCHIVE_MAGIC:
        return LabelArchive(fh)

    fh.seek(0)
    return LabelSet.loads(fh.read())
