from __future__ import annotations

import io

import pytest

from dissect.adjacency.c_adjacency import ARCHIVE_MAGIC, c_adjacency
from dissect.adjacency.exceptions import LabelFileError, VertexRangeError
from dissect.adjacency.graph import Graph, oracle_adjacent
from dissect.adjacency.labelfile import LabelArchive, LabelSet, Scheme, make_decoder, open_labels
from tests.conftest import assert_oracle_equivalent


@pytest.fixture
def graphs(path_graph: Graph, cycle4: Graph, grid: Graph, k4: Graph) -> dict[Scheme, tuple[Graph, int | None]]:
    return {
        Scheme.TREE: (path_graph, None),
        Scheme.OUTERPLANAR: (cycle4, None),
        Scheme.OUTERPLANAR_SPLIT: (cycle4, None),
        Scheme.NAIVE: (cycle4, None),
        Scheme.BOUNDED_CONCAT: (grid, None),
        Scheme.BOUNDED_LIST: (grid, None),
        Scheme.COMBINADIC: (k4, 3),
        Scheme.PLANAR: (grid, None),
    }


@pytest.mark.parametrize("scheme", list(Scheme))
def test_label_set(scheme: Scheme, graphs: dict[Scheme, tuple[Graph, int | None]]) -> None:
    graph, delta = graphs[scheme]
    labels = LabelSet.encode(graph, scheme, delta)

    assert len(labels) == graph.n
    assert_oracle_equivalent(graph, labels.decoder, labels.labels)
    assert labels.query(0, 1) == oracle_adjacent(graph, 0, 1)

    loaded = LabelSet.loads(labels.dumps())
    assert loaded.scheme == scheme
    assert (loaded.n, loaded.delta, loaded.extra) == (labels.n, labels.delta, labels.extra)
    assert loaded.labels == labels.labels
    assert_oracle_equivalent(graph, loaded.decoder, loaded.labels)

    decoder = make_decoder(scheme.value, labels.n, labels.delta, labels.extra)
    assert decoder(labels[0], labels[1]) == oracle_adjacent(graph, 0, 1)


def test_headers(path_graph: Graph, grid: Graph, k4: Graph) -> None:
    assert LabelSet.encode(path_graph, "tree").header() == "scheme=tree n=6 delta=2"
    assert LabelSet.encode(k4, "combinadic", 3).header() == "scheme=combinadic n=4 k=3"
    assert LabelSet.encode(grid, "bounded-concat").header() == "scheme=bounded-concat n=16 delta=4 forests=2"

    text = LabelSet.encode(path_graph, Scheme.TREE).dumps()
    lines = text.splitlines()
    assert len(lines) == 7
    assert lines[1].startswith("0 ")
    assert text.endswith("\n")


def test_loads_comments(path_graph: Graph) -> None:
    text = "# labels of a path\n" + LabelSet.encode(path_graph, Scheme.TREE).dumps()
    assert LabelSet.loads(text.encode()).n == 6


@pytest.mark.parametrize(
    "text",
    [
        "",
        "scheme=tree n=2\n0 1:8\n1 1:0\n",
        "scheme=tree n=2 delta\n",
        "scheme=unknown n=2 delta=1\n",
        "scheme=tree n=x delta=1\n",
        "scheme=tree n=2 delta=1\n0 1:8\n",
        "scheme=tree n=2 delta=1\n0 1:8\n0 1:0\n",
        "scheme=tree n=2 delta=1\n0 1:8\n2 1:0\n",
        "scheme=tree n=2 delta=1\n0 1:8\nx 1:0\n",
        "scheme=tree n=2 delta=1\n0 1:8\n¹ 1:0\n",
        "scheme=tree n=2 delta=1\n0 1:8\n1 ¹:0\n",
        "scheme=tree n=³ delta=1\n",
        "scheme=tree n=2 delta=1\n0 1:8\n1 1:f\n",
        b"\xff\xfe",
    ],
)
def test_loads_invalid(text: str | bytes) -> None:
    with pytest.raises(LabelFileError):
        LabelSet.loads(text)


def test_label_set_invalid(path_graph: Graph) -> None:
    labels = LabelSet.encode(path_graph, Scheme.TREE)

    with pytest.raises(LabelFileError):
        LabelSet(Scheme.TREE, 7, 2, labels.labels)

    with pytest.raises(VertexRangeError):
        labels[6]

    with pytest.raises(VertexRangeError):
        labels.query(0, 6)


@pytest.mark.parametrize("scheme", list(Scheme))
def test_archive(scheme: Scheme, graphs: dict[Scheme, tuple[Graph, int | None]]) -> None:
    graph, delta = graphs[scheme]
    labels = LabelSet.encode(graph, scheme, delta)

    buf = io.BytesIO()
    labels.write_archive(buf)
    data = buf.getvalue()
    assert data[:4] == ARCHIVE_MAGIC

    header = c_adjacency._LABEL_ARCHIVE_HEADER(data)
    assert header.VertexCount == graph.n
    assert header.DataOffset == len(c_adjacency._LABEL_ARCHIVE_HEADER) + graph.n * len(c_adjacency._LABEL_ENTRY)

    archive = LabelArchive(io.BytesIO(data))
    assert archive.scheme == scheme
    assert (archive.n, archive.delta, archive.extra) == (labels.n, labels.delta, labels.extra)
    assert [archive.label(v) for v in range(graph.n)] == labels.labels
    assert archive.load().labels == labels.labels

    for u in range(graph.n):
        assert archive.query(u, (u + 1) % graph.n) == oracle_adjacent(graph, u, (u + 1) % graph.n)


def test_archive_invalid(grid: Graph) -> None:
    buf = io.BytesIO()
    LabelSet.encode(grid, Scheme.PLANAR).write_archive(buf)
    data = buf.getvalue()

    with pytest.raises(LabelFileError, match="Truncated"):
        LabelArchive(io.BytesIO(data[:10]))

    with pytest.raises(LabelFileError, match="magic"):
        LabelArchive(io.BytesIO(b"XXXX" + data[4:]))

    with pytest.raises(LabelFileError, match="version"):
        LabelArchive(io.BytesIO(data[:4] + b"\x02\x00" + data[6:]))

    archive = LabelArchive(io.BytesIO(data))
    with pytest.raises(VertexRangeError):
        archive.label(16)

    archive = LabelArchive(io.BytesIO(data[:-1]))
    with pytest.raises(LabelFileError):
        archive.label(15)

    archive = LabelArchive(io.BytesIO(data[:30]))
    with pytest.raises(LabelFileError):
        archive.label(5)


def test_open_labels(path_graph: Graph) -> None:
    labels = LabelSet.encode(path_graph, Scheme.TREE)

    opened = open_labels(io.BytesIO(labels.dumps().encode()))
    assert isinstance(opened, LabelSet)
    assert opened.labels == labels.labels

    buf = io.BytesIO()
    labels.write_archive(buf)
    buf.seek(0)
    opened = open_labels(buf)
    assert isinstance(opened, LabelArchive)
    assert opened.load().labels == labels.labels
