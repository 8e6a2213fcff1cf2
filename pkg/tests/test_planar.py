from __future__ import annotations

import math
from itertools import combinations

import pytest

from dissect.adjacency.bits import BitString
from dissect.adjacency.exceptions import CorruptLabelError, DegreeBoundError, FamilyError
from dissect.adjacency.graph import Family, Graph, generate
from dissect.adjacency.planar import PlanarCodec, decode_planar, encode_planar, size_report
from tests.conftest import assert_oracle_equivalent


def test_grid(grid: Graph) -> None:
    codec = PlanarCodec(grid.n, grid.delta)
    labels = codec.encode(grid)

    assert codec.slots == 2
    assert codec.level_width == codec.params.k.bit_length()
    for label in labels:
        assert len(label) == codec.label_length(codec.parse(label).level)

    assert_oracle_equivalent(grid, codec.decode, labels)
    assert decode_planar(labels[0], labels[1], grid.n, grid.delta)
    assert not decode_planar(labels[0], labels[5], grid.n, grid.delta)


@pytest.mark.parametrize("delta", [3, 4, 5])
@pytest.mark.parametrize("n", [1, 30, 128, 300])
def test_random_planar(n: int, delta: int) -> None:
    graph = generate(Family.PLANAR, n, delta, seed=n ^ delta)
    labels = encode_planar(graph)
    assert_oracle_equivalent(graph, PlanarCodec(n, delta).decode, labels)


def test_label_length() -> None:
    codec = PlanarCodec(1000, 4)
    assert codec.level_width == 4

    for t in range(1, codec.params.k + 1):
        alpha, beta = codec.params.alpha_beta(t)
        assert codec.label_length(t) == 4 + alpha + 2 * beta


def test_invalid() -> None:
    k5 = Graph(5, list(combinations(range(5), 2)))
    with pytest.raises(FamilyError):
        encode_planar(k5)

    star = Graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    with pytest.raises(DegreeBoundError):
        encode_planar(star, delta=3)

    codec = PlanarCodec(100, 3)
    with pytest.raises(CorruptLabelError):
        codec.parse(BitString("000").append_field(0, 20))

    level = BitString().append_field(2, codec.level_width)
    with pytest.raises(CorruptLabelError):
        codec.parse(level + BitString("1" * (codec.label_length(2) - codec.level_width + 1)))

    # Right length for level 2, but the id belongs to level 1
    alpha, beta = codec.params.alpha_beta(2)
    label = level.append_field(1, alpha).append_field(0, codec.slots * beta)
    with pytest.raises(CorruptLabelError, match="not on level"):
        codec.parse(label)


def test_size_report(grid: Graph) -> None:
    assert size_report([]) == (0, 0.0)

    labels = encode_planar(grid)
    report = size_report(labels)
    assert report.max_bits == max(len(label) for label in labels)
    assert report.mean_bits <= report.max_bits
    assert math.isfinite(report.fitted_constant(grid.n, grid.delta))


def test_mean_label_size_trend() -> None:
    ratios = []
    for e in (10, 14):
        graph = generate(Family.PLANAR, 1 << e, 4, seed=e)
        report = size_report(encode_planar(graph))
        ratios.append(report.mean_bits / e)

    # The mean grows slower than log2 n
    assert ratios[1] < ratios[0]
