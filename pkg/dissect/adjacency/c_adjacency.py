from __future__ import annotations

import math

from dissect.cstruct import cstruct

adjacency_def = """
/* ================ Label archive ================ */

enum LABEL_SCHEME : uint8 {
    TREE                = 0x01,
    OUTERPLANAR         = 0x02,
    OUTERPLANAR_SPLIT   = 0x03,
    BOUNDED_CONCAT      = 0x04,
    BOUNDED_LIST        = 0x05,
    COMBINADIC          = 0x06,
    PLANAR              = 0x07,
    NAIVE               = 0x08,
};

typedef struct _LABEL_ARCHIVE_HEADER {
    char            Magic[4];
    uint16          Version;
    LABEL_SCHEME    Scheme;
    uint8           Reserved;
    uint32          VertexCount;
    uint32          Delta;              /* Degree bound, k for combinadic */
    uint32          Extra;              /* Forest count (bounded-concat) */
    uint32          DataOffset;
} LABEL_ARCHIVE_HEADER;

typedef struct _LABEL_ENTRY {
    uint32          BitLength;
    uint32          Offset;             /* Relative to DataOffset */
} LABEL_ENTRY;
"""

c_adjacency = cstruct().load(adjacency_def)

LABEL_SCHEME = c_adjacency.LABEL_SCHEME

ARCHIVE_MAGIC = b"ADJL"
ARCHIVE_VERSION = 1

# Separator budget constants, c_b for trees and outerplanar graphs and c_p for planar graphs
BISECTOR_BUDGET = 8
PLANAR_BISECTOR_BUDGET = 8

# Largest universal graph the debug materializer is willing to build
MATERIALIZE_LIMIT = 1 << 12


def ceil_log2(value: int) -> int:
    """Return ``⌈log2 value⌉`` for a positive integer, computed without floating point.

    Args:
        value: The integer to take the logarithm of.
    """
    if value < 1:
        raise ValueError(f"ceil_log2 is undefined for {value}")
    return (value - 1).bit_length()


def cluster_constant(delta: int) -> int:
    """Return the cluster constant ``c(Δ) = 4(⌈log2 Δ⌉+1)(Δ+2)`` of the tree-shaped universal graph.

    Encoder and decoder both derive the universal graph from ``(n, Δ)`` alone, so this table is fixed at build time.

    Args:
        delta: The degree bound.
    """
    return 4 * (ceil_log2(delta) + 1) * (delta + 2)


def planar_cluster_constant(delta: int) -> int:
    """Return the cluster constant ``c'(Δ) = 8(Δ+2)`` of the planar universal graph.

    Args:
        delta: The degree bound.
    """
    return 8 * (delta + 2)


def cluster_radius(delta: int) -> int:
    """Return the cluster distance radius ``g(Δ) = 2⌈log2 max(Δ, 2)⌉ + 2``.

    Args:
        delta: The degree bound.
    """
    return 2 * ceil_log2(max(delta, 2)) + 2


def ambiguity_range(delta: int) -> int:
    """Return ``r(Δ) = ⌈8(Δ+1)·log2(Δ+1)⌉``, the number of deepest levels that carry an explicit type.

    Args:
        delta: The degree bound.
    """
    return math.ceil(8 * (delta + 1) * math.log2(delta + 1))


def bisector_colors(delta: int) -> int:
    """Return the number of color classes ``k(Δ) = ⌈log2 Δ⌉ + 1`` balanced by every bisector.

    Args:
        delta: The degree bound.
    """
    return ceil_log2(delta) + 1
