from dissect.adjacency.bits import BitString
from dissect.adjacency.bounded import (
    ForestDecomposition,
    NeighborListCodec,
    Orientation,
    decode_concat,
    encode_concat,
    euler_orient,
    forest_decompose,
)
from dissect.adjacency.combinadics import CombinadicCodec, advantage_range_check, sigma, unrank
from dissect.adjacency.embed import BisectionResult, Coloring, Embedding, bisect, embed
from dissect.adjacency.graph import Family, Graph, generate, oracle_adjacent, parse_graph, validate_family
from dissect.adjacency.labelfile import LabelArchive, LabelSet, Scheme, open_labels
from dissect.adjacency.outerplanar import (
    DecodeStats,
    LabelDecoder,
    NaiveCodec,
    SchemeConfig,
    SlotMode,
    decode,
    encode,
    infer_instance,
)
from dissect.adjacency.planar import PlanarCodec, size_report
from dissect.adjacency.universal import ClusterAddr, Flavor, UniversalParams

__all__ = [
    "BisectionResult",
    "BitString",
    "ClusterAddr",
    "Coloring",
    "CombinadicCodec",
    "DecodeStats",
    "Embedding",
    "Family",
    "Flavor",
    "ForestDecomposition",
    "Graph",
    "LabelArchive",
    "LabelDecoder",
    "LabelSet",
    "NaiveCodec",
    "NeighborListCodec",
    "Orientation",
    "PlanarCodec",
    "Scheme",
    "SchemeConfig",
    "SlotMode",
    "UniversalParams",
    "advantage_range_check",
    "bisect",
    "decode",
    "decode_concat",
    "embed",
    "encode",
    "encode_concat",
    "euler_orient",
    "forest_decompose",
    "generate",
    "infer_instance",
    "open_labels",
    "oracle_adjacent",
    "parse_graph",
    "sigma",
    "size_report",
    "unrank",
    "validate_family",
]
