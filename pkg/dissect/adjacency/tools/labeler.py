from __future__ import annotations

import argparse
import io
import logging
import math
import os
import random
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from pathlib import Path
from typing import TYPE_CHECKING

from dissect.adjacency.combinadics import advantage_table
from dissect.adjacency.embed import embed
from dissect.adjacency.exceptions import Error, LabelFileError
from dissect.adjacency.graph import Family, generate, oracle_adjacent, parse_graph
from dissect.adjacency.labelfile import SLOT_MODES, LabelSet, Scheme, open_labels
from dissect.adjacency.outerplanar import DecodeStats, LabelDecoder
from dissect.adjacency.planar import size_report
from dissect.adjacency.universal import Flavor, UniversalParams

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from dissect.adjacency.graph import Graph
    from dissect.adjacency.labelfile import LabelArchive

log = logging.getLogger(__name__)

EXIT_MISMATCH = 1
EXIT_ERROR = 3

SIZES_RANGE = re.compile(r"^2\^(\d+)\.\.2\^(\d+)$")


def parse_sizes(value: str) -> list[int]:
    """Parse ``2^a..2^b`` into all powers of two in that range, or a comma separated list of sizes."""
    match = SIZES_RANGE.match(value.strip())
    if match:
        lo, hi = int(match.group(1)), int(match.group(2))
        return [1 << e for e in range(lo, hi + 1)]

    try:
        return [int(size) for size in value.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Invalid sizes: {value!r}")


def worker_threads() -> int:
    """Return the worker thread count, capped by ``LABELER_THREADS`` when set."""
    value = os.environ.get("LABELER_THREADS")
    if value is not None:
        try:
            threads = int(value)
            if threads >= 1:
                return threads
        except ValueError:
            pass
        log.warning("Ignoring invalid LABELER_THREADS=%r", value)

    return os.cpu_count() or 1


def _write(path: str, data: str | bytes) -> None:
    if path == "-":
        if isinstance(data, bytes):
            sys.stdout.buffer.write(data)
        else:
            sys.stdout.write(data)
        return

    if isinstance(data, bytes):
        Path(path).write_bytes(data)
    else:
        Path(path).write_text(data)


def _read_graph(path: str) -> Graph:
    return parse_graph(Path(path).read_bytes())


def _read_labels(path: str) -> LabelSet | LabelArchive:
    return open_labels(io.BytesIO(Path(path).read_bytes()))


def _tsv(rows: Iterable[Sequence[object]]) -> None:
    for row in rows:
        print("\t".join(f"{value:.3f}" if isinstance(value, float) else str(value) for value in row))


def cmd_generate(args: argparse.Namespace) -> int:
    graph = generate(args.family, args.n, args.delta, args.seed)
    log.info("Generated %r", graph)
    _write(args.output, graph.serialize())
    return 0


def cmd_encode(args: argparse.Namespace) -> int:
    graph = _read_graph(args.input)
    delta = args.k if args.scheme == Scheme.COMBINADIC.value and args.k is not None else args.delta
    labels = LabelSet.encode(graph, args.scheme, delta)

    if args.binary:
        buf = io.BytesIO()
        labels.write_archive(buf)
        _write(args.output, buf.getvalue())
    else:
        _write(args.output, labels.dumps())

    log.info("Wrote %d labels", len(labels))
    return 0


def cmd_query(args: argparse.Namespace) -> int:
    labels = _read_labels(args.labels)
    print("true" if labels.query(args.u, args.v) else "false")
    return 0


def find_mismatch(graph: Graph, labels: LabelSet | LabelArchive, threads: int = 1) -> tuple[int, int] | None:
    """Compare the decoder against the graph for every pair of vertices.

    Returns:
        The smallest pair on which they disagree, or ``None``.
    """
    if len(labels) != graph.n:
        raise LabelFileError(f"Label file has {len(labels)} labels for a graph of {graph.n} vertices")

    all_labels = [labels[v] for v in range(graph.n)]
    decoder = labels.decoder

    def check_row(u: int) -> tuple[int, int] | None:
        for v in range(u + 1, graph.n):
            if decoder(all_labels[u], all_labels[v]) != oracle_adjacent(graph, u, v):
                return u, v
        return None

    with ThreadPoolExecutor(max_workers=threads) as pool:
        mismatches = [pair for pair in pool.map(check_row, range(graph.n)) if pair is not None]

    return min(mismatches, default=None)


def find_label_difference(graph: Graph, labels: LabelSet | LabelArchive) -> int | None:
    """Encode the graph again with the scheme and parameters of ``labels`` and compare the labels bit for bit.

    Catches damage that happens to decode like the original, such as a flipped bit in unused padding or in a slot
    that is never read.

    Returns:
        The smallest vertex whose label differs, ``-1`` if only the scheme header differs, or ``None``.
    """
    expected = LabelSet.encode(graph, labels.scheme, labels.delta)
    if expected.extra != labels.extra:
        return -1

    for vertex in range(graph.n):
        if expected[vertex] != labels[vertex]:
            return vertex
    return None


def cmd_verify(args: argparse.Namespace) -> int:
    graph = _read_graph(args.graph)
    labels = _read_labels(args.labels)

    mismatch = find_mismatch(graph, labels, worker_threads())
    if mismatch is not None:
        u, v = mismatch
        print(f"mismatch: {u} {v} decoded {labels.query(u, v)} expected {oracle_adjacent(graph, u, v)}")
        return EXIT_MISMATCH

    vertex = find_label_difference(graph, labels)
    if vertex is not None:
        if vertex < 0:
            print(f"mismatch: header differs from a fresh {labels.scheme.value} encoding")
        else:
            print(f"mismatch: label of vertex {vertex} differs from a fresh {labels.scheme.value} encoding")
        return EXIT_MISMATCH

    print(f"ok: {graph.n * (graph.n - 1) // 2} pairs")
    return 0


def _bench_range(args: argparse.Namespace) -> int:
    n_values = args.sizes or [10**3, 10**4, 10**5]
    print("n\tk\tsize\thalf_n\tlist_size\tsum_size\tin_range\tbeats_half\tbeats_list")
    for n in n_values:
        boundary = math.ceil((math.e + 1) * math.sqrt(n))
        k_values = sorted({max(1, boundary - 1), boundary, max(1, n // 10), max(1, n // 5), n})
        for report in advantage_table([n], k_values):
            _tsv([(*report, report.beats_half, report.beats_list)])
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    scheme = Scheme(args.scheme_name or args.scheme)
    if args.range:
        if scheme != Scheme.COMBINADIC:
            raise argparse.ArgumentTypeError("--range is only available for the combinadic scheme")
        return _bench_range(args)

    family = Family(args.family)
    rng = random.Random(args.seed)

    print("n\tmax_bits\tmean_bits\tmax_minus_log2n\tencode_ns_per_vertex\tdecode_ns_per_pair\tprobes_per_decode")
    for n in args.sizes or [1 << e for e in range(6, 13)]:
        graph = generate(family, n, args.delta, args.seed)
        delta = args.k if scheme == Scheme.COMBINADIC and args.k is not None else args.delta

        start = time.perf_counter_ns()
        labels = LabelSet.encode(graph, scheme, delta)
        encode_ns = (time.perf_counter_ns() - start) / n

        pairs = [(rng.randrange(n), rng.randrange(n)) for _ in range(args.pairs)]
        stats = DecodeStats()
        if scheme in SLOT_MODES and scheme != Scheme.NAIVE:
            decode = partial(LabelDecoder(delta, SLOT_MODES[scheme]).decode, stats=stats)
        else:
            decode = labels.decoder

        start = time.perf_counter_ns()
        for u, v in pairs:
            decode(labels[u], labels[v])
        decode_ns = (time.perf_counter_ns() - start) / max(len(pairs), 1)

        report = size_report(labels.labels)
        _tsv([(n, report.max_bits, report.mean_bits, report.max_bits - (n - 1).bit_length(), encode_ns, decode_ns,
               stats.probes_per_decode)])  # fmt: skip

    return 0


def cmd_universal_dump(args: argparse.Namespace) -> int:
    params = UniversalParams(args.n, args.delta, Flavor(args.flavor))
    print("level\tcluster_size\tfirst_id\tlast_id\talpha\tbeta\tneighbor_count")
    _tsv(params.table())
    return 0


def cmd_embed_audit(args: argparse.Namespace) -> int:
    graph = _read_graph(args.input)
    family = Family(args.family)
    flavor = Flavor(args.flavor) if args.flavor else Flavor.PL if family == Family.PLANAR else Flavor.H

    embedding = embed(graph, UniversalParams(graph.n, graph.delta, flavor), family)
    print("level\tcapacity\tclusters\tmax_occupancy\ttotal_occupancy")
    _tsv(embedding.audit())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Generate graphs, compute adjacency labels and query or verify them.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="increase output verbosity")
    subparsers = parser.add_subparsers(dest="command", required=True)

    families = [family.value for family in Family]
    schemes = [scheme.value for scheme in Scheme]

    generate_parser = subparsers.add_parser("generate", help="generate a random graph")
    generate_parser.add_argument("--family", choices=families, required=True)
    generate_parser.add_argument("--n", type=int, required=True, help="number of vertices")
    generate_parser.add_argument("--delta", type=int, required=True, help="degree bound")
    generate_parser.add_argument("--seed", type=int, default=0)
    generate_parser.add_argument("-o", "--output", default="-", help="graph file to write")
    generate_parser.set_defaults(handler=cmd_generate)

    encode_parser = subparsers.add_parser("encode", help="compute the labels of a graph")
    encode_parser.add_argument("--scheme", choices=schemes, required=True)
    encode_parser.add_argument("-i", "--input", required=True, help="graph file to read")
    encode_parser.add_argument("-o", "--output", default="-", help="label file to write")
    encode_parser.add_argument("--binary", action="store_true", help="write a binary label archive")
    encode_parser.add_argument("--delta", type=int, help="degree bound, defaults to the bound of the graph file")
    encode_parser.add_argument("--k", type=int, help="degree bound of the combinadic scheme")
    encode_parser.set_defaults(handler=cmd_encode)

    query_parser = subparsers.add_parser("query", help="decode the adjacency of two vertices")
    query_parser.add_argument("-l", "--labels", required=True, help="label file or archive to read")
    query_parser.add_argument("u", type=int)
    query_parser.add_argument("v", type=int)
    query_parser.set_defaults(handler=cmd_query)

    verify_parser = subparsers.add_parser("verify", help="compare all decoded pairs against a graph")
    verify_parser.add_argument("-g", "--graph", required=True, help="graph file to read")
    verify_parser.add_argument("-l", "--labels", required=True, help="label file or archive to read")
    verify_parser.set_defaults(handler=cmd_verify)

    bench_parser = subparsers.add_parser("bench", help="measure label sizes and timings as TSV")
    bench_parser.add_argument("scheme_name", nargs="?", choices=schemes, metavar="SCHEME")
    bench_parser.add_argument("--scheme", choices=schemes, default=Scheme.OUTERPLANAR.value)
    bench_parser.add_argument("--family", choices=families, default=Family.OUTERPLANAR.value)
    bench_parser.add_argument("--sizes", type=parse_sizes, help="sizes as 2^a..2^b or a comma separated list")
    bench_parser.add_argument("--delta", type=int, default=3)
    bench_parser.add_argument("--k", type=int, help="degree bound of the combinadic scheme")
    bench_parser.add_argument("--seed", type=int, default=0)
    bench_parser.add_argument("--pairs", type=int, default=10000, help="number of decoded pairs per size")
    bench_parser.add_argument("--range", action="store_true", help="print the combinadic advantage range table")
    bench_parser.set_defaults(handler=cmd_bench)

    dump_parser = subparsers.add_parser("universal-dump", help="print the per-level table of a universal graph")
    dump_parser.add_argument("--n", type=int, required=True)
    dump_parser.add_argument("--delta", type=int, required=True)
    dump_parser.add_argument("--flavor", choices=[flavor.value for flavor in Flavor], default=Flavor.H.value)
    dump_parser.set_defaults(handler=cmd_universal_dump)

    audit_parser = subparsers.add_parser("embed-audit", help="print per-level cluster occupancy of an embedding")
    audit_parser.add_argument("-i", "--input", required=True, help="graph file to read")
    audit_parser.add_argument("--family", choices=[f.value for f in Family if f != Family.GENERAL], required=True)
    audit_parser.add_argument("--flavor", choices=[flavor.value for flavor in Flavor])
    audit_parser.set_defaults(handler=cmd_embed_audit)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    levels = [logging.WARNING, logging.INFO, logging.DEBUG]
    logging.basicConfig(level=levels[min(args.verbose, len(levels) - 1)], format="%(levelname)s %(name)s: %(message)s")

    try:
        return args.handler(args)
    except argparse.ArgumentTypeError as e:
        parser.error(str(e))
    except (Error, OSError) as e:
        log.error("%s", e)  # noqa: TRY400
        return EXIT_ERROR


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        pass
