#!/usr/bin/env python3
"""scimap CLI — multidimensional science maps from bibliographic records.

Usage:
    scimap ingest      Parse a record file, resolve citations, print corpus statistics
    scimap snowball    Grow a seed corpus from a local citation store (per-iteration CSV report)
    scimap build       Build layers, unify, normalize and filter into a multinet file
    scimap detect      Walktrap + modularity modules of a multinet -> partition.csv
    scimap rank        PageRank rankings of every module
    scimap export      Write a multinet (or a reduced module) as graphml / dot / csv
    scimap pipeline    Run everything from records to module reports
    scimap synth       Generate a planted-partition corpus with ground truth
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .errors import PipelineError, ScimapError


def _fail(stage: str, exc: BaseException) -> int:
    if isinstance(exc, PipelineError):
        print(f"fatal: {exc}", file=sys.stderr)
    else:
        print(f"fatal: [{stage}] {exc}", file=sys.stderr)
    return 1


def cmd_ingest(args: argparse.Namespace) -> int:
    """Parse records and print corpus statistics."""
    from .corpus import corpus_stats, load_corpus, write_records

    try:
        corpus = load_corpus(args.records)
    except (ScimapError, OSError, ValueError, KeyError) as exc:
        return _fail("corpus", exc)

    stats = corpus_stats(corpus)
    degraded = sum(1 for d in corpus.documents.values() if d.degraded)
    print(f"Records:            {args.records}")
    print(f"Documents:          {stats.n_documents}")
    print(f"Without authors:    {degraded}")
    print(f"References:         {stats.n_references}")
    print(f"Unique references:  {stats.n_unique_references}")
    print(f"Citation edges:     {stats.n_resolved_edges}")
    print(f"Unresolved:         {corpus.unresolved_reference_count}")
    print(f"Self references:    {corpus.self_reference_count}")

    if args.out:
        try:
            path = write_records(corpus, args.out)
        except OSError as exc:
            return _fail("corpus", exc)
        print(f"\n  ✓ wrote {path}")
    return 0


def cmd_snowball(args: argparse.Namespace) -> int:
    """Iterative threshold-filtered reference snowball."""
    from .config import load_config, with_overrides
    from .corpus import write_records
    from .snowball import CitationStore, parse_thresholds, snowball_run, write_snowball_report

    stage = "config"
    try:
        config = with_overrides(
            load_config(args.config),
            query=tuple(args.query) if args.query else None,
            thresholds=parse_thresholds(args.thresholds) if args.thresholds else None,
            max_iterations=args.max_iter,
        ).snowball()
        stage = "snowball"
        store = CitationStore.load(args.store)
        result = snowball_run(store, config)
    except (ScimapError, OSError, ValueError, KeyError) as exc:
        return _fail(stage, exc)

    print(f"  {'ITER':>4} {'SOURCES':>8} {'REFS':>8} {'UNIQUE':>8} {'THRESH':>6} {'ADDED':>6} {'MISSING':>7}")
    print(f"  {'─'*4} {'─'*8} {'─'*8} {'─'*8} {'─'*6} {'─'*6} {'─'*7}")
    for row in result.rows:
        print(
            f"  {row.iteration:>4} {row.n_source_documents:>8} {row.n_references:>8} "
            f"{row.n_unique_references:>8} {row.threshold:>6} "
            f"{row.n_relevant_retrievable:>6} {row.n_relevant_unretrievable:>7}"
        )
    state = "converged" if result.converged else "stopped at --max-iter"
    print(f"\n  Total: {len(result.corpus)} documents ({state})")

    try:
        path = write_records(result.corpus, args.out)
        print(f"  ✓ wrote {path}")
        if args.report:
            write_snowball_report(result.rows, args.report)
            print(f"  ✓ wrote {args.report}")
        else:
            print()
            write_snowball_report(result.rows, sys.stdout)
    except OSError as exc:
        return _fail("snowball", exc)
    return 0


def cmd_build(args: argparse.Namespace) -> int:
    """Layers + unify + normalize + filter."""
    from .config import load_config
    from .corpus import load_corpus
    from .exporter import export_graph
    from .layers import build_layers
    from .multinet import filter_net, normalize, unify

    stage = "config"
    try:
        config = load_config(args.config)
        stage = "corpus"
        corpus = load_corpus(args.records)
        stage = "layers"
        fractional = args.fractional or config.fractional_counting
        layers = build_layers(corpus, fractional=fractional)
        stage = "multinet"
        net = normalize(unify(layers))
        if not args.no_filter:
            net = filter_net(net, config.filter)
        stage = "export"
        path = export_graph(net, args.out, fmt=args.format)
    except (ScimapError, OSError, ValueError, KeyError) as exc:
        return _fail(stage, exc)

    for layer in layers:
        print(f"  {layer.tag.value:<18} {len(layer):>7} edges")
    print(f"\n  Multinet: {len(net.nodes)} nodes, {len(net.edges)} edges")
    print(f"  ✓ wrote {path}")
    return 0


def cmd_detect(args: argparse.Namespace) -> int:
    """Walktrap modules of a multinet file."""
    from .community import detect_modules, write_partition
    from .exporter import load_net

    stage = "export"
    try:
        net = load_net(args.net)
        stage = "community"
        partition = detect_modules(net, t=args.walk_length)
        path = write_partition(partition, args.out)
    except (ScimapError, OSError, ValueError, KeyError) as exc:
        return _fail(stage, exc)

    sizes = sorted((len(m) for m in partition.communities()), reverse=True)
    print(f"  Modules:    {partition.n_communities}")
    print(f"  Modularity: {partition.q:.6f}")
    print(f"  Sizes:      {', '.join(str(s) for s in sizes[:10])}"
          + (" ..." if len(sizes) > 10 else ""))
    print(f"  ✓ wrote {path}")
    return 0


def cmd_rank(args: argparse.Namespace) -> int:
    """PageRank within modules."""
    from .analytics import (
        modulewise_pagerank,
        pagerank,
        rank_within_modules,
        write_module_reports,
    )
    from .community import read_partition
    from .errors import CommunityError
    from .exporter import load_net

    stage = "export"
    try:
        net = load_net(args.net)
        partition = read_partition(args.partition)
        stage = "analytics"
        missing = [n for n in partition.nodes if n not in net.nodes]
        if missing:
            raise CommunityError(
                f"{len(missing)} partition nodes are not in {args.net} "
                f"(first: {missing[0].kind.value} '{missing[0].label}')"
            )
        if args.scope == "module":
            scores = modulewise_pagerank(net, partition, damping=args.damping)
        else:
            scores = pagerank(net, damping=args.damping)
        rankings = rank_within_modules(scores, partition, top_n=args.top_n)
    except (ScimapError, OSError, ValueError, KeyError) as exc:
        return _fail(stage, exc)

    if not scores.converged:
        print(f"  warning: pagerank did not converge (residual {scores.residual:.3g})",
              file=sys.stderr)
    for ranking in rankings:
        print(f"\n  ╔══ module {ranking.module} ({ranking.size} nodes)")
        for node, score in ranking.top:
            print(f"  ║ {score:>10.6f}  {node.kind.value:<8} {node.label}")
        print("  ╚══")

    if args.out:
        try:
            path = write_module_reports(rankings, args.out)
        except (ScimapError, OSError) as exc:
            return _fail("export", exc)
        print(f"\n  ✓ wrote {path}")
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    """Export a multinet or one reduced module."""
    from .analytics import pagerank, reduced_graph
    from .community import read_partition
    from .exporter import export_graph, load_net

    stage = "export"
    try:
        net = load_net(args.net)
        partition = read_partition(args.partition) if args.partition else None
        if args.module is not None:
            stage = "analytics"
            if partition is None:
                raise ScimapError("--module needs --partition")
            scores = pagerank(net) if args.reduce_by == "pagerank" else None
            net = reduced_graph(
                net, partition, args.module, args.keep_fraction,
                by=args.reduce_by, scores=scores,
            )
            stage = "export"
        path = export_graph(net, args.out, fmt=args.format, partition=partition)
    except (ScimapError, OSError, ValueError, KeyError) as exc:
        return _fail(stage, exc)

    print(f"  ✓ wrote {path} ({len(net.nodes)} nodes, {len(net.edges)} edges)")
    return 0


def cmd_pipeline(args: argparse.Namespace) -> int:
    """Records to module reports."""
    from .config import load_config, with_overrides
    from .pipeline import run_pipeline

    try:
        config = with_overrides(
            load_config(args.config),
            walk_length=args.walk_length,
            damping=args.damping,
            top_n=args.top_n,
            keep_fraction=args.keep_fraction,
        )
    except (ScimapError, ValueError) as exc:
        return _fail("config", exc)

    try:
        result = run_pipeline(args.records, config, out_dir=args.out_dir, dump=args.dump)
    except (ScimapError, OSError, ValueError, KeyError) as exc:
        return _fail("pipeline", exc)

    print(f"  Documents:  {len(result.corpus)}")
    print(f"  Nodes:      {len(result.net.nodes)}")
    print(f"  Modules:    {result.partition.n_communities}")
    print(f"  Modularity: {result.partition.q:.6f}")
    print()
    for name, path in result.files.items():
        print(f"  ✓ {name:<12} {path}")
    print(f"\nDone: {len(result.files)} files written to {args.out_dir}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    """Planted-partition corpus plus ground-truth CSV."""
    from dataclasses import replace

    from .corpus import write_records
    from .synth import PlantedSpec, generate_corpus, write_truth

    try:
        spec = PlantedSpec.load(args.spec) if args.spec else PlantedSpec()
        if args.seed is not None:
            spec = replace(spec, seed=args.seed)
        corpus, truth = generate_corpus(spec)
        out = Path(args.out)
        truth_path = Path(args.truth) if args.truth else out.with_suffix(".truth.csv")
        write_records(corpus, out)
        write_truth(truth, truth_path)
    except (ScimapError, OSError, ValueError, KeyError) as exc:
        return _fail("synth", exc)

    print(f"  ✓ wrote {out} ({len(corpus)} documents, {len(corpus.citation_edges)} citations)")
    print(f"  ✓ wrote {truth_path} ({len(truth)} labelled nodes)")
    return 0


def _setup_logging(verbosity: int) -> None:
    if verbosity <= 0:
        return
    logging.basicConfig(
        level=logging.DEBUG if verbosity > 1 else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="scimap",
        description="Multidimensional science maps: author/keyword citation multinets, "
                    "Walktrap modules and PageRank reports.",
    )
    parser.add_argument(
        "--version", action="version", version=f"scimap {__version__}"
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0,
        help="Log progress to stderr (-vv for debug detail)",
    )

    sub = parser.add_subparsers(dest="command")

    # --- ingest ---
    p_ingest = sub.add_parser("ingest", help="Parse records and print corpus statistics")
    p_ingest.add_argument("--records", required=True, help="Record file (JSON lines)")
    p_ingest.add_argument("--out", default=None, help="Write normalized records here")
    p_ingest.set_defaults(func=cmd_ingest)

    # --- snowball ---
    p_snow = sub.add_parser("snowball", help="Grow a seed corpus from a citation store")
    p_snow.add_argument("--store", required=True, help="Store record file (JSON lines)")
    p_snow.add_argument("--config", default=None, help="Flat JSON config file")
    p_snow.add_argument(
        "--query", action="append", default=None,
        help="Topic phrase matched against titles and keywords (repeatable; "
             "overrides the config's query)",
    )
    p_snow.add_argument(
        "--thresholds", default=None,
        help="Comma-separated per-iteration thresholds (default: config, else 3,10,10)",
    )
    p_snow.add_argument(
        "--max-iter", type=int, default=None, help="Iteration cap (default: config, else 5)"
    )
    p_snow.add_argument("--out", required=True, help="Output corpus record file")
    p_snow.add_argument(
        "--report", default=None, help="Per-iteration CSV (default: print to stdout)"
    )
    p_snow.set_defaults(func=cmd_snowball)

    # --- build ---
    p_build = sub.add_parser("build", help="Build the normalized, filtered multinet")
    p_build.add_argument("--records", required=True, help="Record file (JSON lines)")
    p_build.add_argument("--config", default=None, help="Flat JSON config file")
    p_build.add_argument("--out", default="network.graphml", help="Output graph file")
    p_build.add_argument(
        "--format", default="graphml", choices=("graphml", "dot", "csv"),
        help="Output format (default: graphml)",
    )
    p_build.add_argument(
        "--fractional", action="store_true", help="Fractional instead of full counting"
    )
    p_build.add_argument(
        "--no-filter", action="store_true", help="Skip the filter step"
    )
    p_build.set_defaults(func=cmd_build)

    # --- detect ---
    p_detect = sub.add_parser("detect", help="Detect modules (Walktrap + modularity)")
    p_detect.add_argument("--net", required=True, help="Multinet GraphML file")
    p_detect.add_argument(
        "--walk-length", type=int, default=4, help="Random walk length t (default: 4)"
    )
    p_detect.add_argument("--out", default="partition.csv", help="Partition CSV")
    p_detect.set_defaults(func=cmd_detect)

    # --- rank ---
    p_rank = sub.add_parser("rank", help="PageRank rankings within modules")
    p_rank.add_argument("--net", required=True, help="Multinet GraphML file")
    p_rank.add_argument("--partition", required=True, help="Partition CSV")
    p_rank.add_argument("--top-n", type=int, default=10, help="Rows per module (default: 10)")
    p_rank.add_argument("--damping", type=float, default=0.85, help="Damping (default: 0.85)")
    p_rank.add_argument(
        "--scope", default="global", choices=("global", "module"),
        help="PageRank over the whole net or within each module (default: global)",
    )
    p_rank.add_argument("--out", default=None, help="Write the report CSV here")
    p_rank.set_defaults(func=cmd_rank)

    # --- export ---
    p_export = sub.add_parser("export", help="Export a multinet or a reduced module")
    p_export.add_argument("--net", required=True, help="Multinet GraphML file")
    p_export.add_argument(
        "--format", default="graphml", choices=("graphml", "dot", "csv"),
        help="Output format (default: graphml)",
    )
    p_export.add_argument("--out", required=True, help="Output path")
    p_export.add_argument("--partition", default=None, help="Partition CSV (adds communities)")
    p_export.add_argument("--module", type=int, default=None, help="Export only this module")
    p_export.add_argument(
        "--keep-fraction", type=float, default=1.0,
        help="Share of best-connected module nodes to keep (default: 1.0)",
    )
    p_export.add_argument(
        "--reduce-by", default="degree", choices=("degree", "pagerank"),
        help="Reduction criterion (default: degree)",
    )
    p_export.set_defaults(func=cmd_export)

    # --- pipeline ---
    p_pipe = sub.add_parser("pipeline", help="Run records -> module reports")
    p_pipe.add_argument("--records", required=True, help="Record file (JSON lines)")
    p_pipe.add_argument("--config", default=None, help="Flat JSON config file")
    p_pipe.add_argument("--out-dir", default="scimap-out", help="Output directory")
    p_pipe.add_argument("--dump", action="store_true", help="Also write intermediates")
    p_pipe.add_argument("--walk-length", type=int, default=None, help="Override walk_length")
    p_pipe.add_argument("--damping", type=float, default=None, help="Override damping")
    p_pipe.add_argument("--top-n", type=int, default=None, help="Override top_n")
    p_pipe.add_argument("--keep-fraction", type=float, default=None, help="Override keep_fraction")
    p_pipe.set_defaults(func=cmd_pipeline)

    # --- synth ---
    p_synth = sub.add_parser("synth", help="Generate a planted-partition corpus")
    p_synth.add_argument("--spec", default=None, help="PlantedSpec JSON (default: built-in)")
    p_synth.add_argument("--seed", type=int, default=None, help="Override the spec seed")
    p_synth.add_argument("--out", required=True, help="Output record file")
    p_synth.add_argument(
        "--truth", default=None, help="Ground-truth CSV (default: <out>.truth.csv)"
    )
    p_synth.set_defaults(func=cmd_synth)

    args = parser.parse_args(argv)
    _setup_logging(args.verbose)

    if args.command is None:
        parser.print_help()
        return 0

    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
