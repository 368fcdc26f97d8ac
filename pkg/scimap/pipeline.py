"""scimap pipeline — records to module reports in one deterministic run.

  corpus ─▶ layers ─▶ multinet (unify, normalize, filter) ─▶ community
         ─▶ analytics (pagerank, reports) ─▶ export

Output directory layout::

    partition.csv          kind,label,community + modularity footer
    modules.csv            ranked members of every module
    network.graphml        filtered multinet with communities
    modules/module-<c>.graphml   reduced module graphs
    intermediate/          corpus.jsonl, raw.graphml, normalized.graphml (with dump=True)
"""
from __future__ import annotations

import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .analytics import (
    CentralityScores,
    ModuleReport,
    build_module_reports,
    modulewise_pagerank,
    pagerank,
    write_module_reports,
)
from .community import Partition, detect_modules, write_partition
from .config import PipelineConfig
from .corpus import Corpus, load_corpus, write_records
from .errors import PipelineError, ScimapError
from .exporter import export_graph
from .layers import build_layers
from .multinet import MultiNet, filter_net, normalize, unify

logger = logging.getLogger(__name__)

STAGES = ("corpus", "layers", "multinet", "community", "analytics", "export")


@dataclass(frozen=True)
class PipelineResult:
    corpus: Corpus
    net: MultiNet
    partition: Partition
    scores: CentralityScores
    reports: tuple[ModuleReport, ...]
    files: dict[str, Path] = field(default_factory=dict)


@contextmanager
def _stage(name: str) -> Iterator[None]:
    """Tag any failure inside the block with the stage name."""
    logger.info("stage %s", name)
    try:
        yield
    except PipelineError:
        raise
    except (ScimapError, OSError, ValueError, KeyError) as exc:
        raise PipelineError(name, exc) from exc


def run_pipeline(
    records_path: Path | str,
    config: PipelineConfig | None = None,
    out_dir: Path | str | None = None,
    dump: bool = False,
) -> PipelineResult:
    """Run every stage; the first failing stage aborts with a PipelineError.

    With ``out_dir`` unset nothing is written and ``files`` stays empty.
    """
    config = config or PipelineConfig()
    out = Path(out_dir) if out_dir is not None else None
    dumps = out / "intermediate" if (out is not None and dump) else None
    files: dict[str, Path] = {}

    with _stage("corpus"):
        corpus = load_corpus(records_path)
        if not len(corpus):
            raise PipelineError("corpus", f"no documents in {records_path}")
        if dumps is not None:
            files["corpus"] = write_records(corpus, dumps / "corpus.jsonl")

    with _stage("layers"):
        layers = build_layers(corpus, fractional=config.fractional_counting)

    with _stage("multinet"):
        raw = unify(layers)
        normalized = normalize(raw)
        net = filter_net(normalized, config.filter)
        if dumps is not None:
            files["raw"] = export_graph(raw, dumps / "raw.graphml")
            files["normalized"] = export_graph(normalized, dumps / "normalized.graphml")
        if net.is_empty:
            raise PipelineError("multinet", "no nodes left after filtering")

    with _stage("community"):
        partition = detect_modules(net, t=config.walk_length)

    with _stage("analytics"):
        if config.pagerank_scope == "module":
            scores = modulewise_pagerank(
                net, partition, config.damping, config.tolerance, config.max_iter,
            )
        else:
            scores = pagerank(net, config.damping, config.tolerance, config.max_iter)
        reports = build_module_reports(
            net, partition, scores,
            top_n=config.top_n,
            keep_fraction=config.keep_fraction,
            reduce_by=config.reduce_by,
        )

    if out is not None:
        with _stage("export"):
            files["partition"] = write_partition(partition, out / "partition.csv")
            files["modules"] = write_module_reports(reports, out / "modules.csv")
            files["network"] = export_graph(net, out / "network.graphml", partition=partition)
            for report in reports:
                files[f"module-{report.module}"] = export_graph(
                    report.reduced,
                    out / "modules" / f"module-{report.module}.graphml",
                    partition=partition,
                )

    logger.info("pipeline done: %d documents, %d nodes, %d modules",
                len(corpus), len(net), partition.n_communities)
    return PipelineResult(
        corpus=corpus,
        net=net,
        partition=partition,
        scores=scores,
        reports=tuple(reports),
        files=files,
    )
