"""scimap analytics — PageRank rankings, reduced module graphs, module reports."""
from __future__ import annotations

import csv
import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np
from scipy import sparse

from .community import Partition
from .errors import AnalyticsError, CommunityError, ExportError
from .layers import Node, NodeKind
from .multinet import Edge, MultiNet

logger = logging.getLogger(__name__)

DEFAULT_DAMPING = 0.85
DEFAULT_TOLERANCE = 1e-10
DEFAULT_MAX_ITER = 10_000

REPORT_COLUMNS = [
    "module", "size", "n_authors", "n_keywords", "rank", "kind", "label", "pagerank",
]


@dataclass(frozen=True)
class CentralityScores:
    scores: Mapping[Node, float]
    damping: float
    iterations: int
    residual: float
    converged: bool = True

    def __getitem__(self, node: Node) -> float:
        return self.scores[node]


@dataclass(frozen=True)
class ModuleRanking:
    module: int
    size: int
    kind_counts: Mapping[NodeKind, int]
    top: tuple[tuple[Node, float], ...]


@dataclass(frozen=True)
class ModuleReport:
    module: int
    size: int
    kind_counts: Mapping[NodeKind, int]
    top: tuple[tuple[Node, float], ...]
    reduced: MultiNet


# ── PageRank ──────────────────────────────────────────────────────────────────

def _transition_matrix(nodes: list[Node], edges: Iterable[Edge]) -> sparse.csr_matrix:
    """Weighted adjacency W[i, j] for i → j; undirected edges count both ways."""
    index = {n: i for i, n in enumerate(nodes)}
    rows, cols, data = [], [], []
    for e in edges:
        i, j = index[e.source], index[e.target]
        rows.append(i)
        cols.append(j)
        data.append(e.weight)
        if not e.directed:
            rows.append(j)
            cols.append(i)
            data.append(e.weight)
    n = len(nodes)
    return sparse.csr_matrix((data, (rows, cols)), shape=(n, n), dtype=float)


def pagerank(
    net: MultiNet,
    damping: float = DEFAULT_DAMPING,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITER,
) -> CentralityScores:
    """Power iteration on the directed weighted multinet.

    Out-weights are transition proportions and the mass of dangling nodes is spread
    uniformly. Stops when the L1 change is at most ``tolerance``; hitting
    ``max_iter`` first returns scores flagged ``converged=False``.
    """
    if net.is_empty:
        raise AnalyticsError("pagerank needs a non-empty net")
    if not 0.0 < damping < 1.0:
        raise AnalyticsError(f"damping must be in (0, 1), got {damping}")

    nodes = net.sorted_nodes()
    n = len(nodes)
    weights = _transition_matrix(nodes, net.edges)
    out = np.asarray(weights.sum(axis=1)).ravel()
    dangling = out == 0
    inv_out = np.zeros(n)
    inv_out[~dangling] = 1.0 / out[~dangling]
    step = (sparse.diags(inv_out) @ weights).T.tocsr()

    x = np.full(n, 1.0 / n)
    residual = math.inf
    iterations = 0
    for iterations in range(1, max_iter + 1):
        spread = x[dangling].sum() / n
        nxt = damping * (step @ x + spread) + (1.0 - damping) / n
        nxt /= nxt.sum()
        residual = float(np.abs(nxt - x).sum())
        x = nxt
        if residual <= tolerance:
            break

    converged = residual <= tolerance
    if not converged:
        logger.warning("pagerank did not converge in %d iterations (residual %.3g)",
                       max_iter, residual)
    return CentralityScores(
        scores=dict(zip(nodes, x.tolist())),
        damping=damping,
        iterations=iterations,
        residual=residual,
        converged=converged,
    )


def modulewise_pagerank(
    net: MultiNet,
    partition: Partition,
    damping: float = DEFAULT_DAMPING,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITER,
) -> CentralityScores:
    """PageRank re-run inside every module's subnet; scores sum to 1 per module."""
    scores: dict[Node, float] = {}
    iterations = 0
    residual = 0.0
    converged = True
    for members in partition.communities():
        result = pagerank(net.subnet(members), damping, tolerance, max_iter)
        scores.update(result.scores)
        iterations = max(iterations, result.iterations)
        residual = max(residual, result.residual)
        converged = converged and result.converged
    return CentralityScores(scores, damping, iterations, residual, converged)


# ── Rankings ──────────────────────────────────────────────────────────────────

def _kind_counts(members: Iterable[Node]) -> dict[NodeKind, int]:
    counts = Counter(n.kind for n in members)
    return {kind: counts.get(kind, 0) for kind in NodeKind}


def _module_order(partition: Partition) -> list[int]:
    """Largest modules first, then by id."""
    sizes = Counter(partition.labels)
    return sorted(sizes, key=lambda c: (-sizes[c], c))


def rank_within_modules(
    scores: CentralityScores, partition: Partition, top_n: int = 10,
) -> list[ModuleRanking]:
    """Per module, members by descending score (ties by kind, label), cut at top_n."""
    if top_n < 1:
        raise AnalyticsError("top_n must be >= 1")
    groups = partition.communities()
    rankings = []
    for c in _module_order(partition):
        members = groups[c]
        ordered = sorted(members, key=lambda n: (-scores.scores[n], n.kind.value, n.label))
        rankings.append(ModuleRanking(
            module=c,
            size=len(members),
            kind_counts=_kind_counts(members),
            top=tuple((n, scores.scores[n]) for n in ordered[:top_n]),
        ))
    return rankings


# ── Reduction ─────────────────────────────────────────────────────────────────

def module_degree(net: MultiNet, members: Iterable[Node]) -> dict[Node, float]:
    """Weighted total degree counted over edges inside the module only."""
    inside = set(members)
    degree: dict[Node, float] = defaultdict(float)
    for n in inside:
        degree[n] = 0.0
    for e in net.edges:
        if e.source in inside and e.target in inside:
            degree[e.source] += e.weight
            degree[e.target] += e.weight
    return dict(degree)


def reduced_graph(
    net: MultiNet,
    partition: Partition,
    module: int,
    keep_fraction: float,
    by: str = "degree",
    scores: CentralityScores | None = None,
) -> MultiNet:
    """Keep the ⌈q·size⌉ best-connected members of a module and their edges.

    Equal degrees go to the higher (kind, label), so the kept set only grows with q.
    """
    if not 0.0 < keep_fraction <= 1.0:
        raise AnalyticsError(f"keep_fraction must be in (0, 1], got {keep_fraction}")
    members = partition.members(module) if 0 <= module < partition.n_communities else []
    if not members:
        raise CommunityError(f"unknown module id {module}")

    if by == "degree":
        strength = module_degree(net, members)
    elif by == "pagerank":
        if scores is None:
            raise AnalyticsError("reduction by pagerank needs scores")
        strength = {n: scores.scores[n] for n in members}
    else:
        raise AnalyticsError(f"unknown reduction criterion '{by}'")

    keep = max(1, math.ceil(round(keep_fraction * len(members), 9)))
    ordered = sorted(members, key=lambda n: (strength[n], n), reverse=True)
    return net.subnet(ordered[:keep])


# ── Reports ───────────────────────────────────────────────────────────────────

def build_module_reports(
    net: MultiNet,
    partition: Partition,
    scores: CentralityScores,
    top_n: int = 10,
    keep_fraction: float = 0.5,
    reduce_by: str = "degree",
) -> list[ModuleReport]:
    reports = []
    for ranking in rank_within_modules(scores, partition, top_n):
        reduced = reduced_graph(
            net, partition, ranking.module, keep_fraction, by=reduce_by, scores=scores,
        )
        reports.append(ModuleReport(
            module=ranking.module,
            size=ranking.size,
            kind_counts=ranking.kind_counts,
            top=ranking.top,
            reduced=reduced,
        ))
    return reports


def write_module_reports(reports: Iterable[ModuleReport | ModuleRanking], path: Path | str) -> Path:
    """One row per ranked node, REPORT_COLUMNS header."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=REPORT_COLUMNS)
            writer.writeheader()
            for report in reports:
                for rank, (node, score) in enumerate(report.top, start=1):
                    writer.writerow({
                        "module": report.module,
                        "size": report.size,
                        "n_authors": report.kind_counts[NodeKind.AUTHOR],
                        "n_keywords": report.kind_counts[NodeKind.KEYWORD],
                        "rank": rank,
                        "kind": node.kind.value,
                        "label": node.label,
                        "pagerank": repr(score),
                    })
    except OSError as exc:
        raise ExportError(path, exc) from exc
    return path
