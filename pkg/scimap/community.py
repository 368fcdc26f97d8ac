"""scimap community — Walktrap agglomeration cut at maximum modularity.

Walktrap (random-walk distances)
────────────────────────────────
  P = D⁻¹A, and node i is described by row i of Pᵗ with every column k scaled by
  1/√k_k. A community C is described by the size-weighted mean of its members'
  rows. Merging adjacent communities C1, C2 costs

      Δσ = (1/n) · |C1||C2| / (|C1|+|C2|) · ‖r_C1 − r_C2‖²

  and the cheapest adjacent pair is merged until one community remains. Equal
  costs go to the lowest (smaller id, larger id) pair. Leaves are 0..n−1; the
  community created by merge s gets id n+s.

Modularity
──────────
  Q = (1/2m) Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j)
"""
from __future__ import annotations

import csv
import heapq
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Iterable, Iterator, Sequence

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .errors import CommunityError, ExportError
from .layers import Node
from .multinet import MultiNet, symmetrize

logger = logging.getLogger(__name__)

DEFAULT_WALK_LENGTH = 4
PARTITION_COLUMNS = ["kind", "label", "community"]
# Q values closer than this are ties; ties go to the coarser cut.
Q_TIE_TOLERANCE = 1e-12


# ── Types ─────────────────────────────────────────────────────────────────────

class WeightedGraph:
    """Symmetric, loop-free, non-negative sparse weights over indexed nodes."""

    def __init__(self, nodes: Sequence[Hashable], adjacency: sparse.spmatrix) -> None:
        adjacency = sparse.csr_matrix(adjacency, dtype=float)
        n = len(nodes)
        if adjacency.shape != (n, n):
            raise CommunityError(f"adjacency shape {adjacency.shape} does not match {n} nodes")
        adjacency.eliminate_zeros()
        if adjacency.nnz:
            if adjacency.data.min() < 0:
                raise CommunityError("edge weights must be non-negative")
            if abs(adjacency.diagonal()).max() > 0:
                raise CommunityError("self-loops are not allowed")
            if abs(adjacency - adjacency.T).max() > 1e-12:
                raise CommunityError("adjacency must be symmetric")
        self.nodes: tuple[Hashable, ...] = tuple(nodes)
        self.adjacency = adjacency
        self.degrees: np.ndarray = np.asarray(adjacency.sum(axis=1)).ravel()
        self.total_weight: float = float(adjacency.sum()) / 2.0

    @property
    def n(self) -> int:
        return len(self.nodes)

    @classmethod
    def from_networkx(cls, g: nx.Graph, weight: str = "weight") -> WeightedGraph:
        nodes = list(g.nodes)
        if not nodes:
            return cls((), sparse.csr_matrix((0, 0)))
        matrix = nx.to_scipy_sparse_array(g, nodelist=nodes, weight=weight, format="csr")
        return cls(nodes, sparse.csr_matrix(matrix))

    @classmethod
    def from_edges(
        cls, nodes: int | Sequence[Hashable], edges: Iterable[tuple[int, int, float]],
    ) -> WeightedGraph:
        """Build from (i, j, w) index triples; each undirected edge listed once."""
        labels = list(range(nodes)) if isinstance(nodes, int) else list(nodes)
        n = len(labels)
        rows, cols, data = [], [], []
        for i, j, w in edges:
            if i == j:
                raise CommunityError(f"self-loop on node {i}")
            rows += [i, j]
            cols += [j, i]
            data += [float(w), float(w)]
        return cls(labels, sparse.coo_matrix((data, (rows, cols)), shape=(n, n)))

    def components(self) -> list[np.ndarray]:
        """Connected components as index arrays, ordered by smallest member."""
        if self.n == 0:
            return []
        _, labels = connected_components(self.adjacency, directed=False)
        comps = [np.flatnonzero(labels == c) for c in np.unique(labels)]
        return sorted(comps, key=lambda c: int(c[0]))

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def subgraph(self, index: Sequence[int]) -> WeightedGraph:
        index = np.asarray(index, dtype=int)
        sub = self.adjacency[index][:, index]
        return WeightedGraph([self.nodes[i] for i in index], sub)


@dataclass(frozen=True)
class Partition:
    """Dense community index per node, aligned with ``nodes``."""

    nodes: tuple[Hashable, ...]
    labels: tuple[int, ...]
    q: float = math.nan

    @classmethod
    def from_labels(
        cls, nodes: Sequence[Hashable], labels: Iterable[int], q: float = math.nan,
    ) -> Partition:
        """Relabel densely 0..C−1 in order of first appearance."""
        remap: dict[int, int] = {}
        dense = tuple(remap.setdefault(int(c), len(remap)) for c in labels)
        if len(dense) != len(nodes):
            raise CommunityError("partition must assign exactly one community per node")
        return cls(tuple(nodes), dense, q)

    @property
    def n_communities(self) -> int:
        return len(set(self.labels))

    @property
    def membership(self) -> dict[Hashable, int]:
        return dict(zip(self.nodes, self.labels))

    def members(self, community: int) -> list[Hashable]:
        return [n for n, c in zip(self.nodes, self.labels) if c == community]

    def communities(self) -> list[list[Hashable]]:
        groups: list[list[Hashable]] = [[] for _ in range(self.n_communities)]
        for node, c in zip(self.nodes, self.labels):
            groups[c].append(node)
        return groups


@dataclass(frozen=True)
class Merge:
    left: int
    right: int
    cost: float
    merged: int


@dataclass(frozen=True)
class Dendrogram:
    nodes: tuple[Hashable, ...]
    merges: tuple[Merge, ...]

    @property
    def n_leaves(self) -> int:
        return len(self.nodes)

    def cuts(self) -> Iterator[tuple[int, tuple[int, ...]]]:
        """Yield (level, dense labels) from n singletons (level 0) to the last merge."""
        owner = list(range(self.n_leaves))
        members = {i: [i] for i in range(self.n_leaves)}
        yield 0, _dense(owner)
        for level, merge in enumerate(self.merges, start=1):
            joined = members.pop(merge.left) + members.pop(merge.right)
            for leaf in joined:
                owner[leaf] = merge.merged
            members[merge.merged] = joined
            yield level, _dense(owner)

    def cut(self, level: int) -> tuple[int, ...]:
        if not 0 <= level <= len(self.merges):
            raise CommunityError(f"level {level} outside 0..{len(self.merges)}")
        for lvl, labels in self.cuts():
            if lvl == level:
                return labels
        raise AssertionError("unreachable")  # pragma: no cover


def _dense(owner: Sequence[int]) -> tuple[int, ...]:
    remap: dict[int, int] = {}
    return tuple(remap.setdefault(c, len(remap)) for c in owner)


# ── Modularity ────────────────────────────────────────────────────────────────

def modularity(graph: WeightedGraph, partition: Partition | Sequence[int]) -> float:
    labels = np.asarray(
        partition.labels if isinstance(partition, Partition) else partition, dtype=int,
    )
    if labels.shape != (graph.n,):
        raise CommunityError("partition must cover every node of the graph")
    m = graph.total_weight
    if m <= 0:
        raise CommunityError("modularity is undefined for a graph without edge weight")
    coo = graph.adjacency.tocoo()
    internal = coo.data[labels[coo.row] == labels[coo.col]].sum()
    _, inverse = np.unique(labels, return_inverse=True)
    strength = np.bincount(inverse, weights=graph.degrees)
    two_m = 2.0 * m
    return float(internal / two_m - np.sum(strength ** 2) / two_m ** 2)


# ── Walktrap ──────────────────────────────────────────────────────────────────

def walktrap_dendrogram(graph: WeightedGraph, t: int = DEFAULT_WALK_LENGTH) -> Dendrogram:
    """Agglomerate a connected graph by random-walk distance."""
    if t < 1:
        raise CommunityError(f"walk length must be >= 1, got {t}")
    n = graph.n
    if n == 0:
        raise CommunityError("cannot run walktrap on an empty graph")
    if n == 1:
        return Dendrogram(graph.nodes, ())
    if graph.total_weight <= 0 or not graph.is_connected():
        raise CommunityError(
            "graph is disconnected; run walktrap once per connected component"
        )

    k = graph.degrees
    transition = graph.adjacency.toarray() / k[:, None]
    walk = np.linalg.matrix_power(transition, t) / np.sqrt(k)[None, :]

    size: dict[int, int] = {i: 1 for i in range(n)}
    vector: dict[int, np.ndarray] = {i: walk[i] for i in range(n)}
    neighbours: dict[int, dict[int, float]] = {i: {} for i in range(n)}
    coo = sparse.triu(graph.adjacency, k=1).tocoo()
    for i, j, w in zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()):
        neighbours[i][j] = w
        neighbours[j][i] = w

    def cost(a: int, b: int) -> float:
        diff = vector[a] - vector[b]
        return float(size[a] * size[b] / (size[a] + size[b]) * diff.dot(diff) / n)

    heap: list[tuple[float, int, int]] = []
    for a in range(n):
        for b in neighbours[a]:
            if a < b:
                heap.append((cost(a, b), a, b))
    heapq.heapify(heap)

    merges: list[Merge] = []
    for step in range(n - 1):
        while True:
            ds, a, b = heapq.heappop(heap)
            if a in size and b in size:
                break
        new = n + step
        size[new] = size[a] + size[b]
        vector[new] = (size[a] * vector[a] + size[b] * vector[b]) / size[new]

        joined: dict[int, float] = {}
        for old in (a, b):
            for c, w in neighbours.pop(old).items():
                if c not in (a, b):
                    joined[c] = joined.get(c, 0.0) + w
        neighbours[new] = joined
        for c, w in joined.items():
            neighbours[c].pop(a, None)
            neighbours[c].pop(b, None)
            neighbours[c][new] = w

        for old in (a, b):
            del size[old], vector[old]
        for c in sorted(joined):
            heapq.heappush(heap, (cost(c, new), c, new))
        merges.append(Merge(a, b, ds, new))

    return Dendrogram(graph.nodes, tuple(merges))


def best_partition(graph: WeightedGraph, dendrogram: Dendrogram) -> Partition:
    """The dendrogram cut with maximum Q; ties go to the coarser cut."""
    if dendrogram.n_leaves != graph.n:
        raise CommunityError("dendrogram was not built from this graph")
    if graph.total_weight <= 0:
        # a lone node: nothing to compare
        return Partition.from_labels(graph.nodes, range(graph.n), 0.0)

    top_q = -math.inf
    best_q = -math.inf
    best_labels: tuple[int, ...] = ()
    for _, labels in dendrogram.cuts():
        q = modularity(graph, labels)
        if q >= top_q - Q_TIE_TOLERANCE:
            best_q, best_labels = q, labels
        top_q = max(top_q, q)
    return Partition.from_labels(graph.nodes, best_labels, best_q)


def detect_modules(net: MultiNet, t: int = DEFAULT_WALK_LENGTH) -> Partition:
    """Walktrap + Q-max per connected component; Q recomputed on the whole graph."""
    if net.is_empty:
        raise CommunityError("cannot detect modules in an empty net")
    graph = WeightedGraph.from_networkx(symmetrize(net))

    labels = np.full(graph.n, -1, dtype=int)
    next_label = 0
    for comp in graph.components():
        if len(comp) == 1:
            labels[comp] = next_label
            next_label += 1
            continue
        sub = graph.subgraph(comp)
        part = best_partition(sub, walktrap_dendrogram(sub, t))
        labels[comp] = np.asarray(part.labels) + next_label
        next_label += part.n_communities

    q = modularity(graph, labels) if graph.total_weight > 0 else 0.0
    partition = Partition.from_labels(graph.nodes, labels.tolist(), q)
    logger.info("detected %d modules, Q=%.6f", partition.n_communities, q)
    return partition


# ── Partition files ───────────────────────────────────────────────────────────

def write_partition(partition: Partition, path: Path | str) -> Path:
    """kind,label,community rows in node order plus a ``# modularity=`` footer."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=PARTITION_COLUMNS)
            writer.writeheader()
            for node, c in zip(partition.nodes, partition.labels):
                writer.writerow({"kind": node.kind.value, "label": node.label, "community": c})
            f.write(f"# modularity={partition.q!r}\n")
    except OSError as exc:
        raise ExportError(path, exc) from exc
    return path


def read_partition(path: Path | str) -> Partition:
    path = Path(path)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ExportError(path, exc) from exc
    q = math.nan
    body = []
    for line in text.splitlines():
        if line.startswith("# modularity="):
            q = float(line.split("=", 1)[1])
        elif line.strip():
            body.append(line)
    nodes, labels = [], []
    for row in csv.DictReader(body):
        nodes.append(Node(row["kind"], row["label"]))
        labels.append(int(row["community"]))
    return Partition.from_labels(nodes, labels, q)
