"""scimap multinet — the set-theoretic union of the three layers.

Pipeline order is fixed: unify ─▶ normalize ─▶ filter_net ─▶ symmetrize.
Edges keep their layer tag until symmetrize, which sums parallel edges of every
layer and both directions into one undirected weight per node pair.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

import networkx as nx

from .errors import ConfigError
from .layers import Layer, LayerTag, Node

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Edge:
    layer: LayerTag
    source: Node
    target: Node
    raw_weight: float
    weight: float
    directed: bool


@dataclass(frozen=True)
class MultiNet:
    nodes: frozenset[Node] = frozenset()
    edges: tuple[Edge, ...] = ()
    normalized: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def is_empty(self) -> bool:
        return not self.nodes

    def sorted_nodes(self) -> list[Node]:
        return sorted(self.nodes)

    def layer_edges(self, tag: LayerTag) -> list[Edge]:
        return [e for e in self.edges if e.layer is tag]

    def subnet(self, nodes: Iterable[Node]) -> MultiNet:
        """Restrict to ``nodes`` and the edges whose endpoints both survive."""
        keep = frozenset(nodes) & self.nodes
        edges = tuple(e for e in self.edges if e.source in keep and e.target in keep)
        return replace(self, nodes=keep, edges=edges)


@dataclass(frozen=True)
class FilterSpec:
    """Filter thresholds; normalized weights below ``min_weight[layer]`` are dropped."""

    min_weight: Mapping[LayerTag, float] = field(default_factory=dict)
    min_node_total_degree: int = 1
    keep_largest_component: bool = True

    def __post_init__(self) -> None:
        weights = {LayerTag(k): float(v) for k, v in dict(self.min_weight).items()}
        for tag, value in weights.items():
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"min_weight for {tag.value} must be in [0, 1], got {value}")
        if self.min_node_total_degree < 0:
            raise ConfigError("min_node_total_degree must be >= 0")
        object.__setattr__(self, "min_weight", weights)

    def threshold(self, tag: LayerTag) -> float:
        return self.min_weight.get(tag, 0.0)


# ── Operations ────────────────────────────────────────────────────────────────

def unify(layers: Iterable[Layer]) -> MultiNet:
    """Disjoint union of layer edges; nodes merged by (kind, label)."""
    nodes: set[Node] = set()
    edges: list[Edge] = []
    for layer in layers:
        layer.validate()
        for (u, v), w in layer.edges.items():
            nodes.update((u, v))
            edges.append(Edge(layer.tag, u, v, float(w), float(w), layer.directed))
    logger.info("unified %d nodes, %d edges", len(nodes), len(edges))
    return MultiNet(nodes=frozenset(nodes), edges=tuple(edges))


def normalize_layer(layer: Layer) -> dict[tuple[Node, Node], float]:
    """Per-layer weights divided by the layer maximum."""
    if not layer.edges:
        return {}
    top = max(layer.edges.values())
    return {pair: w / top for pair, w in layer.edges.items()}


def normalize(net: MultiNet) -> MultiNet:
    """Rescale every layer to (0, 1] by its own maximum raw weight.

    Always computed from raw weights, so applying it twice changes nothing.
    """
    top: dict[LayerTag, float] = defaultdict(float)
    for e in net.edges:
        top[e.layer] = max(top[e.layer], e.raw_weight)
    edges = tuple(replace(e, weight=e.raw_weight / top[e.layer]) for e in net.edges)
    return replace(net, edges=edges, normalized=True)


def _total_degree(nodes: Iterable[Node], edges: Iterable[Edge]) -> dict[Node, int]:
    degree = {n: 0 for n in nodes}
    for e in edges:
        degree[e.source] += 1
        degree[e.target] += 1
    return degree


def filter_net(net: MultiNet, spec: FilterSpec | None = None) -> MultiNet:
    """Edges below threshold, then low-degree nodes, then (optionally) all but the
    largest component. Weights are not renormalized afterwards."""
    spec = spec or FilterSpec()
    edges = [e for e in net.edges if e.weight >= spec.threshold(e.layer)]

    degree = _total_degree(net.nodes, edges)
    nodes = {n for n, d in degree.items() if d >= spec.min_node_total_degree}
    edges = [e for e in edges if e.source in nodes and e.target in nodes]

    if spec.keep_largest_component and nodes:
        g = nx.Graph()
        g.add_nodes_from(nodes)
        g.add_edges_from((e.source, e.target) for e in edges)
        # ties on size go to the component holding the smallest node
        largest = min(nx.connected_components(g), key=lambda c: (-len(c), min(c)))
        nodes = set(largest)
        edges = [e for e in edges if e.source in nodes]

    logger.info(
        "filter kept %d/%d nodes, %d/%d edges",
        len(nodes), len(net.nodes), len(edges), len(net.edges),
    )
    return replace(net, nodes=frozenset(nodes), edges=tuple(edges))


def symmetrize(net: MultiNet) -> nx.Graph:
    """Collapse the multinet into an undirected weighted simple graph.

    weight(u, v) sums the (normalized) weights of u→v, v→u and u–v over all layers.
    Node attribute ``strength`` holds k_i; graph attribute ``total_weight`` holds m.
    """
    weights: dict[tuple[Node, Node], float] = defaultdict(float)
    for e in net.edges:
        if e.source == e.target:
            continue
        pair = (e.source, e.target) if e.source < e.target else (e.target, e.source)
        weights[pair] += e.weight

    g = nx.Graph()
    g.add_nodes_from(net.sorted_nodes())
    for (u, v), w in sorted(weights.items()):
        g.add_edge(u, v, weight=w)
    for n in g.nodes:
        g.nodes[n]["strength"] = g.degree(n, weight="weight")
    g.graph["total_weight"] = g.size(weight="weight")
    return g
