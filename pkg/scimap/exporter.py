"""scimap exporter — write multinets as GraphML, DOT, or edge-list CSV.

GraphML is the exchange format: ``import_graph`` reads it back into an equal
MultiNet (floats are written with ``repr`` precision by networkx).
"""
from __future__ import annotations

import csv
import logging
from pathlib import Path

import networkx as nx

from .community import Partition
from .corpus import XML_INVALID
from .errors import ExportError
from .layers import LayerTag, Node
from .multinet import Edge, MultiNet

logger = logging.getLogger(__name__)

FORMATS = ("graphml", "dot", "csv")

EDGE_COLUMNS = [
    "source_kind", "source_label", "target_kind", "target_label",
    "layer", "raw_weight", "weight", "directed",
]


def to_networkx(net: MultiNet, partition: Partition | None = None) -> nx.MultiDiGraph:
    """Nodes keyed ``kind:label``; one edge per multinet edge, keyed by layer."""
    membership = partition.membership if partition is not None else {}
    g = nx.MultiDiGraph(normalized=net.normalized)
    for node in net.sorted_nodes():
        attrs = {"kind": node.kind.value, "label": node.label}
        if node in membership:
            attrs["community"] = membership[node]
        g.add_node(node.key, **attrs)
    for e in net.edges:
        g.add_edge(
            e.source.key, e.target.key, key=e.layer.value,
            layer=e.layer.value, raw_weight=e.raw_weight, weight=e.weight,
            directed=e.directed,
        )
    return g


def from_networkx(g: nx.MultiDiGraph) -> tuple[MultiNet, dict[Node, int]]:
    """Rebuild a MultiNet (and any stored communities) from ``to_networkx`` output."""
    nodes: dict[str, Node] = {}
    communities: dict[Node, int] = {}
    for key, data in g.nodes(data=True):
        node = Node(data["kind"], data["label"])
        nodes[key] = node
        if "community" in data:
            communities[node] = int(data["community"])
    edges = [
        Edge(
            layer=LayerTag(data["layer"]),
            source=nodes[u],
            target=nodes[v],
            raw_weight=float(data["raw_weight"]),
            weight=float(data["weight"]),
            directed=bool(data["directed"]),
        )
        for u, v, data in g.edges(data=True)
    ]
    net = MultiNet(
        nodes=frozenset(nodes.values()),
        edges=tuple(edges),
        normalized=bool(g.graph.get("normalized", False)),
    )
    return net, communities


def _write_csv(net: MultiNet, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=EDGE_COLUMNS)
        writer.writeheader()
        for e in net.edges:
            writer.writerow({
                "source_kind": e.source.kind.value,
                "source_label": e.source.label,
                "target_kind": e.target.kind.value,
                "target_label": e.target.label,
                "layer": e.layer.value,
                "raw_weight": repr(e.raw_weight),
                "weight": repr(e.weight),
                "directed": str(e.directed).lower(),
            })


def _dot_value(value: object) -> str:
    text = str(value)
    return f'"{text}"' if ":" in text else text


def _write_dot(g: nx.MultiDiGraph, path: Path) -> None:
    # pydot reads ':' as a port separator unless the string is quoted
    renamed = nx.relabel_nodes(g, {key: f"n{i}" for i, key in enumerate(g.nodes)})
    for _, data in renamed.nodes(data=True):
        data.update({k: _dot_value(v) for k, v in data.items()})
    for _, _, data in renamed.edges(data=True):
        data.update({k: _dot_value(v) for k, v in data.items()})
    nx.drawing.nx_pydot.write_dot(renamed, path)


def export_graph(
    net: MultiNet,
    path: Path | str,
    fmt: str = "graphml",
    partition: Partition | None = None,
) -> Path:
    """Write ``net`` in one of FORMATS.

    I/O failures, and GraphML labels XML cannot carry, raise ExportError.
    """
    if fmt not in FORMATS:
        raise ExportError(path, f"unknown format '{fmt}' (expected one of {', '.join(FORMATS)})")
    path = Path(path)
    if fmt == "graphml":
        bad = next((n for n in net.sorted_nodes() if XML_INVALID.search(n.label)), None)
        if bad is not None:
            raise ExportError(path, f"label {bad.label!r} holds characters XML cannot carry")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "csv":
            _write_csv(net, path)
        elif fmt == "dot":
            _write_dot(to_networkx(net, partition), path)
        else:
            nx.write_graphml(to_networkx(net, partition), path)
    except OSError as exc:
        raise ExportError(path, exc) from exc
    logger.info("wrote %s (%d nodes, %d edges)", path, len(net.nodes), len(net.edges))
    return path


def import_graph(path: Path | str) -> tuple[MultiNet, dict[Node, int]]:
    """Read a GraphML file written by ``export_graph``."""
    path = Path(path)
    try:
        g = nx.read_graphml(path, force_multigraph=True, edge_key_type=str)
    except Exception as exc:  # OSError, NetworkXError, or the XML parser's own errors
        raise ExportError(path, exc) from exc
    return from_networkx(g)


def load_net(path: Path | str) -> MultiNet:
    return import_graph(path)[0]
