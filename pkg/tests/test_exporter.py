"""Tests for scimap exporter — GraphML round trip, DOT and CSV output."""
import csv
from pathlib import Path

import networkx as nx
import pytest

from scimap.community import detect_modules
from scimap.corpus import load_corpus
from scimap.errors import ExportError
from scimap.exporter import (
    EDGE_COLUMNS,
    export_graph,
    from_networkx,
    import_graph,
    load_net,
    to_networkx,
)
from scimap.layers import LayerTag, Node, build_layers
from scimap.multinet import Edge, MultiNet, normalize, unify


@pytest.fixture
def net(small_records: Path) -> MultiNet:
    return normalize(unify(build_layers(load_corpus(small_records), fractional=True)))


def four_node_net() -> MultiNet:
    a, b = Node.author("ana"), Node.author("bo")
    x, y = Node.keyword("x"), Node.keyword("y")
    edges = (
        Edge(LayerTag.AUTHOR_CITATION, a, b, 3.0, 1.0, True),
        Edge(LayerTag.KEYWORD_CITATION, x, y, 1.0, 1.0, True),
        Edge(LayerTag.AUTHOR_KEYWORD, a, x, 1.0, 0.5, False),
        Edge(LayerTag.AUTHOR_KEYWORD, b, y, 2.0, 1.0, False),
    )
    return MultiNet(nodes=frozenset({a, b, x, y}), edges=edges, normalized=True)


class TestGraphML:
    def test_round_trip(self, tmp_path: Path, net: MultiNet):
        path = export_graph(net, tmp_path / "net.graphml")
        back, communities = import_graph(path)
        assert back == net
        assert communities == {}

    def test_round_trip_is_string_exact(self, tmp_path: Path, net: MultiNet):
        first = export_graph(net, tmp_path / "a.graphml")
        second = export_graph(load_net(first), tmp_path / "b.graphml")
        assert first.read_bytes() == second.read_bytes()

    def test_round_trip_raw_net(self, tmp_path: Path, small_records: Path):
        raw = unify(build_layers(load_corpus(small_records)))
        back = load_net(export_graph(raw, tmp_path / "raw.graphml"))
        assert back == raw
        assert not back.normalized

    def test_communities_written(self, tmp_path: Path, net: MultiNet):
        part = detect_modules(net)
        _, communities = import_graph(export_graph(net, tmp_path / "c.graphml", partition=part))
        assert communities == part.membership

    def test_empty_net(self, tmp_path: Path):
        path = export_graph(MultiNet(), tmp_path / "empty.graphml")
        assert path.exists()
        back = load_net(path)
        assert back.is_empty
        assert back.edges == ()

    def test_edge_count_in_file(self, tmp_path: Path):
        net = four_node_net()
        text = export_graph(net, tmp_path / "four.graphml").read_text(encoding="utf-8")
        assert text.count("<edge ") == len(net.edges) == 4
        assert text.count("<node ") == 4

    def test_parallel_layers_kept_apart(self, tmp_path: Path):
        a, x = Node.author("a"), Node.keyword("x")
        k2 = Node.keyword("y")
        edges = (
            Edge(LayerTag.AUTHOR_KEYWORD, a, x, 1.0, 1.0, False),
            Edge(LayerTag.AUTHOR_KEYWORD, a, k2, 1.0, 1.0, False),
            Edge(LayerTag.KEYWORD_CITATION, x, k2, 1.0, 1.0, True),
            Edge(LayerTag.KEYWORD_CITATION, k2, x, 2.0, 1.0, True),
        )
        net = MultiNet(nodes=frozenset({a, x, k2}), edges=edges, normalized=True)
        assert load_net(export_graph(net, tmp_path / "p.graphml")) == net


class TestNetworkxBridge:
    def test_node_keys_and_attributes(self):
        g = to_networkx(four_node_net())
        assert isinstance(g, nx.MultiDiGraph)
        assert g.nodes["author:ana"] == {"kind": "author", "label": "ana"}
        data = g.get_edge_data("author:ana", "keyword:x", key="author_keyword")
        assert data["weight"] == 0.5
        assert data["directed"] is False

    def test_from_networkx_inverse(self):
        net = four_node_net()
        assert from_networkx(to_networkx(net))[0] == net


class TestOtherFormats:
    def test_csv(self, tmp_path: Path):
        net = four_node_net()
        path = export_graph(net, tmp_path / "edges.csv", fmt="csv")
        with open(path, encoding="utf-8", newline="") as f:
            reader = csv.DictReader(f)
            assert reader.fieldnames == EDGE_COLUMNS
            rows = list(reader)
        assert len(rows) == len(net.edges)
        assert rows[0]["layer"] == "author_citation"
        assert rows[0]["raw_weight"] == "3.0"
        assert {r["directed"] for r in rows} == {"true", "false"}

    def test_dot(self, tmp_path: Path):
        net = four_node_net()
        text = export_graph(net, tmp_path / "net.dot", fmt="dot").read_text(encoding="utf-8")
        assert "digraph" in text
        assert text.count("->") == len(net.edges)
        assert "ana" in text

    def test_dot_with_colon_labels(self, tmp_path: Path):
        a, k = Node.author("ana"), Node.keyword("gene flow: theory")
        net = MultiNet(
            nodes=frozenset({a, k}),
            edges=(Edge(LayerTag.AUTHOR_KEYWORD, a, k, 1.0, 1.0, False),),
            normalized=True,
        )
        text = export_graph(net, tmp_path / "colon.dot", fmt="dot").read_text(encoding="utf-8")
        assert '"gene flow: theory"' in text

    def test_unknown_format(self, tmp_path: Path):
        with pytest.raises(ExportError, match="unknown format"):
            export_graph(four_node_net(), tmp_path / "x.gexf", fmt="gexf")


class TestErrors:
    def test_unwritable_path(self, tmp_path: Path):
        blocker = tmp_path / "file"
        blocker.write_text("x", encoding="utf-8")
        with pytest.raises(ExportError) as exc:
            export_graph(four_node_net(), blocker / "net.graphml")
        assert str(blocker) in str(exc.value)

    def test_missing_file(self, tmp_path: Path):
        with pytest.raises(ExportError):
            import_graph(tmp_path / "missing.graphml")

    def test_not_graphml(self, tmp_path: Path):
        bad = tmp_path / "bad.graphml"
        bad.write_text("not xml at all", encoding="utf-8")
        with pytest.raises(ExportError):
            import_graph(bad)

    def test_label_xml_cannot_carry(self, tmp_path: Path):
        a, b = Node.author("a\x01b"), Node.author("c")
        net = MultiNet(
            nodes=frozenset({a, b}),
            edges=(Edge(LayerTag.AUTHOR_CITATION, a, b, 1.0, 1.0, True),),
            normalized=True,
        )
        with pytest.raises(ExportError, match="XML cannot carry"):
            export_graph(net, tmp_path / "ctl.graphml")
        assert not (tmp_path / "ctl.graphml").exists()
        assert export_graph(net, tmp_path / "ctl.csv", fmt="csv").exists()

    def test_parsed_control_characters_round_trip(self, tmp_path: Path, make_records):
        path = make_records([
            {"id": "d1", "authors": ["Smith\x01 J"], "keywords": ["gene\x02 flow"]},
            {"id": "d2", "authors": ["Lee M"], "keywords": ["speciation"], "references": ["d1"]},
        ])
        net = normalize(unify(build_layers(load_corpus(path))))
        assert Node.author("smith j") in net.nodes
        assert load_net(export_graph(net, tmp_path / "clean.graphml")) == net
