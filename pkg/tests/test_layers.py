"""Tests for scimap layers."""
import pytest

from conftest import corpus_of, doc
from scimap.corpus import build_corpus, resolve_citations
from scimap.errors import LayerError
from scimap.layers import (
    Layer,
    LayerTag,
    Node,
    NodeKind,
    build_author_citation,
    build_author_keyword,
    build_keyword_citation,
    build_layers,
)
from scimap.synth import PlantedSpec, generate_corpus

A, B, C = Node.author("a"), Node.author("b"), Node.author("c")
X, Y, Z = Node.keyword("x"), Node.keyword("y"), Node.keyword("z")


class TestNode:
    def test_identity(self):
        assert Node("author", "a") == A
        assert Node(NodeKind.AUTHOR, "a") != Node(NodeKind.KEYWORD, "a")
        assert A.kind is NodeKind.AUTHOR

    def test_key(self):
        assert A.key == "author:a"
        assert str(X) == "keyword:x"
        assert Node.from_key("keyword:gene flow: theory") == Node.keyword("gene flow: theory")

    def test_empty_label(self):
        with pytest.raises(LayerError):
            Node.author("")

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            Node("journal", "x")

    def test_order(self):
        assert sorted([X, B, A]) == [A, B, X]

    def test_layer_directedness(self):
        assert LayerTag.AUTHOR_CITATION.directed
        assert LayerTag.KEYWORD_CITATION.directed
        assert not LayerTag.AUTHOR_KEYWORD.directed


class TestAuthorCitation:
    def test_definition(self):
        corpus = corpus_of(doc("d1", authors=["a", "b"], refs=["d2"]), doc("d2", authors=["c"]))
        layer = build_author_citation(corpus)
        assert dict(layer.edges) == {(A, C): 1.0, (B, C): 1.0}
        assert layer.directed

    def test_self_pair_dropped(self):
        corpus = corpus_of(doc("d1", authors=["a"], refs=["d2"]), doc("d2", authors=["a"]))
        assert len(build_author_citation(corpus)) == 0

    def test_additive(self):
        corpus = corpus_of(
            doc("d1", authors=["a"], refs=["d3"]),
            doc("d2", authors=["a"], refs=["d3"]),
            doc("d3", authors=["c"]),
        )
        assert build_author_citation(corpus).edges == {(A, C): 2.0}

    def test_self_citation_reaches_coauthors(self):
        corpus = corpus_of(doc("d1", authors=["a", "b"], refs=["d2"]), doc("d2", authors=["a"]))
        assert build_author_citation(corpus).edges == {(B, A): 1.0}

    def test_no_authors(self):
        corpus = corpus_of(doc("d1", keywords=["x"], refs=["d2"]), doc("d2", keywords=["y"]))
        assert len(build_author_citation(corpus)) == 0

    def test_total_weight_recount(self):
        corpus, _ = generate_corpus(PlantedSpec(docs_per_block=30, seed=3))
        layer = build_author_citation(corpus)
        expected = 0
        for a, b in corpus.citation_edges:
            src, dst = corpus.documents[a].authors, corpus.documents[b].authors
            expected += sum(1 for x in src for y in dst if x != y)
        assert layer.total_weight() == expected

    def test_fractional(self):
        corpus = corpus_of(
            doc("d1", authors=["a", "b"], refs=["d2"]), doc("d2", authors=["c", "d"]),
        )
        layer = build_author_citation(corpus, fractional=True)
        assert set(layer.edges.values()) == {0.25}
        assert layer.total_weight() == pytest.approx(1.0)


class TestKeywordCitation:
    def test_definition(self):
        corpus = corpus_of(
            doc("d1", keywords=["x", "y"], refs=["d2"]), doc("d2", keywords=["y", "z"]),
        )
        assert build_keyword_citation(corpus).edges == {(X, Y): 1.0, (X, Z): 1.0, (Y, Z): 1.0}

    def test_missing_keywords(self):
        corpus = corpus_of(doc("d1", refs=["d2"]), doc("d2", keywords=["y", "z"]))
        assert len(build_keyword_citation(corpus)) == 0

    def test_additive(self):
        corpus = corpus_of(
            doc("d1", keywords=["x"], refs=["d2"]),
            doc("d2", keywords=["z"]),
            doc("d3", keywords=["x"], refs=["d4"]),
            doc("d4", keywords=["z"]),
        )
        assert build_keyword_citation(corpus).edges == {(X, Z): 2.0}


class TestAuthorKeyword:
    def test_paper_count(self):
        corpus = corpus_of(
            doc("d1", authors=["a"], keywords=["x"]), doc("d2", authors=["a"], keywords=["x"]),
        )
        assert build_author_keyword(corpus).edges == {(A, X): 2.0}

    def test_cross_product(self):
        corpus = corpus_of(doc("d1", authors=["a", "b"], keywords=["x", "y"]))
        layer = build_author_keyword(corpus)
        assert len(layer) == 4
        assert set(layer.edges.values()) == {1.0}
        assert not layer.directed

    def test_degraded_docs_skipped(self):
        corpus = corpus_of(doc("d1", keywords=["x"]), doc("d2", authors=["a"], keywords=["y"]))
        assert X not in build_author_keyword(corpus).nodes()

    def test_bipartite_on_random_corpus(self):
        corpus, _ = generate_corpus(PlantedSpec(n_blocks=3, docs_per_block=20, seed=11))
        layer = build_author_keyword(corpus)
        assert len(layer) > 0
        for u, v in layer.edges:
            assert u.kind is NodeKind.AUTHOR and v.kind is NodeKind.KEYWORD
        layer.validate()

    def test_fractional(self):
        corpus = corpus_of(doc("d1", authors=["a", "b"], keywords=["x", "y"]))
        assert set(build_author_keyword(corpus, fractional=True).edges.values()) == {0.25}


class TestLayerValidation:
    def test_wrong_kinds(self):
        with pytest.raises(LayerError, match="wrong node kinds"):
            Layer(LayerTag.AUTHOR_CITATION, {(A, X): 1.0}).validate()
        with pytest.raises(LayerError):
            Layer(LayerTag.AUTHOR_KEYWORD, {(X, A): 1.0}).validate()

    def test_self_loop(self):
        with pytest.raises(LayerError, match="self-loop"):
            Layer(LayerTag.AUTHOR_CITATION, {(A, A): 1.0}).validate()

    def test_non_positive_weight(self):
        with pytest.raises(LayerError):
            Layer(LayerTag.KEYWORD_CITATION, {(X, Y): 0.0}).validate()


class TestBuildLayers:
    def test_all_three_valid(self, small_records):
        from scimap.corpus import load_corpus

        layers = build_layers(load_corpus(small_records))
        assert [l.tag for l in layers] == list(LayerTag)
        for layer in layers:
            layer.validate()
        author_citation = layers[0]
        assert (Node.author("lee m"), Node.author("jones k")) in author_citation.edges

    def test_permutation_invariant(self):
        docs = [
            doc("d1", authors=["a", "b"], keywords=["x"], refs=["d2", "d3"]),
            doc("d2", authors=["c"], keywords=["y"], refs=["d3"]),
            doc("d3", authors=["a"], keywords=["z"]),
        ]
        forward = build_layers(resolve_citations(build_corpus(docs)))
        backward = build_layers(resolve_citations(build_corpus(reversed(docs))))
        assert forward == backward
