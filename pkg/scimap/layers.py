"""scimap layers — the three constituent graphs of a publication record.

  author_citation   directed   author of citing doc  ─▶ author of cited doc
  keyword_citation  directed   keyword of citing doc ─▶ keyword of cited doc
  author_keyword    bipartite  author ── keyword of the same doc

Counting is full (one unit per pair) unless ``fractional`` is set, in which case
each document pair spreads one unit over its |X|·|Y| node pairs.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Mapping

from .corpus import Corpus, Document
from .errors import LayerError


class NodeKind(str, Enum):
    AUTHOR = "author"
    KEYWORD = "keyword"


class LayerTag(str, Enum):
    AUTHOR_CITATION = "author_citation"
    KEYWORD_CITATION = "keyword_citation"
    AUTHOR_KEYWORD = "author_keyword"

    @property
    def directed(self) -> bool:
        return self is not LayerTag.AUTHOR_KEYWORD


@dataclass(frozen=True, order=True)
class Node:
    """(kind, label) is the node identity everywhere downstream."""

    kind: NodeKind
    label: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", NodeKind(self.kind))
        if not self.label:
            raise LayerError("node label must not be empty")

    @classmethod
    def author(cls, label: str) -> Node:
        return cls(NodeKind.AUTHOR, label)

    @classmethod
    def keyword(cls, label: str) -> Node:
        return cls(NodeKind.KEYWORD, label)

    @property
    def key(self) -> str:
        return f"{self.kind.value}:{self.label}"

    @classmethod
    def from_key(cls, key: str) -> Node:
        kind, _, label = key.partition(":")
        return cls(NodeKind(kind), label)

    def __str__(self) -> str:
        return self.key


EdgeMap = Mapping[tuple[Node, Node], float]


@dataclass(frozen=True)
class Layer:
    tag: LayerTag
    edges: EdgeMap = field(default_factory=dict)

    @property
    def directed(self) -> bool:
        return self.tag.directed

    def __len__(self) -> int:
        return len(self.edges)

    def nodes(self) -> set[Node]:
        return {n for pair in self.edges for n in pair}

    def total_weight(self) -> float:
        return float(sum(self.edges.values()))

    def validate(self) -> None:
        """Raise LayerError if an edge breaks the layer's kind constraint."""
        for (u, v), w in self.edges.items():
            if u == v:
                raise LayerError(f"{self.tag.value}: self-loop on {u}")
            if not w > 0:
                raise LayerError(f"{self.tag.value}: non-positive weight on {u} -> {v}")
            if self.tag is LayerTag.AUTHOR_CITATION:
                ok = u.kind is NodeKind.AUTHOR and v.kind is NodeKind.AUTHOR
            elif self.tag is LayerTag.KEYWORD_CITATION:
                ok = u.kind is NodeKind.KEYWORD and v.kind is NodeKind.KEYWORD
            else:
                ok = u.kind is NodeKind.AUTHOR and v.kind is NodeKind.KEYWORD
            if not ok:
                raise LayerError(f"{self.tag.value}: edge {u} -> {v} has wrong node kinds")


# ── Builders ──────────────────────────────────────────────────────────────────

def _citation_layer(
    corpus: Corpus,
    tag: LayerTag,
    select: Callable[[Document], tuple[str, ...]],
    make: Callable[[str], Node],
    fractional: bool,
) -> Layer:
    weights: dict[tuple[Node, Node], float] = defaultdict(float)
    for citing_id, cited_id in corpus.sorted_edges():
        src = select(corpus.documents[citing_id])
        dst = select(corpus.documents[cited_id])
        if not src or not dst:
            continue
        credit = 1.0 / (len(src) * len(dst)) if fractional else 1.0
        for a in src:
            for b in dst:
                if a != b:
                    weights[(make(a), make(b))] += credit
    return Layer(tag, dict(sorted(weights.items())))


def build_author_citation(corpus: Corpus, fractional: bool = False) -> Layer:
    """Citations among authors: one unit per (citing author, cited author) pair."""
    return _citation_layer(
        corpus, LayerTag.AUTHOR_CITATION, lambda d: d.authors, Node.author, fractional,
    )


def build_keyword_citation(corpus: Corpus, fractional: bool = False) -> Layer:
    """Descendancy of concepts; docs without keywords contribute nothing."""
    return _citation_layer(
        corpus, LayerTag.KEYWORD_CITATION, lambda d: d.keywords, Node.keyword, fractional,
    )


def build_author_keyword(corpus: Corpus, fractional: bool = False) -> Layer:
    """Bipartite coupling; weight = number of an author's docs carrying the keyword."""
    weights: dict[tuple[Node, Node], float] = defaultdict(float)
    for doc in corpus.sorted_documents():
        if not doc.authors or not doc.keywords:
            continue
        credit = 1.0 / (len(doc.authors) * len(doc.keywords)) if fractional else 1.0
        for a in doc.authors:
            for k in doc.keywords:
                weights[(Node.author(a), Node.keyword(k))] += credit
    return Layer(LayerTag.AUTHOR_KEYWORD, dict(sorted(weights.items())))


def build_layers(corpus: Corpus, fractional: bool = False) -> tuple[Layer, Layer, Layer]:
    return (
        build_author_citation(corpus, fractional),
        build_keyword_citation(corpus, fractional),
        build_author_keyword(corpus, fractional),
    )
