"""scimap synth — planted-partition publication corpora and NMI scoring.

Document i belongs to block ``i % n_blocks``; it draws its authors and keywords
from that block and cites each earlier document j < i with probability p_intra
(same block) or p_inter (different block). A ``keyword_dropout`` share of the
documents carry no keywords at all.
"""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Hashable, Mapping

import numpy as np
from sklearn.metrics import normalized_mutual_info_score

from .community import Partition
from .corpus import Corpus, Document, build_corpus, resolve_citations
from .errors import CommunityError, ConfigError
from .layers import Node

logger = logging.getLogger(__name__)

TRUTH_COLUMNS = ["kind", "label", "block"]


@dataclass(frozen=True)
class PlantedSpec:
    n_blocks: int = 2
    authors_per_block: int = 12
    keywords_per_block: int = 8
    docs_per_block: int = 100
    authors_per_doc: int = 2
    keywords_per_doc: int = 3
    p_intra: float = 0.3
    p_inter: float = 0.01
    keyword_dropout: float = 0.3
    hub_share: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_inter < self.p_intra <= 1.0:
            raise ConfigError("need 0 <= p_inter < p_intra <= 1")
        if not 0.0 <= self.keyword_dropout < 1.0:
            raise ConfigError("keyword_dropout must be in [0, 1)")
        if not 0.0 <= self.hub_share <= 1.0:
            raise ConfigError("hub_share must be in [0, 1]")
        if min(self.n_blocks, self.authors_per_block, self.keywords_per_block,
               self.authors_per_doc, self.keywords_per_doc) < 1 or self.docs_per_block < 0:
            raise ConfigError("block and per-document sizes must be positive")
        if self.authors_per_doc > self.authors_per_block:
            raise ConfigError("authors_per_doc exceeds authors_per_block")
        if self.keywords_per_doc > self.keywords_per_block:
            raise ConfigError("keywords_per_doc exceeds keywords_per_block")

    @property
    def n_documents(self) -> int:
        return self.n_blocks * self.docs_per_block

    @classmethod
    def from_mapping(cls, data: Mapping[str, object]) -> PlantedSpec:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown spec keys: {', '.join(unknown)}")
        return cls(**data)  # type: ignore[arg-type]

    @classmethod
    def load(cls, path: Path | str) -> PlantedSpec:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read spec {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"spec {path} must be a JSON object")
        return cls.from_mapping(data)

    def to_dict(self) -> dict[str, object]:
        return asdict(self)


def author_label(block: int, index: int) -> str:
    return f"author b{block} {index:02d}"


def keyword_label(block: int, index: int) -> str:
    return f"topic b{block} {index:02d}"


def generate_corpus(spec: PlantedSpec) -> tuple[Corpus, dict[Node, int]]:
    """Sample a citation-resolved corpus plus the block of every author and keyword."""
    n = spec.n_documents
    if n == 0:
        raise ConfigError("spec yields zero documents")
    rng = np.random.default_rng(spec.seed)
    blocks = np.arange(n) % spec.n_blocks

    docs: list[Document] = []
    truth: dict[Node, int] = {}
    for i in range(n):
        b = int(blocks[i])
        picks = rng.choice(spec.authors_per_block, size=spec.authors_per_doc, replace=False)
        if spec.hub_share and rng.random() < spec.hub_share and 0 not in picks:
            picks[0] = 0
        authors = tuple(author_label(b, int(a)) for a in sorted(picks))

        keywords: tuple[str, ...] = ()
        if rng.random() >= spec.keyword_dropout:
            kw = rng.choice(spec.keywords_per_block, size=spec.keywords_per_doc, replace=False)
            keywords = tuple(keyword_label(b, int(k)) for k in sorted(kw))

        refs: tuple[str, ...] = ()
        if i:
            p = np.where(blocks[:i] == b, spec.p_intra, spec.p_inter)
            cited = np.flatnonzero(rng.random(i) < p)
            refs = tuple(f"d{j:05d}" for j in cited)

        docs.append(Document(
            id=f"d{i:05d}",
            title=f"synthetic paper {i} of block {b}",
            year=1975 + i * 40 // n,
            authors=authors,
            keywords=keywords,
            references=refs,
        ))
        truth.update({Node.author(a): b for a in authors})
        truth.update({Node.keyword(k): b for k in keywords})

    corpus = resolve_citations(build_corpus(docs))
    logger.info("generated %d documents, %d citations, %d labelled nodes",
                n, len(corpus.citation_edges), len(truth))
    return corpus, dict(sorted(truth.items()))


def write_truth(truth: Mapping[Node, int], path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=TRUTH_COLUMNS)
        writer.writeheader()
        for node, block in sorted(truth.items()):
            writer.writerow({"kind": node.kind.value, "label": node.label, "block": block})
    return path


def read_truth(path: Path | str) -> dict[Node, int]:
    with open(path, "r", encoding="utf-8", newline="") as f:
        return {Node(r["kind"], r["label"]): int(r["block"]) for r in csv.DictReader(f)}


def nmi(
    partition: Partition | Mapping[Hashable, int],
    truth: Partition | Mapping[Hashable, int],
) -> float:
    """Normalized mutual information over the nodes both assignments share."""
    left = partition.membership if isinstance(partition, Partition) else dict(partition)
    right = truth.membership if isinstance(truth, Partition) else dict(truth)
    common = sorted(set(left) & set(right), key=repr)
    if not common:
        raise CommunityError("partitions share no nodes")
    if len(common) < max(len(left), len(right)):
        logger.warning("nmi over %d shared nodes (%d vs %d assigned)",
                       len(common), len(left), len(right))
    return float(normalized_mutual_info_score(
        [left[n] for n in common], [right[n] for n in common],
    ))
