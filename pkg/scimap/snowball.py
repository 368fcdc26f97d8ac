"""scimap snowball — grow a core corpus into a citation-closed one.

Each round counts how often the newest generation cites every reference string;
references cited at least ``threshold`` times are relevant, and the relevant ones
found in the citation store become the next generation. The run stops at the
first round that adds nothing, or after ``max_iterations`` rounds.
"""
from __future__ import annotations

import csv
import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Collection, Iterable, Iterator, Sequence

from .corpus import (
    Corpus,
    Document,
    build_corpus,
    normalize_name,
    read_records,
    resolve_citations,
)
from .errors import ConfigError, SnowballError

logger = logging.getLogger(__name__)

SNOWBALL_COLUMNS = [
    "iteration",
    "n_source_documents",
    "n_references",
    "n_unique_references",
    "threshold",
    "n_relevant_retrievable",
]


# ── Store ─────────────────────────────────────────────────────────────────────

class CitationStore:
    """A local, read-only universe of documents queried by id or topic."""

    def __init__(self, documents: Iterable[Document]) -> None:
        self._docs: dict[str, Document] = {}
        for doc in documents:
            self._docs[doc.id] = doc

    @classmethod
    def from_corpus(cls, corpus: Corpus) -> CitationStore:
        return cls(corpus.documents.values())

    @classmethod
    def load(cls, path: Path | str) -> CitationStore:
        return cls.from_corpus(read_records(path))

    def __len__(self) -> int:
        return len(self._docs)

    def __contains__(self, doc_id: object) -> bool:
        return doc_id in self._docs

    def __iter__(self) -> Iterator[Document]:
        for doc_id in sorted(self._docs):
            yield self._docs[doc_id]

    def get(self, doc_id: str) -> Document | None:
        """Return the document or None; unknown ids are never an error."""
        return self._docs.get(doc_id)

    def query(self, phrases: Sequence[str]) -> list[str]:
        """Ids whose title or any keyword contains a phrase.

        Phrases and titles are normalized like keywords, so case and spacing never matter.
        """
        needles = [n for n in map(normalize_name, phrases) if n]
        hits = []
        for doc in self:
            title = normalize_name(doc.title)
            if any(n in title or any(n in k for k in doc.keywords) for n in needles):
                hits.append(doc.id)
        return hits


# ── Config / results ──────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SnowballConfig:
    seed_query: tuple[str, ...]
    thresholds: tuple[int, ...] = (3, 10, 10)
    max_iterations: int = 5

    def __post_init__(self) -> None:
        object.__setattr__(self, "seed_query", tuple(self.seed_query))
        object.__setattr__(self, "thresholds", tuple(self.thresholds))
        if not self.thresholds:
            raise ConfigError("thresholds must not be empty")
        for t in self.thresholds:
            if isinstance(t, bool) or not isinstance(t, int) or t < 1:
                raise ConfigError(f"threshold must be a positive integer, got {t!r}")
        if any(b < a for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise ConfigError(f"thresholds must be non-decreasing: {list(self.thresholds)}")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")

    def threshold_for(self, iteration: int) -> int:
        """Threshold of the 0-based ``iteration``; the last one repeats."""
        return self.thresholds[min(iteration, len(self.thresholds) - 1)]


@dataclass(frozen=True)
class IterationRow:
    iteration: int
    n_source_documents: int
    n_references: int
    n_unique_references: int
    threshold: int
    n_relevant_retrievable: int
    n_relevant_unretrievable: int = 0

    def as_csv_row(self) -> dict[str, int]:
        return {col: getattr(self, col) for col in SNOWBALL_COLUMNS}


@dataclass(frozen=True)
class SnowballResult:
    corpus: Corpus
    rows: tuple[IterationRow, ...]
    converged: bool


# ── Operations ────────────────────────────────────────────────────────────────

def parse_thresholds(text: str) -> tuple[int, ...]:
    """Parse ``"3,10,10"``."""
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"invalid threshold list '{text}'") from exc


def seed_corpus(store: CitationStore, query: Sequence[str]) -> Corpus:
    """Documents matching any topic phrase, citation-resolved."""
    if not any(normalize_name(p) for p in query):
        raise SnowballError("seed query must contain at least one phrase")
    ids = store.query(query)
    logger.info("seed query matched %d documents", len(ids))
    docs = (store.get(i) for i in ids)
    return resolve_citations(build_corpus(d for d in docs if d is not None))


def snowball_iterate(
    current: Corpus,
    store: CitationStore,
    threshold: int,
    generation: Collection[str] | None = None,
    iteration: int = 1,
) -> tuple[tuple[Document, ...], IterationRow]:
    """Run one round over the newest generation (all of ``current`` by default)."""
    if threshold < 1:
        raise ConfigError("threshold must be >= 1")
    source_ids = sorted(generation if generation is not None else current.documents)

    freq: Counter[str] = Counter()
    for doc_id in source_ids:
        freq.update(current.documents[doc_id].references)

    added: list[Document] = []
    unretrievable = 0
    for ref in sorted(r for r, n in freq.items() if n >= threshold):
        if ref in current:
            continue
        doc = store.get(ref)
        if doc is None:
            unretrievable += 1
        else:
            added.append(doc)

    row = IterationRow(
        iteration=iteration,
        n_source_documents=len(source_ids),
        n_references=sum(freq.values()),
        n_unique_references=len(freq),
        threshold=threshold,
        n_relevant_retrievable=len(added),
        n_relevant_unretrievable=unretrievable,
    )
    logger.info(
        "iteration %d: %d sources, %d refs (%d unique), threshold %d -> %d added, %d unretrievable",
        iteration, row.n_source_documents, row.n_references, row.n_unique_references,
        threshold, len(added), unretrievable,
    )
    return tuple(added), row


def snowball_run(store: CitationStore, config: SnowballConfig) -> SnowballResult:
    corpus = seed_corpus(store, config.seed_query)
    generation: list[str] = corpus.ids()
    rows: list[IterationRow] = []
    converged = False

    for i in range(config.max_iterations):
        added, row = snowball_iterate(
            corpus, store, config.threshold_for(i), generation=generation, iteration=i + 1,
        )
        rows.append(row)
        if not added:
            converged = True
            break
        corpus = corpus.with_documents(added)
        generation = [d.id for d in added]

    if not converged:
        logger.warning("snowball stopped at max_iterations=%d without converging",
                       config.max_iterations)
    return SnowballResult(
        corpus=resolve_citations(corpus), rows=tuple(rows), converged=converged,
    )


def write_snowball_report(rows: Iterable[IterationRow], out: Path | str | IO[str]) -> None:
    """Write the per-iteration table with the fixed SNOWBALL_COLUMNS header."""
    if isinstance(out, (str, Path)):
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            _write_rows(rows, f)
    else:
        _write_rows(rows, out)


def _write_rows(rows: Iterable[IterationRow], f: IO[str]) -> None:
    writer = csv.DictWriter(f, fieldnames=SNOWBALL_COLUMNS)
    writer.writeheader()
    writer.writerows(r.as_csv_row() for r in rows)
