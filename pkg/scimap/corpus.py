"""scimap corpus — bibliographic records, parsing, and citation resolution.

Record format
─────────────
  One JSON object per line (UTF-8):

    {"id": "d1", "title": "...", "year": 1998,
     "authors": ["smith j"], "keywords": ["speciation"], "references": ["d0", "ext7"]}

  Only ``id`` is required. Author and keyword strings are case-folded,
  stripped of control characters and whitespace-normalized; duplicates inside one list are collapsed.
"""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Mapping

from .errors import DuplicateRecordError, RecordParseError

logger = logging.getLogger(__name__)

LIST_FIELDS = ("authors", "keywords", "references")

# code points XML 1.0 cannot carry; node labels end up in GraphML
XML_INVALID = re.compile(r"[\x00-\x08\x0b\x0c\x0e-\x1f\ud800-\udfff\ufffe\uffff]")


# ── Model ─────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Document:
    """One element of the publication record."""

    id: str
    title: str = ""
    year: int | None = None
    authors: tuple[str, ...] = ()
    keywords: tuple[str, ...] = ()
    references: tuple[str, ...] = ()

    @property
    def degraded(self) -> bool:
        """Records without authors only feed the keyword layers."""
        return not self.authors

    def to_record(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "title": self.title,
            "year": self.year,
            "authors": list(self.authors),
            "keywords": list(self.keywords),
            "references": list(self.references),
        }


@dataclass(frozen=True)
class Corpus:
    """An id-indexed set of documents plus resolved document-level citations."""

    documents: Mapping[str, Document] = field(default_factory=dict)
    citation_edges: frozenset[tuple[str, str]] = frozenset()
    unresolved_reference_count: int = 0
    self_reference_count: int = 0

    def __len__(self) -> int:
        return len(self.documents)

    def __contains__(self, doc_id: object) -> bool:
        return doc_id in self.documents

    def ids(self) -> list[str]:
        return sorted(self.documents)

    def sorted_documents(self) -> list[Document]:
        return [self.documents[i] for i in self.ids()]

    def sorted_edges(self) -> list[tuple[str, str]]:
        return sorted(self.citation_edges)

    def with_documents(self, documents: Iterable[Document]) -> Corpus:
        """Return an unresolved corpus extended by ``documents``."""
        merged = dict(self.documents)
        for doc in documents:
            merged[doc.id] = doc
        return build_corpus(merged.values())


@dataclass(frozen=True)
class CorpusStats:
    n_documents: int = 0
    n_references: int = 0
    n_unique_references: int = 0
    n_resolved_edges: int = 0


# ── Normalization ─────────────────────────────────────────────────────────────

def normalize_name(value: str) -> str:
    """Case-fold, drop XML-invalid control characters and collapse whitespace."""
    return " ".join(XML_INVALID.sub("", value).split()).casefold()


def _dedupe(values: Iterable[str]) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for value in values:
        if value and value not in seen:
            seen[value] = None
    return tuple(seen)


def build_corpus(documents: Iterable[Document]) -> Corpus:
    """Index documents by id (sorted); citations stay unresolved."""
    by_id: dict[str, Document] = {}
    for doc in sorted(documents, key=lambda d: d.id):
        if doc.id in by_id:
            raise DuplicateRecordError(doc.id)
        by_id[doc.id] = doc
    return Corpus(documents=by_id)


# ── Parsing ───────────────────────────────────────────────────────────────────

def _string_list(record: dict[str, Any], key: str, line_no: int) -> list[str]:
    value = record.get(key, [])
    if value is None:
        return []
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise RecordParseError(f"field '{key}' must be an array of strings", line_no)
    return value


def _parse_line(line: str, line_no: int) -> Document:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise RecordParseError(f"invalid JSON ({exc.msg})", line_no) from exc
    if not isinstance(record, dict):
        raise RecordParseError("record is not an object", line_no)

    doc_id = record.get("id")
    if doc_id is None:
        raise RecordParseError("missing id", line_no)
    if not isinstance(doc_id, str) or not doc_id.strip():
        raise RecordParseError("id must be a non-empty string", line_no)

    title = record.get("title") or ""
    if not isinstance(title, str):
        raise RecordParseError("field 'title' must be a string", line_no)

    year = record.get("year")
    if year is not None and (isinstance(year, bool) or not isinstance(year, int)):
        raise RecordParseError("field 'year' must be an integer", line_no)

    authors = _dedupe(normalize_name(a) for a in _string_list(record, "authors", line_no))
    keywords = _dedupe(normalize_name(k) for k in _string_list(record, "keywords", line_no))
    references = _dedupe(r.strip() for r in _string_list(record, "references", line_no))

    return Document(
        id=doc_id.strip(),
        title=title,
        year=year,
        authors=authors,
        keywords=keywords,
        references=references,
    )


def _decode(line: str | bytes, line_no: int) -> str:
    if isinstance(line, str):
        return line
    try:
        return line.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise RecordParseError(f"invalid UTF-8 (byte {exc.start})", line_no) from exc


def parse_records(lines: Iterable[str | bytes]) -> Corpus:
    """Parse line-delimited records into an unresolved Corpus.

    Lines may be text or raw UTF-8 bytes. Blank lines are skipped. Raises
    RecordParseError (with the 1-based line number) on the first malformed line and
    DuplicateRecordError on a repeated id.
    """
    by_id: dict[str, Document] = {}
    for line_no, raw in enumerate(lines, start=1):
        line = _decode(raw, line_no)
        if not line.strip():
            continue
        doc = _parse_line(line, line_no)
        if doc.id in by_id:
            raise DuplicateRecordError(doc.id, line_no)
        by_id[doc.id] = doc

    degraded = sum(1 for d in by_id.values() if d.degraded)
    if degraded:
        logger.warning("%d of %d records have no authors", degraded, len(by_id))
    logger.info("parsed %d records", len(by_id))
    return Corpus(documents={k: by_id[k] for k in sorted(by_id)})


def read_records(path: Path | str) -> Corpus:
    """Parse a record file (unresolved); bytes are decoded line by line."""
    with open(path, "rb") as f:
        return parse_records(f)


def serialize_records(corpus: Corpus) -> str:
    """Serialize documents in id order; ``parse_records`` inverts this."""
    lines = [
        json.dumps(doc.to_record(), ensure_ascii=False)
        for doc in corpus.sorted_documents()
    ]
    return "".join(line + "\n" for line in lines)


def write_records(corpus: Corpus, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_records(corpus), encoding="utf-8")
    return path


# ── Citations ─────────────────────────────────────────────────────────────────

def resolve_citations(corpus: Corpus) -> Corpus:
    """Populate document-level citation edges restricted to in-corpus ids.

    Self references are dropped and tallied in ``self_reference_count``; references
    with no in-corpus target are counted in ``unresolved_reference_count``.
    Idempotent: the edges are always rederived from the reference lists.
    """
    edges: set[tuple[str, str]] = set()
    unresolved = 0
    self_refs = 0
    for doc in corpus.documents.values():
        for ref in doc.references:
            if ref == doc.id:
                self_refs += 1
            elif ref in corpus.documents:
                edges.add((doc.id, ref))
            else:
                unresolved += 1
    logger.debug(
        "resolved %d citation edges (%d unresolved, %d self references)",
        len(edges), unresolved, self_refs,
    )
    return replace(
        corpus,
        citation_edges=frozenset(edges),
        unresolved_reference_count=unresolved,
        self_reference_count=self_refs,
    )


def load_corpus(path: Path | str) -> Corpus:
    """Read a record file and resolve its citations."""
    return resolve_citations(read_records(path))


def corpus_stats(corpus: Corpus) -> CorpusStats:
    references = [ref for doc in corpus.documents.values() for ref in doc.references]
    return CorpusStats(
        n_documents=len(corpus.documents),
        n_references=len(references),
        n_unique_references=len(set(references)),
        n_resolved_edges=len(corpus.citation_edges),
    )
