"""Shared fixtures for scimap tests."""
import json
from pathlib import Path
from typing import Callable

import pytest

from scimap.corpus import Document, build_corpus, resolve_citations, write_records
from scimap.synth import PlantedSpec, generate_corpus


def doc(doc_id: str, authors=(), keywords=(), refs=(), title: str = "", year=None) -> Document:
    return Document(
        id=doc_id,
        title=title,
        year=year,
        authors=tuple(authors),
        keywords=tuple(keywords),
        references=tuple(refs),
    )


def corpus_of(*docs: Document):
    return resolve_citations(build_corpus(docs))


@pytest.fixture
def make_records(tmp_path: Path) -> Callable[..., Path]:
    """Write raw record dicts (or ready-made lines) as a JSON-lines file."""

    def _make(records, name: str = "records.jsonl") -> Path:
        path = tmp_path / name
        lines = [r if isinstance(r, str) else json.dumps(r) for r in records]
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        return path

    return _make


@pytest.fixture
def small_records(make_records) -> Path:
    """Two loosely linked author groups; d5 has no authors, d6 no keywords."""
    return make_records([
        {"id": "d1", "title": "On the species concept", "year": 1990,
         "authors": ["Smith J", "Jones K"], "keywords": ["species concept", "phylogeny"],
         "references": []},
        {"id": "d2", "title": "Cladistics revisited", "year": 1994,
         "authors": ["smith j"], "keywords": ["phylogeny", "cladistics"],
         "references": ["d1", "ext:hennig1966"]},
        {"id": "d3", "title": "Species definitions", "year": 1998,
         "authors": ["Jones K", "Brown A"], "keywords": ["species definition", "phylogeny"],
         "references": ["d1", "d2"]},
        {"id": "d4", "title": "Gene flow", "year": 2001,
         "authors": ["Lee M"], "keywords": ["gene flow", "speciation"],
         "references": ["d3"]},
        {"id": "d5", "title": "Anonymous note", "year": 2002,
         "authors": [], "keywords": ["speciation"], "references": ["d4"]},
        {"id": "d6", "title": "Hybrid zones", "year": 2005,
         "authors": ["Lee M", "Park S"], "keywords": [],
         "references": ["d4", "d5", "d6"]},
    ])


@pytest.fixture
def make_planted(tmp_path: Path) -> Callable[..., tuple[Path, dict]]:
    """Write a planted-partition corpus; returns (records path, ground truth)."""

    def _make(name: str = "planted.jsonl", **spec_kwargs):
        corpus, truth = generate_corpus(PlantedSpec(**spec_kwargs))
        return write_records(corpus, tmp_path / name), truth

    return _make
