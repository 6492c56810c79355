"""Fixtures for quotegraph tests."""

from __future__ import annotations

import datetime as dt
from pathlib import Path
from typing import TYPE_CHECKING, Any

import pytest

from quotegraph.config import InputPaths, PipelineConfig
from quotegraph.const import OPENING_QUOTE
from quotegraph.corpus_io import (
    load_alias_table,
    load_articles,
    load_hierarchy,
    load_snapshot,
)
from quotegraph.graph_build import assemble_graph
from quotegraph.models import (
    Article,
    Edge,
    MentionSpan,
    QuoteContext,
    QuoteOccurrence,
    QuoteRecord,
    SpeakerCandidate,
)

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable

    import networkx as nx

    from quotegraph.entity_link import AliasTable
    from quotegraph.graph_build import QuoteGraph
    from quotegraph.models import WikidataSnapshotRecord


@pytest.fixture
def fixtures_path() -> Path:
    """Return path to fixtures directory."""
    return Path(__file__).parent / "fixtures"


@pytest.fixture
def corpus_path(fixtures_path: Path) -> Path:
    """Return path to the handwritten corpus."""
    return fixtures_path / "corpus"


@pytest.fixture
def articles_fixture(corpus_path: Path) -> list[Article]:
    """Load the valid articles of the handwritten corpus."""
    return list(load_articles(corpus_path / "articles.jsonl"))


@pytest.fixture
def alias_table_fixture(corpus_path: Path) -> AliasTable:
    """Load the alias table fixture."""
    return load_alias_table(corpus_path / "aliases.tsv")


@pytest.fixture
def snapshot_fixture(corpus_path: Path) -> dict[str, WikidataSnapshotRecord]:
    """Load the Wikidata snapshot fixture."""
    return load_snapshot(corpus_path / "snapshot.jsonl")


@pytest.fixture
def hierarchy_fixture(corpus_path: Path) -> nx.DiGraph:
    """Load the occupation hierarchy fixture."""
    return load_hierarchy(corpus_path / "hierarchy.tsv")


@pytest.fixture
def pipeline_config(corpus_path: Path, tmp_path: Path) -> PipelineConfig:
    """Return a configuration running the handwritten corpus into tmp_path."""
    return PipelineConfig(
        inputs=InputPaths(
            articles=corpus_path / "articles.jsonl",
            alias_table=corpus_path / "aliases.tsv",
            snapshot=corpus_path / "snapshot.jsonl",
            hierarchy=corpus_path / "hierarchy.tsv",
            defunct=corpus_path / "defunct.txt",
        ),
        out=tmp_path / "out",
    )


def _article(
    text: str,
    *,
    quotes: Iterable[tuple[str, Iterable[tuple[str, float]]]] = (),
    mentions: Iterable[tuple[int, int]] = (),
    uid: str = "a1",
    date: dt.date = dt.date(2020, 1, 1),
    **kwargs: Any,
) -> Article:
    """
    Build an article from whitespace-separated text.

    Every opening mark starts the next quotation of ``quotes``, given as
    (quote id, [(candidate surface, probability), ...]). ``mentions`` are
    half-open token spans.
    """
    tokens = text.split()
    starts = [i + 1 for i, token in enumerate(tokens) if token == OPENING_QUOTE]
    quotations = tuple(
        QuoteOccurrence(
            quote_id=quote_id,
            start_index=start,
            candidates=tuple(
                SpeakerCandidate(surface=s, probability=p) for s, p in candidates
            ),
        )
        for start, (quote_id, candidates) in zip(starts, quotes, strict=False)
    )
    return Article(
        article_uid=uid,
        url=f"https://news.example.org/{uid}",
        date=date,
        tokens=tuple(tokens),
        quotations=quotations,
        mentions=tuple(
            MentionSpan(start=s, end=e, surface=" ".join(tokens[s:e]))
            for s, e in mentions
        ),
        **kwargs,
    )


@pytest.fixture
def make_article() -> Callable[..., Article]:
    """Return a builder of articles from whitespace-separated text."""
    return _article


def _context(  # noqa: PLR0913
    quote_id: str,
    text: str = "one two three four five six seven eight nine ten",
    *,
    candidates: Iterable[tuple[str, float]] = (),
    mentions: Iterable[str] = (),
    uid: str = "a1",
    date: dt.date = dt.date(2020, 1, 1),
) -> QuoteContext:
    return QuoteContext(
        quote_id=quote_id,
        article_uid=uid,
        url=f"https://news.example.org/{uid}",
        date=date,
        tokens=tuple(text.split()),
        candidates=tuple(
            SpeakerCandidate(surface=s, probability=p) for s, p in candidates
        ),
        mentions=tuple(mentions),
    )


@pytest.fixture
def make_context() -> Callable[..., QuoteContext]:
    """Return a builder of preprocessed quotation contexts."""
    return _context


@pytest.fixture
def make_record() -> Callable[..., QuoteRecord]:
    """Return a builder of unique quotation records from contexts."""

    def _record(quote_id: str, *contexts: QuoteContext) -> QuoteRecord:
        return QuoteRecord(
            quote_id=quote_id,
            tokens=contexts[0].tokens,
            members=tuple(sorted({c.quote_id for c in contexts})),
            contexts=contexts,
        )

    return _record


def graph_from_pairs(
    pairs: Iterable[tuple[str, str]], date: dt.date = dt.date(2020, 1, 1)
) -> QuoteGraph:
    """Build a graph with one edge, from its own quotation, per pair."""
    edges = [
        Edge(speaker_qid=s, target_qid=t, quote_id=f"q{i}", earliest_date=date)
        for i, (s, t) in enumerate(pairs)
    ]
    graph, _ = assemble_graph(edges)
    return graph


@pytest.fixture
def make_graph() -> Callable[..., QuoteGraph]:
    """Return a builder of graphs from (speaker, target) pairs."""
    return graph_from_pairs

