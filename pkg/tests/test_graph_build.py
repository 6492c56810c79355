"""Tests for speaker -> mentioned person graph construction."""

from __future__ import annotations

import datetime as dt
from typing import TYPE_CHECKING

import pytest

from quotegraph.entity_link import AliasTable, GlobalAttribution
from quotegraph.graph_build import (
    aggregate_mention_set,
    assemble_graph,
    build_edges,
    build_graph,
    edge_rows,
    remove_self_loops,
    winning_surfaces,
)
from quotegraph.models import Edge

if TYPE_CHECKING:
    from collections.abc import Callable

    from quotegraph.graph_build import QuoteGraph
    from quotegraph.models import QuoteContext, QuoteRecord


@pytest.fixture
def table() -> AliasTable:
    """Return an alias table with first, last and full names."""
    return AliasTable.from_rows(
        [
            ("Alice Walker", "Q1", 1.0),
            ("Alice", "Q1", 0.5),
            ("Bob Stone", "Q2", 1.0),
            ("Stone", "Q2", 0.8),
            ("Carol King", "Q3", 1.0),
        ]
    )


def _edge(speaker: str, target: str, quote: str, day: int, *urls: str) -> Edge:
    return Edge(
        speaker_qid=speaker,
        target_qid=target,
        quote_id=quote,
        earliest_date=dt.date(2020, 1, day),
        article_urls=urls,
    )


class TestMentionSets:
    """Test aggregate_mention_set and winning_surfaces."""

    def test_most_frequent_set_wins(
        self,
        table: AliasTable,
        make_context: Callable[..., QuoteContext],
        make_record: Callable[..., QuoteRecord],
    ) -> None:
        """Test that the set seen in most contexts is chosen."""
        record = make_record(
            "q1",
            make_context("q1", mentions=["Bob Stone"]),
            make_context("q1", uid="a2", mentions=["Stone"]),
            make_context("q1", uid="a3", mentions=["Bob Stone", "Carol King"]),
        )
        assert aggregate_mention_set(record, table) == {"Q2"}

    def test_tie_goes_to_larger_set(
        self,
        table: AliasTable,
        make_context: Callable[..., QuoteContext],
        make_record: Callable[..., QuoteRecord],
    ) -> None:
        """Test that equally frequent sets favour the larger one."""
        record = make_record(
            "q1",
            make_context("q1", mentions=["Bob Stone"]),
            make_context("q1", uid="a2", mentions=["Stone", "Carol King"]),
        )
        assert aggregate_mention_set(record, table) == {"Q2", "Q3"}

    def test_tie_goes_to_smallest_serialization(
        self,
        table: AliasTable,
        make_context: Callable[..., QuoteContext],
        make_record: Callable[..., QuoteRecord],
    ) -> None:
        """Test the final lexicographic tie break."""
        record = make_record(
            "q1",
            make_context("q1", mentions=["Carol King"]),
            make_context("q1", uid="a2", mentions=["Bob Stone"]),
        )
        assert aggregate_mention_set(record, table) == {"Q2"}

    def test_unresolved_mentions_ignored(
        self,
        table: AliasTable,
        make_context: Callable[..., QuoteContext],
        make_record: Callable[..., QuoteRecord],
    ) -> None:
        """Test that unknown mentions contribute nothing."""
        record = make_record("q1", make_context("q1", mentions=["The Committee"]))
        assert aggregate_mention_set(record, table) == frozenset()

    def test_winning_surface(
        self,
        table: AliasTable,
        make_context: Callable[..., QuoteContext],
        make_record: Callable[..., QuoteRecord],
    ) -> None:
        """Test the most frequent, then longest surface per target."""
        record = make_record(
            "q1",
            make_context("q1", mentions=["Stone", "Alice"]),
            make_context("q1", uid="a2", mentions=["Stone", "Alice Walker"]),
            make_context("q1", uid="a3", mentions=["Bob Stone"]),
        )
        assert winning_surfaces(record, table, {"Q1", "Q2"}) == {
            "Q1": "Alice Walker",
            "Q2": "Stone",
        }


class TestBuildEdges:
    """Test build_edges."""

    def test_one_edge_per_target(
        self,
        make_context: Callable[..., QuoteContext],
        make_record: Callable[..., QuoteRecord],
    ) -> None:
        """Test that every target gets an edge carrying the record's provenance."""
        record = make_record(
            "q1",
            make_context("q1", uid="a2", date=dt.date(2020, 3, 1)),
            make_context("q1", uid="a1", date=dt.date(2020, 2, 1)),
            make_context("q1", uid="a3", date=dt.date(2020, 4, 1)),
        )
        attribution = GlobalAttribution("q1", "Q9", 0.9)

        edges = build_edges(attribution, {"Q3", "Q2"}, record, {"Q2": "Stone"})

        assert [e.key for e in edges] == [("Q9", "Q2", "q1"), ("Q9", "Q3", "q1")]
        assert all(e.earliest_date == dt.date(2020, 2, 1) for e in edges)
        assert edges[0].article_urls == (
            "https://news.example.org/a1",
            "https://news.example.org/a2",
            "https://news.example.org/a3",
        )
        assert edges[0].surface == "Stone"
        assert edges[1].surface == ""

    def test_no_targets(
        self,
        make_context: Callable[..., QuoteContext],
        make_record: Callable[..., QuoteRecord],
    ) -> None:
        """Test that an empty target set yields no edges."""
        record = make_record("q1", make_context("q1"))
        assert build_edges(GlobalAttribution("q1", "Q9", 0.9), set(), record) == []


class TestAssembly:
    """Test self-loop removal and edge merging."""

    def test_remove_self_loops(self) -> None:
        """Test that speaker = target edges are dropped and counted."""
        kept, removed = remove_self_loops(
            [_edge("Q1", "Q1", "q1", 1), _edge("Q1", "Q2", "q1", 1)]
        )
        assert [e.key for e in kept] == [("Q1", "Q2", "q1")]
        assert removed == 1

    def test_duplicate_triplets_merge(self) -> None:
        """Test that repeated triplets unite URLs and keep the earliest date."""
        graph, duplicates = assemble_graph(
            [
                _edge("Q1", "Q2", "q1", 9, "u2"),
                _edge("Q1", "Q2", "q1", 3, "u1", "u2"),
                _edge("Q1", "Q2", "q2", 5, "u3"),
            ]
        )
        assert duplicates == 1
        assert graph.edge_count == 2
        merged = graph.edges["Q1", "Q2", "q1"]
        assert merged.earliest_date == dt.date(2020, 1, 3)
        assert merged.article_urls == ("u1", "u2")

    def test_parallel_edges_and_degrees(
        self, make_graph: Callable[..., QuoteGraph]
    ) -> None:
        """Test that each quotation adds its own edge."""
        graph = make_graph([("Q1", "Q2"), ("Q1", "Q2"), ("Q2", "Q3")])

        assert graph.node_count == 3
        assert graph.edge_count == 3
        assert graph.out_degrees()["Q1"] == 2
        assert graph.in_degrees()["Q2"] == 2
        multigraph = graph.to_networkx()
        assert multigraph.number_of_edges("Q1", "Q2") == 2


class TestBuildGraph:
    """Test build_graph."""

    def test_edges_self_loops_and_drops(
        self,
        table: AliasTable,
        make_context: Callable[..., QuoteContext],
        make_record: Callable[..., QuoteRecord],
    ) -> None:
        """Test edges per target, self-loop removal and target-less quotes."""
        records = [
            make_record(
                "q1",
                make_context(
                    "q1",
                    uid="a2",
                    date=dt.date(2020, 3, 1),
                    mentions=["Stone"],
                ),
                make_context(
                    "q1", uid="a1", date=dt.date(2020, 2, 1), mentions=["Bob Stone"]
                ),
            ),
            make_record("q2", make_context("q2", mentions=[])),
            make_record("q3", make_context("q3", mentions=["Carol King"])),
        ]
        attributions = {
            "q1": GlobalAttribution("q1", "Q1", 0.9),
            "q2": GlobalAttribution("q2", "Q2", 0.9),
        }
        graph, stats = build_graph(records, attributions, table)

        assert [e.key for e in graph.sorted_edges()] == [("Q1", "Q2", "q1")]
        edge = graph.sorted_edges()[0]
        assert edge.earliest_date == dt.date(2020, 2, 1)
        assert edge.article_urls == (
            "https://news.example.org/a1",
            "https://news.example.org/a2",
        )
        assert edge.surface == "Bob Stone"
        assert stats.as_dict() == {
            "quotes": 2,
            "no_targets": 1,
            "self_loops": 0,
            "duplicates": 0,
            "edges": 1,
            "nodes": 2,
        }

    def test_self_loop_counted(
        self,
        table: AliasTable,
        make_context: Callable[..., QuoteContext],
        make_record: Callable[..., QuoteRecord],
    ) -> None:
        """Test that speakers mentioning themselves produce no edge."""
        record = make_record(
            "q1", make_context("q1", mentions=["Bob Stone", "Carol King"])
        )
        graph, stats = build_graph(
            [record], {"q1": GlobalAttribution("q1", "Q2", 0.9)}, table
        )
        assert [e.key for e in graph.sorted_edges()] == [("Q2", "Q3", "q1")]
        assert stats.self_loops == 1

    def test_edge_rows(self, make_graph: Callable[..., QuoteGraph]) -> None:
        """Test the edge list rows."""
        graph = make_graph([("Q2", "Q3"), ("Q1", "Q2")])
        assert list(edge_rows(graph)) == [
            ("Q1", "Q2", "q1", "2020-01-01", 0),
            ("Q2", "Q3", "q0", "2020-01-01", 0),
        ]
