"""Construction of the directed speaker -> mentioned person network."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import networkx as nx

from .const import LOGGER
from .entity_link import resolve_surface
from .models import Edge

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping

    from .entity_link import AliasTable, GlobalAttribution
    from .models import QuoteContext, QuoteRecord

type EdgeKey = tuple[str, str, str]


@dataclass
class QuoteGraph:
    """A directed multigraph of edges unique by (speaker, target, quote)."""

    edges: dict[EdgeKey, Edge] = field(default_factory=dict)

    @property
    def nodes(self) -> frozenset[str]:
        """Return every edge endpoint."""
        return frozenset(
            qid
            for edge in self.edges.values()
            for qid in (edge.speaker_qid, edge.target_qid)
        )

    @property
    def node_count(self) -> int:
        """Return the number of nodes."""
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        """Return the number of edges."""
        return len(self.edges)

    def sorted_edges(self) -> list[Edge]:
        """Return the edges sorted by (speaker, target, quote)."""
        return [self.edges[key] for key in sorted(self.edges)]

    def in_degrees(self) -> Counter[str]:
        """Return the indegree of every node with at least one incoming edge."""
        return Counter(edge.target_qid for edge in self.edges.values())

    def out_degrees(self) -> Counter[str]:
        """Return the outdegree of every node with at least one outgoing edge."""
        return Counter(edge.speaker_qid for edge in self.edges.values())

    def to_networkx(self) -> nx.MultiDiGraph:
        """Return the graph as a networkx multigraph keyed by quote id."""
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(sorted(self.nodes))
        for edge in self.sorted_edges():
            graph.add_edge(
                edge.speaker_qid,
                edge.target_qid,
                key=edge.quote_id,
                earliest_date=edge.earliest_date,
            )
        return graph


@dataclass
class GraphStats:
    """Counters for the graph construction stage."""

    quotes: int = 0
    no_targets: int = 0
    self_loops: int = 0
    duplicates: int = 0
    edges: int = 0
    nodes: int = 0

    def as_dict(self) -> dict[str, int]:
        """Return the counters for the run summary."""
        return {
            "quotes": self.quotes,
            "no_targets": self.no_targets,
            "self_loops": self.self_loops,
            "duplicates": self.duplicates,
            "edges": self.edges,
            "nodes": self.nodes,
        }


def context_mention_set(context: QuoteContext, table: AliasTable) -> frozenset[str]:
    """Resolve the in-quote mentions of one context to a set of QIDs."""
    resolved = (resolve_surface(table, surface) for surface in context.mentions)
    return frozenset(qid for qid in resolved if qid is not None)


def _set_order(qids: frozenset[str], count: int) -> tuple[int, int, str]:
    return (-count, -len(qids), "|".join(sorted(qids)))


def aggregate_mention_set(record: QuoteRecord, table: AliasTable) -> frozenset[str]:
    """
    Choose the target set of a quotation.

    Each context yields the set of QIDs mentioned in it; the most frequent
    set wins, ties going to the larger set and then to the lexicographically
    smallest serialized set.
    """
    counts = Counter(context_mention_set(c, table) for c in record.contexts)
    if not counts:
        return frozenset()
    return min(counts, key=lambda qids: _set_order(qids, counts[qids]))


def winning_surfaces(
    record: QuoteRecord, table: AliasTable, targets: Iterable[str]
) -> dict[str, str]:
    """
    Pick the surface used to refer to each target.

    The most frequent surface resolving to the target wins, ties going to
    the longest and then the lexicographically smallest surface.
    """
    wanted = set(targets)
    surfaces: dict[str, Counter[str]] = {qid: Counter() for qid in wanted}
    for context in record.contexts:
        for surface in context.mentions:
            qid = resolve_surface(table, surface)
            if qid in wanted:
                surfaces[qid][surface] += 1
    return {
        qid: min(counter, key=lambda s: (-counter[s], -len(s), s))
        for qid, counter in surfaces.items()
        if counter
    }


def build_edges(
    attribution: GlobalAttribution,
    targets: Iterable[str],
    record: QuoteRecord,
    surfaces: Mapping[str, str] | None = None,
) -> list[Edge]:
    """Create one edge from the speaker to each target, sorted by target."""
    surfaces = surfaces or {}
    urls = tuple(sorted(record.urls))
    earliest = record.earliest_date
    return [
        Edge(
            speaker_qid=attribution.speaker_qid,
            target_qid=target,
            quote_id=record.quote_id,
            earliest_date=earliest,
            article_urls=urls,
            surface=surfaces.get(target, ""),
        )
        for target in sorted(targets)
    ]


def remove_self_loops(edges: Iterable[Edge]) -> tuple[list[Edge], int]:
    """
    Drop edges pointing from a speaker to themselves.

    Returns:
        The remaining edges and the number removed.

    """
    kept: list[Edge] = []
    removed = 0
    for edge in edges:
        if edge.speaker_qid == edge.target_qid:
            removed += 1
        else:
            kept.append(edge)
    return kept, removed


def assemble_graph(edges: Iterable[Edge]) -> tuple[QuoteGraph, int]:
    """
    Assemble edges into a graph.

    Edges sharing a triplet are merged: URLs are united and the earliest date
    kept.

    Returns:
        The graph and the number of duplicate triplets merged.

    """
    graph = QuoteGraph()
    duplicates = 0
    for edge in edges:
        existing = graph.edges.get(edge.key)
        if existing is None:
            graph.edges[edge.key] = edge
            continue
        duplicates += 1
        graph.edges[edge.key] = existing.model_copy(
            update={
                "earliest_date": min(existing.earliest_date, edge.earliest_date),
                "article_urls": tuple(
                    sorted(set(existing.article_urls) | set(edge.article_urls))
                ),
            }
        )
    return graph, duplicates


def build_graph(
    records: Iterable[QuoteRecord],
    attributions: Mapping[str, GlobalAttribution],
    table: AliasTable,
) -> tuple[QuoteGraph, GraphStats]:
    """
    Build the network from attributed quotation records.

    Records without an attribution contribute no edges; they were already
    counted as drops by the linking stage.
    """
    stats = GraphStats()
    edges: list[Edge] = []
    for record in records:
        attribution = attributions.get(record.quote_id)
        if attribution is None:
            continue
        stats.quotes += 1
        targets = aggregate_mention_set(record, table)
        if not targets:
            stats.no_targets += 1
            continue
        surfaces = winning_surfaces(record, table, targets)
        edges.extend(build_edges(attribution, targets, record, surfaces))

    kept, stats.self_loops = remove_self_loops(edges)
    graph, stats.duplicates = assemble_graph(kept)
    stats.edges = graph.edge_count
    stats.nodes = graph.node_count
    LOGGER.info(
        "Built graph with %d nodes and %d edges (%d self-loops removed)",
        stats.nodes,
        stats.edges,
        stats.self_loops,
    )
    return graph, stats


def edge_rows(graph: QuoteGraph) -> Iterable[tuple[str, str, str, str, int]]:
    """Yield the tab-separated edge list rows, sorted by triplet."""
    for edge in graph.sorted_edges():
        yield (
            edge.speaker_qid,
            edge.target_qid,
            edge.quote_id,
            edge.earliest_date.isoformat(),
            len(edge.article_urls),
        )
