"""
Structural metrics and degree-weighted demographics of the quotation graph.

Assortativity and clustering are computed on the simple undirected projection
of the multigraph; PageRank, degrees and mixing use the directed multigraph.
"""

from __future__ import annotations

import datetime as dt
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import networkx as nx
import numpy as np

from .const import (
    LOGGER,
    PAGERANK_DAMPING,
    PAGERANK_MAX_ITER,
    PAGERANK_TOLERANCE,
    PARTY_MIXING_COUNTRIES,
    TOP_CENTRAL_NODES,
    UNKNOWN_CATEGORY,
)
from .models import EntityProfile, Gender
from .wikidata_enrich import party_at_date

if TYPE_CHECKING:
    from collections.abc import Collection, Iterable, Mapping

    from .graph_build import QuoteGraph
    from .models import Edge

PROJECTION = "simple undirected"

type CategoryMap = Mapping[str, Collection[str]]
type CategoryPair = tuple[Collection[str], Collection[str]]


@dataclass(frozen=True)
class DistributionTable:
    """Masses over ordered bins; cumulative tables hold P(d >= d_k)."""

    bins: tuple[Any, ...] = ()
    mass: tuple[float, ...] = ()
    cumulative: bool = False

    def rows(self) -> Iterable[tuple[Any, float]]:
        """Yield (bin, mass) pairs."""
        yield from zip(self.bins, self.mass, strict=True)

    def as_dict(self) -> dict[str, float]:
        """Return the table keyed by bin label."""
        return {str(b): m for b, m in self.rows()}


@dataclass(frozen=True)
class MixingMatrix:
    """Edge-end category co-occurrence weights, source rows x target columns."""

    categories: tuple[str, ...]
    weights: np.ndarray

    @property
    def total(self) -> float:
        """Return the total weight."""
        return float(self.weights.sum())

    def coefficient(self) -> float | None:
        """
        Return the assortative mixing coefficient.

        Evaluated on raw weights so that perfectly assortative matrices give
        exactly 1. None when only one category carries weight.
        """
        total = self.total
        products = float(
            np.dot(self.weights.sum(axis=1), self.weights.sum(axis=0))
        )
        denominator = total * total - products
        if denominator <= 0 or math.isclose(denominator, 0.0, abs_tol=1e-12):
            return None
        return (total * float(np.trace(self.weights)) - products) / denominator


@dataclass(frozen=True)
class DegreeSummary:
    """Mean total degree and cumulative degree distributions."""

    mean_total_degree: float | None
    in_degree: DistributionTable
    out_degree: DistributionTable


@dataclass(frozen=True)
class PageRankResult:
    """Scores of a power iteration run."""

    scores: dict[str, float]
    iterations: int
    converged: bool


@dataclass(frozen=True)
class AgeDistribution:
    """Histogram of whole-year ages at quotation time over edge ends."""

    table: DistributionTable
    counted: int = 0
    missing_birth_date: int = 0
    negative_age: int = 0


@dataclass
class StructuralReport:
    """Global structural properties of the graph."""

    node_count: int
    edge_count: int
    mean_total_degree: float | None
    wcc_count: int
    largest_wcc_fraction: float
    degree_assortativity: float | None
    global_clustering: float
    mixing: dict[str, float | None] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        """Return the report as plain values."""
        return {
            "node_count": self.node_count,
            "edge_count": self.edge_count,
            "mean_total_degree": self.mean_total_degree,
            "wcc_count": self.wcc_count,
            "largest_wcc_fraction": self.largest_wcc_fraction,
            "degree_assortativity": self.degree_assortativity,
            "global_clustering": self.global_clustering,
            "mixing": dict(sorted(self.mixing.items())),
        }


def simple_projection(graph: QuoteGraph) -> nx.Graph:
    """Return the undirected graph with parallel edges collapsed."""
    projection = nx.Graph(graph.to_networkx())
    projection.remove_edges_from(list(nx.selfloop_edges(projection)))
    return projection


def cumulative_distribution(degrees: Iterable[int]) -> DistributionTable:
    """Return P(d >= d_k) over the distinct values d_k of ``degrees``."""
    counts = Counter(degrees)
    n = sum(counts.values())
    if not n:
        return DistributionTable(cumulative=True)
    values = sorted(counts)
    remaining = n
    mass = []
    for value in values:
        mass.append(remaining / n)
        remaining -= counts[value]
    return DistributionTable(tuple(values), tuple(mass), cumulative=True)


def degree_summary(graph: QuoteGraph) -> DegreeSummary:
    """
    Summarize the degrees of the directed multigraph.

    The mean counts both in- and outdegree, i.e. 2|E|/|V|; it is None for an
    empty graph.
    """
    nodes = sorted(graph.nodes)
    in_degrees = graph.in_degrees()
    out_degrees = graph.out_degrees()
    mean = 2 * graph.edge_count / len(nodes) if nodes else None
    return DegreeSummary(
        mean_total_degree=mean,
        in_degree=cumulative_distribution(in_degrees[n] for n in nodes),
        out_degree=cumulative_distribution(out_degrees[n] for n in nodes),
    )


def weakly_connected_components(
    graph: QuoteGraph,
) -> tuple[list[frozenset[str]], float]:
    """
    Return the weakly connected components and the largest one's node share.

    Components are sorted by size, largest first; equal sizes by smallest QID.
    """
    components = [
        frozenset(component)
        for component in nx.connected_components(simple_projection(graph))
    ]
    components.sort(key=lambda c: (-len(c), min(c)))
    node_count = graph.node_count
    fraction = len(components[0]) / node_count if components else 0.0
    return components, fraction


def pearson(x: np.ndarray, y: np.ndarray) -> float | None:
    """Return the Pearson correlation, None when either side is constant."""
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0 or syy == 0:
        return None
    return float(np.dot(dx, dy)) / math.sqrt(sxx * syy)


def degree_assortativity(graph: QuoteGraph) -> float | None:
    """
    Return the degree assortativity of the simple undirected projection.

    Every edge contributes both orientations of its (degree, degree) pair.
    None when fewer than two edges exist or all degrees are equal.
    """
    projection = simple_projection(graph)
    if projection.number_of_edges() < 2:  # noqa: PLR2004
        return None
    degree = dict(projection.degree())
    pairs = [(degree[u], degree[v]) for u, v in projection.edges()]
    x = np.array([p[0] for p in pairs] + [p[1] for p in pairs], dtype=float)
    y = np.array([p[1] for p in pairs] + [p[0] for p in pairs], dtype=float)
    return pearson(x, y)


def global_clustering(graph: QuoteGraph) -> float:
    """Return 3 x triangles / connected triples; 0 without triples."""
    return float(nx.transitivity(simple_projection(graph)))


def mixing_matrix(pairs: Iterable[CategoryPair]) -> MixingMatrix | None:
    """
    Build the mixing matrix of labeled edge ends.

    An edge whose ends carry k_s and k_t categories adds 1/(k_s k_t) to each
    cell of their product. Edges with an unlabeled end are skipped.

    Returns:
        The matrix, or None if no edge has both ends labeled.

    """
    cells: defaultdict[tuple[str, str], list[float]] = defaultdict(list)
    for source, target in pairs:
        if not source or not target:
            continue
        weight = 1.0 / (len(source) * len(target))
        for s in source:
            for t in target:
                cells[s, t].append(weight)
    if not cells:
        return None
    categories = tuple(sorted({c for cell in cells for c in cell}))
    index = {category: i for i, category in enumerate(categories)}
    weights = np.zeros((len(categories), len(categories)))
    for (s, t), values in sorted(cells.items()):
        weights[index[s], index[t]] = math.fsum(values)
    return MixingMatrix(categories, weights)


def attribute_mixing(graph: QuoteGraph, attribute: CategoryMap) -> float | None:
    """Return the mixing coefficient of a node attribute over directed edges."""
    matrix = mixing_matrix(
        (attribute.get(edge.speaker_qid, ()), attribute.get(edge.target_qid, ()))
        for edge in graph.sorted_edges()
    )
    return matrix.coefficient() if matrix is not None else None


def party_mixing(
    graph: QuoteGraph,
    profiles: Mapping[str, EntityProfile],
    country: str | None = None,
) -> float | None:
    """
    Return the mixing coefficient of party affiliation.

    Each end's party is taken at the edge's earliest date. With ``country``
    only edges whose ends both hold that nationality count.
    """
    empty = EntityProfile.model_construct(qid="")
    pairs: list[CategoryPair] = []
    for edge in graph.sorted_edges():
        speaker = profiles.get(edge.speaker_qid, empty)
        target = profiles.get(edge.target_qid, empty)
        if country is not None and not (
            country in speaker.nationalities and country in target.nationalities
        ):
            continue
        speaker_party = party_at_date(speaker, edge.earliest_date)
        target_party = party_at_date(target, edge.earliest_date)
        if speaker_party and target_party:
            pairs.append(((speaker_party,), (target_party,)))
    matrix = mixing_matrix(pairs)
    return matrix.coefficient() if matrix is not None else None


def pagerank(
    graph: QuoteGraph,
    damping: float = PAGERANK_DAMPING,
    tolerance: float = PAGERANK_TOLERANCE,
    max_iter: int = PAGERANK_MAX_ITER,
) -> PageRankResult:
    """
    Run PageRank power iteration on the directed multigraph.

    Teleportation is uniform and the mass of nodes without outgoing edges is
    spread uniformly. Iteration stops once the L1 change falls below
    ``tolerance``; otherwise the last iterate is returned unconverged.
    """
    nodes = sorted(graph.nodes)
    n = len(nodes)
    if not n:
        return PageRankResult({}, 0, converged=True)
    index = {qid: i for i, qid in enumerate(nodes)}
    edges = graph.sorted_edges()
    sources = np.array([index[e.speaker_qid] for e in edges], dtype=np.intp)
    targets = np.array([index[e.target_qid] for e in edges], dtype=np.intp)
    out_degree = np.bincount(sources, minlength=n).astype(float)
    dangling = out_degree == 0
    share = np.divide(1.0, out_degree, out=np.zeros(n), where=~dangling)

    scores = np.full(n, 1.0 / n)
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):  # noqa: B007
        flow = np.zeros(n)
        np.add.at(flow, targets, scores[sources] * share[sources])
        dangling_mass = float(scores[dangling].sum())
        updated = damping * (flow + dangling_mass / n) + (1.0 - damping) / n
        change = float(np.abs(updated - scores).sum())
        scores = updated
        if change < tolerance:
            converged = True
            break
    if not converged:
        LOGGER.warning("PageRank did not converge in %d iterations", max_iter)
    return PageRankResult(
        {qid: float(scores[i]) for qid, i in index.items()}, iterations, converged
    )


def degree_weighted_distribution(
    graph: QuoteGraph, attribute: CategoryMap
) -> DistributionTable:
    """
    Return the attribute distribution over random edge ends.

    Each node contributes its total degree, split evenly over its categories;
    unlabeled nodes count as ``unknown``. Bins are sorted by mass, largest
    first, then by name.
    """
    degrees = graph.in_degrees() + graph.out_degrees()
    total_ends = 2 * graph.edge_count
    if not total_ends:
        return DistributionTable()
    parts: defaultdict[str, list[float]] = defaultdict(list)
    for qid in sorted(graph.nodes):
        categories = attribute.get(qid) or (UNKNOWN_CATEGORY,)
        for category in categories:
            parts[category].append(degrees[qid] / len(categories))
    mass = {
        category: math.fsum(values) / total_ends for category, values in parts.items()
    }
    bins = sorted(mass, key=lambda c: (-mass[c], c))
    return DistributionTable(tuple(bins), tuple(mass[c] for c in bins))


def age_at(birth: dt.date, when: dt.date) -> int:
    """Return the age in whole years on ``when``."""
    before_birthday = (when.month, when.day) < (birth.month, birth.day)
    return when.year - birth.year - before_birthday


def age_distribution(
    edges: Iterable[Edge], profiles: Mapping[str, EntityProfile]
) -> AgeDistribution:
    """
    Histogram the ages of both ends of every edge at the edge's earliest date.

    Ends without a birth date and ends with a negative age are excluded and
    counted.
    """
    ages: Counter[int] = Counter()
    missing = negative = 0
    for edge in edges:
        for qid in (edge.speaker_qid, edge.target_qid):
            profile = profiles.get(qid)
            if profile is None or profile.birth_date is None:
                missing += 1
                continue
            age = age_at(profile.birth_date, edge.earliest_date)
            if age < 0:
                negative += 1
                continue
            ages[age] += 1
    counted = sum(ages.values())
    if negative:
        LOGGER.warning("Excluded %d edge ends with a negative age", negative)
    bins = tuple(sorted(ages))
    table = DistributionTable(bins, tuple(ages[a] / counted for a in bins))
    return AgeDistribution(table, counted, missing, negative)


def top_central_nodes(
    graph: QuoteGraph,
    scores: Mapping[str, float],
    profiles: Mapping[str, EntityProfile],
    k: int = TOP_CENTRAL_NODES,
) -> list[dict[str, Any]]:
    """Return the ``k`` highest-scoring nodes with label, domains and degree."""
    degrees = graph.in_degrees() + graph.out_degrees()
    ranked = sorted(scores, key=lambda qid: (-scores[qid], qid))[:k]
    rows = []
    for rank, qid in enumerate(ranked, start=1):
        profile = profiles.get(qid) or EntityProfile(qid=qid)
        rows.append(
            {
                "rank": rank,
                "qid": qid,
                "label": profile.label,
                "pagerank": scores[qid],
                "domains": list(profile.domains),
                "total_degree": degrees[qid],
            }
        )
    return rows


def profile_attributes(
    profiles: Mapping[str, EntityProfile],
) -> dict[str, dict[str, tuple[str, ...]]]:
    """Return node -> categories maps for nationality, domain and gender."""
    return {
        "nationality": {q: p.nationalities for q, p in profiles.items()},
        "domain": {q: p.domains for q, p in profiles.items()},
        "gender": {
            q: (p.gender.value,) if p.gender is not Gender.UNKNOWN else ()
            for q, p in profiles.items()
        },
    }


@dataclass
class AnalyticsReport:
    """Everything written by the analysis stage."""

    structure: StructuralReport
    degrees: DegreeSummary
    pagerank: PageRankResult
    distributions: dict[str, DistributionTable]
    ages: AgeDistribution
    top_nodes: list[dict[str, Any]]
    parameters: dict[str, Any]

    def as_dict(self) -> dict[str, Any]:
        """Return the metrics document."""
        return {
            "structure": self.structure.as_dict(),
            "metadata": {
                "projection": PROJECTION,
                "degree_assortativity": "total degree, simple undirected",
                "mixing": "directed edge ends",
                "pagerank": {
                    **self.parameters,
                    "iterations": self.pagerank.iterations,
                    "converged": self.pagerank.converged,
                },
            },
            "ages": {
                "counted": self.ages.counted,
                "missing_birth_date": self.ages.missing_birth_date,
                "negative_age": self.ages.negative_age,
            },
            "top_pagerank": self.top_nodes,
        }


def analyze(  # noqa: PLR0913
    graph: QuoteGraph,
    profiles: Mapping[str, EntityProfile],
    *,
    damping: float = PAGERANK_DAMPING,
    tolerance: float = PAGERANK_TOLERANCE,
    max_iter: int = PAGERANK_MAX_ITER,
    top_k: int = TOP_CENTRAL_NODES,
    countries: Mapping[str, str] = PARTY_MIXING_COUNTRIES,
) -> AnalyticsReport:
    """Compute every metric and distribution of the graph."""
    degrees = degree_summary(graph)
    components, largest = weakly_connected_components(graph)
    attributes = profile_attributes(profiles)

    mixing: dict[str, float | None] = {
        name: attribute_mixing(graph, values) for name, values in attributes.items()
    }
    mixing["party"] = party_mixing(graph, profiles)
    for name, country in countries.items():
        mixing[f"party:{name}"] = party_mixing(graph, profiles, country)

    structure = StructuralReport(
        node_count=graph.node_count,
        edge_count=graph.edge_count,
        mean_total_degree=degrees.mean_total_degree,
        wcc_count=len(components),
        largest_wcc_fraction=largest,
        degree_assortativity=degree_assortativity(graph),
        global_clustering=global_clustering(graph),
        mixing=mixing,
    )
    ranks = pagerank(graph, damping, tolerance, max_iter)
    ages = age_distribution(graph.sorted_edges(), profiles)
    distributions = {
        name: degree_weighted_distribution(graph, values)
        for name, values in attributes.items()
    }
    distributions["in_degree"] = degrees.in_degree
    distributions["out_degree"] = degrees.out_degree
    distributions["age"] = ages.table
    LOGGER.info(
        "Analyzed graph: %d components, clustering %.3f",
        structure.wcc_count,
        structure.global_clustering,
    )
    return AnalyticsReport(
        structure=structure,
        degrees=degrees,
        pagerank=ranks,
        distributions=distributions,
        ages=ages,
        top_nodes=top_central_nodes(graph, ranks.scores, profiles, top_k),
        parameters={"damping": damping, "tolerance": tolerance, "max_iter": max_iter},
    )
