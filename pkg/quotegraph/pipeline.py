"""
Stage orchestration for the quotegraph pipeline.

Every stage reads its inputs from the output directory (or the configured
input files), writes its outputs there and records its counters in the run
summary. Running the stages one by one produces the same files as a full run.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from itertools import batched
from typing import TYPE_CHECKING, Any

import networkx as nx
from tqdm import tqdm

from .analytics import analyze
from .config import validate_paths
from .const import (
    ARTICLES_FILE,
    ATTRIBUTIONS_FILE,
    CONTEXTS_FILE,
    DISTRIBUTIONS_DIR,
    EDGE_RECORDS_FILE,
    EDGES_FILE,
    GROUPS_FILE,
    LOGGER,
    METRICS_FILE,
    NAMEBIAS_FILE,
    NODES_FILE,
    PROFILES_FILE,
    QUOTES_FILE,
    REFERENCES_FILE,
    REJECTS_FILE,
    STAGES,
    SUMMARY_FILE,
)
from .corpus_io import (
    LoadReport,
    QuotegraphError,
    RecordValidationError,
    load_alias_table,
    load_articles,
    load_hierarchy,
    load_qid_set,
    load_snapshot,
    read_jsonl,
    read_lines,
    write_json,
    write_jsonl,
    write_rejects,
    write_tsv,
)
from .entity_link import GlobalAttribution, link_records
from .graph_build import assemble_graph, build_graph, edge_rows
from .models import Article, Edge, EntityProfile, QuoteContext, QuoteRecord
from .namebias import classify_edges, summarize_references
from .preprocess import PreprocessStats, preprocess_article
from .quote_cluster import cluster_contexts
from .wikidata_enrich import enrich_nodes, node_rows, occupation_closure

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Iterator
    from pathlib import Path

    from .config import PipelineConfig
    from .graph_build import QuoteGraph
    from .preprocess import PreprocessConfig

type StageCounters = dict[str, Any]


class PipelineStageError(QuotegraphError):
    """Exception to indicate a fatal stage failure."""

    def __init__(self, stage: str, reason: str) -> None:
        """Initialize stage error."""
        super().__init__(f"stage {stage} failed: {reason}")
        self.stage = stage
        self.reason = reason


def _process_chunk(
    articles: tuple[Article, ...], cfg: PreprocessConfig
) -> tuple[list[QuoteContext], PreprocessStats]:
    stats = PreprocessStats()
    contexts: list[QuoteContext] = []
    for article in articles:
        article_contexts, article_stats = preprocess_article(article, cfg)
        contexts.extend(article_contexts)
        stats.update(article_stats)
    return contexts, stats


def preprocess_articles(
    articles: Iterable[Article],
    cfg: PreprocessConfig,
    threads: int = 1,
    chunk_size: int = 512,
) -> Iterator[tuple[list[QuoteContext], PreprocessStats]]:
    """
    Preprocess articles in chunks on a thread pool.

    Results are yielded in input order, so the output does not depend on the
    number of threads. At most ``4 * threads`` chunks are in flight.
    """
    chunks = batched(articles, chunk_size)
    with ThreadPoolExecutor(
        max_workers=threads, thread_name_prefix="preprocess"
    ) as executor:
        for window in batched(chunks, 4 * threads):
            yield from executor.map(lambda c: _process_chunk(c, cfg), window)


def _read_summary(out: Path) -> dict[str, Any]:
    path = out / SUMMARY_FILE
    if not path.is_file():
        return {}
    with path.open(encoding="utf-8") as f:
        return json.load(f)


def record_summary(out: Path, stage: str, counters: StageCounters) -> None:
    """Store the counters of one stage in the run summary."""
    summary = {} if stage == STAGES[0] else _read_summary(out)
    summary[stage] = counters
    write_json(out / SUMMARY_FILE, summary)


def _require(path: Path, stage: str) -> Path:
    if not path.is_file():
        msg = f"{path.name} not found in {path.parent}; run the previous stages first"
        raise PipelineStageError(stage, msg)
    return path


def _require_input(path: Path | None, stage: str, name: str) -> Path:
    if path is None:
        raise PipelineStageError(stage, f"no {name} path configured")
    return path


def run_ingest(config: PipelineConfig) -> StageCounters:
    """Validate the raw corpus and write the accepted articles."""
    source = _require_input(config.inputs.articles, "ingest", "articles")
    report = LoadReport(source.name)
    articles = load_articles(source, report)
    write_jsonl(
        config.out / ARTICLES_FILE,
        tqdm(articles, desc="ingest", unit="articles", disable=None),
    )
    write_rejects(config.out / REJECTS_FILE, [report])
    return {"articles": report.as_dict()}


def run_preprocess(config: PipelineConfig) -> StageCounters:
    """Extract quotation contexts from every article."""
    cfg = config.preprocess_config()
    articles = load_articles(_require(config.out / ARTICLES_FILE, "preprocess"))
    stats = PreprocessStats()

    def _contexts() -> Iterator[QuoteContext]:
        for contexts, chunk_stats in preprocess_articles(
            tqdm(articles, desc="preprocess", unit="articles", disable=None),
            cfg,
            config.threads,
            config.chunk_size,
        ):
            stats.update(chunk_stats)
            yield from contexts

    write_jsonl(config.out / CONTEXTS_FILE, _contexts())
    LOGGER.info(
        "Kept %d contexts of %d quotations (%d unterminated, %d short)",
        stats.contexts,
        stats.quotations,
        stats.unterminated,
        stats.short,
    )
    return stats.as_dict()


def run_cluster(config: PipelineConfig) -> StageCounters:
    """Group contexts into unique quotations."""
    contexts = read_jsonl(
        _require(config.out / CONTEXTS_FILE, "cluster"), QuoteContext
    )
    records, groups, stats = cluster_contexts(contexts, config.preprocess_config())
    write_jsonl(config.out / QUOTES_FILE, records)
    write_tsv(
        config.out / GROUPS_FILE,
        (
            (member, group.representative)
            for group in groups
            for member in sorted(group.members)
        ),
    )
    return stats.as_dict()


def run_link(config: PipelineConfig) -> StageCounters:
    """Attribute every unique quotation to a speaker."""
    table_path = _require_input(config.inputs.alias_table, "link", "alias table")
    report = LoadReport(table_path.name)
    table = load_alias_table(table_path, report)
    records = read_jsonl(_require(config.out / QUOTES_FILE, "link"), QuoteRecord)
    attributions, stats = link_records(records, table, config.min_global_probability)
    write_tsv(
        config.out / ATTRIBUTIONS_FILE,
        ((a.quote_id, a.speaker_qid, repr(a.global_probability)) for a in attributions),
    )
    return {**stats.as_dict(), "alias_table": report.as_dict()}


def _read_attributions(path: Path) -> dict[str, GlobalAttribution]:
    attributions: dict[str, GlobalAttribution] = {}
    for line_no, line in read_lines(path):
        try:
            quote_id, speaker, probability = line.split("\t")
            attributions[quote_id] = GlobalAttribution(
                quote_id, speaker, float(probability)
            )
        except ValueError as err:
            msg = f"malformed row {line_no} in {path.name}: {line!r}"
            raise RecordValidationError(msg, line_no) from err
    return attributions


def run_graph(config: PipelineConfig) -> StageCounters:
    """Build the speaker -> mentioned person edges."""
    table_path = _require_input(config.inputs.alias_table, "graph", "alias table")
    table = load_alias_table(table_path)
    attributions = _read_attributions(
        _require(config.out / ATTRIBUTIONS_FILE, "graph")
    )
    records = read_jsonl(_require(config.out / QUOTES_FILE, "graph"), QuoteRecord)
    graph, stats = build_graph(records, attributions, table)
    write_tsv(config.out / EDGES_FILE, edge_rows(graph))
    write_jsonl(config.out / EDGE_RECORDS_FILE, graph.sorted_edges())
    return stats.as_dict()


def load_graph(config: PipelineConfig, stage: str) -> QuoteGraph:
    """Reassemble the graph from the edge records of the graph stage."""
    edges = read_jsonl(_require(config.out / EDGE_RECORDS_FILE, stage), Edge)
    graph, _ = assemble_graph(edges)
    return graph


def load_profiles(config: PipelineConfig, stage: str) -> dict[str, EntityProfile]:
    """Read the node profiles written by the enrichment stage."""
    path = _require(config.out / PROFILES_FILE, stage)
    return {profile.qid: profile for profile in read_jsonl(path, EntityProfile)}


def run_enrich(config: PipelineConfig) -> StageCounters:
    """Derive biographic attributes for every node."""
    inputs = config.inputs
    snapshot_path = _require_input(inputs.snapshot, "enrich", "snapshot")
    reports = [LoadReport(snapshot_path.name)]
    snapshot = load_snapshot(snapshot_path, reports[0])

    hierarchy: nx.DiGraph | None = None
    if inputs.hierarchy is not None:
        reports.append(LoadReport(inputs.hierarchy.name))
        hierarchy = load_hierarchy(inputs.hierarchy, reports[-1])
    defunct: frozenset[str] = frozenset()
    if inputs.defunct is not None:
        reports.append(LoadReport(inputs.defunct.name))
        defunct = load_qid_set(inputs.defunct, reports[-1])

    graph = load_graph(config, "enrich")
    closure = occupation_closure(hierarchy if hierarchy is not None else nx.DiGraph())
    profiles, stats = enrich_nodes(graph.nodes, snapshot, defunct, closure)
    write_jsonl(config.out / PROFILES_FILE, profiles.values())
    write_tsv(config.out / NODES_FILE, node_rows(graph, profiles))
    return {
        **stats.as_dict(),
        "inputs": {report.source: report.as_dict() for report in reports},
    }


def _format(value: Any) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def write_distribution(path: Path, rows: Iterable[tuple[Any, float]]) -> None:
    """Write a distribution table as comma-separated ``bin,mass`` rows."""
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(("bin", "mass"))
        writer.writerows((_format(b), _format(m)) for b, m in rows)


def run_analyze(config: PipelineConfig) -> StageCounters:
    """Compute the metrics report and the distribution tables."""
    graph = load_graph(config, "analyze")
    profiles = load_profiles(config, "analyze")
    report = analyze(
        graph,
        profiles,
        damping=config.damping,
        tolerance=config.tolerance,
        max_iter=config.max_iter,
        top_k=config.top_k,
    )
    write_json(config.out / METRICS_FILE, report.as_dict())
    directory = config.out / DISTRIBUTIONS_DIR
    directory.mkdir(exist_ok=True)
    for name, table in sorted(report.distributions.items()):
        write_distribution(directory / f"{name}.csv", table.rows())
    return {
        "nodes": report.structure.node_count,
        "edges": report.structure.edge_count,
        "pagerank_converged": report.pagerank.converged,
        "age_ends_missing_birth_date": report.ages.missing_birth_date,
        "age_ends_negative": report.ages.negative_age,
    }


def run_namebias(config: PipelineConfig) -> StageCounters:
    """Classify target references and compute first-name rates by gender."""
    graph = load_graph(config, "namebias")
    profiles = load_profiles(config, "namebias")
    rows = classify_edges(graph.sorted_edges(), profiles)
    write_tsv(config.out / REFERENCES_FILE, (row.as_row() for row in rows))
    summary = summarize_references(rows)
    write_json(config.out / NAMEBIAS_FILE, summary.as_dict())
    return {"references": len(rows)}


STAGE_RUNNERS: dict[str, Callable[[PipelineConfig], StageCounters]] = {
    "ingest": run_ingest,
    "preprocess": run_preprocess,
    "cluster": run_cluster,
    "link": run_link,
    "graph": run_graph,
    "enrich": run_enrich,
    "analyze": run_analyze,
    "namebias": run_namebias,
}


def run_stage(stage: str, config: PipelineConfig) -> StageCounters:
    """
    Run one stage and record its counters.

    Raises:
        PipelineStageError: If the stage fails.

    """
    LOGGER.info("Running stage %s", stage)
    config.out.mkdir(parents=True, exist_ok=True)
    try:
        counters = STAGE_RUNNERS[stage](config)
    except PipelineStageError:
        raise
    except QuotegraphError as err:
        raise PipelineStageError(stage, str(err)) from err
    except OSError as err:
        raise PipelineStageError(stage, f"{err.strerror}: {err.filename}") from err
    record_summary(config.out, stage, counters)
    return counters


def run_pipeline(config: PipelineConfig) -> dict[str, StageCounters]:
    """
    Run every stage in order.

    Returns:
        The counters of every stage, as written to the run summary.

    """
    validate_paths(config, STAGES)
    counters = {stage: run_stage(stage, config) for stage in STAGES}
    LOGGER.info("Pipeline finished; outputs in %s", config.out)
    return counters
