"""Readers and writers for the quotegraph corpus, snapshot and stage files."""

from __future__ import annotations

import bz2
import gzip
import json
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, BinaryIO

import networkx as nx
from pydantic import BaseModel, ValidationError

from .const import LOGGER, QID_PATTERN
from .entity_link import AliasTable
from .models import Article, WikidataSnapshotRecord

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator
    from pathlib import Path


class QuotegraphError(Exception):
    """Exception to indicate a general quotegraph error."""


class CorpusReadError(QuotegraphError):
    """Exception to indicate an input file cannot be read."""


class RecordValidationError(QuotegraphError):
    """Exception to indicate a single malformed input record."""

    def __init__(self, message: str, line: int) -> None:
        """Initialize record validation error."""
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Reject:
    """A rejected input line."""

    source: str
    line: int
    reason: str


@dataclass
class LoadReport:
    """Counters collected while loading one input file."""

    source: str
    accepted: int = 0
    duplicates: int = 0
    rejects: list[Reject] = field(default_factory=list)

    @property
    def rejected(self) -> int:
        """Return the number of rejected lines."""
        return len(self.rejects)

    def reject(self, line: int, reason: str) -> None:
        """Record a rejected line."""
        reason = " ".join(reason.split())
        LOGGER.debug("%s:%d rejected: %s", self.source, line, reason)
        self.rejects.append(Reject(self.source, line, reason))

    def as_dict(self) -> dict[str, int]:
        """Return the counters for the run summary."""
        return {
            "accepted": self.accepted,
            "rejected": self.rejected,
            "duplicates": self.duplicates,
        }


def open_binary(path: Path) -> BinaryIO:
    """
    Open a file for reading bytes, transparently handling gzip and bz2.

    Raises:
        CorpusReadError: If the file cannot be opened.

    """
    try:
        if path.suffix == ".gz":
            return gzip.open(path, "rb")
        if path.suffix == ".bz2":
            return bz2.open(path, "rb")
        return path.open("rb")
    except OSError as exception:
        msg = f"Cannot open {path}: {exception}"
        raise CorpusReadError(msg) from exception


def read_lines(
    path: Path, report: LoadReport | None = None
) -> Iterator[tuple[int, str]]:
    """
    Open ``path`` eagerly and return an iterator of (line number, line).

    Blank lines are skipped; line numbers are 1-based and count blank lines.
    Lines are decoded one by one, so a line that is not valid UTF-8 is
    recorded in ``report`` and skipped. Without a report it is fatal.
    """
    handle = open_binary(path)

    def _iterate() -> Iterator[tuple[int, str]]:
        with handle:
            try:
                for line_no, raw in enumerate(handle, start=1):
                    try:
                        line = raw.decode("utf-8").rstrip("\r\n")
                    except UnicodeDecodeError as err:
                        reason = f"invalid UTF-8 at byte {err.start}: {err.reason}"
                        if report is None:
                            msg = f"Error reading {path}:{line_no}: {reason}"
                            raise CorpusReadError(msg) from err
                        report.reject(line_no, reason)
                        continue
                    if line.strip():
                        yield line_no, line
            except (OSError, EOFError) as exception:
                msg = f"Error reading {path}: {exception}"
                raise CorpusReadError(msg) from exception

    return _iterate()


def _describe(error: ValidationError) -> str:
    """Summarize the first error of a pydantic validation failure."""
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"])
    return f"{location}: {first['msg']}" if location else first["msg"]


def parse_record[M: BaseModel](model: type[M], line: str, line_no: int) -> M:
    """
    Validate one JSON line against ``model``.

    Raises:
        RecordValidationError: If the line is not valid JSON or violates the
            model's constraints.

    """
    try:
        return model.model_validate_json(line)
    except ValidationError as err:
        raise RecordValidationError(_describe(err), line_no) from err


def load_articles(path: Path, report: LoadReport | None = None) -> Iterator[Article]:
    """
    Stream validated articles from a line-delimited file.

    Malformed lines are recorded in ``report`` and skipped; accepted articles
    are yielded in file order.

    Raises:
        CorpusReadError: If the file cannot be read.

    """
    report = report if report is not None else LoadReport(path.name)
    lines = read_lines(path, report)

    def _iterate() -> Iterator[Article]:
        for line_no, line in lines:
            try:
                article = parse_record(Article, line, line_no)
            except RecordValidationError as err:
                report.reject(err.line, str(err))
                continue
            report.accepted += 1
            yield article
        LOGGER.info(
            "Read %d articles from %s (%d rejected)",
            report.accepted,
            path,
            report.rejected,
        )

    return _iterate()


def load_snapshot(
    path: Path, report: LoadReport | None = None
) -> dict[str, WikidataSnapshotRecord]:
    """
    Load a Wikidata snapshot keyed by QID.

    The last record wins when a QID occurs more than once.
    """
    report = report if report is not None else LoadReport(path.name)
    records: dict[str, WikidataSnapshotRecord] = {}
    for line_no, line in read_lines(path, report):
        try:
            record = parse_record(WikidataSnapshotRecord, line, line_no)
        except RecordValidationError as err:
            report.reject(err.line, str(err))
            continue
        if record.qid in records:
            report.duplicates += 1
        records[record.qid] = record
        report.accepted += 1

    if report.duplicates:
        LOGGER.warning(
            "Snapshot %s has %d duplicate QIDs; kept the last record of each",
            path,
            report.duplicates,
        )
    LOGGER.info("Loaded %d snapshot records from %s", len(records), path)
    return records


def _split_qids(line: str, expected: int) -> list[str] | None:
    """Split a whitespace-separated line into QIDs, or None if malformed."""
    parts = line.split()
    if len(parts) != expected or not all(QID_PATTERN.match(p) for p in parts):
        return None
    return parts


def load_hierarchy(path: Path, report: LoadReport | None = None) -> nx.DiGraph:
    """
    Load the occupation subclass hierarchy.

    Each line holds a child QID and a parent QID (P279). The returned graph
    has an edge child -> parent; self-edges are dropped.
    """
    report = report if report is not None else LoadReport(path.name)
    hierarchy = nx.DiGraph()
    for line_no, line in read_lines(path, report):
        if line.lstrip().startswith("#"):
            continue
        parts = _split_qids(line, 2)
        if parts is None:
            report.reject(line_no, "expected two QIDs")
            continue
        child, parent = parts
        report.accepted += 1
        if child != parent:
            hierarchy.add_edge(child, parent)

    if report.rejected:
        LOGGER.warning(
            "Skipped %d malformed hierarchy lines in %s", report.rejected, path
        )
    return hierarchy


def load_qid_set(path: Path, report: LoadReport | None = None) -> frozenset[str]:
    """Load a file with one QID per line, such as the defunct-country list."""
    report = report if report is not None else LoadReport(path.name)
    qids: set[str] = set()
    for line_no, line in read_lines(path, report):
        parts = _split_qids(line, 1)
        if parts is None:
            report.reject(line_no, "expected one QID")
            continue
        report.accepted += 1
        qids.add(parts[0])
    return frozenset(qids)


def load_word_list(path: Path) -> frozenset[str]:
    """Load one word per line, case-folded."""
    return frozenset(line.strip().casefold() for _, line in read_lines(path))


def load_alias_table(path: Path, report: LoadReport | None = None) -> AliasTable:
    """
    Load an alias table from ``surface<TAB>qid<TAB>prior`` lines.

    Lines with a malformed QID or a negative, infinite or non-numeric prior
    are skipped.
    """
    report = report if report is not None else LoadReport(path.name)
    rows: list[tuple[str, str, float]] = []
    for line_no, line in read_lines(path, report):
        parts = line.split("\t")
        if len(parts) != 3:  # noqa: PLR2004
            report.reject(line_no, "expected three tab-separated fields")
            continue
        surface, qid, prior_text = parts
        try:
            prior = float(prior_text)
        except ValueError:
            report.reject(line_no, f"prior {prior_text!r} is not a number")
            continue
        if (
            not QID_PATTERN.match(qid)
            or not math.isfinite(prior)
            or prior < 0
            or not surface.strip()
        ):
            report.reject(line_no, "invalid surface, QID or prior")
            continue
        rows.append((surface, qid, prior))
        report.accepted += 1

    table = AliasTable.from_rows(rows)
    LOGGER.info("Loaded %d alias surfaces from %s", len(table), path)
    return table


def read_jsonl[M: BaseModel](path: Path, model: type[M]) -> Iterator[M]:
    """
    Stream records of a stage file written by ``write_jsonl``.

    Raises:
        RecordValidationError: On the first invalid record; stage files are
            never partially accepted.

    """
    for line_no, line in read_lines(path):
        yield parse_record(model, line, line_no)


def write_jsonl(path: Path, records: Iterable[BaseModel]) -> int:
    """Write models as JSON lines using their wire aliases; return the count."""
    count = 0
    with path.open("w", encoding="utf-8") as f:
        for record in records:
            f.write(record.model_dump_json(by_alias=True))
            f.write("\n")
            count += 1
    return count


def write_tsv(path: Path, rows: Iterable[Iterable[Any]]) -> int:
    """Write tab-separated rows; return the number of rows written."""
    count = 0
    with path.open("w", encoding="utf-8") as f:
        for row in rows:
            f.write("\t".join(str(value) for value in row))
            f.write("\n")
            count += 1
    return count


def read_tsv(path: Path) -> Iterator[list[str]]:
    """Read tab-separated rows written by ``write_tsv``."""
    for _, line in read_lines(path):
        yield line.split("\t")


def write_rejects(path: Path, reports: Iterable[LoadReport]) -> int:
    """Write the rejects log: source, line number and reason per rejected line."""
    return write_tsv(
        path,
        (
            (reject.source, reject.line, reject.reason)
            for report in reports
            for reject in report.rejects
        ),
    )


def write_json(path: Path, document: Any) -> None:
    """Write a JSON document with sorted keys."""
    with path.open("w", encoding="utf-8") as f:
        json.dump(document, f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")
