"""Alias-based entity resolution and speaker attribution across contexts."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import TYPE_CHECKING, Self

from .const import DEFAULT_MIN_GLOBAL_PROBABILITY, LOGGER

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping, Sequence

    from .models import QuoteRecord


def normalize_surface(surface: str) -> str:
    """Case-fold a surface form and collapse its whitespace."""
    return " ".join(surface.casefold().split())


@dataclass(frozen=True)
class AliasCandidate:
    """A candidate entity for a surface form."""

    qid: str
    prior: float


class AliasTable:
    """Lookup from case-folded surface form to candidate entities."""

    def __init__(self, entries: Mapping[str, Sequence[AliasCandidate]]) -> None:
        """Initialize the table; surfaces are normalized, empty lists dropped."""
        self._entries: dict[str, tuple[AliasCandidate, ...]] = {}
        for surface, candidates in entries.items():
            if candidates:
                key = normalize_surface(surface)
                merged = self._entries.get(key, ()) + tuple(candidates)
                self._entries[key] = tuple(
                    sorted(merged, key=lambda c: (-c.prior, c.qid))
                )

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[str, str, float]]) -> Self:
        """
        Build a table from (surface, qid, prior) rows.

        A (surface, qid) pair listed more than once keeps its highest prior.
        """
        priors: defaultdict[str, dict[str, float]] = defaultdict(dict)
        for surface, qid, prior in rows:
            per_surface = priors[normalize_surface(surface)]
            per_surface[qid] = max(prior, per_surface.get(qid, prior))
        return cls(
            {
                surface: [AliasCandidate(qid, prior) for qid, prior in by_qid.items()]
                for surface, by_qid in priors.items()
            }
        )

    def __len__(self) -> int:
        """Return the number of surface forms."""
        return len(self._entries)

    def __contains__(self, surface: object) -> bool:
        """Return whether a surface form is known."""
        return isinstance(surface, str) and normalize_surface(surface) in self._entries

    def candidates(self, surface: str) -> tuple[AliasCandidate, ...]:
        """Return the candidates of a surface, best first."""
        return self._entries.get(normalize_surface(surface), ())


def resolve_surface(table: AliasTable, surface: str) -> str | None:
    """
    Resolve a surface form to a QID.

    Returns:
        The candidate with the highest prior (ties go to the smallest QID),
        or None for unknown surfaces.

    """
    candidates = table.candidates(surface)
    return candidates[0].qid if candidates else None


@dataclass(frozen=True)
class GlobalAttribution:
    """The speaker of a unique quotation, aggregated over its contexts."""

    quote_id: str
    speaker_qid: str
    global_probability: float


@dataclass
class LinkStats:
    """Counters for the linking stage."""

    quotes: int = 0
    attributed: int = 0
    unresolved: int = 0
    below_threshold: int = 0

    def as_dict(self) -> dict[str, int]:
        """Return the counters for the run summary."""
        return {
            "quotes": self.quotes,
            "attributed": self.attributed,
            "unresolved": self.unresolved,
            "below_threshold": self.below_threshold,
        }


def speaker_probabilities(record: QuoteRecord, table: AliasTable) -> dict[str, float]:
    """Sum the local probabilities of every resolved speaker over all contexts."""
    local: defaultdict[str, list[float]] = defaultdict(list)
    for context in record.contexts:
        for candidate in context.candidates:
            qid = resolve_surface(table, candidate.surface)
            if qid is not None:
                local[qid].append(candidate.probability)
    return {qid: math.fsum(values) for qid, values in local.items()}


def attribute_quotation(
    record: QuoteRecord,
    table: AliasTable,
    min_global_probability: float = DEFAULT_MIN_GLOBAL_PROBABILITY,
) -> GlobalAttribution | None:
    """
    Attribute a quotation to the entity with the highest global probability.

    Candidates whose surface does not resolve are ignored. Ties go to the
    smallest QID.

    Returns:
        The attribution, or None if no candidate resolves or the winner's
        global probability is below ``min_global_probability``.

    """
    totals = speaker_probabilities(record, table)
    if not totals:
        return None
    winner = min(totals, key=lambda qid: (-totals[qid], qid))
    if totals[winner] < min_global_probability:
        return None
    return GlobalAttribution(record.quote_id, winner, totals[winner])


def link_records(
    records: Iterable[QuoteRecord],
    table: AliasTable,
    min_global_probability: float = DEFAULT_MIN_GLOBAL_PROBABILITY,
) -> tuple[list[GlobalAttribution], LinkStats]:
    """Attribute every record; unattributed quotations are counted as drops."""
    stats = LinkStats()
    attributions: list[GlobalAttribution] = []
    for record in records:
        stats.quotes += 1
        attribution = attribute_quotation(record, table, min_global_probability)
        if attribution is not None:
            attributions.append(attribution)
        elif speaker_probabilities(record, table):
            stats.below_threshold += 1
        else:
            stats.unresolved += 1
    stats.attributed = len(attributions)
    LOGGER.info(
        "Attributed %d of %d quotations (%d unresolved, %d below threshold)",
        stats.attributed,
        stats.quotes,
        stats.unresolved,
        stats.below_threshold,
    )
    return attributions, stats
