"""Biographic node attributes derived from a Wikidata snapshot."""

from __future__ import annotations

import datetime as dt
from collections import defaultdict
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Protocol

import networkx as nx

from .const import (
    DOMAIN_TOP_LEVEL,
    GENDER_FEMALE_QID,
    GENDER_MALE_QID,
    GENDER_NON_BINARY_QID,
    LOGGER,
)
from .models import DatePrecision, EntityProfile, Gender, PartyMembership

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping, Sequence

    from .graph_build import QuoteGraph
    from .models import WikidataSnapshotRecord

DOMAIN_OTHER = "other"
_ART = "art"
_OVERRIDING_ART = frozenset({"politics", "sport"})


class HasPartyMemberships(Protocol):
    """Anything carrying P102 statements."""

    @property
    def party_memberships(self) -> Sequence[PartyMembership]: ...  # noqa: D102


@dataclass(frozen=True)
class DomainTable:
    """Top-level occupations defining each domain."""

    top_level: Mapping[str, frozenset[str]] = field(
        default_factory=lambda: dict(DOMAIN_TOP_LEVEL)
    )

    def __post_init__(self) -> None:
        """Check that no occupation is top-level for two domains."""
        seen: set[str] = set()
        for occupations in self.top_level.values():
            if seen & occupations:
                msg = f"top-level occupations {sorted(seen & occupations)} overlap"
                raise ValueError(msg)
            seen |= occupations


@dataclass
class EnrichStats:
    """Counters for the enrichment stage."""

    nodes: int = 0
    missing: int = 0

    def as_dict(self) -> dict[str, int]:
        """Return the counters for the run summary."""
        return {"nodes": self.nodes, "missing": self.missing}


def extract_birth_date(record: WikidataSnapshotRecord) -> dt.date | None:
    """Return the first listed birth date."""
    return record.birth_dates[0] if record.birth_dates else None


def extract_nationalities(
    record: WikidataSnapshotRecord, defunct: frozenset[str]
) -> frozenset[str]:
    """Return every listed nationality except countries that no longer exist."""
    return frozenset(record.nationalities) - defunct


def extract_gender(record: WikidataSnapshotRecord) -> Gender:
    """
    Map P21 statements to a gender category.

    Only female or only male yields that gender; a non-binary statement or
    several genders yield ``other``; no statement yields ``unknown``.
    """
    genders = set(record.genders)
    if not genders:
        return Gender.UNKNOWN
    if GENDER_NON_BINARY_QID in genders or len(genders) > 1:
        return Gender.OTHER
    if genders == {GENDER_FEMALE_QID}:
        return Gender.FEMALE
    if genders == {GENDER_MALE_QID}:
        return Gender.MALE
    return Gender.OTHER


def truncate_date(value: dt.date, precision: DatePrecision) -> dt.date:
    """Return the earliest date meeting ``value`` at the given precision."""
    if precision is DatePrecision.YEAR:
        return dt.date(value.year, 1, 1)
    if precision is DatePrecision.MONTH:
        return dt.date(value.year, value.month, 1)
    return value


def effective_interval(membership: PartyMembership) -> tuple[dt.date, dt.date]:
    """
    Return the closed interval of a membership.

    Partial dates are moved to the earliest date meeting their precision; a
    missing start or end extends the interval indefinitely.
    """
    start = (
        truncate_date(membership.start, membership.precision)
        if membership.start is not None
        else dt.date.min
    )
    end = (
        truncate_date(membership.end, membership.precision)
        if membership.end is not None
        else dt.date.max
    )
    return start, end


def party_at_date(record: HasPartyMemberships, quote_date: dt.date) -> str | None:
    """
    Return the party an entity belonged to on ``quote_date``.

    If no membership carries a date, the last listed party is returned. When
    several intervals contain the date, the one starting first wins. When none
    does, the membership with the latest start before the date is returned.
    """
    memberships = list(record.party_memberships)
    if not memberships:
        return None
    if all(m.start is None and m.end is None for m in memberships):
        return memberships[-1].party

    intervals = [
        (*effective_interval(m), index, m.party) for index, m in enumerate(memberships)
    ]
    containing = [i for i in intervals if i[0] <= quote_date <= i[1]]
    if containing:
        return min(containing, key=lambda i: (i[0], i[2]))[3]
    started = [i for i in intervals if i[0] <= quote_date]
    if started:
        return max(started, key=lambda i: (i[0], i[2]))[3]
    return None


def occupation_closure(
    hierarchy: nx.DiGraph, domain_table: DomainTable | None = None
) -> dict[str, frozenset[str]]:
    """
    Map every occupation below a top-level occupation to its domains.

    ``hierarchy`` has an edge child -> parent for each P279 statement, so
    the occupations below a top-level one are its ancestors in the graph.
    Occupations reachable from several domains map to all of them.
    """
    domain_table = domain_table or DomainTable()
    domains: defaultdict[str, set[str]] = defaultdict(set)
    for domain, tops in domain_table.top_level.items():
        for top in tops:
            domains[top].add(domain)
            if top in hierarchy:
                for occupation in nx.ancestors(hierarchy, top):
                    domains[occupation].add(domain)
    return {qid: frozenset(values) for qid, values in domains.items()}


def occupation_domains(
    closure: Mapping[str, frozenset[str]], occupation: str
) -> frozenset[str]:
    """Return the domains of one occupation; unreachable ones are ``other``."""
    return closure.get(occupation, frozenset({DOMAIN_OTHER}))


def entity_domains(
    record: WikidataSnapshotRecord, closure: Mapping[str, frozenset[str]]
) -> frozenset[str]:
    """
    Return the domains of an entity from its occupations.

    Art is kept only when neither politics nor sport is present; other
    overlaps are left as they are.
    """
    domains: set[str] = set()
    for occupation in record.occupations:
        domains |= occupation_domains(closure, occupation)
    if _ART in domains and domains & _OVERRIDING_ART:
        domains.discard(_ART)
    return frozenset(domains)


def build_profile(
    record: WikidataSnapshotRecord,
    defunct: frozenset[str],
    closure: Mapping[str, frozenset[str]],
) -> EntityProfile:
    """Derive the node attributes of one snapshot record."""
    return EntityProfile(
        qid=record.qid,
        label=record.label,
        birth_date=extract_birth_date(record),
        nationalities=tuple(sorted(extract_nationalities(record, defunct))),
        gender=extract_gender(record),
        party_memberships=record.party_memberships,
        domains=tuple(sorted(entity_domains(record, closure))),
        given_names=tuple(sorted({name.casefold() for name in record.given_names})),
        family_names=tuple(sorted({name.casefold() for name in record.family_names})),
    )


def enrich_nodes(
    nodes: Iterable[str],
    snapshot: Mapping[str, WikidataSnapshotRecord],
    defunct: frozenset[str],
    closure: Mapping[str, frozenset[str]],
) -> tuple[dict[str, EntityProfile], EnrichStats]:
    """
    Build a profile for every node.

    Nodes absent from the snapshot get an empty profile.
    """
    stats = EnrichStats()
    profiles: dict[str, EntityProfile] = {}
    for qid in sorted(nodes):
        stats.nodes += 1
        record = snapshot.get(qid)
        if record is None:
            stats.missing += 1
            profiles[qid] = EntityProfile(qid=qid)
        else:
            profiles[qid] = build_profile(record, defunct, closure)
    if stats.missing:
        LOGGER.warning(
            "%d of %d nodes have no snapshot record", stats.missing, stats.nodes
        )
    return profiles, stats


def _clean(text: str) -> str:
    return " ".join(text.split())


def node_rows(
    graph: QuoteGraph, profiles: Mapping[str, EntityProfile]
) -> Iterable[tuple[str, ...]]:
    """Yield the tab-separated node table rows, sorted by QID."""
    in_degrees = graph.in_degrees()
    out_degrees = graph.out_degrees()
    for qid in sorted(graph.nodes):
        profile = profiles.get(qid) or EntityProfile(qid=qid)
        yield (
            qid,
            _clean(profile.label),
            profile.birth_date.isoformat() if profile.birth_date else "",
            profile.gender.value,
            "|".join(profile.nationalities),
            "|".join(profile.domains),
            str(in_degrees[qid]),
            str(out_degrees[qid]),
        )
