"""Tests for Wikidata-derived node attributes."""

from __future__ import annotations

import datetime as dt
import logging
import random
from typing import TYPE_CHECKING

import networkx as nx
import pytest

from quotegraph.models import (
    DatePrecision,
    Gender,
    PartyMembership,
    WikidataSnapshotRecord,
)
from quotegraph.wikidata_enrich import (
    DomainTable,
    build_profile,
    effective_interval,
    enrich_nodes,
    entity_domains,
    extract_birth_date,
    extract_gender,
    extract_nationalities,
    node_rows,
    occupation_closure,
    occupation_domains,
    party_at_date,
    truncate_date,
)

if TYPE_CHECKING:
    from collections.abc import Callable

    from quotegraph.graph_build import QuoteGraph

FEMALE = "Q6581072"
MALE = "Q6581097"
NON_BINARY = "Q48270"
ACTOR = "Q33999"
WRITER = "Q36180"
POLITICIAN = "Q82955"
BUSINESSPERSON = "Q43845"
FOOTBALLER = "Q937857"
DEFUNCT = frozenset({"Q15180", "Q838261"})


@pytest.fixture
def closure(hierarchy_fixture: nx.DiGraph) -> dict[str, frozenset[str]]:
    """Return the occupation closure of the fixture hierarchy."""
    return occupation_closure(hierarchy_fixture)


def _record(**values: object) -> WikidataSnapshotRecord:
    return WikidataSnapshotRecord.model_validate({"qid": "Q1", **values})


class TestAttributes:
    """Test birth date, nationality and gender extraction."""

    def test_first_birth_date(self) -> None:
        """Test that the first listed birth date is used."""
        record = _record(birth_dates=["1946-06-14", "1946-06-15"])
        assert extract_birth_date(record) == dt.date(1946, 6, 14)
        assert extract_birth_date(_record()) is None

    def test_defunct_countries_excluded(self) -> None:
        """Test that the Soviet Union and Czechoslovakia are dropped."""
        record = _record(nationalities=["Q15180", "Q159", "Q838261", "Q213"])
        assert extract_nationalities(record, DEFUNCT) == {"Q159", "Q213"}

    @pytest.mark.parametrize(
        ("genders", "expected"),
        [
            ([], Gender.UNKNOWN),
            ([FEMALE], Gender.FEMALE),
            ([MALE], Gender.MALE),
            ([NON_BINARY], Gender.OTHER),
            ([FEMALE, MALE], Gender.OTHER),
            ([FEMALE, NON_BINARY], Gender.OTHER),
            (["Q1052281"], Gender.OTHER),
        ],
    )
    def test_gender(self, genders: list[str], expected: Gender) -> None:
        """Test the mapping of gender statements to categories."""
        assert extract_gender(_record(genders=genders)) is expected


class TestPartyAtDate:
    """Test party_at_date."""

    @pytest.fixture
    def carol(
        self, snapshot_fixture: dict[str, WikidataSnapshotRecord]
    ) -> WikidataSnapshotRecord:
        """Return the record switching parties in 2008."""
        return snapshot_fixture["Q3"]

    def test_truncate_date(self) -> None:
        """Test truncation to month and year precision."""
        value = dt.date(2008, 7, 19)
        assert truncate_date(value, DatePrecision.YEAR) == dt.date(2008, 1, 1)
        assert truncate_date(value, DatePrecision.MONTH) == dt.date(2008, 7, 1)
        assert truncate_date(value, DatePrecision.DAY) == value

    def test_open_interval(self) -> None:
        """Test that missing bounds extend indefinitely."""
        start, end = effective_interval(PartyMembership(party="Q1"))
        assert start == dt.date.min
        assert end == dt.date.max

    def test_switch_on_first_of_january(self, carol: WikidataSnapshotRecord) -> None:
        """Test that the earlier membership wins where both contain the date."""
        assert party_at_date(carol, dt.date(2008, 1, 1)) == "Q29468"
        assert party_at_date(carol, dt.date(2008, 3, 1)) == "Q29552"
        assert party_at_date(carol, dt.date(1999, 6, 1)) == "Q29468"
        assert party_at_date(carol, dt.date(2020, 6, 1)) == "Q29552"

    def test_before_first_membership(self, carol: WikidataSnapshotRecord) -> None:
        """Test that no party is known before the first membership starts."""
        assert party_at_date(carol, dt.date(1985, 1, 1)) is None

    def test_gap_uses_latest_started(self) -> None:
        """Test that a date between memberships keeps the latest started one."""
        record = _record(
            party_memberships=[
                {"party": "Q10", "start": "2000-01-01", "end": "2004-01-01"},
                {"party": "Q20", "start": "2010-01-01"},
            ]
        )
        assert party_at_date(record, dt.date(2006, 1, 1)) == "Q10"

    def test_undated_uses_last_listed(self) -> None:
        """Test that the last listed party wins without any dates."""
        record = _record(party_memberships=[{"party": "Q10"}, {"party": "Q20"}])
        assert party_at_date(record, dt.date(2006, 1, 1)) == "Q20"

    def test_no_memberships(self) -> None:
        """Test entities without a party."""
        assert party_at_date(_record(), dt.date(2006, 1, 1)) is None

    @pytest.mark.parametrize("seed", range(20))
    def test_changes_only_at_boundaries(self, seed: int) -> None:
        """Test that the party changes only where a normalized interval does."""
        rng = random.Random(seed)
        memberships = []
        for index in range(rng.randint(1, 4)):
            start = dt.date(rng.randint(2000, 2008), rng.randint(1, 12), 15)
            end = start + dt.timedelta(days=rng.randint(0, 1500))
            memberships.append(
                PartyMembership(
                    party=f"Q{10 + index}",
                    start=start if rng.random() < 0.8 else None,
                    end=end if rng.random() < 0.6 else None,
                    precision=rng.choice(list(DatePrecision)),
                )
            )
        record = _record(party_memberships=memberships)
        boundaries = set()
        for membership in memberships:
            start, end = effective_interval(membership)
            boundaries.add(start)
            if end < dt.date.max:
                boundaries.add(end + dt.timedelta(days=1))

        day = dt.date(1999, 1, 1)
        previous = party_at_date(record, day)
        while day < dt.date(2014, 1, 1):
            day += dt.timedelta(days=1)
            current = party_at_date(record, day)
            if current != previous:
                assert day in boundaries
            previous = current


class TestDomains:
    """Test occupation domains."""

    def test_closure(self, closure: dict[str, frozenset[str]]) -> None:
        """Test that subclasses of top-level occupations inherit the domain."""
        assert closure[ACTOR] == {"art"}
        assert closure[WRITER] == {"art"}
        assert closure["Q30461"] == {"politics"}
        assert closure[POLITICIAN] == {"politics"}

    def test_unreachable_is_other(self, closure: dict[str, frozenset[str]]) -> None:
        """Test that occupations below no top-level occupation are other."""
        assert occupation_domains(closure, BUSINESSPERSON) == {"other"}

    def test_politics_overrides_art(self, closure: dict[str, frozenset[str]]) -> None:
        """Test an actor, writer and politician counting as politics only."""
        record = _record(occupations=[ACTOR, WRITER, BUSINESSPERSON, POLITICIAN])
        assert entity_domains(record, closure) == {"politics", "other"}

    def test_sport_overrides_art(self) -> None:
        """Test that sport also drops art, while politics and sport coexist."""
        hierarchy = nx.DiGraph([(FOOTBALLER, "Q50995749"), (ACTOR, "Q483501")])
        closure = occupation_closure(hierarchy)

        record = _record(occupations=[ACTOR, FOOTBALLER])
        assert entity_domains(record, closure) == {"sport"}
        record = _record(occupations=[POLITICIAN, FOOTBALLER])
        assert entity_domains(record, closure) == {"politics", "sport"}

    def test_no_occupation(self, closure: dict[str, frozenset[str]]) -> None:
        """Test that entities without occupations have no domain."""
        assert entity_domains(_record(), closure) == frozenset()

    def test_exact_actor_writer_politician(self) -> None:
        """Test that an actor, writer and politician counts as politics only."""
        closure = occupation_closure(
            nx.DiGraph([(ACTOR, "Q483501"), (WRITER, "Q2500638")])
        )
        record = _record(occupations=[ACTOR, WRITER, POLITICIAN])
        assert entity_domains(record, closure) == {"politics"}

    def test_cyclic_hierarchy(self) -> None:
        """Test that a subclass cycle below artist terminates with both as art."""
        hierarchy = nx.DiGraph([("Q1001", "Q1002"), ("Q1002", "Q1001")])
        hierarchy.add_edge("Q1002", "Q483501")
        closure = occupation_closure(hierarchy)

        assert closure["Q1001"] == {"art"}
        assert closure["Q1002"] == {"art"}

    @pytest.mark.parametrize("seed", range(10))
    def test_closure_independent_of_edge_order(self, seed: int) -> None:
        """Test that the closure does not depend on edge insertion order."""
        edges = [
            (ACTOR, "Q483501"),
            (WRITER, "Q2500638"),
            ("Q30461", POLITICIAN),
            (FOOTBALLER, "Q2066131"),
            ("Q2066131", "Q50995749"),
            ("Q1001", ACTOR),
            ("Q1001", "Q30461"),
            ("Q1002", "Q1001"),
            ("Q1001", "Q1002"),
        ]
        shuffled = random.Random(seed).sample(edges, len(edges))

        expected = occupation_closure(nx.DiGraph(edges))
        assert occupation_closure(nx.DiGraph(shuffled)) == expected
        assert expected["Q1002"] == {"art", "politics"}

    def test_overlapping_domain_table(self) -> None:
        """Test that a top-level occupation may define only one domain."""
        with pytest.raises(ValueError, match="overlap"):
            DomainTable({"art": frozenset({"Q1"}), "sport": frozenset({"Q1", "Q2"})})


class TestProfiles:
    """Test build_profile, enrich_nodes and node_rows."""

    def test_fixture_profile(
        self,
        snapshot_fixture: dict[str, WikidataSnapshotRecord],
        closure: dict[str, frozenset[str]],
    ) -> None:
        """Test the profile of the record with a defunct nationality."""
        profile = build_profile(snapshot_fixture["Q3"], DEFUNCT, closure)

        assert profile.nationalities == ("Q30",)
        assert profile.domains == ("politics",)
        assert profile.gender is Gender.FEMALE
        assert profile.birth_date == dt.date(1965, 1, 1)
        assert profile.given_names == ("carol",)
        assert len(profile.party_memberships) == 2

    def test_missing_nodes(
        self,
        snapshot_fixture: dict[str, WikidataSnapshotRecord],
        closure: dict[str, frozenset[str]],
        caplog: pytest.LogCaptureFixture,
    ) -> None:
        """Test that nodes absent from the snapshot get an empty profile."""
        with caplog.at_level(logging.WARNING, logger="quotegraph"):
            profiles, stats = enrich_nodes(
                ["Q4", "Q77"], snapshot_fixture, DEFUNCT, closure
            )

        assert profiles["Q77"].gender is Gender.UNKNOWN
        assert profiles["Q77"].nationalities == ()
        assert profiles["Q4"].gender is Gender.UNKNOWN
        assert profiles["Q4"].domains == ("other",)
        assert profiles["Q4"].label == "Dan Brown"
        assert stats.as_dict() == {"nodes": 2, "missing": 1}
        assert "1 of 2 nodes" in caplog.text

    def test_node_rows(
        self,
        snapshot_fixture: dict[str, WikidataSnapshotRecord],
        closure: dict[str, frozenset[str]],
        make_graph: Callable[..., QuoteGraph],
    ) -> None:
        """Test the node table rows."""
        graph = make_graph([("Q1", "Q2"), ("Q2", "Q3"), ("Q4", "Q1")])
        profiles, _ = enrich_nodes(graph.nodes, snapshot_fixture, DEFUNCT, closure)

        rows = list(node_rows(graph, profiles))
        assert [row[0] for row in rows] == ["Q1", "Q2", "Q3", "Q4"]
        assert rows[0] == (
            "Q1",
            "Alice Walker",
            "1970-03-15",
            "female",
            "Q30",
            "politics",
            "1",
            "1",
        )
        assert rows[3][2:6] == ("", "unknown", "Q668", "other")
