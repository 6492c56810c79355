"""
Synthetic corpus generator.

Produces an article corpus, alias table, Wikidata snapshot, occupation
hierarchy and defunct-country list together with the expected edges and
quotation groups, for end-to-end checks at desk scale.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .const import CLOSING_QUOTE, CONFIG_VERSION, LOGGER, OPENING_QUOTE
from .corpus_io import write_jsonl, write_tsv
from .models import (
    Article,
    DatePrecision,
    MentionSpan,
    PartyMembership,
    QuoteOccurrence,
    SpeakerCandidate,
    WikidataSnapshotRecord,
)

if TYPE_CHECKING:
    from pathlib import Path

    from .config import PipelineConfig

CORPUS_FILE = "corpus.jsonl"
ALIASES_FILE = "aliases.tsv"
SNAPSHOT_FILE = "snapshot.jsonl"
HIERARCHY_FILE = "hierarchy.tsv"
DEFUNCT_FILE = "defunct.txt"
TRUTH_EDGES_FILE = "truth_edges.tsv"
TRUTH_GROUPS_FILE = "truth_groups.tsv"
CONFIG_FILE = "pipeline.toml"

_WORD_SYLLABLES = ("ba", "do", "ke", "li", "mu", "no", "pa", "ri", "so", "tu", "ve")
_NAME_SYLLABLES = ("Zar", "Quil", "Vex", "Orm", "Yal", "Bren", "Thas", "Iv", "Gund")
_NAME_ENDINGS = ("a", "el", "or", "in", "us", "eth", "ia", "on")

# child -> parent subclass statements of the generated occupations
_HIERARCHY = (
    ("Q33999", "Q483501"),  # actor -> artist
    ("Q36180", "Q2500638"),  # writer -> creator
    ("Q30461", "Q82955"),  # president -> politician
    ("Q937857", "Q2066131"),  # footballer -> athlete
    ("Q2066131", "Q50995749"),  # athlete -> sportsperson
)
_OCCUPATIONS = ("Q33999", "Q36180", "Q82955", "Q30461", "Q937857", "Q43845")
_COUNTRIES = ("Q30", "Q145", "Q668", "Q142")
_DEFUNCT = ("Q15180", "Q838261")
_PARTIES = {
    "Q30": ("Q29552", "Q29468"),
    "Q145": ("Q9626", "Q9630"),
    "Q668": ("Q10230", "Q10225"),
    "Q142": ("Q1052584",),
}
_GENDERS = ("Q6581072", "Q6581097")
_POLITICAL = frozenset({"Q82955", "Q30461"})


@dataclass(frozen=True)
class Person:
    """A generated entity."""

    qid: str
    given: str
    family: str

    @property
    def full(self) -> str:
        """Return the full name."""
        return f"{self.given} {self.family}"


@dataclass
class SyntheticCorpus:
    """Paths of the generated files and the planted ground truth."""

    directory: Path
    articles: int = 0
    quotes: int = 0
    edges: set[tuple[str, str, str]] = field(default_factory=set)
    groups: list[tuple[str, ...]] = field(default_factory=list)

    @property
    def config_path(self) -> Path:
        """Return the generated pipeline configuration."""
        return self.directory / CONFIG_FILE


@dataclass
class _ArticleBuilder:
    tokens: list[str] = field(default_factory=list)
    mentions: list[MentionSpan] = field(default_factory=list)
    quotations: list[QuoteOccurrence] = field(default_factory=list)

    def words(self, words: list[str]) -> None:
        self.tokens.extend(words)

    def mention(self, surface: str, entity_type: str = "PERSON") -> None:
        parts = surface.split()
        start = len(self.tokens)
        self.tokens.extend(parts)
        self.mentions.append(
            MentionSpan(
                start=start,
                end=start + len(parts),
                surface=surface,
                entity_type=entity_type,
            )
        )


@dataclass(frozen=True)
class _Quote:
    quote_id: str
    speaker: Person
    # Items are plain words or people mentioned by a given surface
    body: tuple[str | tuple[Person, str], ...]
    candidates: tuple[SpeakerCandidate, ...]


def _pseudo_words(
    rng: np.random.Generator, syllables: tuple[str, ...], count: int, length: int
) -> list[str]:
    # Grow the word length until the syllable space is four times the demand
    while len(syllables) ** length < 4 * count:
        length += 1
    words: list[str] = []
    seen: set[str] = set()
    while len(words) < count:
        word = "".join(rng.choice(syllables, size=length))
        if word not in seen:
            seen.add(word)
            words.append(word)
    return words


def _people(rng: np.random.Generator, count: int) -> list[Person]:
    stems = _pseudo_words(rng, _NAME_SYLLABLES, 2 * count, 2)
    people = []
    for i in range(count):
        given = stems[2 * i] + _NAME_ENDINGS[i % len(_NAME_ENDINGS)]
        family = stems[2 * i + 1].capitalize() + "son"
        people.append(Person(f"Q{100000 + i}", given.capitalize(), family))
    return people


def _snapshot_record(
    rng: np.random.Generator, person: Person, index: int
) -> WikidataSnapshotRecord:
    country = _COUNTRIES[int(rng.integers(len(_COUNTRIES)))]
    nationalities = [country]
    if index % 17 == 0:
        nationalities.append(_DEFUNCT[index % len(_DEFUNCT)])
    occupations = list(
        dict.fromkeys(
            _OCCUPATIONS[int(i)] for i in rng.integers(len(_OCCUPATIONS), size=2)
        )
    )
    memberships: list[PartyMembership] = []
    if _POLITICAL & set(occupations):
        parties = _PARTIES[country]
        first = parties[int(rng.integers(len(parties)))]
        switch_year = int(rng.integers(2012, 2020))
        memberships.append(
            PartyMembership(
                party=first,
                start=dt.date(1990, 1, 1),
                end=dt.date(switch_year, 1, 1),
                precision=DatePrecision.YEAR,
            )
        )
        memberships.append(
            PartyMembership(
                party=parties[-1],
                start=dt.date(switch_year, 1, 1),
                precision=DatePrecision.YEAR,
            )
        )
    genders: tuple[str, ...] = (_GENDERS[index % 2],)
    if index % 23 == 0:
        genders = ()
    birth = dt.date(
        int(rng.integers(1940, 1996)),
        int(rng.integers(1, 13)),
        int(rng.integers(1, 29)),
    )
    return WikidataSnapshotRecord(
        qid=person.qid,
        label=person.full,
        birth_dates=(birth,),
        nationalities=tuple(nationalities),
        genders=genders,
        party_memberships=tuple(memberships),
        occupations=tuple(occupations),
        given_names=(person.given,),
        family_names=(person.family,),
    )


class _Generator:
    def __init__(self, size: int, seed: int) -> None:
        self.rng = np.random.default_rng(seed)
        self.size = size
        self.vocabulary = _pseudo_words(self.rng, _WORD_SYLLABLES, 600, 3)
        self.people = _people(self.rng, max(8, size // 2))
        self.quote_counter = 0
        self.quotes: dict[str, _Quote] = {}
        self.roots: dict[str, str] = {}
        # Quotations long enough to be repeated or near-duplicated
        self.eligible: list[_Quote] = []

    def _choice[T](self, items: list[T] | tuple[T, ...]) -> T:
        return items[int(self.rng.integers(len(items)))]

    def _filler(self, low: int, high: int) -> list[str]:
        count = int(self.rng.integers(low, high))
        return [self._choice(self.vocabulary) for _ in range(count)]

    def _surface(self, person: Person) -> str:
        return self._choice((person.full, person.full, person.given, person.family))

    def new_quote(self) -> _Quote:
        self.quote_counter += 1
        quote_id = f"q{self.quote_counter:06d}"
        speaker = self._choice(self.people)
        roll = float(self.rng.random())
        body: list[str | tuple[Person, str]]
        if roll < 0.05:
            body = list(self._filler(2, 4))
        else:
            body = list(self._filler(12, 20))
            count = int(self.rng.integers(0, 3))
            targets = [self._choice(self.people) for _ in range(count)]
            if roll < 0.10:
                targets.append(speaker)
            for target in targets:
                position = int(self.rng.integers(1, len(body)))
                body.insert(position, (target, self._surface(target)))
            if roll > 0.95:
                body.insert(1, "The")
        candidates = [SpeakerCandidate(surface=speaker.full, probability=0.7)]
        if self.rng.random() < 0.3:
            other = self._choice(self.people)
            candidates.append(SpeakerCandidate(surface=other.full, probability=0.2))
        if self.rng.random() < 0.05:
            candidates = [SpeakerCandidate(surface="an official", probability=0.8)]
        return self._register(_Quote(quote_id, speaker, tuple(body), tuple(candidates)))

    def _register(self, quote: _Quote) -> _Quote:
        self.quotes[quote.quote_id] = quote
        if len(quote.body) > 10:  # noqa: PLR2004
            self.eligible.append(quote)
        return quote

    def near_duplicate(self, original: _Quote) -> _Quote:
        """Return a copy of ``original`` without its last two plain words."""
        self.quote_counter += 1
        body = list(original.body)
        removed = 0
        for index in range(len(body) - 1, -1, -1):
            if removed == 2:  # noqa: PLR2004
                break
            if isinstance(body[index], str):
                del body[index]
                removed += 1
        quote = _Quote(
            f"q{self.quote_counter:06d}",
            original.speaker,
            tuple(body),
            original.candidates,
        )
        root = self.roots.get(original.quote_id, original.quote_id)
        self.roots[quote.quote_id] = root
        return self._register(quote)

    def article(self, index: int) -> Article:
        builder = _ArticleBuilder()
        builder.words(self._filler(3, 8))
        quotes: list[_Quote] = []
        for _ in range(int(self.rng.integers(2, 5))):
            roll = float(self.rng.random())
            if roll < 0.08 and self.eligible:
                quotes.append(self._choice(self.eligible))
            elif roll < 0.16 and self.eligible:
                quotes.append(self.near_duplicate(self._choice(self.eligible)))
            else:
                quotes.append(self.new_quote())

        for quote in quotes:
            builder.mention(quote.speaker.full)
            builder.words(["said", ":", OPENING_QUOTE])
            start = len(builder.tokens)
            for item in quote.body:
                if isinstance(item, str):
                    if item == "The":
                        builder.mention(item)
                    else:
                        builder.words([item])
                else:
                    builder.mention(item[1])
            builder.words([CLOSING_QUOTE])
            builder.quotations.append(
                QuoteOccurrence(
                    quote_id=quote.quote_id,
                    start_index=start,
                    candidates=quote.candidates,
                )
            )
            builder.words(self._filler(2, 6))
        if self.rng.random() < 0.05:
            builder.mention(self._choice(self.people).full)
            builder.words(["added", OPENING_QUOTE])
            builder.quotations.append(
                QuoteOccurrence(
                    quote_id=f"u{index:06d}", start_index=len(builder.tokens)
                )
            )
            builder.words(self._filler(6, 10))

        date = dt.date(2015, 1, 1) + dt.timedelta(days=int(self.rng.integers(0, 1500)))
        return Article(
            article_uid=f"a{index:06d}",
            url=f"https://news.example.org/{date.year}/a{index:06d}",
            date=date,
            tokens=tuple(builder.tokens),
            quotations=tuple(builder.quotations),
            mentions=tuple(builder.mentions),
        )


def expected_edges(quote: _Quote) -> set[tuple[str, str]]:
    """Return the planted (speaker, target) pairs of a quotation."""
    if quote.candidates[0].surface != quote.speaker.full:
        return set()
    return {
        (quote.speaker.qid, item[0].qid)
        for item in quote.body
        if not isinstance(item, str) and item[0] != quote.speaker
    }


def _content_length(quote: _Quote) -> int:
    return sum(
        1 if isinstance(item, str) else len(item[1].split()) for item in quote.body
    )


def _write_config(directory: Path) -> None:
    inputs = {
        "articles": CORPUS_FILE,
        "alias_table": ALIASES_FILE,
        "snapshot": SNAPSHOT_FILE,
        "hierarchy": HIERARCHY_FILE,
        "defunct": DEFUNCT_FILE,
    }
    lines = [f"config_version = {CONFIG_VERSION}", "", "[inputs]"]
    lines.extend(f"{key} = {json.dumps(value)}" for key, value in inputs.items())
    (directory / CONFIG_FILE).write_text("\n".join(lines) + "\n", encoding="utf-8")


def generate_synthetic(
    config: PipelineConfig, size: int, seed: int | None = None
) -> SyntheticCorpus:
    """
    Generate a synthetic corpus with planted ground truth in ``config.out``.

    Args:
        config: Pipeline configuration; its ``out`` directory receives the files
            and its ``seed`` is used unless ``seed`` is given.
        size: Number of articles, at least 1.
        seed: Random seed.

    Returns:
        The generated corpus summary with expected edges and planted groups.

    """
    if size < 1:
        msg = "size must be at least 1"
        raise ValueError(msg)
    generator = _Generator(size, config.seed if seed is None else seed)
    directory = config.out
    directory.mkdir(parents=True, exist_ok=True)

    articles = [generator.article(i) for i in range(size)]
    write_jsonl(directory / CORPUS_FILE, articles)

    write_tsv(
        directory / ALIASES_FILE,
        (
            (surface, person.qid, "1.0")
            for person in generator.people
            for surface in (person.full, person.given, person.family)
        ),
    )
    write_jsonl(
        directory / SNAPSHOT_FILE,
        (
            _snapshot_record(generator.rng, person, i)
            for i, person in enumerate(generator.people)
        ),
    )
    write_tsv(directory / HIERARCHY_FILE, _HIERARCHY)
    write_tsv(directory / DEFUNCT_FILE, ((qid,) for qid in _DEFUNCT))
    _write_config(directory)

    corpus = SyntheticCorpus(directory, articles=size, quotes=len(generator.quotes))
    groups: dict[str, set[str]] = {}
    for duplicate, root in generator.roots.items():
        groups.setdefault(root, {root}).add(duplicate)
    for quote in generator.quotes.values():
        if quote.quote_id in generator.roots:
            continue
        if _content_length(quote) < 5:  # noqa: PLR2004
            continue
        corpus.edges |= {
            (speaker, target, quote.quote_id)
            for speaker, target in expected_edges(quote)
        }
    corpus.groups = sorted(tuple(sorted(members)) for members in groups.values())
    write_tsv(directory / TRUTH_EDGES_FILE, sorted(corpus.edges))
    write_tsv(
        directory / TRUTH_GROUPS_FILE,
        ((member, members[0]) for members in corpus.groups for member in members),
    )
    LOGGER.info(
        "Generated %d articles with %d quotations in %s",
        corpus.articles,
        corpus.quotes,
        directory,
    )
    return corpus
