"""
Pydantic models for the quotegraph wire formats.

Every line-delimited record read or written by the pipeline is described here.
External payloads are validated with ``Model.model_validate``; records are
frozen once parsed so they can be handed across worker threads.
"""

from __future__ import annotations

import datetime as dt
import re
from enum import StrEnum
from typing import Annotated, Any, Self

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    StringConstraints,
    model_validator,
)

from .const import CLOSING_QUOTE, OPENING_QUOTE

_DATE_LITERAL = re.compile(r"^\+?(\d{1,4})(?:-(\d{1,2}))?(?:-(\d{1,2}))?(?:T.*)?$")


def parse_date_literal(value: Any) -> Any:
    """
    Parse a possibly partial date literal.

    Accepts ``YYYY``, ``YYYY-MM``, ``YYYY-MM-DD`` and Wikidata's
    ``+YYYY-MM-DDT00:00:00Z`` form. Missing or zero month/day components are
    replaced by 1, i.e. the earliest date meeting the literal.

    Args:
        value: Raw value; anything that is not a string is passed through.

    Returns:
        A ``datetime.date`` for string input, the value unchanged otherwise.

    """
    if not isinstance(value, str):
        return value
    match = _DATE_LITERAL.match(value.strip())
    if match is None:
        msg = f"invalid date literal {value!r}"
        raise ValueError(msg)
    year, month, day = match.groups()
    return dt.date(int(year), int(month or 0) or 1, int(day or 0) or 1)


Qid = Annotated[str, StringConstraints(pattern=r"^Q\d+$")]
DateLiteral = Annotated[dt.date, BeforeValidator(parse_date_literal)]


class DatePrecision(StrEnum):
    """Precision of a Wikidata time value."""

    DAY = "day"
    MONTH = "month"
    YEAR = "year"


class Gender(StrEnum):
    """Gender category derived from P21."""

    FEMALE = "female"
    MALE = "male"
    OTHER = "other"
    UNKNOWN = "unknown"


class SpeakerCandidate(BaseModel):
    """A speaker name proposed for one quotation occurrence."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    surface: str
    start_token: int | None = Field(None, alias="startToken", ge=0)
    end_token: int | None = Field(None, alias="endToken")
    probability: float = Field(ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_span(self) -> Self:
        start, end = self.start_token, self.end_token
        if (start is None) != (end is None):
            msg = f"candidate {self.surface!r} needs both startToken and endToken"
            raise ValueError(msg)
        if start is not None and end is not None and start >= end:
            msg = f"empty candidate span [{start}, {end})"
            raise ValueError(msg)
        return self


class QuoteOccurrence(BaseModel):
    """A quotation as it occurs in one article."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    quote_id: str = Field(alias="quoteID", min_length=1)
    start_index: int = Field(alias="startTokenIndex", gt=0)
    candidates: tuple[SpeakerCandidate, ...] = ()


class MentionSpan(BaseModel):
    """A named entity mention, as a half-open token span."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    start: int = Field(alias="startToken", ge=0)
    end: int = Field(alias="endTokenExclusive")
    surface: str
    entity_type: str = Field("PERSON", alias="entityType")

    @model_validator(mode="after")
    def _check_span(self) -> Self:
        if self.start >= self.end:
            msg = f"empty mention span [{self.start}, {self.end})"
            raise ValueError(msg)
        return self


class Article(BaseModel):
    """A tokenized news article with quotation offsets and mention spans."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    article_uid: str = Field(alias="articleUID", min_length=1)
    url: str
    date: dt.date
    tokens: tuple[str, ...]
    quotations: tuple[QuoteOccurrence, ...] = ()
    mentions: tuple[MentionSpan, ...] = ()

    @model_validator(mode="after")
    def _check_offsets(self) -> Self:
        n_tokens = len(self.tokens)
        previous = -1
        for quote in self.quotations:
            if quote.start_index >= n_tokens:
                msg = f"quotation {quote.quote_id} starts past the last token"
                raise ValueError(msg)
            if quote.start_index <= previous:
                msg = f"quotation {quote.quote_id} start is not increasing"
                raise ValueError(msg)
            if self.tokens[quote.start_index - 1] != OPENING_QUOTE:
                msg = f"quotation {quote.quote_id} is not preceded by {OPENING_QUOTE}"
                raise ValueError(msg)
            previous = quote.start_index
            for candidate in quote.candidates:
                if candidate.end_token is not None and candidate.end_token > n_tokens:
                    msg = (
                        f"candidate {candidate.surface!r} of quotation "
                        f"{quote.quote_id} exceeds {n_tokens} tokens"
                    )
                    raise ValueError(msg)
        for mention in self.mentions:
            if mention.end > n_tokens:
                msg = f"mention {mention.surface!r} exceeds {n_tokens} tokens"
                raise ValueError(msg)
            if " ".join(self.tokens[mention.start : mention.end]) != mention.surface:
                msg = f"mention {mention.surface!r} does not match its token span"
                raise ValueError(msg)
        return self


class PartyMembership(BaseModel):
    """A P102 statement with its optional qualifiers."""

    model_config = ConfigDict(frozen=True)

    party: Qid
    start: DateLiteral | None = None
    end: DateLiteral | None = None
    precision: DatePrecision = DatePrecision.DAY

    @model_validator(mode="after")
    def _check_interval(self) -> Self:
        if self.start is not None and self.end is not None and self.start > self.end:
            msg = f"membership of {self.party} ends before it starts"
            raise ValueError(msg)
        return self


class WikidataSnapshotRecord(BaseModel):
    """The subset of a Wikidata item used for node attributes."""

    model_config = ConfigDict(frozen=True)

    qid: Qid
    label: str = ""
    birth_dates: tuple[DateLiteral, ...] = ()
    nationalities: tuple[Qid, ...] = ()
    genders: tuple[Qid, ...] = ()
    party_memberships: tuple[PartyMembership, ...] = ()
    occupations: tuple[Qid, ...] = ()
    given_names: tuple[str, ...] = ()
    family_names: tuple[str, ...] = ()


class QuoteContext(BaseModel):
    """One preprocessed occurrence of a quotation."""

    model_config = ConfigDict(frozen=True)

    quote_id: str
    article_uid: str
    url: str
    date: dt.date
    tokens: tuple[str, ...]
    candidates: tuple[SpeakerCandidate, ...] = ()
    mentions: tuple[str, ...] = ()


class QuoteRecord(BaseModel):
    """A unique quotation after grouping, with every context it appears in."""

    model_config = ConfigDict(frozen=True)

    quote_id: str
    tokens: tuple[str, ...]
    members: tuple[str, ...]
    contexts: tuple[QuoteContext, ...]

    @property
    def earliest_date(self) -> dt.date:
        """Return the earliest context date."""
        return min(context.date for context in self.contexts)

    @property
    def urls(self) -> frozenset[str]:
        """Return the URLs of all articles the quotation appears in."""
        return frozenset(context.url for context in self.contexts)


class EntityProfile(BaseModel):
    """Biographic attributes of a node."""

    model_config = ConfigDict(frozen=True)

    qid: Qid
    label: str = ""
    birth_date: dt.date | None = None
    nationalities: tuple[str, ...] = ()
    gender: Gender = Gender.UNKNOWN
    party_memberships: tuple[PartyMembership, ...] = ()
    domains: tuple[str, ...] = ()
    given_names: tuple[str, ...] = ()
    family_names: tuple[str, ...] = ()


class Edge(BaseModel):
    """A directed speaker -> mentioned person edge for one quotation."""

    model_config = ConfigDict(frozen=True)

    speaker_qid: str
    target_qid: str
    quote_id: str
    earliest_date: dt.date
    article_urls: tuple[str, ...] = ()
    surface: str = ""

    @property
    def key(self) -> tuple[str, str, str]:
        """Return the (speaker, target, quote) triplet identifying the edge."""
        return (self.speaker_qid, self.target_qid, self.quote_id)
