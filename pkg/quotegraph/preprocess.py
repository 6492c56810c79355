"""
Per-article preprocessing of quotations and person mentions.

Short quotations are discarded, quotation spans are closed at the first
closing mark, spurious mentions are filtered out and the remaining person
mentions are assigned to the quotations they appear in.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, fields
from typing import TYPE_CHECKING, Self

from pydantic import BaseModel, ConfigDict, Field

from .const import (
    CLOSING_QUOTE,
    DEFAULT_MIN_SHARED_SUBSTRING,
    DEFAULT_MIN_UNIQUE_WORDS,
    LOGGER,
    PERSON_ENTITY_TYPE,
)
from .models import Article, MentionSpan, QuoteContext, QuoteOccurrence
from .stopwords import ENGLISH_STOPWORDS

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence


class PreprocessConfig(BaseModel):
    """Thresholds and word lists for preprocessing."""

    model_config = ConfigDict(frozen=True)

    min_unique_words: int = Field(DEFAULT_MIN_UNIQUE_WORDS, ge=1)
    min_shared_substring: int = Field(DEFAULT_MIN_SHARED_SUBSTRING, ge=2)
    stopwords: frozenset[str] = ENGLISH_STOPWORDS


@dataclass(frozen=True)
class NormalizedTokenString:
    """Tokens joined by single spaces, without leading or trailing space."""

    value: str

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> Self:
        """Join tokens with single spaces, collapsing any inner whitespace."""
        return cls(" ".join(" ".join(tokens).split()))

    @classmethod
    def from_text(cls, text: str) -> Self:
        """Normalize free text the same way as a token sequence."""
        return cls(" ".join(text.split()))

    def __contains__(self, other: object) -> bool:
        """Return whether ``other`` occurs in this string on token boundaries."""
        if not isinstance(other, NormalizedTokenString) or not other.value:
            return False
        return f" {other.value} " in f" {self.value} "

    def __str__(self) -> str:
        """Return the normalized text."""
        return self.value


@dataclass
class PreprocessStats:
    """Counters for the preprocessing stage."""

    articles: int = 0
    quotations: int = 0
    unterminated: int = 0
    short: int = 0
    spurious_mentions: int = 0
    contexts: int = 0

    def update(self, other: PreprocessStats) -> None:
        """Add the counters of ``other`` to this instance."""
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))

    def as_dict(self) -> dict[str, int]:
        """Return the counters for the run summary."""
        return {f.name: getattr(self, f.name) for f in fields(self)}


def is_punctuation(token: str) -> bool:
    """Return True if the token contains no letter and no digit."""
    return not any(unicodedata.category(char)[0] in "LN" for char in token)


def content_words(tokens: Iterable[str]) -> list[str]:
    """
    Return the case-folded words of a token sequence.

    Punctuation-only tokens are dropped; order and duplicates are preserved.
    """
    return [token.casefold() for token in tokens if not is_punctuation(token)]


def is_short_quotation(tokens: Iterable[str], cfg: PreprocessConfig) -> bool:
    """Return True if the quotation has fewer than l_q unique content words."""
    return len(set(content_words(tokens))) < cfg.min_unique_words


def find_quotation_end(tokens: Sequence[str], start: int) -> int | None:
    """
    Find the exclusive end of a quotation.

    The quotation runs from ``start`` to the first closing mark at or after
    it; the first closing mark is assumed not to close an inner quotation.

    Returns:
        The index of the closing mark, or None if the quotation is unterminated.

    """
    for index in range(start, len(tokens)):
        if tokens[index] == CLOSING_QUOTE:
            return index
    return None


def is_spurious_token(token: str, stopwords: frozenset[str]) -> bool:
    """Return True for one-character, non-alphabetical and stopword tokens."""
    return (
        len(token) == 1
        or not any(char.isalpha() for char in token)
        or token.casefold() in stopwords
    )


def filter_spurious_mentions(
    mentions: Iterable[MentionSpan], cfg: PreprocessConfig
) -> list[MentionSpan]:
    """Keep mentions with at least one token that is not spurious."""
    return [
        mention
        for mention in mentions
        if any(
            not is_spurious_token(token, cfg.stopwords)
            for token in mention.surface.split()
        )
    ]


def mentions_in_quotation(
    article: Article,
    quote: QuoteOccurrence,
    end: int,
    mentions: Iterable[MentionSpan] | None = None,
) -> list[MentionSpan]:
    """
    Return the mentions that appear inside one quotation.

    A mention whose token span lies within the quotation span is assigned
    directly. A mention whose span crosses the quotation boundary or runs past
    the article is assigned when its text occurs in the quotation text.

    Args:
        article: The article holding the quotation.
        quote: The quotation occurrence.
        end: Exclusive end of the quotation, from ``find_quotation_end``.
        mentions: Mentions to consider; defaults to all article mentions.

    """
    start = quote.start_index
    n_tokens = len(article.tokens)
    quote_text = NormalizedTokenString.from_tokens(article.tokens[start:end])
    assigned: list[MentionSpan] = []
    for mention in article.mentions if mentions is None else mentions:
        out_of_bounds = mention.end > n_tokens
        if start <= mention.start and mention.end <= end and not out_of_bounds:
            assigned.append(mention)
            continue
        crosses = mention.start < end and mention.end > start
        if (crosses or out_of_bounds) and NormalizedTokenString.from_text(
            mention.surface
        ) in quote_text:
            assigned.append(mention)
    return assigned


def preprocess_article(
    article: Article, cfg: PreprocessConfig
) -> tuple[list[QuoteContext], PreprocessStats]:
    """
    Run every preprocessing step on one article.

    Returns:
        The surviving quotation contexts, in article order, and the counters.

    """
    stats = PreprocessStats(articles=1)
    persons = [m for m in article.mentions if m.entity_type == PERSON_ENTITY_TYPE]
    mentions = filter_spurious_mentions(persons, cfg)
    stats.spurious_mentions = len(persons) - len(mentions)

    contexts: list[QuoteContext] = []
    for quote in article.quotations:
        stats.quotations += 1
        end = find_quotation_end(article.tokens, quote.start_index)
        if end is None:
            LOGGER.debug(
                "Quotation %s in %s is unterminated",
                quote.quote_id,
                article.article_uid,
            )
            stats.unterminated += 1
            continue
        tokens = article.tokens[quote.start_index : end]
        if is_short_quotation(tokens, cfg):
            stats.short += 1
            continue
        in_quote = mentions_in_quotation(article, quote, end, mentions)
        contexts.append(
            QuoteContext(
                quote_id=quote.quote_id,
                article_uid=article.article_uid,
                url=article.url,
                date=article.date,
                tokens=tokens,
                candidates=quote.candidates,
                mentions=tuple(
                    NormalizedTokenString.from_text(m.surface).value for m in in_quote
                ),
            )
        )
    stats.contexts = len(contexts)
    return contexts, stats
