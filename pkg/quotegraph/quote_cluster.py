"""Grouping of near-duplicate quotations by shared word windows."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .const import LOGGER
from .models import QuoteContext, QuoteRecord
from .preprocess import PreprocessConfig, content_words

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator, Mapping, Sequence


@dataclass(frozen=True)
class QuoteShingle:
    """A window of l_s consecutive content words from one quotation."""

    words: tuple[str, ...]
    source_quote: str


@dataclass(frozen=True)
class QuoteGroup:
    """Quotations sharing at least one shingle, directly or transitively."""

    members: frozenset[str]
    representative: str


@dataclass
class ClusterStats:
    """Counters for the clustering stage."""

    quotes: int = 0
    groups: int = 0
    merged: int = 0

    def as_dict(self) -> dict[str, int]:
        """Return the counters for the run summary."""
        return {"quotes": self.quotes, "groups": self.groups, "merged": self.merged}


class DisjointSet[T]:
    """Union-find with path halving and union by size."""

    def __init__(self) -> None:
        """Initialize an empty forest."""
        self._parent: dict[T, T] = {}
        self._size: dict[T, int] = {}

    def __len__(self) -> int:
        """Return the number of elements."""
        return len(self._parent)

    def __contains__(self, item: object) -> bool:
        """Return whether ``item`` was added."""
        return item in self._parent

    def add(self, item: T) -> None:
        """Add ``item`` as a singleton set, if not present yet."""
        if item not in self._parent:
            self._parent[item] = item
            self._size[item] = 1

    def find(self, item: T) -> T:
        """Return the root of the set containing ``item``."""
        parent = self._parent
        while parent[item] != item:
            parent[item] = parent[parent[item]]
            item = parent[item]
        return item

    def union(self, a: T, b: T) -> None:
        """Merge the sets containing ``a`` and ``b``."""
        root_a, root_b = self.find(a), self.find(b)
        if root_a == root_b:
            return
        if self._size[root_a] < self._size[root_b]:
            root_a, root_b = root_b, root_a
        self._parent[root_b] = root_a
        self._size[root_a] += self._size.pop(root_b)

    def itersets(self) -> Iterator[set[T]]:
        """Yield every set of the partition."""
        classes: defaultdict[T, set[T]] = defaultdict(set)
        for item in self._parent:
            classes[self.find(item)].add(item)
        yield from classes.values()


def shingles(
    tokens: Iterable[str], cfg: PreprocessConfig, quote_id: str = ""
) -> set[QuoteShingle]:
    """Return all windows of l_s consecutive content words of a quotation."""
    words = content_words(tokens)
    width = cfg.min_shared_substring
    return {
        QuoteShingle(tuple(words[i : i + width]), quote_id)
        for i in range(len(words) - width + 1)
    }


def select_representative(word_counts: Mapping[str, int]) -> str:
    """
    Elect the representative of a group.

    Args:
        word_counts: Content-word count of every group member.

    Returns:
        The longest member; ties go to the smallest quote id.

    """
    return min(word_counts, key=lambda quote_id: (-word_counts[quote_id], quote_id))


def group_quotations(
    quotes: Mapping[str, Sequence[str]], cfg: PreprocessConfig
) -> list[QuoteGroup]:
    """
    Partition quotations into groups of near-duplicates.

    Two quotations are linked when they share an identical shingle; groups
    are the connected components of that relation.

    Args:
        quotes: Token sequence of every quotation, keyed by quote id.
        cfg: Preprocessing configuration providing l_s.

    Returns:
        The groups, sorted by representative.

    """
    forest: DisjointSet[str] = DisjointSet()
    owners: dict[tuple[str, ...], str] = {}
    for quote_id in sorted(quotes):
        forest.add(quote_id)
        for shingle in shingles(quotes[quote_id], cfg, quote_id):
            owner = owners.setdefault(shingle.words, quote_id)
            if owner != quote_id:
                forest.union(owner, quote_id)

    groups = []
    for members in forest.itersets():
        counts = {q: len(content_words(quotes[q])) for q in members}
        groups.append(QuoteGroup(frozenset(members), select_representative(counts)))
    groups.sort(key=lambda group: group.representative)
    return groups


def _context_order(context: QuoteContext) -> tuple:
    return (context.date, context.article_uid, context.quote_id)


def quote_texts(contexts: Iterable[QuoteContext]) -> dict[str, tuple[str, ...]]:
    """Return each quotation's text, taken from its earliest context."""
    earliest: dict[str, QuoteContext] = {}
    for context in contexts:
        current = earliest.get(context.quote_id)
        if current is None or _context_order(context) < _context_order(current):
            earliest[context.quote_id] = context
    return {quote_id: context.tokens for quote_id, context in earliest.items()}


def merge_group_contexts(
    group: QuoteGroup,
    contexts_by_quote: Mapping[str, Sequence[QuoteContext]],
    texts: Mapping[str, Sequence[str]],
) -> QuoteRecord:
    """Build the record of a group: representative text, all member contexts."""
    contexts = sorted(
        (context for member in group.members for context in contexts_by_quote[member]),
        key=_context_order,
    )
    return QuoteRecord(
        quote_id=group.representative,
        tokens=tuple(texts[group.representative]),
        members=tuple(sorted(group.members)),
        contexts=tuple(contexts),
    )


def cluster_contexts(
    contexts: Iterable[QuoteContext], cfg: PreprocessConfig
) -> tuple[list[QuoteRecord], list[QuoteGroup], ClusterStats]:
    """
    Group all contexts into unique quotation records.

    Returns:
        Records and groups, both sorted by representative quote id, and the
        stage counters.

    """
    contexts_by_quote: defaultdict[str, list[QuoteContext]] = defaultdict(list)
    for context in contexts:
        contexts_by_quote[context.quote_id].append(context)
    texts = quote_texts(c for group in contexts_by_quote.values() for c in group)

    groups = group_quotations(texts, cfg)
    records = [merge_group_contexts(g, contexts_by_quote, texts) for g in groups]
    stats = ClusterStats(
        quotes=len(texts), groups=len(groups), merged=len(texts) - len(groups)
    )
    LOGGER.info(
        "Grouped %d quotations into %d unique quotations", stats.quotes, stats.groups
    )
    return records, groups, stats
