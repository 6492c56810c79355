"""Classification of how quoted speakers refer to people, by gender."""

from __future__ import annotations

import re
from collections import Counter, defaultdict
from dataclasses import dataclass
from enum import StrEnum
from typing import TYPE_CHECKING, Any

from .const import LOGGER
from .models import EntityProfile, Gender

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping

    from .models import Edge


class ReferenceForm(StrEnum):
    """The part of a person's name a mention uses."""

    FIRST = "first"
    LAST = "last"
    FULL = "full"
    OTHER = "other"


NAMED_FORMS = (ReferenceForm.FIRST, ReferenceForm.LAST, ReferenceForm.FULL)


def _contains_word(text: str, name: str) -> bool:
    return re.search(rf"(?<!\w){re.escape(name)}(?!\w)", text) is not None


def _normalize(text: str) -> str:
    return " ".join(text.casefold().split())


def classify_reference(surface: str, profile: EntityProfile) -> ReferenceForm:
    """
    Classify a mention of a person by the name parts it contains.

    Name parts and surface are case-folded; a part matches only on word
    boundaries.
    """
    text = _normalize(surface)
    given = any(
        _contains_word(text, _normalize(n)) for n in profile.given_names if n.strip()
    )
    family = any(
        _contains_word(text, _normalize(n)) for n in profile.family_names if n.strip()
    )
    if given and family:
        return ReferenceForm.FULL
    if given:
        return ReferenceForm.FIRST
    if family:
        return ReferenceForm.LAST
    return ReferenceForm.OTHER


@dataclass(frozen=True)
class ReferenceRow:
    """One classified reference of an edge target."""

    quote_id: str
    target_qid: str
    surface: str
    form: ReferenceForm
    gender: Gender

    def as_row(self) -> tuple[str, str, str, str, str]:
        """Return the tab-separated table row."""
        return (
            self.quote_id,
            self.target_qid,
            self.surface,
            self.form.value,
            self.gender.value,
        )


def classify_edges(
    edges: Iterable[Edge], profiles: Mapping[str, EntityProfile]
) -> list[ReferenceRow]:
    """Classify the winning surface of every edge; edges without one are skipped."""
    rows = []
    for edge in edges:
        if not edge.surface:
            continue
        profile = profiles.get(edge.target_qid) or EntityProfile(qid=edge.target_qid)
        rows.append(
            ReferenceRow(
                quote_id=edge.quote_id,
                target_qid=edge.target_qid,
                surface=edge.surface,
                form=classify_reference(edge.surface, profile),
                gender=profile.gender,
            )
        )
    return rows


@dataclass
class NameBiasSummary:
    """Reference counts and first-name rates per gender."""

    counts: dict[str, dict[str, int]]
    rates: dict[str, float]
    ratio: float | None

    def as_dict(self) -> dict[str, Any]:
        """Return the summary document."""
        return {"counts": self.counts, "rates": self.rates, "ratio": self.ratio}


def summarize_references(rows: Iterable[ReferenceRow]) -> NameBiasSummary:
    """
    Compute the first-name rate of every gender and the female/male ratio.

    A gender's rate is its first-name references over its first, last and
    full references; genders with none of those have no rate. The ratio is
    absent when either rate is missing or the male rate is zero.
    """
    counts: defaultdict[Gender, Counter[ReferenceForm]] = defaultdict(Counter)
    for row in rows:
        counts[row.gender][row.form] += 1

    rates: dict[str, float] = {}
    named: dict[Gender, tuple[int, int]] = {}
    for gender, forms in counts.items():
        classified = sum(forms[form] for form in NAMED_FORMS)
        if classified:
            named[gender] = (forms[ReferenceForm.FIRST], classified)
            rates[gender.value] = forms[ReferenceForm.FIRST] / classified

    ratio = None
    female = named.get(Gender.FEMALE)
    male = named.get(Gender.MALE)
    if female and male and male[0]:
        ratio = (female[0] * male[1]) / (female[1] * male[0])

    LOGGER.info("First-name rates by gender: %s (ratio %s)", rates, ratio)
    return NameBiasSummary(
        counts={
            gender.value: {form.value: forms[form] for form in ReferenceForm}
            for gender, forms in sorted(counts.items())
        },
        rates=dict(sorted(rates.items())),
        ratio=ratio,
    )


def first_name_rates(
    edges: Iterable[Edge], profiles: Mapping[str, EntityProfile]
) -> NameBiasSummary:
    """Classify every edge target reference and summarize it by gender."""
    return summarize_references(classify_edges(edges, profiles))
