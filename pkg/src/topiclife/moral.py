"""Moral-foundation scoring from a strength lexicon.

Each lexicon entry maps a lemma to one of the five foundations (care,
fairness, loyalty, authority, purity) with a strength on a 1 to 9 scale.
A document's score per foundation is the mean strength over matched token
occurrences; a foundation with no match stays absent rather than being
imputed, and absent scores are excluded from every aggregate.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .errors import DataError


class Foundation(str, Enum):
    CARE = "care"
    FAIRNESS = "fairness"
    LOYALTY = "loyalty"
    AUTHORITY = "authority"
    PURITY = "purity"


FOUNDATIONS = (
    Foundation.CARE,
    Foundation.FAIRNESS,
    Foundation.LOYALTY,
    Foundation.AUTHORITY,
    Foundation.PURITY,
)

STRENGTH_MIN = 1.0
STRENGTH_MAX = 9.0


@dataclass
class MoralLexicon:
    """Lemma to (foundation, strength) mapping; one strength per pair."""

    entries: dict[str, dict[Foundation, float]] = field(default_factory=dict)

    def __len__(self) -> int:
        return sum(len(v) for v in self.entries.values())


@dataclass
class MoralProfile:
    """Per-foundation optional score plus the number of matched occurrences."""

    scores: dict[Foundation, float] = field(default_factory=dict)
    matched: dict[Foundation, int] = field(default_factory=dict)

    def get(self, foundation: Foundation) -> float | None:
        return self.scores.get(foundation)


def load_lexicon(path) -> MoralLexicon:
    """Read a ``lemma<TAB>foundation<TAB>strength`` file.

    Strengths outside [1, 9] and unknown foundation names are fatal with
    the line number; a duplicate (lemma, foundation) pair keeps the last
    value with a warning.
    """
    entries: dict[str, dict[Foundation, float]] = {}
    duplicates = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataError(f"lexicon line {lineno}: expected 'lemma<TAB>foundation<TAB>strength'")
            lemma, name, raw_strength = (p.strip() for p in parts)
            try:
                foundation = Foundation(name.lower())
            except ValueError:
                raise DataError(f"lexicon line {lineno}: unknown foundation {name!r}") from None
            try:
                strength = float(raw_strength)
            except ValueError:
                raise DataError(f"lexicon line {lineno}: non-numeric strength {raw_strength!r}") from None
            if not (STRENGTH_MIN <= strength <= STRENGTH_MAX):
                raise DataError(
                    f"lexicon line {lineno}: strength {strength} outside [{STRENGTH_MIN}, {STRENGTH_MAX}]"
                )
            bucket = entries.setdefault(lemma.lower(), {})
            if foundation in bucket:
                duplicates += 1
            bucket[foundation] = strength
    if duplicates:
        warnings.warn(f"{duplicates} duplicate (lemma, foundation) pair(s); last wins")
    return MoralLexicon(entries=entries)


def score_document(tokens: Iterable[str], lexicon: MoralLexicon) -> MoralProfile:
    """Mean strength per foundation over matched token occurrences.

    A lemma appearing twice contributes twice. Foundations without a match
    are absent from the profile.
    """
    totals: dict[Foundation, float] = {}
    counts: dict[Foundation, int] = {}
    for token in tokens:
        hit = lexicon.entries.get(token)
        if not hit:
            continue
        for foundation, strength in hit.items():
            totals[foundation] = totals.get(foundation, 0.0) + strength
            counts[foundation] = counts.get(foundation, 0) + 1
    scores = {f: totals[f] / counts[f] for f in totals}
    return MoralProfile(scores=scores, matched=counts)


@dataclass
class ScoredDocument:
    """A moral profile with the grouping metadata the analyses need."""

    doc_id: str
    party: str
    month: str
    longevity_class: str | None
    profile: MoralProfile


def aggregate_scores(
    scored: Iterable[ScoredDocument],
    group_key: str,
) -> dict[str, dict[Foundation, float]]:
    """Per-group mean of present scores for each foundation.

    ``group_key`` is one of ``party``, ``longevity_class`` or ``month``.
    Documents whose key is missing (for example no topic, hence no
    longevity class) are skipped; a group with no present score for a
    foundation simply lacks that entry.
    """
    if group_key not in ("party", "longevity_class", "month"):
        raise ValueError(f"unknown group key {group_key!r}")
    sums: dict[str, dict[Foundation, float]] = {}
    counts: dict[str, dict[Foundation, int]] = {}
    for item in scored:
        key = getattr(item, group_key)
        if key is None:
            continue
        for foundation, value in item.profile.scores.items():
            sums.setdefault(key, {}).setdefault(foundation, 0.0)
            counts.setdefault(key, {}).setdefault(foundation, 0)
            sums[key][foundation] += value
            counts[key][foundation] += 1
    result: dict[str, dict[Foundation, float]] = {}
    for key in sums:
        result[key] = {f: sums[key][f] / counts[key][f] for f in sums[key]}
    if not result:
        warnings.warn("no present scores in any group")
    return result
