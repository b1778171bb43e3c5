"""Territory masses: cited-side publication counts and the
citation-weighted citing-side counts.

The cited territory's mass is its publication count in the category.
The citing territory's mass weighs its publication counts across
categories by the frequency with which those categories cite the cited
category; with weights normalized to one, the weighted sum and the
weighted average coincide.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .model import (
    CategoryScheme,
    CitationEdge,
    PublicationRecord,
    TerritoryId,
    YearWindow,
)

WEIGHT_SUM_TOLERANCE = 1e-9


class ProfileError(ValueError):
    """A citing-category profile is undefined (no citing publications)."""


@dataclass(frozen=True)
class ScWeightProfile:
    """Frequency distribution of citing categories for one cited category."""

    cited_category: str
    weights: Mapping[str, float]

    def __post_init__(self) -> None:
        if not self.weights:
            raise ValueError(f"profile for {self.cited_category!r} has no weights")
        if any(w < 0 for w in self.weights.values()):
            raise ValueError(f"profile for {self.cited_category!r} has negative weights")
        total = sum(sorted(self.weights.values()))
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise ValueError(
                f"profile weights for {self.cited_category!r} sum to {total!r}, not 1"
            )

    def items(self) -> list[tuple[str, float]]:
        """Weights in canonical (category-sorted) order."""
        return sorted(self.weights.items())

    @staticmethod
    def from_tallies(cited_category: str, tallies: Mapping[str, int]) -> "ScWeightProfile":
        if not tallies:
            raise ProfileError(f"no citing publications for category {cited_category!r}")
        total = sum(tallies.values())
        return ScWeightProfile(
            cited_category, {c: n / total for c, n in sorted(tallies.items())}
        )


def citing_profile(
    cited_category: str,
    pubs: Sequence[PublicationRecord],
    edges: Sequence[CitationEdge],
    assignments: Mapping[str, TerritoryId],
    scheme: Optional[CategoryScheme] = None,
) -> ScWeightProfile:
    """Citing-category frequency profile of one cited category.

    ``assignments`` delimits the cited universe (publications with a
    present territory); every citation to a publication of that universe
    carrying ``cited_category`` tallies the full category set of its
    citing publication, whatever that publication's own assignability.
    """
    scheme = scheme or CategoryScheme.fine()
    pubs_by_id = {p.id: p for p in pubs}
    tallies: Counter[str] = Counter()
    for edge in edges:
        cited = pubs_by_id.get(edge.cited_id)
        if cited is None or edge.cited_id not in assignments:
            continue
        if cited_category not in scheme.effective(cited.categories):
            continue
        citing = pubs_by_id.get(edge.citing_id)
        if citing is None:
            continue
        for category in scheme.effective(citing.categories):
            tallies[category] += 1
    return ScWeightProfile.from_tallies(cited_category, tallies)


def build_profiles(
    pubs: Sequence[PublicationRecord],
    edges: Sequence[CitationEdge],
    assignments: Mapping[str, TerritoryId],
    scheme: Optional[CategoryScheme] = None,
) -> dict[str, ScWeightProfile]:
    """Profiles for every cited category with at least one citation.

    Single pass over the edges; equivalent to calling
    :func:`citing_profile` per category.
    """
    scheme = scheme or CategoryScheme.fine()
    pubs_by_id = {p.id: p for p in pubs}
    tallies: dict[str, Counter[str]] = defaultdict(Counter)
    for edge in edges:
        cited = pubs_by_id.get(edge.cited_id)
        if cited is None or edge.cited_id not in assignments:
            continue
        citing = pubs_by_id.get(edge.citing_id)
        if citing is None:
            continue
        citing_categories = scheme.effective(citing.categories)
        for cited_category in scheme.effective(cited.categories):
            tally = tallies[cited_category]
            for category in citing_categories:
                tally[category] += 1
    return {
        category: ScWeightProfile.from_tallies(category, tally)
        for category, tally in sorted(tallies.items())
    }


def cited_mass(
    territory: TerritoryId,
    category: str,
    pubs: Sequence[PublicationRecord],
    assignments: Mapping[str, TerritoryId],
    window: YearWindow,
    scheme: Optional[CategoryScheme] = None,
) -> float:
    """Publications of a territory in one category within the window."""
    scheme = scheme or CategoryScheme.fine()
    count = 0
    for pub in pubs:
        if assignments.get(pub.id) != territory or pub.year not in window:
            continue
        if category in scheme.effective(pub.categories):
            count += 1
    return float(count)


def weighted_mass(profile: ScWeightProfile, counts: Mapping[str, int]) -> float:
    """Profile-weighted sum of per-category publication counts."""
    return sum(weight * counts.get(category, 0) for category, weight in profile.items())


def citing_mass(
    territory: TerritoryId,
    profile: ScWeightProfile,
    pubs: Sequence[PublicationRecord],
    assignments: Mapping[str, TerritoryId],
    window: YearWindow,
    scheme: Optional[CategoryScheme] = None,
) -> float:
    """Weighted count of a territory's publications across the profile."""
    scheme = scheme or CategoryScheme.fine()
    counts: Counter[str] = Counter()
    for pub in pubs:
        if assignments.get(pub.id) != territory or pub.year not in window:
            continue
        for category in scheme.effective(pub.categories):
            counts[category] += 1
    return weighted_mass(profile, counts)


class MassIndex:
    """Precomputed (territory, category) publication counts.

    Built once per assignment side and window; lookups then make dyad
    mass computation O(profile) instead of O(corpus).  Matches the
    direct operations exactly, including summation order.
    """

    def __init__(
        self,
        pubs: Iterable[PublicationRecord],
        assignments: Mapping[str, TerritoryId],
        window: YearWindow,
        scheme: Optional[CategoryScheme] = None,
    ):
        scheme = scheme or CategoryScheme.fine()
        counts: dict[tuple[TerritoryId, str], int] = defaultdict(int)
        for pub in pubs:
            territory = assignments.get(pub.id)
            if territory is None or pub.year not in window:
                continue
            for category in scheme.effective(pub.categories):
                counts[(territory, category)] += 1
        self._counts = dict(counts)

    def count(self, territory: TerritoryId, category: str) -> int:
        return self._counts.get((territory, category), 0)

    def mass(self, territory: TerritoryId, category: str) -> float:
        return float(self.count(territory, category))

    def weighted(self, territory: TerritoryId, profile: ScWeightProfile) -> float:
        return sum(
            weight * self.count(territory, category) for category, weight in profile.items()
        )
