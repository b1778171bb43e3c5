"""Prevalent-territory assignment of publications.

A publication is "made in" the territory that holds the majority of its
author affiliations (cited side) or of its address list (citing side).
With the strict rule a majority means more than half of the evidence;
the plurality rule accepts a unique maximum.  No prevalent territory
means the publication is excluded, with a reason code kept for audit.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

from .model import (
    MajorityRule,
    PublicationRecord,
    TerritoryId,
    TerritoryKind,
)


class ExclusionReason(str, Enum):
    ASSIGNED = "assigned"
    EMPTY_EVIDENCE = "empty-evidence"
    TIE = "tie"
    NO_MAJORITY = "no-majority"


@dataclass(frozen=True)
class TerritoryAssignment:
    """Outcome of the prevalence criterion for one publication."""

    pub_id: str
    level: TerritoryKind
    territory: Optional[TerritoryId]
    reason: ExclusionReason

    def __post_init__(self) -> None:
        if self.territory is not None:
            if self.territory.kind is not self.level:
                raise ValueError(
                    f"assigned territory kind {self.territory.kind} does not match level {self.level}"
                )
            if self.reason is not ExclusionReason.ASSIGNED:
                raise ValueError("present territory requires reason 'assigned'")

    @property
    def assigned(self) -> bool:
        return self.territory is not None


def prevalent(
    counts: Mapping[TerritoryId, int], rule: MajorityRule = MajorityRule.STRICT
) -> Optional[TerritoryId]:
    """Territory prevailing in a non-empty evidence tally, if any.

    Strict rule: the count must exceed half the total.  Plurality rule:
    a unique maximum wins; ties yield no territory under either rule.
    """
    if not counts:
        raise ValueError("counts must be non-empty")
    if any(c <= 0 for c in counts.values()):
        raise ValueError("counts must be positive")
    total = sum(counts.values())
    best_count = max(counts.values())
    leaders = [t for t, c in counts.items() if c == best_count]
    if len(leaders) != 1:
        return None
    leader = leaders[0]
    if rule is MajorityRule.STRICT and 2 * best_count <= total:
        return None
    return leader


def project(territory: TerritoryId, level: TerritoryKind) -> TerritoryId:
    """Project a territory to the requested level.

    Municipalities collapse to their country at country level; country
    evidence stays a country at either level (it can never win a
    municipality-level assignment but still weighs in the denominator).
    """
    if level is TerritoryKind.COUNTRY and territory.kind is TerritoryKind.MUNICIPALITY:
        assert territory.country_of is not None
        return TerritoryId(TerritoryKind.COUNTRY, territory.country_of)
    return territory


def _assign(
    pub_id: str,
    evidence: Sequence[TerritoryId],
    level: TerritoryKind,
    rule: MajorityRule,
) -> TerritoryAssignment:
    if not evidence:
        return TerritoryAssignment(pub_id, level, None, ExclusionReason.EMPTY_EVIDENCE)
    counts = Counter(project(t, level) for t in evidence)
    winner = prevalent(counts, rule)
    if winner is not None and winner.kind is level:
        return TerritoryAssignment(pub_id, level, winner, ExclusionReason.ASSIGNED)
    best = max(counts.values())
    tied = sum(1 for c in counts.values() if c == best) > 1
    reason = ExclusionReason.TIE if tied else ExclusionReason.NO_MAJORITY
    return TerritoryAssignment(pub_id, level, None, reason)


def assign_cited(
    pub: PublicationRecord,
    level: TerritoryKind,
    rule: MajorityRule = MajorityRule.STRICT,
) -> TerritoryAssignment:
    """Assign by the cited-side convention (author affiliations)."""
    return _assign(pub.id, pub.author_territories, level, rule)


def assign_citing(
    pub: PublicationRecord,
    level: TerritoryKind,
    rule: MajorityRule = MajorityRule.STRICT,
) -> TerritoryAssignment:
    """Assign by the citing-side convention (address list, duplicates kept)."""
    return _assign(pub.id, pub.address_territories, level, rule)


def convention_agreement(
    pubs: Sequence[PublicationRecord],
    level: TerritoryKind,
    rule: MajorityRule = MajorityRule.STRICT,
) -> float:
    """Fraction of publications whose two conventions pick the same territory.

    Every input publication must carry both evidence lists; publications
    excluded by either convention drop out of the denominator.
    """
    if not pubs:
        raise ValueError("convention_agreement needs at least one publication")
    kept = 0
    agree = 0
    for pub in pubs:
        if not pub.author_territories or not pub.address_territories:
            raise ValueError(f"publication {pub.id!r} lacks one of the evidence lists")
        by_authors = assign_cited(pub, level, rule)
        by_addresses = assign_citing(pub, level, rule)
        if not by_authors.assigned or not by_addresses.assigned:
            continue
        kept += 1
        if by_authors.territory == by_addresses.territory:
            agree += 1
    if kept == 0:
        raise ValueError("no publication assignable under both conventions")
    return agree / kept


@dataclass(frozen=True)
class AssignmentIndex:
    """Per-publication assignments for both conventions at both levels."""

    cited_municipality: Mapping[str, TerritoryAssignment]
    cited_country: Mapping[str, TerritoryAssignment]
    citing_municipality: Mapping[str, TerritoryAssignment]
    citing_country: Mapping[str, TerritoryAssignment]

    def territories(self, side: str, level: TerritoryKind) -> dict[str, TerritoryId]:
        """Present-only map pub_id -> territory for one side and level."""
        table: Mapping[str, TerritoryAssignment] = {
            ("cited", TerritoryKind.MUNICIPALITY): self.cited_municipality,
            ("cited", TerritoryKind.COUNTRY): self.cited_country,
            ("citing", TerritoryKind.MUNICIPALITY): self.citing_municipality,
            ("citing", TerritoryKind.COUNTRY): self.citing_country,
        }[(side, level)]
        return {pid: a.territory for pid, a in table.items() if a.territory is not None}


def assign_corpus(
    pubs: Iterable[PublicationRecord],
    rule: MajorityRule = MajorityRule.STRICT,
) -> AssignmentIndex:
    """Assign every publication under both conventions at both levels."""
    cited_mun: dict[str, TerritoryAssignment] = {}
    cited_cty: dict[str, TerritoryAssignment] = {}
    citing_mun: dict[str, TerritoryAssignment] = {}
    citing_cty: dict[str, TerritoryAssignment] = {}
    for pub in pubs:
        cited_mun[pub.id] = assign_cited(pub, TerritoryKind.MUNICIPALITY, rule)
        cited_cty[pub.id] = assign_cited(pub, TerritoryKind.COUNTRY, rule)
        citing_mun[pub.id] = assign_citing(pub, TerritoryKind.MUNICIPALITY, rule)
        citing_cty[pub.id] = assign_citing(pub, TerritoryKind.COUNTRY, rule)
    return AssignmentIndex(cited_mun, cited_cty, citing_mun, citing_cty)
