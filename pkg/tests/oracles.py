"""Independent oracle implementations used by the tests.

Deliberately written from scratch with different algorithms than the
package: normal equations solved by Gaussian elimination (the package
uses QR), pure-Python sorted-array statistics (the package uses numpy),
and direct brute-force re-derivations of aggregates.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Mapping, Optional, Sequence

from citeflow import territory
from citeflow.ingest import Gazetteer
from citeflow.model import (
    AnalysisConfig,
    CategoryScheme,
    CitationEdge,
    Context,
    Continent,
    MajorityRule,
    PublicationRecord,
    TerritoryId,
    TerritoryKind,
)


def ols_normal_equations(rows: Sequence) -> list[float]:
    """Solve the least-squares problem via X'X b = X'y and elimination."""
    k = 4

    def regressor(row, index: int) -> float:
        return 1.0 if index == 0 else (row.x1, row.x2, row.x3)[index - 1]

    augmented = [
        [
            math.fsum(regressor(r, a) * regressor(r, b) for r in rows)
            for b in range(k)
        ]
        + [math.fsum(regressor(r, a) * r.y for r in rows)]
        for a in range(k)
    ]
    for col in range(k):
        pivot = max(range(col, k), key=lambda i: abs(augmented[i][col]))
        augmented[col], augmented[pivot] = augmented[pivot], augmented[col]
        assert augmented[col][col] != 0.0, "oracle hit a singular system"
        for i in range(col + 1, k):
            factor = augmented[i][col] / augmented[col][col]
            for j in range(col, k + 1):
                augmented[i][j] -= factor * augmented[col][j]
    beta = [0.0] * k
    for i in reversed(range(k)):
        total = augmented[i][k] - sum(augmented[i][j] * beta[j] for j in range(i + 1, k))
        beta[i] = total / augmented[i][i]
    return beta


def summarize_sorted(values: Sequence[float]) -> tuple:
    """(n, mean, p25, p50, p75, sd, cv, max) computed from first principles."""
    ordered = sorted(float(v) for v in values)
    n = len(ordered)
    mean = math.fsum(ordered) / n
    sd = 0.0 if n == 1 else math.sqrt(math.fsum((v - mean) ** 2 for v in ordered) / (n - 1))

    def percentile(q: float) -> float:
        h = (n - 1) * q
        lo = math.floor(h)
        hi = math.ceil(h)
        return ordered[lo] + (h - lo) * (ordered[hi] - ordered[lo])

    cv = None if mean == 0.0 else sd / mean
    return (n, mean, percentile(0.25), percentile(0.5), percentile(0.75), sd, cv, ordered[-1])


def prevalent_brute_force(
    evidence: Sequence[TerritoryId], rule: MajorityRule
) -> Optional[TerritoryId]:
    """Majority / plurality over a raw evidence list, by enumeration."""
    counts: dict[TerritoryId, int] = {}
    for item in evidence:
        counts[item] = counts.get(item, 0) + 1
    best = max(counts.values())
    winners = [t for t, c in counts.items() if c == best]
    if len(winners) != 1:
        return None
    if rule is MajorityRule.STRICT and 2 * best <= len(evidence):
        return None
    return winners[0]


def weighted_sum_double_loop(
    weights: Mapping[str, float],
    territory_id: TerritoryId,
    category_pubs: Mapping[str, Sequence[PublicationRecord]],
    assignments: Mapping[str, TerritoryId],
    window,
) -> float:
    """Profile-weighted mass by an explicit double loop with fsum."""
    terms = []
    for category in sorted(weights):
        count = 0
        for pub in category_pubs.get(category, ()):
            if assignments.get(pub.id) == territory_id and pub.year in window:
                count += 1
        terms.append(weights[category] * count)
    return math.fsum(terms)


def qualifying_pair_counts(
    config: AnalysisConfig,
    scheme: CategoryScheme,
    pubs: Sequence[PublicationRecord],
    edges: Sequence[CitationEdge],
    gazetteer: Gazetteer,
) -> Counter:
    """Qualifying (citing, cited) pairs per (category, i, j), re-derived
    edge by edge without the flows module."""
    by_id = {p.id: p for p in pubs}
    counts: Counter = Counter()
    for edge in edges:
        cited = by_id[edge.cited_id]
        citing = by_id[edge.citing_id]
        if cited.year not in config.cited_window or citing.year not in config.citing_window:
            continue
        cited_assignment = territory.assign_cited(
            cited, TerritoryKind.MUNICIPALITY, config.majority_rule
        )
        if not cited_assignment.assigned:
            continue
        i = cited_assignment.territory
        assert i is not None
        if i.country_of != config.home_country:
            continue
        if config.context is Context.NATIONAL:
            citing_assignment = territory.assign_citing(
                citing, TerritoryKind.MUNICIPALITY, config.majority_rule
            )
            j = citing_assignment.territory
            if j is None or j.country_of != config.home_country:
                continue
        else:
            citing_assignment = territory.assign_citing(
                citing, TerritoryKind.COUNTRY, config.majority_rule
            )
            j = citing_assignment.territory
            if j is None or j.code == config.home_country:
                continue
            wanted = (
                Continent.EUROPE
                if config.context is Context.CONTINENTAL
                else Continent.EXTRA_EUROPE
            )
            if gazetteer.continent_of(j.code) is not wanted:
                continue
        if config.exclude_same_territory_dyads and i == j:
            continue
        for category in scheme.effective(cited.categories):
            counts[(category, i.code, j.code)] += 1
    return counts
