"""Aggregation of citation edges into dyadic flow observations.

One observation per (category, cited municipality, citing territory)
with at least one qualifying citation: the citation count, both masses
and the dyad distance.  Contexts partition the citing side: national
flows go to home-country municipalities, continental ones to other
European countries, intercontinental ones to extra-European countries.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .geodesy import dyad_distance
from .ingest import Gazetteer
from .mass import MassIndex, ScWeightProfile
from .model import (
    AnalysisConfig,
    CategoryScheme,
    CitationEdge,
    Context,
    Continent,
    PublicationRecord,
    TerritoryId,
    TerritoryKind,
)
from .stats import StatsRow, summarize
from .territory import AssignmentIndex

logger = logging.getLogger(__name__)

OBSERVATION_VARIABLES = ("cites", "m_i", "m_j", "d_km")


@dataclass(frozen=True)
class FlowObservation:
    """One regression row: a dyadic citation flow with masses and distance.

    ``cites`` is the number of distinct citing->cited pairs; it is whole
    for corpus-built observations and may be fractional only for
    synthetic calibration data.
    """

    context: Context
    category: str
    i: TerritoryId
    j: TerritoryId
    cites: float
    m_i: float
    m_j: float
    d_km: float

    def __post_init__(self) -> None:
        if self.i.kind is not TerritoryKind.MUNICIPALITY:
            raise ValueError("cited territory must be a municipality")
        expected_j = (
            TerritoryKind.MUNICIPALITY if self.context is Context.NATIONAL else TerritoryKind.COUNTRY
        )
        if self.j.kind is not expected_j:
            raise ValueError(
                f"citing territory kind {self.j.kind.value} invalid for {self.context.value} context"
            )
        for name, value in (("cites", self.cites), ("m_i", self.m_i), ("m_j", self.m_j), ("d_km", self.d_km)):
            if value <= 0:
                raise ValueError(f"{name} must be > 0, got {value}")


def cited_universe(
    config: AnalysisConfig,
    pubs: Sequence[PublicationRecord],
    assignments: AssignmentIndex,
) -> dict[str, TerritoryId]:
    """Cited universe: home municipalities within the cited window.

    Context-independent; also delimits the corpus for profile building.
    """
    municipalities = assignments.territories("cited", TerritoryKind.MUNICIPALITY)
    by_id = {p.id: p for p in pubs}
    resolved = {}
    for pub_id, territory in municipalities.items():
        pub = by_id.get(pub_id)
        if pub is None or pub.year not in config.cited_window:
            continue
        if territory.country_of == config.home_country:
            resolved[pub_id] = territory
    return resolved


def _resolve_citing(
    config: AnalysisConfig,
    pubs: Sequence[PublicationRecord],
    assignments: AssignmentIndex,
    gazetteer: Gazetteer,
) -> dict[str, TerritoryId]:
    """Citing side for the configured context, within the citing window."""
    by_id = {p.id: p for p in pubs}
    resolved: dict[str, TerritoryId] = {}
    if config.context is Context.NATIONAL:
        for pub_id, territory in assignments.territories(
            "citing", TerritoryKind.MUNICIPALITY
        ).items():
            pub = by_id.get(pub_id)
            if pub is None or pub.year not in config.citing_window:
                continue
            if territory.country_of == config.home_country:
                resolved[pub_id] = territory
        return resolved

    wanted = Continent.EUROPE if config.context is Context.CONTINENTAL else Continent.EXTRA_EUROPE
    for pub_id, territory in assignments.territories("citing", TerritoryKind.COUNTRY).items():
        pub = by_id.get(pub_id)
        if pub is None or pub.year not in config.citing_window:
            continue
        if territory.code == config.home_country:
            continue
        if gazetteer.continent_of(territory.code) is wanted:
            resolved[pub_id] = territory
    return resolved


def build_observations(
    config: AnalysisConfig,
    scheme: CategoryScheme,
    pubs: Sequence[PublicationRecord],
    edges: Sequence[CitationEdge],
    assignments: AssignmentIndex,
    gazetteer: Gazetteer,
    profiles: Mapping[str, ScWeightProfile],
) -> list[FlowObservation]:
    """Observations for every qualifying dyad of the configured context.

    Output is canonically sorted by (category, cited code, citing code)
    and therefore independent of edge order.  Same-territory dyads are
    excluded by default (or floored to a small positive distance);
    zero-distance and zero-mass dyads are dropped with a warning count.
    """
    cited_to = cited_universe(config, pubs, assignments)
    citing_to = _resolve_citing(config, pubs, assignments, gazetteer)
    by_id = {p.id: p for p in pubs}

    effective_cache: dict[frozenset, frozenset] = {}

    def effective(categories: frozenset) -> frozenset:
        cached = effective_cache.get(categories)
        if cached is None:
            cached = scheme.effective(categories)
            effective_cache[categories] = cached
        return cached

    counts: dict[tuple[str, TerritoryId, TerritoryId], int] = defaultdict(int)
    for edge in edges:
        i = cited_to.get(edge.cited_id)
        j = citing_to.get(edge.citing_id)
        if i is None or j is None:
            continue
        for category in effective(by_id[edge.cited_id].categories):
            counts[(category, i, j)] += 1

    citing_level = (
        TerritoryKind.MUNICIPALITY if config.context is Context.NATIONAL else TerritoryKind.COUNTRY
    )
    cited_masses = MassIndex(pubs, cited_to, config.cited_window, scheme)
    citing_masses = MassIndex(
        pubs,
        assignments.territories("citing", citing_level),
        config.citing_window,
        scheme,
    )

    m_j_cache: dict[tuple[TerritoryId, str], float] = {}
    observations = []
    dropped_same_territory = 0
    dropped_zero_distance = 0
    dropped_zero_mass = 0
    for (category, i, j), cites in sorted(
        counts.items(), key=lambda kv: (kv[0][0], kv[0][1].code, kv[0][2].code)
    ):
        if i == j:
            if config.exclude_same_territory_dyads:
                dropped_same_territory += 1
                continue
            d = config.same_territory_floor_km
        else:
            d = dyad_distance(i, j, gazetteer)
            if d == 0.0:
                dropped_zero_distance += 1
                continue
        m_i = cited_masses.mass(i, category)
        key = (j, category)
        m_j = m_j_cache.get(key)
        if m_j is None:
            m_j = citing_masses.weighted(j, profiles[category])
            m_j_cache[key] = m_j
        if m_i <= 0 or m_j <= 0:
            dropped_zero_mass += 1
            continue
        observations.append(
            FlowObservation(
                context=config.context,
                category=category,
                i=i,
                j=j,
                cites=float(cites),
                m_i=m_i,
                m_j=m_j,
                d_km=d,
            )
        )

    if dropped_same_territory:
        logger.info(
            "%s: excluded %d same-territory dyads", config.context.value, dropped_same_territory
        )
    if dropped_zero_distance:
        logger.warning(
            "%s: dropped %d dyads with coincident coordinates",
            config.context.value,
            dropped_zero_distance,
        )
    if dropped_zero_mass:
        logger.warning(
            "%s: dropped %d dyads with zero mass", config.context.value, dropped_zero_mass
        )
    return observations


def descriptive_summary(
    observations: Sequence[FlowObservation],
) -> list[tuple[str, StatsRow]]:
    """Summary rows for the four model variables, in table order."""
    if not observations:
        raise ValueError("no observations to summarize")
    rows = []
    for variable in OBSERVATION_VARIABLES:
        values = [getattr(obs, variable) for obs in observations]
        rows.append((variable, summarize(values)))
    return rows
