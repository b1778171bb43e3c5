"""Shared fixtures and corpus-building helpers."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from citeflow.geodesy import GeoPoint
from citeflow.ingest import Gazetteer
from citeflow.model import (
    CitationEdge,
    Continent,
    PublicationRecord,
    TerritoryId,
    TerritoryKind,
)


def municipality(code: str, country: str = "IT") -> TerritoryId:
    return TerritoryId(TerritoryKind.MUNICIPALITY, code, country_of=country)


def country(code: str, continent: Continent = Continent.EUROPE) -> TerritoryId:
    return TerritoryId(TerritoryKind.COUNTRY, code, continent=continent)


def pub(
    pub_id: str,
    year: int = 2011,
    categories=("A",),
    authors=(),
    addresses=(),
) -> PublicationRecord:
    return PublicationRecord(
        id=pub_id,
        year=year,
        categories=frozenset(categories),
        author_territories=tuple(authors),
        address_territories=tuple(addresses),
    )


MILAN = municipality("Milan")
ROME = municipality("Rome")
TURIN = municipality("Turin")
FRANCE = country("FR")
JAPAN = country("JP", Continent.EXTRA_EUROPE)
USA = country("US", Continent.EXTRA_EUROPE)
ITALY = country("IT")


@pytest.fixture
def small_gazetteer() -> Gazetteer:
    return Gazetteer(
        [
            (MILAN, GeoPoint(45.4642, 9.19)),
            (ROME, GeoPoint(41.8931, 12.4828)),
            (TURIN, GeoPoint(45.0703, 7.6869)),
            (ITALY, GeoPoint(41.8931, 12.4828)),
            (FRANCE, GeoPoint(48.8566, 2.3522)),
            (JAPAN, GeoPoint(35.6762, 139.6503)),
            (USA, GeoPoint(38.9072, -77.0369)),
        ]
    )


@pytest.fixture
def tiny_corpus(small_gazetteer):
    """Three publications, two edges; internally consistent."""
    pubs = [
        pub("P1", 2011, ("A",), authors=[MILAN, MILAN]),
        pub("P2", 2013, ("A",), addresses=[ROME, ROME]),
        pub("P3", 2014, ("A", "B"), addresses=[FRANCE, FRANCE]),
    ]
    edges = [
        CitationEdge("P2", "P1"),
        CitationEdge("P3", "P1"),
    ]
    return pubs, edges, small_gazetteer
