"""Great-circle distances between territory reference points."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .model import TerritoryId

if TYPE_CHECKING:  # pragma: no cover
    from .ingest import Gazetteer

# IUGG mean Earth radius.  A sphere keeps distances within 0.5% of
# ellipsoidal geodesics, immaterial at the model's resolution.
EARTH_RADIUS_KM = 6371.0088

DistanceKm = float


@dataclass(frozen=True)
class GeoPoint:
    """Geographic point in decimal degrees."""

    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 < self.lon <= 180.0:
            raise ValueError(f"longitude {self.lon} outside (-180, 180]")


def haversine_km(a: GeoPoint, b: GeoPoint) -> DistanceKm:
    """Great-circle distance in km on the mean-radius sphere.

    Exactly symmetric (deltas are taken in absolute value) and zero for
    identical coordinates.
    """
    dlat = math.radians(abs(a.lat - b.lat))
    dlon = math.radians(abs(a.lon - b.lon))
    h = (
        math.sin(dlat / 2.0) ** 2
        + math.cos(math.radians(a.lat)) * math.cos(math.radians(b.lat)) * math.sin(dlon / 2.0) ** 2
    )
    # rounding can push h a hair outside [0, 1]
    h = min(1.0, max(0.0, h))
    return 2.0 * EARTH_RADIUS_KM * math.asin(math.sqrt(h))


def dyad_distance(i: TerritoryId, j: TerritoryId, gazetteer: "Gazetteer") -> DistanceKm:
    """Distance between the reference points of a cited/citing territory pair.

    Municipalities are represented by their centroid, countries by their
    capital, both as recorded in the gazetteer.
    """
    return haversine_km(gazetteer.point(i), gazetteer.point(j))
