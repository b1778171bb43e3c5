"""Great-circle distance checks against analytic and public anchors."""

from __future__ import annotations

import math

import numpy as np
import pytest

from citeflow.geodesy import EARTH_RADIUS_KM, GeoPoint, dyad_distance, haversine_km
from citeflow.ingest import UnknownTerritoryError

from conftest import FRANCE, MILAN, ROME, TURIN, municipality

LAMPEDUSA = GeoPoint(35.5087, 12.6197)
VIPITENO = GeoPoint(46.8978, 11.4330)


def random_points(n: int, seed: int) -> list[GeoPoint]:
    rng = np.random.default_rng(seed)
    # uniform on the sphere, longitudes clipped away from the open edge
    lats = np.degrees(np.arcsin(rng.uniform(-1.0, 1.0, n)))
    lons = rng.uniform(-179.999, 180.0, n)
    return [GeoPoint(float(lat), float(lon)) for lat, lon in zip(lats, lons)]


class TestGeoPoint:
    @pytest.mark.parametrize("lat,lon", [(95, 0), (-91, 0), (0, -180), (0, 181)])
    def test_out_of_range(self, lat, lon):
        with pytest.raises(ValueError):
            GeoPoint(lat, lon)

    def test_boundaries_accepted(self):
        GeoPoint(90, 180)
        GeoPoint(-90, -179.999)


class TestHaversine:
    def test_identical_points_zero(self):
        point = GeoPoint(43.1, 11.2)
        assert haversine_km(point, point) == 0.0

    def test_quarter_meridian(self):
        expected = math.pi * EARTH_RADIUS_KM / 2.0
        got = haversine_km(GeoPoint(0, 0), GeoPoint(90, 0))
        assert got == pytest.approx(expected, rel=1e-12)

    def test_italy_extremes_anchor(self):
        # longest within-country stretch, publicly quoted as 1271 km
        assert haversine_km(LAMPEDUSA, VIPITENO) == pytest.approx(1271.0, rel=0.01)

    def test_symmetry_exact(self):
        points = random_points(200, seed=11)
        for a, b in zip(points[::2], points[1::2]):
            assert haversine_km(a, b) == haversine_km(b, a)

    def test_triangle_inequality(self):
        points = random_points(300, seed=23)
        for a, b, c in zip(points[::3], points[1::3], points[2::3]):
            ab = haversine_km(a, b)
            bc = haversine_km(b, c)
            ac = haversine_km(a, c)
            assert ac <= ab + bc + 1e-9 * max(1.0, ac)

    def test_range_bound(self):
        half_circumference = math.pi * EARTH_RADIUS_KM
        points = random_points(200, seed=37)
        for a, b in zip(points[::2], points[1::2]):
            d = haversine_km(a, b)
            assert 0.0 <= d <= half_circumference * (1 + 1e-12)

    def test_longitude_wrap(self):
        d = haversine_km(GeoPoint(0, 179.9), GeoPoint(0, -179.9))
        assert d == pytest.approx(22.24, rel=0.01)
        assert d < 100


class TestDyadDistance:
    def test_same_territory_zero(self, small_gazetteer):
        assert dyad_distance(MILAN, MILAN, small_gazetteer) == 0.0

    def test_milan_turin(self, small_gazetteer):
        # ~126 km between the two centroids
        assert dyad_distance(MILAN, TURIN, small_gazetteer) == pytest.approx(126.0, rel=0.02)

    def test_rome_to_country_uses_capital(self, small_gazetteer):
        got = dyad_distance(ROME, FRANCE, small_gazetteer)
        # independent spherical law of cosines on the Rome/Paris coordinates
        rome = (math.radians(41.8931), math.radians(12.4828))
        paris = (math.radians(48.8566), math.radians(2.3522))
        cos_angle = math.sin(rome[0]) * math.sin(paris[0]) + math.cos(rome[0]) * math.cos(
            paris[0]
        ) * math.cos(rome[1] - paris[1])
        expected = EARTH_RADIUS_KM * math.acos(min(1.0, cos_angle))
        assert got == pytest.approx(expected, rel=0.005)

    def test_missing_territory_names_code(self, small_gazetteer):
        ghost = municipality("Atlantis")
        with pytest.raises(UnknownTerritoryError, match="Atlantis"):
            dyad_distance(ghost, MILAN, small_gazetteer)
