"""Parsers and serializers for the four corpus interchange files.

All files are UTF-8 with LF line endings:

* ``publications.jsonl`` / ``publications.csv`` --
  id, year, categories, author_territories, address_territories
  (CSV packs the three lists with ``;``)
* ``citations.csv`` -- citing_id, cited_id
* ``gazetteer.csv`` -- code, kind, country_of, continent, lat, lon
* ``scmap.csv`` -- sc, da

Structural problems (undecodable bytes, bad header, malformed JSON)
abort immediately; field-level problems are collected per line and
raised together at the end of the pass.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Optional, Sequence

from .geodesy import GeoPoint
from .model import (
    CategoryMap,
    CitationEdge,
    Continent,
    PublicationRecord,
    TerritoryId,
    TerritoryKind,
)

logger = logging.getLogger(__name__)

YEAR_MIN, YEAR_MAX = 1900, 2100

PUBLICATION_COLUMNS = ["id", "year", "categories", "author_territories", "address_territories"]
CITATION_COLUMNS = ["citing_id", "cited_id"]
GAZETTEER_COLUMNS = ["code", "kind", "country_of", "continent", "lat", "lon"]
CATEGORY_MAP_COLUMNS = ["sc", "da"]


class ParseError(ValueError):
    """Input file rejected; carries one message per problem found."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class UnknownTerritoryError(LookupError):
    """A territory reference has no gazetteer entry."""

    def __init__(self, territory: TerritoryId):
        self.territory = territory
        super().__init__(f"territory {territory.token()!r} not in gazetteer")


class Gazetteer:
    """Territory -> reference point mapping.

    Municipalities map to their centroid and countries to their capital.
    Lookup identity is (kind, code); the stored records also carry
    country and continent metadata.
    """

    def __init__(self, entries: Iterable[tuple[TerritoryId, GeoPoint]]):
        self._points: dict[TerritoryId, GeoPoint] = {}
        self._records: dict[TerritoryId, TerritoryId] = {}
        for territory, point in entries:
            if territory in self._points:
                raise ValueError(f"duplicate gazetteer entry {territory.token()!r}")
            if territory.kind is TerritoryKind.COUNTRY and territory.continent is None:
                raise ValueError(f"country {territory.code!r} must carry a continent")
            self._points[territory] = point
            self._records[territory] = territory

    def __contains__(self, territory: TerritoryId) -> bool:
        return territory in self._points

    def __len__(self) -> int:
        return len(self._points)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Gazetteer):
            return NotImplemented
        if self._points != other._points:
            return False
        # TerritoryId equality ignores metadata; compare records explicitly
        return {
            (t.kind, t.code): (t.country_of, t.continent) for t in self._records.values()
        } == {(t.kind, t.code): (t.country_of, t.continent) for t in other._records.values()}

    def point(self, territory: TerritoryId) -> GeoPoint:
        try:
            return self._points[territory]
        except KeyError:
            raise UnknownTerritoryError(territory) from None

    def record(self, territory: TerritoryId) -> TerritoryId:
        """Full gazetteer record (with metadata) for a reference."""
        try:
            return self._records[territory]
        except KeyError:
            raise UnknownTerritoryError(territory) from None

    def continent_of(self, country_code: str) -> Continent:
        record = self.record(TerritoryId(TerritoryKind.COUNTRY, country_code))
        assert record.continent is not None
        return record.continent

    def entries(self) -> list[tuple[TerritoryId, GeoPoint]]:
        """All entries, canonically ordered."""
        return sorted(self._points.items(), key=lambda e: (e[0].kind.value, e[0].code))


def _decode(stream: IO[bytes]) -> str:
    data = stream.read()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError([f"input is not valid UTF-8: {exc}"]) from None


def _csv_rows(text: str, columns: Sequence[str]) -> list[tuple[int, list[str]]]:
    """Rows of a headered CSV as (line_number, cells); header enforced."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(["missing header row"]) from None
    if header != list(columns):
        raise ParseError([f"bad header {header!r}, expected {list(columns)!r}"])
    rows = []
    for line_no, cells in enumerate(reader, start=2):
        if not cells:
            continue
        if len(cells) != len(columns):
            raise ParseError([f"line {line_no}: expected {len(columns)} fields, got {len(cells)}"])
        rows.append((line_no, cells))
    return rows


def _split_list(cell: str) -> list[str]:
    return [part for part in cell.split(";") if part] if cell else []


def _parse_year(raw: object, where: str, problems: list[str]) -> Optional[int]:
    try:
        year = int(raw)  # type: ignore[arg-type]
    except (TypeError, ValueError):
        problems.append(f"{where}: year {raw!r} is not an integer")
        return None
    if not YEAR_MIN <= year <= YEAR_MAX:
        problems.append(f"{where}: year {year} outside [{YEAR_MIN}, {YEAR_MAX}]")
        return None
    return year


def _parse_territory_tokens(
    tokens: Iterable[str], where: str, problems: list[str]
) -> tuple[TerritoryId, ...]:
    out = []
    for token in tokens:
        try:
            out.append(TerritoryId.from_token(token))
        except ValueError as exc:
            problems.append(f"{where}: {exc}")
    return tuple(out)


def _build_publication(
    where: str,
    problems: list[str],
    pub_id: object,
    year_raw: object,
    categories: Iterable[str],
    author_tokens: Iterable[str],
    address_tokens: Iterable[str],
) -> Optional[PublicationRecord]:
    n_before = len(problems)
    if not pub_id or not isinstance(pub_id, str):
        problems.append(f"{where}: missing or invalid id")
    year = _parse_year(year_raw, where, problems)
    cats = frozenset(categories)
    if not cats:
        problems.append(f"{where}: empty category set")
    authors = _parse_territory_tokens(author_tokens, where, problems)
    addresses = _parse_territory_tokens(address_tokens, where, problems)
    if len(problems) > n_before or year is None:
        return None
    return PublicationRecord(
        id=pub_id,  # type: ignore[arg-type]
        year=year,
        categories=cats,
        author_territories=authors,
        address_territories=addresses,
    )


def parse_publications(stream: IO[bytes], format: str = "jsonl") -> list[PublicationRecord]:
    """Parse publications from JSONL or CSV.  Empty input yields []."""
    text = _decode(stream)
    problems: list[str] = []
    records: list[PublicationRecord] = []

    if format == "jsonl":
        for line_no, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError([f"line {line_no}: invalid JSON: {exc.msg}"]) from None
            if not isinstance(obj, dict):
                raise ParseError([f"line {line_no}: expected a JSON object"])
            record = _build_publication(
                f"line {line_no}",
                problems,
                obj.get("id"),
                obj.get("year"),
                obj.get("categories") or [],
                obj.get("author_territories") or [],
                obj.get("address_territories") or [],
            )
            if record is not None:
                records.append(record)
    elif format == "csv":
        for line_no, cells in _csv_rows(text, PUBLICATION_COLUMNS):
            record = _build_publication(
                f"line {line_no}",
                problems,
                cells[0],
                cells[1],
                _split_list(cells[2]),
                _split_list(cells[3]),
                _split_list(cells[4]),
            )
            if record is not None:
                records.append(record)
    else:
        raise ValueError(f"unknown publications format {format!r}")

    if problems:
        raise ParseError(problems)
    return records


def parse_citations(stream: IO[bytes]) -> list[CitationEdge]:
    """Parse citation edges; duplicates collapse to one edge per pair."""
    text = _decode(stream)
    problems: list[str] = []
    edges: list[CitationEdge] = []
    seen: set[tuple[str, str]] = set()
    duplicates = 0
    for line_no, cells in _csv_rows(text, CITATION_COLUMNS):
        citing, cited = cells
        if not citing or not cited:
            problems.append(f"line {line_no}: empty publication id")
            continue
        if citing == cited:
            problems.append(f"line {line_no}: self-citation {citing!r}")
            continue
        if (citing, cited) in seen:
            duplicates += 1
            continue
        seen.add((citing, cited))
        edges.append(CitationEdge(citing_id=citing, cited_id=cited))
    if problems:
        raise ParseError(problems)
    if duplicates:
        logger.warning("deduplicated %d repeated citation rows", duplicates)
    return edges


def parse_gazetteer(stream: IO[bytes]) -> Gazetteer:
    """Parse the territory gazetteer."""
    text = _decode(stream)
    problems: list[str] = []
    entries: list[tuple[TerritoryId, GeoPoint]] = []
    seen: set[tuple[str, str]] = set()
    for line_no, cells in _csv_rows(text, GAZETTEER_COLUMNS):
        code, kind_raw, country_of, continent_raw, lat_raw, lon_raw = cells
        where = f"line {line_no}"
        try:
            kind = TerritoryKind(kind_raw)
        except ValueError:
            problems.append(f"{where}: unknown kind {kind_raw!r}")
            continue
        if (kind.value, code) in seen:
            problems.append(f"{where}: duplicate entry for {kind.value} {code!r}")
            continue
        seen.add((kind.value, code))
        continent: Optional[Continent] = None
        if kind is TerritoryKind.MUNICIPALITY:
            if not country_of:
                problems.append(f"{where}: municipality {code!r} missing country_of")
                continue
        else:
            try:
                continent = Continent(continent_raw)
            except ValueError:
                problems.append(f"{where}: country {code!r} has invalid continent {continent_raw!r}")
                continue
            country_of = ""
        try:
            lat, lon = float(lat_raw), float(lon_raw)
        except ValueError:
            problems.append(f"{where}: non-numeric coordinates ({lat_raw!r}, {lon_raw!r})")
            continue
        try:
            point = GeoPoint(lat, lon)
            territory = TerritoryId(kind, code, country_of=country_of or None, continent=continent)
        except ValueError as exc:
            problems.append(f"{where}: {exc}")
            continue
        entries.append((territory, point))
    if problems:
        raise ParseError(problems)
    return Gazetteer(entries)


def parse_category_map(stream: IO[bytes]) -> CategoryMap:
    """Parse the fine-to-coarse category mapping."""
    text = _decode(stream)
    problems: list[str] = []
    mapping: dict[str, str] = {}
    for line_no, cells in _csv_rows(text, CATEGORY_MAP_COLUMNS):
        sc, da = cells
        if not sc or not da:
            problems.append(f"line {line_no}: empty category or area code")
            continue
        if sc in mapping:
            problems.append(f"line {line_no}: category {sc!r} mapped twice")
            continue
        mapping[sc] = da
    if problems:
        raise ParseError(problems)
    if not mapping:
        raise ParseError(["category map is empty"])
    return CategoryMap(mapping)


def _csv_bytes(columns: Sequence[str], rows: Iterable[Sequence[str]]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue().encode("utf-8")


def write_publications(pubs: Sequence[PublicationRecord], format: str = "jsonl") -> bytes:
    """Serialize publications; inverse of :func:`parse_publications`."""
    if format == "jsonl":
        lines = []
        for pub in pubs:
            lines.append(
                json.dumps(
                    {
                        "id": pub.id,
                        "year": pub.year,
                        "categories": sorted(pub.categories),
                        "author_territories": [t.token() for t in pub.author_territories],
                        "address_territories": [t.token() for t in pub.address_territories],
                    },
                    sort_keys=True,
                )
            )
        return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")
    if format == "csv":
        rows = [
            [
                pub.id,
                str(pub.year),
                ";".join(sorted(pub.categories)),
                ";".join(t.token() for t in pub.author_territories),
                ";".join(t.token() for t in pub.address_territories),
            ]
            for pub in pubs
        ]
        return _csv_bytes(PUBLICATION_COLUMNS, rows)
    raise ValueError(f"unknown publications format {format!r}")


def write_citations(edges: Sequence[CitationEdge]) -> bytes:
    return _csv_bytes(CITATION_COLUMNS, ([e.citing_id, e.cited_id] for e in edges))


def write_gazetteer(gazetteer: Gazetteer) -> bytes:
    rows = []
    for territory, point in gazetteer.entries():
        rows.append(
            [
                territory.code,
                territory.kind.value,
                territory.country_of or "",
                territory.continent.value if territory.continent else "",
                repr(point.lat),
                repr(point.lon),
            ]
        )
    return _csv_bytes(GAZETTEER_COLUMNS, rows)


def write_category_map(category_map: CategoryMap) -> bytes:
    return _csv_bytes(CATEGORY_MAP_COLUMNS, ([sc, da] for sc, da in category_map.items()))
