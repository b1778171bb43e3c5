"""Shared domain types and the analysis configuration."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Container, Iterable, Mapping, Optional, Sequence


class TerritoryKind(str, Enum):
    MUNICIPALITY = "municipality"
    COUNTRY = "country"


class Continent(str, Enum):
    EUROPE = "Europe"
    EXTRA_EUROPE = "extra-Europe"


class Context(str, Enum):
    NATIONAL = "national"
    CONTINENTAL = "continental"
    INTERCONTINENTAL = "intercontinental"


class MajorityRule(str, Enum):
    STRICT = "strict"
    PLURALITY = "plurality"


class SchemeKind(str, Enum):
    SC = "sc"  # fine-grained subject categories
    DA = "da"  # coarse disciplinary areas


@dataclass(frozen=True)
class TerritoryId:
    """A territory reference.  Identity (equality, hashing) is (kind, code).

    ``country_of`` and ``continent`` are descriptive attributes: the
    gazetteer always carries them, references parsed from publication
    files may not (a country token alone does not reveal its continent).
    """

    kind: TerritoryKind
    code: str
    country_of: Optional[str] = field(default=None, compare=False)
    continent: Optional[Continent] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.code:
            raise ValueError("territory code must be non-empty")
        if self.kind is TerritoryKind.MUNICIPALITY and not self.country_of:
            raise ValueError(f"municipality {self.code!r} must carry country_of")

    def token(self) -> str:
        """Serialize to the publication-file token form."""
        if self.kind is TerritoryKind.MUNICIPALITY:
            return f"{self.country_of}:{self.code}"
        return self.code

    @staticmethod
    def from_token(token: str) -> "TerritoryId":
        """Parse a publication-file token.

        ``CC:code`` denotes the municipality ``code`` in country ``CC``;
        a bare token denotes a country.
        """
        if not token:
            raise ValueError("empty territory token")
        if ":" in token:
            country, code = token.split(":", 1)
            if not country or not code:
                raise ValueError(f"malformed municipality token {token!r}")
            return TerritoryId(TerritoryKind.MUNICIPALITY, code, country_of=country)
        return TerritoryId(TerritoryKind.COUNTRY, token)


@dataclass(frozen=True)
class PublicationRecord:
    """One indexed publication with its territory evidence.

    ``author_territories`` drive the cited-side convention,
    ``address_territories`` the citing-side one.  Both keep order and
    multiplicity (a corresponding author's duplicated address counts
    twice by design).
    """

    id: str
    year: int
    categories: frozenset[str]
    author_territories: tuple[TerritoryId, ...] = ()
    address_territories: tuple[TerritoryId, ...] = ()

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("publication id must be non-empty")


@dataclass(frozen=True)
class CitationEdge:
    """Directed citing -> cited publication pair."""

    citing_id: str
    cited_id: str

    def __post_init__(self) -> None:
        if not self.citing_id or not self.cited_id:
            raise ValueError("citation endpoints must be non-empty")
        if self.citing_id == self.cited_id:
            raise ValueError(f"self-citation edge for {self.citing_id!r}")


@dataclass(frozen=True)
class YearWindow:
    """Inclusive calendar-year range."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError(f"empty year window {self.start}-{self.end}")

    def __contains__(self, year: int) -> bool:
        return self.start <= year <= self.end


@dataclass(frozen=True)
class AnalysisConfig:
    """Run parameters; defaults match the reference setup."""

    cited_window: YearWindow = YearWindow(2010, 2012)
    citing_window: YearWindow = YearWindow(2010, 2017)
    home_country: str = "IT"
    context: Context = Context.NATIONAL
    min_observations: int = 30
    significance_thresholds: tuple[float, float, float] = (0.01, 0.05, 0.1)
    exclude_same_territory_dyads: bool = True
    # distance floor (km) applied to same-territory dyads when they are kept
    same_territory_floor_km: float = 1.0
    majority_rule: MajorityRule = MajorityRule.STRICT

    def __post_init__(self) -> None:
        t = self.significance_thresholds
        if len(t) != 3 or not all(0.0 < x < 1.0 for x in t) or not (t[0] < t[1] < t[2]):
            raise ValueError(f"thresholds must be strictly increasing in (0,1): {t}")
        if self.min_observations < 0:
            raise ValueError("min_observations must be >= 0")
        if self.same_territory_floor_km <= 0:
            raise ValueError("same_territory_floor_km must be > 0")
        if not self.home_country:
            raise ValueError("home_country must be non-empty")


@dataclass(frozen=True)
class CategoryMap:
    """Total mapping from fine category (SC) to disciplinary area (DA)."""

    mapping: Mapping[str, str]

    def __post_init__(self) -> None:
        if not self.mapping:
            raise ValueError("category map must be non-empty")
        for sc, da in self.mapping.items():
            if not sc or not da:
                raise ValueError("category map entries must be non-empty")

    def area_of(self, category: str) -> str:
        try:
            return self.mapping[category]
        except KeyError:
            raise KeyError(f"category {category!r} missing from category map") from None

    @property
    def category_count(self) -> int:
        return len(self.mapping)

    @property
    def area_count(self) -> int:
        return len(set(self.mapping.values()))

    def areas(self) -> list[str]:
        return sorted(set(self.mapping.values()))

    def items(self) -> list[tuple[str, str]]:
        return sorted(self.mapping.items())


@dataclass(frozen=True)
class CategoryScheme:
    """Category granularity the pipeline runs at.

    The fine scheme keeps publication categories as-is; the coarse one
    maps each through a :class:`CategoryMap`, full-counting a publication
    into every distinct area its categories reach.
    """

    kind: SchemeKind
    category_map: Optional[CategoryMap] = None

    def __post_init__(self) -> None:
        if self.kind is SchemeKind.DA and self.category_map is None:
            raise ValueError("coarse scheme requires a category map")

    @staticmethod
    def fine() -> "CategoryScheme":
        return CategoryScheme(SchemeKind.SC)

    @staticmethod
    def coarse(category_map: CategoryMap) -> "CategoryScheme":
        return CategoryScheme(SchemeKind.DA, category_map)

    def effective(self, categories: Iterable[str]) -> frozenset[str]:
        if self.kind is SchemeKind.SC:
            return frozenset(categories)
        assert self.category_map is not None
        return frozenset(self.category_map.area_of(c) for c in categories)


@dataclass(frozen=True)
class Violation:
    """One corpus-consistency problem found by :func:`validate_corpus`."""

    kind: str
    subject: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.subject}: {self.detail}"


def validate_corpus(
    pubs: Sequence[PublicationRecord],
    edges: Sequence[CitationEdge],
    gazetteer: Container[TerritoryId],
) -> list[Violation]:
    """Check corpus-level consistency; empty result means the corpus is clean.

    Reported kinds: ``duplicate-id``, ``dangling-edge``,
    ``unknown-territory`` (direct references and the country projections
    of referenced municipalities) and ``empty-categories``.  The result
    is canonically sorted, so it does not depend on input order.
    """
    violations: list[Violation] = []

    id_counts = Counter(p.id for p in pubs)
    for pub_id, n in id_counts.items():
        if n > 1:
            violations.append(Violation("duplicate-id", pub_id, f"appears {n} times"))

    known_ids = set(id_counts)
    seen_edges: set[tuple[str, str]] = set()
    for edge in edges:
        if (edge.citing_id, edge.cited_id) in seen_edges:
            continue
        seen_edges.add((edge.citing_id, edge.cited_id))
        for endpoint, role in ((edge.citing_id, "citing"), (edge.cited_id, "cited")):
            if endpoint not in known_ids:
                violations.append(
                    Violation(
                        "dangling-edge",
                        endpoint,
                        f"{role} publication of edge {edge.citing_id}->{edge.cited_id} not in corpus",
                    )
                )

    referenced: set[TerritoryId] = set()
    for pub in pubs:
        if not pub.categories:
            violations.append(Violation("empty-categories", pub.id, "no categories assigned"))
        for territory in (*pub.author_territories, *pub.address_territories):
            referenced.add(territory)
            if territory.kind is TerritoryKind.MUNICIPALITY:
                assert territory.country_of is not None
                referenced.add(TerritoryId(TerritoryKind.COUNTRY, territory.country_of))

    for territory in referenced:
        if territory not in gazetteer:
            violations.append(
                Violation("unknown-territory", territory.token(), "not in gazetteer")
            )

    return sorted(violations, key=lambda v: (v.kind, v.subject, v.detail))
