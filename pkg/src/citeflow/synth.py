"""Deterministic synthetic data with planted ground truth.

Two generators share one spec:

* :func:`generate_observations` draws regression-ready flow observations
  directly from the gravity law, category by category, with planted
  coefficients and lognormal multiplicative noise.
* :func:`generate_corpus` builds a full micro-level corpus (publications,
  citations, gazetteer, category map) whose territory assignments, masses
  and dyad counts are known by construction.

Everything is driven by a counter-based Philox stream, so identical
specs produce byte-identical outputs.  The manifest records the planted
truth that tests assert against.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .geodesy import GeoPoint, haversine_km
from .ingest import Gazetteer
from .flows import FlowObservation
from .model import (
    CategoryMap,
    CitationEdge,
    Context,
    Continent,
    PublicationRecord,
    TerritoryId,
    TerritoryKind,
    YearWindow,
)

KEY_SEP = "|"


class InfeasibleSpecError(ValueError):
    """The spec demands more planted citations than the corpus can host."""


@dataclass(frozen=True)
class PlantedModel:
    """True gravity coefficients; ``gamma`` is the coefficient of ln d."""

    ln_k: float
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self) -> None:
        for value in (self.ln_k, self.alpha, self.beta, self.gamma):
            if not math.isfinite(value):
                raise ValueError("planted coefficients must be finite")


@dataclass(frozen=True)
class CategoryPlan:
    """One category: its area, planted model and observation budget."""

    code: str
    area: str
    model: PlantedModel
    n_observations: int = 400

    def __post_init__(self) -> None:
        if not self.code or not self.area:
            raise ValueError("category and area codes must be non-empty")
        if self.n_observations < 1:
            raise ValueError("n_observations must be >= 1")


@dataclass(frozen=True)
class SynthSpec:
    """Everything the generators need; fully determines their output."""

    seed: int
    categories: tuple[CategoryPlan, ...]
    noise_sd: float = 0.1
    round_counts: bool = True
    context: Context = Context.CONTINENTAL
    mass_i_range: tuple[float, float] = (10.0, 1000.0)
    mass_j_range: tuple[float, float] = (100.0, 100000.0)
    distance_range_km: tuple[float, float] = (30.0, 3000.0)
    # corpus-route sizing
    home_country: str = "IT"
    n_municipalities: int = 12
    n_eur_countries: int = 4
    n_extra_countries: int = 4
    cited_years: YearWindow = YearWindow(2010, 2012)
    citing_years: YearWindow = YearWindow(2010, 2017)
    max_cited_per_cell: int = 4
    citing_per_territory: int = 40
    mean_citations_per_dyad: float = 1.2
    multi_category_rate: float = 0.15
    agreement_publications: int = 0
    agreement_rate: float = 1.0
    planted_dyads: Optional[Mapping[tuple[str, str, str], int]] = None

    def __post_init__(self) -> None:
        if not self.categories:
            raise ValueError("spec needs at least one category")
        codes = [plan.code for plan in self.categories]
        if len(set(codes)) != len(codes):
            raise ValueError("category codes must be unique")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be >= 0")
        for name, (lo, hi) in (
            ("mass_i_range", self.mass_i_range),
            ("mass_j_range", self.mass_j_range),
            ("distance_range_km", self.distance_range_km),
        ):
            if lo <= 0:
                raise ValueError(f"{name} must be positive")
            if lo >= hi:
                raise ValueError(f"{name} is degenerate; a constant regressor is rank deficient")
        if self.n_municipalities < 2:
            raise ValueError("need at least two municipalities")
        if not 0.0 <= self.agreement_rate <= 1.0:
            raise ValueError("agreement_rate must be in [0, 1]")
        if self.citing_per_territory < 1 or self.max_cited_per_cell < 1:
            raise ValueError("corpus sizing knobs must be >= 1")


@dataclass
class SynthManifest:
    """Planted ground truth recorded during generation.

    Flattened keys use ``|`` separators: dyad counts are
    ``category|cited_code|citing_code`` (citing publications with an
    assignable planted territory only, same-territory dyads included),
    mass counts are ``territory_code|category``.
    """

    seed: int
    noise_sd: float
    round_counts: bool
    context: str
    models: dict[str, dict]
    n_clamped: int = 0
    n_publications: int = 0
    n_edges: int = 0
    dyad_counts: dict[str, int] = field(default_factory=dict)
    cited_counts: dict[str, int] = field(default_factory=dict)
    citing_counts: dict[str, int] = field(default_factory=dict)
    agreement: Optional[dict] = None

    def dyad_count(self, category: str, cited_code: str, citing_code: str) -> int:
        return self.dyad_counts.get(KEY_SEP.join((category, cited_code, citing_code)), 0)

    def to_json(self) -> bytes:
        return (
            json.dumps(self.__dict__, sort_keys=True, separators=(",", ":")) + "\n"
        ).encode("utf-8")

    @staticmethod
    def from_json(data: bytes) -> "SynthManifest":
        return SynthManifest(**json.loads(data.decode("utf-8")))


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _log_uniform(rng: np.random.Generator, lo: float, hi: float, n: int) -> np.ndarray:
    return np.exp(rng.uniform(math.log(lo), math.log(hi), n))


def generate_observations(
    spec: SynthSpec,
) -> tuple[dict[str, list[FlowObservation]], SynthManifest]:
    """Flow observations drawn from the gravity law, per category.

    Flows are ``round(exp(ln k + a ln M_i + b ln M_j + g ln d + eps))``
    clamped to at least one citation; with ``round_counts`` off the exact
    law values are kept, which is what noiseless estimator checks need.
    """
    rng = _rng(spec.seed)
    manifest = SynthManifest(
        seed=spec.seed,
        noise_sd=spec.noise_sd,
        round_counts=spec.round_counts,
        context=spec.context.value,
        models={
            plan.code: {
                "area": plan.area,
                "ln_k": plan.model.ln_k,
                "alpha": plan.model.alpha,
                "beta": plan.model.beta,
                "gamma": plan.model.gamma,
                "n_observations": plan.n_observations,
            }
            for plan in spec.categories
        },
    )

    j_kind = (
        TerritoryKind.MUNICIPALITY if spec.context is Context.NATIONAL else TerritoryKind.COUNTRY
    )
    continent = (
        Continent.EUROPE if spec.context is Context.CONTINENTAL else Continent.EXTRA_EUROPE
    )

    observations: dict[str, list[FlowObservation]] = {}
    for plan in spec.categories:
        n = plan.n_observations
        m_i = _log_uniform(rng, *spec.mass_i_range, n)
        m_j = _log_uniform(rng, *spec.mass_j_range, n)
        d = _log_uniform(rng, *spec.distance_range_km, n)
        noise = rng.normal(0.0, spec.noise_sd, n) if spec.noise_sd > 0 else np.zeros(n)
        ln_c = (
            plan.model.ln_k
            + plan.model.alpha * np.log(m_i)
            + plan.model.beta * np.log(m_j)
            + plan.model.gamma * np.log(d)
            + noise
        )
        c = np.exp(ln_c)
        if spec.round_counts:
            rounded = np.round(c)
            manifest.n_clamped += int((rounded < 1.0).sum())
            c = np.maximum(1.0, rounded)

        rows = []
        for k in range(n):
            i_t = TerritoryId(
                TerritoryKind.MUNICIPALITY, f"I{k:06d}", country_of=spec.home_country
            )
            if j_kind is TerritoryKind.MUNICIPALITY:
                j_t = TerritoryId(
                    TerritoryKind.MUNICIPALITY, f"J{k:06d}", country_of=spec.home_country
                )
            else:
                j_t = TerritoryId(TerritoryKind.COUNTRY, f"J{k:06d}", continent=continent)
            rows.append(
                FlowObservation(
                    context=spec.context,
                    category=plan.code,
                    i=i_t,
                    j=j_t,
                    cites=float(c[k]),
                    m_i=float(m_i[k]),
                    m_j=float(m_j[k]),
                    d_km=float(d[k]),
                )
            )
        observations[plan.code] = rows
    return observations, manifest


@dataclass(frozen=True)
class _PlantedPub:
    record: PublicationRecord
    author_territory: Optional[TerritoryId]  # planted cited-side assignment
    address_territory: Optional[TerritoryId]  # planted citing-side assignment


def _municipality(spec: SynthSpec, index: int) -> TerritoryId:
    return TerritoryId(
        TerritoryKind.MUNICIPALITY, f"M{index:03d}", country_of=spec.home_country
    )


def _build_gazetteer(spec: SynthSpec, rng: np.random.Generator) -> Gazetteer:
    entries: list[tuple[TerritoryId, GeoPoint]] = []
    for k in range(spec.n_municipalities):
        point = GeoPoint(
            float(rng.uniform(36.5, 46.5)), float(rng.uniform(7.0, 18.0))
        )
        entries.append((_municipality(spec, k), point))
    home = TerritoryId(
        TerritoryKind.COUNTRY, spec.home_country, continent=Continent.EUROPE
    )
    entries.append((home, GeoPoint(41.893, 12.483)))
    for k in range(spec.n_eur_countries):
        territory = TerritoryId(TerritoryKind.COUNTRY, f"E{k:02d}", continent=Continent.EUROPE)
        entries.append(
            (territory, GeoPoint(float(rng.uniform(35.0, 60.0)), float(rng.uniform(-9.0, 25.0))))
        )
    for k in range(spec.n_extra_countries):
        territory = TerritoryId(
            TerritoryKind.COUNTRY, f"X{k:02d}", continent=Continent.EXTRA_EUROPE
        )
        entries.append(
            (
                territory,
                GeoPoint(float(rng.uniform(-35.0, 55.0)), float(rng.uniform(-120.0, 150.0))),
            )
        )
    return Gazetteer(entries)


def _draw_categories(
    spec: SynthSpec, rng: np.random.Generator, primary: str
) -> frozenset[str]:
    codes = [plan.code for plan in spec.categories]
    if len(codes) > 1 and rng.random() < spec.multi_category_rate:
        other = codes[int(rng.integers(0, len(codes)))]
        if other != primary:
            return frozenset((primary, other))
    return frozenset((primary,))


def _author_pattern(
    spec: SynthSpec, rng: np.random.Generator, own: TerritoryId, pool: Sequence[TerritoryId]
) -> tuple[tuple[TerritoryId, ...], bool]:
    """Evidence list and whether it yields a strict majority for ``own``."""
    u = rng.random()
    others = [t for t in pool if t != own]
    other = others[int(rng.integers(0, len(others)))] if others else own
    if u < 0.75 or not others:
        return (own, own), True
    if u < 0.95:
        return (own, own, other), True
    return (own, other), False  # planted tie -> excluded


def generate_corpus(
    spec: SynthSpec,
) -> tuple[
    list[PublicationRecord], list[CitationEdge], Gazetteer, CategoryMap, SynthManifest
]:
    """Full synthetic corpus with planted assignments and dyad counts.

    Citation volumes follow the planted gravity coefficients as Poisson
    rates (flavor, not an exact law); the manifest records the realized
    per-dyad counts over assignable endpoints, which is what the
    pipeline must reproduce.
    """
    rng = _rng(spec.seed)
    gazetteer = _build_gazetteer(spec, rng)
    category_map = CategoryMap({plan.code: plan.area for plan in spec.categories})
    municipalities = [_municipality(spec, k) for k in range(spec.n_municipalities)]
    countries = [
        TerritoryId(TerritoryKind.COUNTRY, f"E{k:02d}", continent=Continent.EUROPE)
        for k in range(spec.n_eur_countries)
    ] + [
        TerritoryId(TerritoryKind.COUNTRY, f"X{k:02d}", continent=Continent.EXTRA_EUROPE)
        for k in range(spec.n_extra_countries)
    ]
    citing_territories = municipalities + countries

    manifest = SynthManifest(
        seed=spec.seed,
        noise_sd=spec.noise_sd,
        round_counts=spec.round_counts,
        context=spec.context.value,
        models={
            plan.code: {
                "area": plan.area,
                "ln_k": plan.model.ln_k,
                "alpha": plan.model.alpha,
                "beta": plan.model.beta,
                "gamma": plan.model.gamma,
                "n_observations": plan.n_observations,
            }
            for plan in spec.categories
        },
    )

    pubs: list[_PlantedPub] = []
    serial = 0

    def year(window: YearWindow) -> int:
        return int(rng.integers(window.start, window.end + 1))

    # cited publications, per (category, municipality) cell
    cells: dict[tuple[str, str], list[_PlantedPub]] = {}
    for plan in spec.categories:
        for mun in municipalities:
            n_cell = 1 + int(rng.integers(0, spec.max_cited_per_cell))
            cell: list[_PlantedPub] = []
            for _ in range(n_cell):
                authors, assignable = _author_pattern(spec, rng, mun, municipalities)
                pub = _PlantedPub(
                    PublicationRecord(
                        id=f"C{serial:06d}",
                        year=year(spec.cited_years),
                        categories=_draw_categories(spec, rng, plan.code),
                        author_territories=authors,
                    ),
                    author_territory=mun if assignable else None,
                    address_territory=None,
                )
                serial += 1
                cell.append(pub)
                pubs.append(pub)
            cells[(plan.code, mun.code)] = cell

    # citing publications, per territory
    citing_pool: dict[str, list[_PlantedPub]] = {}
    for territory in citing_territories:
        n_citing = max(1, round(spec.citing_per_territory * float(rng.uniform(0.5, 1.5))))
        pool: list[_PlantedPub] = []
        for _ in range(n_citing):
            primary = spec.categories[int(rng.integers(0, len(spec.categories)))].code
            addresses, assignable = _author_pattern(spec, rng, territory, citing_territories)
            pub = _PlantedPub(
                PublicationRecord(
                    id=f"Q{serial:06d}",
                    year=year(spec.citing_years),
                    categories=_draw_categories(spec, rng, primary),
                    address_territories=addresses,
                ),
                author_territory=None,
                address_territory=territory if assignable else None,
            )
            serial += 1
            pool.append(pub)
            pubs.append(pub)
        citing_pool[territory.code] = pool

    # convention-agreement block: both evidence lists, planted outcome
    n_agree = round(spec.agreement_rate * spec.agreement_publications)
    for k in range(spec.agreement_publications):
        primary = spec.categories[int(rng.integers(0, len(spec.categories)))].code
        a = municipalities[int(rng.integers(0, len(municipalities)))]
        b_candidates = [t for t in municipalities if t != a]
        b = b_candidates[int(rng.integers(0, len(b_candidates)))]
        if k < n_agree:
            authors, addresses = (a, a), (a, a)
            author_t, address_t = a, a
        else:
            authors, addresses = (a, a, b), (b, b, a)
            author_t, address_t = a, b
        pub = _PlantedPub(
            PublicationRecord(
                id=f"A{serial:06d}",
                year=year(spec.cited_years),
                categories=frozenset((primary,)),
                author_territories=authors,
                address_territories=addresses,
            ),
            author_territory=author_t,
            address_territory=address_t,
        )
        serial += 1
        pubs.append(pub)
    if spec.agreement_publications:
        manifest.agreement = {
            "agree": n_agree,
            "total": spec.agreement_publications,
            "rate": n_agree / spec.agreement_publications,
        }

    # planted mass counts over assignable publications
    for pub in pubs:
        if pub.author_territory is not None and pub.record.year in spec.cited_years:
            for category in pub.record.categories:
                key = KEY_SEP.join((pub.author_territory.code, category))
                manifest.cited_counts[key] = manifest.cited_counts.get(key, 0) + 1
        if pub.address_territory is not None and pub.record.year in spec.citing_years:
            for category in pub.record.categories:
                key = KEY_SEP.join((pub.address_territory.code, category))
                manifest.citing_counts[key] = manifest.citing_counts.get(key, 0) + 1

    # citations: Poisson volumes shaped by the planted gravity law
    planted = dict(spec.planted_dyads or {})
    mean_cell = sum(len(cell) for cell in cells.values()) / len(cells)
    mean_citing = sum(len(pool) for pool in citing_pool.values()) / len(citing_pool)
    edges: list[CitationEdge] = []
    for plan in spec.categories:
        for mun in municipalities:
            cell = cells[(plan.code, mun.code)]
            mun_point = gazetteer.point(mun)
            for territory in citing_territories:
                pool = citing_pool[territory.code]
                capacity = len(cell) * len(pool)
                requested = planted.pop((plan.code, mun.code, territory.code), None)
                if requested is not None:
                    if requested > capacity:
                        raise InfeasibleSpecError(
                            f"planted {requested} citations for dyad "
                            f"({plan.code}, {mun.code}, {territory.code}) exceed the "
                            f"{capacity} distinct citing/cited pairs available"
                        )
                    pair_indices = rng.choice(capacity, size=requested, replace=False)
                else:
                    d = max(haversine_km(mun_point, gazetteer.point(territory)), 1.0)
                    rate = (
                        spec.mean_citations_per_dyad
                        * (len(cell) / mean_cell) ** plan.model.alpha
                        * (len(pool) / mean_citing) ** plan.model.beta
                        * (d / 1000.0) ** plan.model.gamma
                    )
                    k = min(int(rng.poisson(min(rate, 0.8 * capacity))), capacity)
                    if k == 0:
                        continue
                    pair_indices = np.unique(rng.integers(0, capacity, size=k))
                for pair in sorted(int(p) for p in pair_indices):
                    cited = cell[pair % len(cell)]
                    citing = pool[pair // len(cell)]
                    edges.append(
                        CitationEdge(citing_id=citing.record.id, cited_id=cited.record.id)
                    )
                    if cited.author_territory is None or citing.address_territory is None:
                        continue
                    for category in cited.record.categories:
                        key = KEY_SEP.join((category, mun.code, territory.code))
                        manifest.dyad_counts[key] = manifest.dyad_counts.get(key, 0) + 1
    if planted:
        unknown = ", ".join("/".join(k) for k in sorted(planted))
        raise InfeasibleSpecError(f"planted dyads reference unknown cells: {unknown}")

    manifest.n_publications = len(pubs)
    manifest.n_edges = len(edges)
    return [p.record for p in pubs], edges, gazetteer, category_map, manifest


def default_spec(seed: int = 0) -> SynthSpec:
    """A modest corpus exercising every pipeline path quickly."""
    areas = ("DA0", "DA1", "DA2")
    gammas = (-0.3, -0.45, -0.6, 0.3, -0.5, -0.35, -0.55, -0.4)
    plans = tuple(
        CategoryPlan(
            code=f"SC{k:03d}",
            area=areas[k % len(areas)],
            model=PlantedModel(ln_k=4.0, alpha=0.4, beta=0.4, gamma=gammas[k]),
            n_observations=400,
        )
        for k in range(8)
    )
    return SynthSpec(
        seed=seed,
        categories=plans,
        agreement_publications=200,
        agreement_rate=0.95,
    )


def spec_to_json(spec: SynthSpec) -> bytes:
    data = {
        "seed": spec.seed,
        "noise_sd": spec.noise_sd,
        "round_counts": spec.round_counts,
        "context": spec.context.value,
        "mass_i_range": list(spec.mass_i_range),
        "mass_j_range": list(spec.mass_j_range),
        "distance_range_km": list(spec.distance_range_km),
        "home_country": spec.home_country,
        "n_municipalities": spec.n_municipalities,
        "n_eur_countries": spec.n_eur_countries,
        "n_extra_countries": spec.n_extra_countries,
        "cited_years": [spec.cited_years.start, spec.cited_years.end],
        "citing_years": [spec.citing_years.start, spec.citing_years.end],
        "max_cited_per_cell": spec.max_cited_per_cell,
        "citing_per_territory": spec.citing_per_territory,
        "mean_citations_per_dyad": spec.mean_citations_per_dyad,
        "multi_category_rate": spec.multi_category_rate,
        "agreement_publications": spec.agreement_publications,
        "agreement_rate": spec.agreement_rate,
        "categories": [
            {
                "code": plan.code,
                "area": plan.area,
                "ln_k": plan.model.ln_k,
                "alpha": plan.model.alpha,
                "beta": plan.model.beta,
                "gamma": plan.model.gamma,
                "n_observations": plan.n_observations,
            }
            for plan in spec.categories
        ],
    }
    if spec.planted_dyads:
        data["planted_dyads"] = {
            KEY_SEP.join(key): count for key, count in sorted(spec.planted_dyads.items())
        }
    return (json.dumps(data, sort_keys=True, indent=2) + "\n").encode("utf-8")


def spec_from_json(data: bytes) -> SynthSpec:
    obj = json.loads(data.decode("utf-8"))
    plans = tuple(
        CategoryPlan(
            code=entry["code"],
            area=entry["area"],
            model=PlantedModel(
                ln_k=entry["ln_k"],
                alpha=entry["alpha"],
                beta=entry["beta"],
                gamma=entry["gamma"],
            ),
            n_observations=entry.get("n_observations", 400),
        )
        for entry in obj["categories"]
    )
    planted = None
    if "planted_dyads" in obj:
        planted = {
            tuple(key.split(KEY_SEP)): count for key, count in obj["planted_dyads"].items()
        }
    kwargs = dict(
        seed=obj["seed"],
        categories=plans,
        planted_dyads=planted,
    )
    for name in (
        "noise_sd",
        "round_counts",
        "home_country",
        "n_municipalities",
        "n_eur_countries",
        "n_extra_countries",
        "max_cited_per_cell",
        "citing_per_territory",
        "mean_citations_per_dyad",
        "multi_category_rate",
        "agreement_publications",
        "agreement_rate",
    ):
        if name in obj:
            kwargs[name] = obj[name]
    if "context" in obj:
        kwargs["context"] = Context(obj["context"])
    for name in ("mass_i_range", "mass_j_range", "distance_range_km"):
        if name in obj:
            kwargs[name] = tuple(obj[name])
    for name, target in (("cited_years", "cited_years"), ("citing_years", "citing_years")):
        if name in obj:
            kwargs[target] = YearWindow(*obj[name])
    return SynthSpec(**kwargs)
