"""Domain types and corpus validation."""

from __future__ import annotations

import random

import pytest

from citeflow.model import (
    AnalysisConfig,
    CategoryMap,
    CategoryScheme,
    CitationEdge,
    Continent,
    TerritoryId,
    TerritoryKind,
    YearWindow,
    validate_corpus,
)

from conftest import FRANCE, MILAN, ROME, municipality, pub


class TestTerritoryId:
    def test_municipality_requires_country(self):
        with pytest.raises(ValueError):
            TerritoryId(TerritoryKind.MUNICIPALITY, "Milan")

    def test_empty_code_rejected(self):
        with pytest.raises(ValueError):
            TerritoryId(TerritoryKind.COUNTRY, "")

    def test_token_round_trip(self):
        for territory in (MILAN, FRANCE, municipality("Mi:lan")):
            assert TerritoryId.from_token(territory.token()) == territory

    def test_identity_ignores_metadata(self):
        bare = TerritoryId(TerritoryKind.COUNTRY, "FR")
        rich = TerritoryId(TerritoryKind.COUNTRY, "FR", continent=Continent.EUROPE)
        assert bare == rich
        assert hash(bare) == hash(rich)
        assert len({bare, rich}) == 1

    def test_kind_distinguishes(self):
        assert TerritoryId(TerritoryKind.COUNTRY, "X", continent=Continent.EUROPE) != municipality("X")

    def test_malformed_tokens(self):
        for token in ("", ":code", "CC:"):
            with pytest.raises(ValueError):
                TerritoryId.from_token(token)


class TestEdgeAndWindow:
    def test_self_loop_rejected(self):
        with pytest.raises(ValueError):
            CitationEdge("P1", "P1")

    def test_window_contains(self):
        window = YearWindow(2010, 2012)
        assert 2010 in window and 2012 in window
        assert 2013 not in window

    def test_empty_window_rejected(self):
        with pytest.raises(ValueError):
            YearWindow(2012, 2010)


class TestAnalysisConfig:
    def test_defaults(self):
        config = AnalysisConfig()
        assert config.cited_window == YearWindow(2010, 2012)
        assert config.citing_window == YearWindow(2010, 2017)
        assert config.home_country == "IT"
        assert config.min_observations == 30
        assert config.significance_thresholds == (0.01, 0.05, 0.1)
        assert config.exclude_same_territory_dyads

    @pytest.mark.parametrize(
        "thresholds", [(0.05, 0.05, 0.1), (0.1, 0.05, 0.01), (0.0, 0.05, 0.1), (0.01, 0.05, 1.0)]
    )
    def test_bad_thresholds(self, thresholds):
        with pytest.raises(ValueError):
            AnalysisConfig(significance_thresholds=thresholds)


class TestCategoryMap:
    def test_counts(self):
        cmap = CategoryMap({f"SC{i}": f"DA{i % 3}" for i in range(12)})
        assert cmap.category_count == 12
        assert cmap.area_count == 3

    def test_missing_category(self):
        cmap = CategoryMap({"A": "DA0"})
        with pytest.raises(KeyError):
            cmap.area_of("B")

    def test_coarse_scheme_full_counts(self):
        cmap = CategoryMap({"A": "DA0", "B": "DA1", "C": "DA0"})
        scheme = CategoryScheme.coarse(cmap)
        assert scheme.effective(frozenset(("A", "C"))) == frozenset(("DA0",))
        assert scheme.effective(frozenset(("A", "B"))) == frozenset(("DA0", "DA1"))

    def test_fine_scheme_identity(self):
        scheme = CategoryScheme.fine()
        assert scheme.effective(frozenset(("A", "B"))) == frozenset(("A", "B"))


class TestValidateCorpus:
    def test_clean_corpus(self, tiny_corpus):
        pubs, edges, gazetteer = tiny_corpus
        assert validate_corpus(pubs, edges, gazetteer) == []

    def test_duplicate_id(self, small_gazetteer):
        pubs = [pub("P1", authors=[MILAN]), pub("P1", authors=[ROME])]
        report = validate_corpus(pubs, [], small_gazetteer)
        assert [v.kind for v in report] == ["duplicate-id"]
        assert report[0].subject == "P1"

    def test_dangling_edge(self, small_gazetteer):
        pubs = [pub("A", authors=[MILAN])]
        report = validate_corpus(pubs, [CitationEdge("A", "B")], small_gazetteer)
        assert [v.kind for v in report] == ["dangling-edge"]
        assert report[0].subject == "B"

    def test_unknown_territory(self, small_gazetteer):
        ghost = municipality("Atlantis")
        report = validate_corpus([pub("P1", authors=[ghost])], [], small_gazetteer)
        assert [v.kind for v in report] == ["unknown-territory"]
        assert "Atlantis" in report[0].subject

    def test_empty_categories(self, small_gazetteer):
        report = validate_corpus([pub("P1", categories=(), authors=[MILAN])], [], small_gazetteer)
        assert [v.kind for v in report] == ["empty-categories"]

    def test_order_insensitive(self, tiny_corpus, small_gazetteer):
        pubs, edges, _ = tiny_corpus
        pubs = pubs + [pub("P1", authors=[ROME]), pub("X", categories=(), authors=[MILAN])]
        edges = edges + [CitationEdge("P2", "GONE")]
        baseline = validate_corpus(pubs, edges, small_gazetteer)
        assert baseline
        rng = random.Random(5)
        for _ in range(5):
            shuffled_pubs = pubs[:]
            shuffled_edges = edges[:]
            rng.shuffle(shuffled_pubs)
            rng.shuffle(shuffled_edges)
            assert validate_corpus(shuffled_pubs, shuffled_edges, small_gazetteer) == baseline
