"""Descriptive statistics against a from-scratch oracle."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from citeflow.stats import StatsRow, summarize

from oracles import summarize_sorted

finite_floats = st.floats(
    min_value=-1e9, max_value=1e9, allow_nan=False, allow_infinity=False
)
value_lists = st.lists(finite_floats, min_size=1, max_size=60)


def assert_matches_oracle(values, rel=1e-12):
    row = summarize(values)
    n, mean, p25, p50, p75, sd, cv, maximum = summarize_sorted(values)
    assert row.n == n
    scale = max(1.0, abs(mean), abs(maximum))
    assert row.mean == pytest.approx(mean, abs=rel * scale)
    assert row.p25 == pytest.approx(p25, abs=rel * scale)
    assert row.p50 == pytest.approx(p50, abs=rel * scale)
    assert row.p75 == pytest.approx(p75, abs=rel * scale)
    assert row.sd == pytest.approx(sd, abs=rel * scale)
    assert row.max == maximum
    if cv is None:
        assert row.cv is None
    else:
        assert row.cv == pytest.approx(cv, abs=rel * max(1.0, abs(cv)))


class TestSummarize:
    def test_singleton(self):
        row = summarize([5.0])
        assert (row.mean, row.sd, row.max) == (5.0, 0.0, 5.0)
        assert row.p25 == row.p50 == row.p75 == 5.0

    def test_one_to_four(self):
        row = summarize([1.0, 2.0, 3.0, 4.0])
        assert row.p25 == 1.75
        assert row.p50 == 2.5
        assert row.p75 == 3.25
        assert row.mean == 2.5
        assert row.sd == pytest.approx(1.29099, abs=1e-5)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            summarize([])

    def test_cv_absent_for_zero_mean(self):
        assert summarize([-1.0, 1.0]).cv is None

    def test_randomized_against_oracle(self):
        rng = np.random.default_rng(99)
        for _ in range(300):
            n = int(rng.integers(1, 80))
            values = rng.normal(rng.uniform(-50, 50), rng.uniform(0.1, 30), n).tolist()
            assert_matches_oracle(values)

    @given(value_lists)
    def test_oracle_property(self, values):
        assert_matches_oracle(values, rel=1e-9)

    @given(value_lists, st.permutations(range(5)))
    def test_permutation_invariance(self, values, _):
        rng = np.random.default_rng(0)
        shuffled = list(values)
        rng.shuffle(shuffled)
        assert summarize(shuffled) == summarize(values)

    @given(value_lists, st.floats(min_value=-100, max_value=100, allow_nan=False))
    def test_translation(self, values, shift):
        base = summarize(values)
        moved = summarize([v + shift for v in values])
        tol = 1e-9 * max(1.0, abs(shift), abs(base.mean))
        assert moved.mean == pytest.approx(base.mean + shift, abs=tol)
        assert moved.p50 == pytest.approx(base.p50 + shift, abs=tol)
        assert moved.sd == pytest.approx(base.sd, abs=tol)

    @given(value_lists, st.floats(min_value=0.01, max_value=100, allow_nan=False))
    def test_positive_scaling(self, values, factor):
        base = summarize(values)
        scaled = summarize([v * factor for v in values])
        tol = 1e-9 * max(1.0, abs(base.max) * factor)
        assert scaled.mean == pytest.approx(base.mean * factor, abs=tol)
        assert scaled.max == pytest.approx(base.max * factor, abs=tol)
        assert scaled.sd == pytest.approx(base.sd * factor, abs=tol)
        if base.cv is not None and abs(base.mean) > 1e-6:
            assert scaled.cv == pytest.approx(base.cv, rel=1e-6)

    @given(value_lists)
    def test_percentile_chain(self, values):
        row = summarize(values)
        assert row.p25 <= row.p50 <= row.p75 <= row.max


class TestStatsRow:
    def test_chain_enforced(self):
        with pytest.raises(ValueError):
            StatsRow(n=2, mean=1.0, p25=2.0, p50=1.0, p75=3.0, sd=0.5, cv=0.5, max=3.0)

    def test_negative_sd_rejected(self):
        with pytest.raises(ValueError):
            StatsRow(n=1, mean=1.0, p25=1.0, p50=1.0, p75=1.0, sd=-0.1, cv=None, max=1.0)
