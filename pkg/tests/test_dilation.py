import math

import numpy as np
import pytest
from hypothesis import given, settings

from diagbounds.bounds import npv_new, ppv_new
from diagbounds.core import SigmaInconsistent, StudyConfig, TestTable
from diagbounds.datasets import EMBEDDED, PUBLISHED_THRESHOLDS
from diagbounds.dilation import (
    ThresholdStatus,
    dilation_bound,
    dilation_terms,
    dilation_threshold,
    is_dilation,
    who_screen,
)
from diagbounds.oracle import oracle_dilation

from conftest import DATASETS, table_and_sigma


class TestThreshold:
    @pytest.mark.parametrize("name", sorted(PUBLISHED_THRESHOLDS))
    def test_matches_published(self, name):
        raw = dilation_threshold(EMBEDDED[name].table).raw_threshold
        assert 100 * raw == pytest.approx(PUBLISHED_THRESHOLDS[name], abs=0.15)

    def test_dilation_example(self, dilation):
        result = dilation_threshold(dilation)
        assert result.status is ThresholdStatus.INTERIOR
        assert result.raw_threshold == pytest.approx(0.593 * 0.49 / 0.478, abs=1e-12)
        assert result.dilates_at(0.6) and not result.dilates_at(0.85)

    @pytest.mark.parametrize("name", DATASETS)
    def test_bisection_flip(self, name):
        table = EMBEDDED[name].table
        raw = dilation_bound(table)
        if not (table.gamma < raw < 1.0):
            pytest.skip("threshold outside the admissible range")
        assert is_dilation(table, raw - 1e-9)
        assert not is_dilation(table, raw + 1e-9)

    def test_never_dilates(self):
        # raw threshold at or below gamma: every admissible sigma is informative
        t = TestTable(0.5, 0.0, 0.0, 0.5)
        result = dilation_threshold(t)
        assert result.status is ThresholdStatus.NEVER
        assert not is_dilation(t, 0.75)

    def test_always_dilates(self):
        # independent tests: both terms equal one
        t = TestTable.from_probs(0.42, 0.18, 0.28, 0.12)
        result = dilation_threshold(t)
        assert result.status is ThresholdStatus.ALWAYS
        assert is_dilation(t, 1.0)

    def test_zero_denominators_are_infinite(self):
        assert dilation_terms(TestTable(0.5, 0.1, 0.0, 0.4))[1] == math.inf
        assert dilation_terms(TestTable(0.5, 0.1, 0.4, 0.0))[0] == math.inf

    def test_verdict_records_binding_term(self, dilation, binax):
        assert is_dilation(dilation, 0.6).binding_term == "positive"
        verdict = is_dilation(binax, 0.98)
        assert not verdict and verdict.sigma_used == 0.98

    def test_sigma_must_exceed_yield(self, stq):
        with pytest.raises(SigmaInconsistent):
            is_dilation(stq, 0.3)


class TestAgreementWithOracle:
    @pytest.mark.parametrize("name", DATASETS)
    def test_sigma_grid(self, name):
        table = EMBEDDED[name].table
        raw = dilation_bound(table)
        for sigma in np.linspace(table.gamma, 1.0, 26)[1:]:
            sigma = float(sigma)
            if abs(sigma - raw) < 1e-6:
                continue
            closed = bool(is_dilation(table, sigma))
            assert closed == oracle_dilation(table, StudyConfig(sigma), n_t=201)
            in_both = ppv_new(table, sigma).contains(table.gamma / sigma, 1e-12) and npv_new(
                table, sigma
            ).complement().contains(table.gamma / sigma, 1e-12)
            assert closed == in_both

    @settings(max_examples=150, deadline=None)
    @given(table_and_sigma())
    def test_random_tables(self, ts):
        table, sigma = ts
        raw = dilation_bound(table)
        if abs(sigma - raw) < 1e-7:
            return
        assert bool(is_dilation(table, sigma)) == oracle_dilation(table, StudyConfig(sigma), n_t=3)


class TestScreen:
    def test_stq_passes(self, stq):
        result = who_screen(stq, 0.98)
        assert result.passed
        assert result.limit == pytest.approx(0.784, abs=1e-12)
        assert "Sufficient" in result.explanation

    def test_dilation_fails_at_low_sigma(self, dilation):
        result = who_screen(dilation, 0.6)
        assert not result.passed
        assert "only sufficient" in result.explanation

    def test_low_apparent_sensitivity_caveat(self):
        # apparent sensitivity 0.5 is below the 0.8 minimum
        t = TestTable(0.5, 0.0, 0.25, 0.25)
        result = who_screen(t, 0.9)
        assert result.passed
        assert "Not sufficient" in result.explanation

    @pytest.mark.parametrize("bad", [0.0, -0.1, 1.5])
    def test_rejects_bad_minimum(self, stq, bad):
        with pytest.raises(ValueError):
            who_screen(stq, 0.9, bad)

    def test_soundness_on_random_tables(self):
        # passing with high apparent sensitivity and a non-binding negative term rules out dilation
        rng = np.random.default_rng(20201016)
        checked = 0
        for _ in range(10_000):
            cells = rng.dirichlet(np.ones(4))
            table = TestTable.from_probs(*cells)
            sigma = table.gamma + rng.uniform(1e-6, 1.0) * (1.0 - table.gamma)
            if sigma <= table.gamma:
                continue
            result = who_screen(table, sigma)
            positive, negative = dilation_terms(table)
            if result.passed and result.apparent_sensitivity > 0.8 and positive <= negative:
                checked += 1
                assert not is_dilation(table, sigma)
        assert checked > 100
