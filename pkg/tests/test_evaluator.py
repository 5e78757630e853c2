"""Accuracy evaluators: table lookup and the synthetic surrogate."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import REF_CHOICES
from weighted_nas.errors import AccuracyLookupError, ConfigError, DomainError
from weighted_nas.evaluator import (
    Evaluator,
    SyntheticEvaluator,
    TableEvaluator,
    gene_quality,
    synthetic_evaluate,
    table_evaluate,
)

chromosomes = st.lists(st.integers(0, 11), min_size=14, max_size=14).map(tuple)
ZERO = "0,0,0,0,0,0,0,0,0,0,0,0,0,0"


def q_oracle(t, k, se):
    return 0.5 * (t == 6) + 0.15 * (k - 3) / 4 + 0.35 * se


def score_oracle(m):
    weights = [1] * 7 + [2] * 7
    num = sum(w * q_oracle(*REF_CHOICES[g]) for w, g in zip(weights, m))
    return 0.5 + 0.3 * num / sum(weights)


# ---------------------------------------------------------------------------
# Table evaluator
# ---------------------------------------------------------------------------


class TestTableEvaluator:
    def test_exact_lookup(self):
        assert table_evaluate({ZERO: 0.61}, (0,) * 14) == 0.61

    def test_default_policy(self):
        assert table_evaluate({ZERO: 0.61}, (1,) * 14, default=0.0) == 0.0

    def test_strict_policy_names_chromosome(self):
        with pytest.raises(AccuracyLookupError, match="1,1,1,1,1,1,1,1,1,1,1,1,1,1"):
            table_evaluate({ZERO: 0.61}, (1,) * 14)

    def test_tuple_keys(self):
        ev = TableEvaluator({(2,) * 14: 0.7})
        assert ev.evaluate([2] * 14) == 0.7 and len(ev) == 1

    def test_rejects_out_of_range_scores(self):
        with pytest.raises(DomainError):
            TableEvaluator({ZERO: 1.5})
        with pytest.raises(DomainError):
            TableEvaluator({ZERO: 0.5}, default=-0.1)

    def test_from_csv(self, tmp_path):
        path = tmp_path / "acc.csv"
        path.write_text(f"chromosome,score\n{ZERO},0.61\n\"1,1,1,1,1,1,1,1,1,1,1,1,1,1\",0.7\n")
        ev = TableEvaluator.from_csv(path)
        assert ev.evaluate((0,) * 14) == 0.61
        assert ev.evaluate((1,) * 14) == 0.7

    def test_from_csv_bad_line(self, tmp_path):
        path = tmp_path / "acc.csv"
        path.write_text(f"{ZERO},0.61\n1,2,3,0.5\n")
        with pytest.raises(ConfigError, match=":2:"):
            TableEvaluator.from_csv(path)

    def test_from_csv_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            TableEvaluator.from_csv(tmp_path / "nope.csv")

    def test_satisfies_contract(self):
        assert isinstance(TableEvaluator({}), Evaluator)


# ---------------------------------------------------------------------------
# Synthetic evaluator
# ---------------------------------------------------------------------------


class TestSynthetic:
    def test_minimum(self):
        assert synthetic_evaluate((0,) * 14) == pytest.approx(0.50)

    def test_maximum(self):
        assert synthetic_evaluate((11,) * 14) == pytest.approx(0.80)

    def test_front_heavy(self):
        assert synthetic_evaluate((11,) * 7 + (0,) * 7) == pytest.approx(0.60)

    def test_gene_quality_matches_formula(self):
        for i, c in enumerate(REF_CHOICES):
            assert gene_quality(i) == pytest.approx(q_oracle(*c))
        assert {round(gene_quality(i) - gene_quality(i - 2), 3) for i in (2, 4, 8, 10)} == {0.075}

    @given(chromosomes)
    def test_matches_oracle(self, m):
        assert synthetic_evaluate(m) == pytest.approx(score_oracle(m), abs=1e-12)

    @given(chromosomes)
    def test_range(self, m):
        assert 0.5 - 1e-12 <= synthetic_evaluate(m) <= 0.8 + 1e-12

    @given(chromosomes, st.integers(0, 13), st.integers(0, 11))
    def test_gene_monotone(self, m, layer, g):
        if gene_quality(g) < gene_quality(m[layer]):
            return
        better = m[:layer] + (g,) + m[layer + 1:]
        assert synthetic_evaluate(better) >= synthetic_evaluate(m)

    def test_rejects_wrong_length(self):
        with pytest.raises(DomainError):
            synthetic_evaluate((0,) * 13)

    def test_satisfies_contract(self):
        assert isinstance(SyntheticEvaluator(), Evaluator)


class TestDeterminism:
    def test_repeat_calls(self):
        rng = np.random.default_rng(1000)
        ms = [tuple(int(g) for g in rng.integers(0, 12, 14)) for _ in range(1000)]
        syn = SyntheticEvaluator()
        table = TableEvaluator({m: synthetic_evaluate(m) for m in ms})
        for ev in (syn, table):
            first = [ev.evaluate(m) for m in ms]
            assert first == [ev.evaluate(m) for m in ms]

    def test_concurrent_calls(self):
        rng = np.random.default_rng(7)
        ms = [tuple(int(g) for g in rng.integers(0, 12, 14)) for _ in range(500)]
        ev = SyntheticEvaluator()
        serial = [ev.evaluate(m) for m in ms]
        with ThreadPoolExecutor(8) as pool:
            assert list(pool.map(ev.evaluate, ms)) == serial
