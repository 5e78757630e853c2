"""The nine acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line that the terminal summary prints under
"acceptance criteria".
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from oracles import REF_CHOICES, pareto_front_sweep, standard_crowding, stable_argsort, stripping_ranks
from weighted_nas.cli import main
from weighted_nas.evaluator import SyntheticEvaluator
from weighted_nas.latency import LatencyTable, latency_rmse, predict_latency, synthetic_table
from weighted_nas.model_stats import block_cost_table, model_stats
from weighted_nas.nsga2 import (
    EQUAL_WEIGHTS,
    Individual,
    ObjectiveVector,
    ObjectiveWeights,
    SearchConfig,
    evolve,
    fast_nondominated_sort,
    hypervolume,
    rank_and_crowd,
    weighted_crowding,
)
from weighted_nas.search_space import MOGA_A, MOGA_B, MOGA_C, diversity_init

pytestmark = pytest.mark.slow

SEEDS = range(5)
REDUCED_PINS = {i: 0 for i in range(5, 14)}


def _individuals(F):
    return [
        Individual((i % 12, i // 12) + (0,) * 12, ObjectiveVector(-a, b, -c))
        for i, (a, b, c) in enumerate(F)
    ]


# ---------------------------------------------------------------------------
# 1. Model statistics
# ---------------------------------------------------------------------------


def test_ac1_model_statistics(record_criterion):
    targets = {"A": (MOGA_A, 5.1, 304), "B": (MOGA_B, 5.5, 248), "C": (MOGA_C, 5.4, 221)}
    parts, ok = [], True
    for name, (m, p_target, madd_target) in targets.items():
        s = model_stats(m)
        dp = (s.params_m - p_target) / p_target
        dm = (s.madds_m - madd_target) / madd_target
        ok &= abs(dp) <= 0.02 and abs(dm) <= 0.03
        parts.append(f"{name} {s.params_m:.3f}M ({dp:+.2%}) {s.madds_m:.1f}M MAdds ({dm:+.2%})")
    record_criterion(1, ok, "; ".join(parts))
    assert ok


# ---------------------------------------------------------------------------
# 2. Sorting oracle
# ---------------------------------------------------------------------------


def test_ac2_sorting_matches_stripping_oracle(record_criterion):
    rng = np.random.default_rng(2)
    mismatches = 0
    for _ in range(1000):
        F = rng.uniform(0, 1, (int(rng.integers(1, 17)), 3))
        pop = _individuals(F)
        fast_nondominated_sort(pop)
        mismatches += [i.rank for i in pop] != stripping_ranks([ind.canonical() for ind in pop])
    record_criterion(2, mismatches == 0, f"{mismatches} mismatches over 1000 populations")
    assert mismatches == 0


# ---------------------------------------------------------------------------
# 3. Weight degradation
# ---------------------------------------------------------------------------


def test_ac3_equal_weights_degrade_to_standard_crowding(record_criterion):
    rng = np.random.default_rng(3)
    mismatches = 0
    for _ in range(500):
        size = int(rng.integers(3, 51))
        # points on the positive unit sphere are mutually non-dominated
        X = np.abs(rng.normal(size=(size, 3)))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        front = _individuals(X)
        assert len(fast_nondominated_sort(front)) == 1
        ours = weighted_crowding(front, EQUAL_WEIGHTS)
        reference = standard_crowding([ind.canonical() for ind in front])
        mismatches += stable_argsort(ours) != stable_argsort(reference)
    record_criterion(3, mismatches == 0, f"{mismatches} argsort mismatches over 500 fronts")
    assert mismatches == 0


# ---------------------------------------------------------------------------
# 4. Latency linearity
# ---------------------------------------------------------------------------


def test_ac4_latency_linearity(record_criterion):
    rng = np.random.default_rng(4)
    exact_delta = same_order = 0
    for _ in range(1000):
        # dyadic cells and delta: every partial sum is exact in binary64
        t = LatencyTable(rng.integers(0, 4096, (14, 12)) / 1024, rng.integers(0, 4096) / 1024)
        m = tuple(int(g) for g in rng.integers(0, 12, 14))
        layer = int(rng.integers(14))
        delta = rng.integers(1, 4096) / 1024
        bumped = t.with_cell(layer, m[layer], t.entries[layer, m[layer]] + delta)
        exact_delta += predict_latency(bumped, m) - predict_latency(t, m) == delta

        # arbitrary floats: the perturbed prediction equals the same-order sum
        u = LatencyTable(rng.uniform(0, 3, (14, 12)), float(rng.uniform(0, 2)))
        d = float(rng.uniform(0.001, 1))
        u2 = u.with_cell(layer, m[layer], u.entries[layer, m[layer]] + d)
        total = u.overhead_ms
        for i, g in enumerate(m):
            total += float(u.entries[i, g]) + (d if i == layer else 0.0)
        same_order += predict_latency(u2, m) == total
    rmse_zero = latency_rmse([3.5, 7.25, 1.0], [3.5, 7.25, 1.0]) == 0.0
    ok = exact_delta == 1000 and same_order == 1000 and rmse_zero
    record_criterion(
        4, ok, f"exact delta {exact_delta}/1000, same-order sum {same_order}/1000, rmse(x, x) = 0: {rmse_zero}"
    )
    assert ok


# ---------------------------------------------------------------------------
# 5. Search quality on the enumerable reduced space
# ---------------------------------------------------------------------------


def _reduced_space(lut):
    """Canonical objectives of all 12^5 chromosomes with layers 6..14 pinned to 0."""
    grids = np.meshgrid(*[np.arange(12)] * 5, indexing="ij")
    G = np.zeros((12**5, 14), dtype=np.int64)
    for i, g in enumerate(grids):
        G[:, i] = g.ravel()
    q = np.array([0.5 * (t == 6) + 0.15 * (k - 3) / 4 + 0.35 * se for t, k, se in REF_CHOICES])
    w = np.array([1] * 7 + [2] * 7)
    acc = 0.5 + 0.3 * (q[G] * w).sum(axis=1) / w.sum()
    lat = lut.overhead_ms + lut.entries[np.arange(14), G].sum(axis=1)
    costs = block_cost_table()
    params = costs.fixed_params + costs.params[np.arange(14), G].sum(axis=1)
    return np.column_stack([-acc, lat, -params.astype(np.float64)])


def test_ac5_search_quality_reduced_space(record_criterion):
    lut, ev = synthetic_table(), SyntheticEvaluator()
    F = _reduced_space(lut)
    lo, hi = F.min(axis=0), F.max(axis=0)
    ref = [1.1] * 3
    true_front = pareto_front_sweep((F - lo) / (hi - lo))
    hv_true = hypervolume(true_front, ref)

    ratios = []
    for seed in SEEDS:
        cfg = SearchConfig(population_size=70, generations=120, seed=seed, pinned=REDUCED_PINS)
        r = evolve(cfg, ev, lut)
        found = np.array([ind.canonical() for ind in r.front])
        ratios.append(hypervolume((found - lo) / (hi - lo), ref) / hv_true)
    ok = all(x >= 0.95 for x in ratios)
    detail = f"true front {len(true_front)} pts, HV {hv_true:.4f}; ratios " + ", ".join(f"{x:.3f}" for x in ratios)
    record_criterion(5, ok, detail)
    assert ok


# ---------------------------------------------------------------------------
# 6. Determinism across worker counts
# ---------------------------------------------------------------------------


def test_ac6_determinism_across_workers(tmp_path, capsys, record_criterion):
    config = tmp_path / "run.toml"
    config.write_text("population_size = 40\ngenerations = 30\nseed = 17\n")
    assert main(["search", str(config), "-o", str(tmp_path / "w1"), "--workers", "1"]) == 0
    assert main(["search", str(config), "-o", str(tmp_path / "w4"), "--workers", "4"]) == 0
    capsys.readouterr()
    same = {
        name: (tmp_path / "w1" / name).read_bytes() == (tmp_path / "w4" / name).read_bytes()
        for name in ("front.csv", "generations.jsonl")
    }
    ok = all(same.values())
    record_criterion(6, ok, "byte-identical with 1 vs 4 workers: " + ", ".join(f"{k} {v}" for k, v in same.items()))
    assert ok


# ---------------------------------------------------------------------------
# 7. Params objective shifts the final population
# ---------------------------------------------------------------------------


def test_ac7_params_objective_effect(record_criterion):
    lut, ev = synthetic_table(), SyntheticEvaluator()
    pairs = []
    for seed in SEEDS:
        cfg = SearchConfig(seed=seed)
        three = evolve(cfg, ev, lut).population
        two = evolve(cfg.two_objective(), ev, lut).population
        pairs.append((
            math.fsum(i.objectives.params for i in three) / len(three) / 1e6,
            math.fsum(i.objectives.params for i in two) / len(two) / 1e6,
        ))
    ok = all(a > b for a, b in pairs)
    detail = "mean params 3-obj vs 2-obj (M): " + ", ".join(f"{a:.3f}>{b:.3f}" for a, b in pairs)
    record_criterion(7, ok, detail)
    assert ok


# ---------------------------------------------------------------------------
# 8. Scale invariance of ranking
# ---------------------------------------------------------------------------


def _ranked(chromosomes, lut, ev, weights):
    pop = [
        Individual(m, ObjectiveVector(ev.evaluate(m), predict_latency(lut, m), model_stats(m).param_count))
        for m in chromosomes
    ]
    fronts = rank_and_crowd(pop, weights)
    ranks = [i.rank for i in pop]
    orders = [stable_argsort([i.crowding for i in f]) for f in fronts]
    return ranks, orders


def test_ac8_scale_invariance(record_criterion):
    lut, ev = synthetic_table(), SyntheticEvaluator()
    big = lut.scaled(1000)
    rng = np.random.default_rng(8)
    checked = mismatches = 0
    for weights in (ObjectiveWeights(), EQUAL_WEIGHTS):
        for _ in range(10):
            pop = diversity_init(70, rng)
            mismatches += _ranked(pop, lut, ev, weights) != _ranked(pop, big, ev, weights)
            checked += 1
    record_criterion(8, mismatches == 0, f"{mismatches} differences over {checked} populations with LUT x1000")
    assert mismatches == 0


# ---------------------------------------------------------------------------
# 9. Initialization coverage
# ---------------------------------------------------------------------------


def test_ac9_initialization_coverage(record_criterion):
    covered = 0
    for seed in range(100):
        cols = np.array(diversity_init(70, np.random.default_rng(seed))).T
        covered += all(set(col.tolist()) == set(range(12)) for col in cols)
    record_criterion(9, covered == 100, f"full coverage on {covered}/100 seeds")
    assert covered == 100
