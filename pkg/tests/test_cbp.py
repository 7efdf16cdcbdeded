import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ambr import CbpConfig, cbp, exact_mbr, make_rng
from ambr.algorithms import win_ratios
from ambr.metrics import matrix_oracle
from ambr.synth import planted_corpus, random_instance

from conftest import matrix_instance


def test_config_validation():
    for bad in ({"r0": 0}, {"alpha": 0.0}, {"alpha": 1.5}, {"B": 0}):
        with pytest.raises(ValueError):
            CbpConfig(**bad)


@pytest.mark.parametrize("seed", range(15))
def test_alpha_one_disables_pruning(seed):
    inst = random_instance(10, seed)
    T = 90
    sel = cbp(inst, matrix_oracle(inst, budget=T), T, CbpConfig(r0=1, alpha=1.0, B=50), make_rng(seed))
    for rec in sel.trace:
        if "survivors" in rec:
            assert rec["survivors"] == rec["candidates"]
    assert sel.trace[-1]["r"] == 10
    assert sel.chosen == exact_mbr(inst, matrix_oracle(inst)).chosen


def test_incumbent_win_ratio_is_one():
    rng = np.random.default_rng(0)
    vals = rng.random((6, 4))
    mask = np.ones_like(vals, dtype=bool)
    mask[1, 2] = False
    for inc in range(6):
        w = win_ratios(np.where(mask, vals, 0), mask, inc, 10, 200, np.random.default_rng(inc))
        assert w[inc] == 1.0
        assert np.all((0 <= w) & (w <= 1))


def test_win_ratio_dominated_row_never_wins():
    vals = np.array([[1.0, 1.0, 1.0], [0.0, 0.0, 0.0]])
    w = win_ratios(vals, np.ones_like(vals, dtype=bool), 0, 3, 100, np.random.default_rng(0))
    assert w.tolist() == [1.0, 0.0]


@pytest.mark.parametrize("seed", range(5))
def test_budget_respected_default_setting(seed):
    for inst, _ in planted_corpus(10, 24, 0.2, 0.5, seed=100 + seed):
        for T in (17, 34, 69, 138, 276):
            sel = cbp(inst, matrix_oracle(inst, budget=T), T, CbpConfig(1, 0.99, 500),
                      make_rng(seed, inst.id, T))
            assert sel.evals_used <= T


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 20), r0=st.sampled_from([1, 2, 4, 8]),
       alpha=st.sampled_from([0.8, 0.9, 0.99]), T=st.integers(1, 400), seed=st.integers(0, 10 ** 6))
def test_incumbent_survives_and_budget_holds(n, r0, alpha, T, seed):
    inst = random_instance(n, seed)
    sel = cbp(inst, matrix_oracle(inst, budget=T), T, CbpConfig(r0, alpha, 100), make_rng(seed))
    assert sel.evals_used <= T
    for rec in sel.trace:
        if "survivors" in rec:
            assert rec["incumbent"] in rec["survivors"]
    assert 0 <= sel.chosen < n


@pytest.mark.parametrize("seed", range(8))
def test_shift_and_scale_invariance(seed):
    inst = random_instance(16, seed)
    moved = matrix_instance(4.0 * inst.utility_matrix + 1.5)
    cfg = CbpConfig(2, 0.9, 200)
    a = cbp(inst, matrix_oracle(inst, budget=120), 120, cfg, make_rng(seed))
    b = cbp(moved, matrix_oracle(moved, budget=120), 120, cfg, make_rng(seed))
    assert a.chosen == b.chosen
    assert [r.get("survivors") for r in a.trace] == [r.get("survivors") for r in b.trace]


def test_single_candidate():
    inst = matrix_instance([[0.0]])
    assert cbp(inst, matrix_oracle(inst), 5, CbpConfig(), make_rng(0)).chosen == 0


def test_doubling_reference_schedule():
    inst = random_instance(20, 0)
    sel = cbp(inst, matrix_oracle(inst), 10 ** 6, CbpConfig(r0=2, alpha=1.0, B=10), make_rng(0))
    assert [r["r"] for r in sel.trace] == [2, 4, 8, 16, 20]
