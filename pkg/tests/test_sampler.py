import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ksparsify import (DecomposableInstance, GroundSet, PeakEstimates, exact_peaks, kappa,
                       modular, run_trials, sample, verify_sparsifier)
from ksparsify.generators import complete_bipartite_cut, coverage_instance, skewed_coverage_instance
from ksparsify.sampler import SparsifierWeights, component_uniforms


def test_kappa_formula():
    assert kappa(0.5, 0.5, 8) == pytest.approx(3 * math.log(32) / 0.25)
    assert kappa(0.5, 0.5, 8) == pytest.approx(41.588, abs=1e-3)


@pytest.mark.parametrize("eps,delta,size", [(1.0, 0.5, 8), (0.5, 2.0, 8), (0.0, 0.5, 8),
                                            (0.5, 0.0, 8), (0.5, 0.5, 0)])
def test_kappa_rejects_out_of_range(eps, delta, size):
    with pytest.raises(ValueError):
        kappa(eps, delta, size)


@given(st.floats(1e-3, 0.999), st.floats(1e-3, 0.999), st.integers(1, 10**9))
def test_kappa_exceeds_one(eps, delta, size):
    assert kappa(eps, delta, size) > 1


def test_component_uniforms_are_philox_blocks():
    u = component_uniforms(42, 7)
    for i in range(7):
        bg = np.random.Philox(np.random.SeedSequence(42)).advance(i)
        assert np.random.Generator(bg).random() == u[i]
    # prefix property: adding components does not move earlier draws
    assert np.array_equal(component_uniforms(42, 12)[:7], u)


def test_unit_peaks_keep_everything():
    inst = coverage_instance(4, 6, seed=0)
    s = sample(inst, np.ones(6), 0.3, 0.1, seed=1)
    assert np.array_equal(s.w, np.ones(6))
    assert s.nnz == 6
    assert np.array_equal(s.kappa_i, np.ones(6))


def test_single_component_is_zero_sparsifier():
    inst = coverage_instance(3, 1, seed=2)
    s = sample(inst, exact_peaks(inst), 0.5, 0.5, seed=0)
    assert s.w.tolist() == [1.0]
    assert verify_sparsifier(inst, s, 1e-6).is_sparsifier


def test_counterexample_gives_identity_weights():
    inst = complete_bipartite_cut()
    s = sample(inst, exact_peaks(inst), 0.4, 0.2, seed=3)
    assert np.array_equal(s.w, np.ones(25))


def test_sample_validation():
    inst = coverage_instance(3, 4, seed=0)
    with pytest.raises(ValueError):
        sample(inst, np.ones(3), 0.5, 0.5)
    with pytest.raises(ValueError):
        sample(inst, -np.ones(4), 0.5, 0.5)
    with pytest.raises(ValueError):
        sample(inst, np.ones(4), 1.5, 0.5)


def test_weights_are_inverse_probabilities():
    inst = skewed_coverage_instance(5, 60, seed=1)
    s = sample(inst, exact_peaks(inst), 0.5, 0.3, seed=9)
    kept = s.w > 0
    assert np.allclose(s.w[kept], 1 / s.kappa_i[kept])
    assert np.allclose(s.kappa_i, np.minimum(1, s.kappa * exact_peaks(inst).values))
    assert s.nnz == kept.sum()


def test_determinism():
    inst = skewed_coverage_instance(5, 60, seed=1)
    p = exact_peaks(inst)
    a = sample(inst, p, 0.4, 0.2, seed=123)
    b = sample(inst, p, 0.4, 0.2, seed=123)
    c = sample(inst, p, 0.4, 0.2, seed=124)
    assert a.w.tobytes() == b.w.tobytes()
    assert a.w.tobytes() != c.w.tobytes()


def test_domain_size_override_only_changes_kappa():
    inst = coverage_instance(4, 5, seed=0)
    s = sample(inst, np.full(5, 0.01), 0.5, 0.5, domain_size=1)
    assert s.kappa == pytest.approx(kappa(0.5, 0.5, 1))


def test_verify_all_ones_and_all_zeros():
    inst = coverage_instance(4, 5, seed=0)
    ok = verify_sparsifier(inst, np.ones(5), 0.1)
    assert ok.is_sparsifier and ok.worst_ratio == 1.0 and ok.definition_holds
    bad = verify_sparsifier(inst, np.zeros(5), 0.1)
    assert not bad.is_sparsifier and bad.worst_ratio == 0.0
    assert bad.witness is not None


def test_verify_reports_both_forms():
    g = GroundSet(1)
    inst = DecomposableInstance([modular(g, [1.0])])
    # the reversed sandwich (1-eps) F' <= F <= (1+eps) F' means 1/1.5 <= F'/F <= 2
    res = verify_sparsifier(inst, np.array([1.45]), 0.5)
    assert res.is_sparsifier
    assert res.definition_holds
    res = verify_sparsifier(inst, np.array([0.6]), 0.5)
    assert res.is_sparsifier and not res.definition_holds


def test_pass_rate_on_coverage_instance():
    inst = coverage_instance(6, 50, seed=7)
    p = exact_peaks(inst)
    s = run_trials(inst, p, 0.4, 0.2, 200, seed=0)
    # binomial 99% band around the worst allowed pass rate
    assert 1 - s.failure_rate >= 0.8 - 2.576 * math.sqrt(0.8 * 0.2 / 200)


def test_unbiased_aggregate():
    inst = skewed_coverage_instance(6, 80, seed=2)
    p = exact_peaks(inst)
    trials = 1500
    ws = np.array([sample(inst, p, 0.4, 0.2, seed=[5, t]).w for t in range(trials)])
    rng = np.random.default_rng(0)
    V = inst.values()
    cols = rng.choice(inst.ground.size, size=20, replace=False)
    for j in cols:
        vals = ws @ V[:, j]
        F = V[:, j].sum()
        se = vals.std(ddof=1) / math.sqrt(trials)
        assert abs(vals.mean() - F) <= 4 * se + 1e-9


@pytest.mark.parametrize("factor", [1, 2, 10])
def test_inflated_peaks_remain_sparsifiers(factor):
    inst = skewed_coverage_instance(6, 80, seed=3)
    p = exact_peaks(inst).values
    base = run_trials(inst, p, 0.4, 0.2, 300, seed=1)
    s = run_trials(inst, factor * p, 0.4, 0.2, 300, seed=1)
    assert s.failure_rate <= 0.2
    assert s.expected_nnz <= factor * base.expected_nnz + 1e-9


def test_run_trials_best_is_smallest_passing():
    inst = skewed_coverage_instance(6, 80, seed=4)
    p = exact_peaks(inst)
    s = run_trials(inst, p, 0.4, 0.2, 20, seed=0)
    passing = s.nnz[~s.failures]
    assert s.best.nnz == passing.min()
    assert verify_sparsifier(inst, s.best, 0.4).is_sparsifier
    assert s.kappa_bound >= s.expected_nnz - 1e-9


def test_run_trials_rejects_zero_trials():
    inst = coverage_instance(3, 2, seed=0)
    with pytest.raises(ValueError):
        run_trials(inst, np.ones(2), 0.5, 0.5, 0)


def test_json_roundtrip():
    inst = skewed_coverage_instance(5, 40, seed=5)
    s = sample(inst, exact_peaks(inst), 0.4, 0.2, seed=[3, 1])
    d = json.loads(json.dumps(s.to_dict()))
    assert set(d) >= {"kappa", "seed", "weights", "nnz", "epsilon", "delta", "peak_method"}
    assert d["peak_method"] == "exact-enum"
    assert all(entry["w"] != 0 for entry in d["weights"])
    back = SparsifierWeights.from_dict(d)
    assert np.array_equal(back.w, s.w)
    assert back.seed == [3, 1]


def test_peak_estimates_accepted():
    inst = coverage_instance(3, 3, seed=0)
    s = sample(inst, PeakEstimates(np.ones(3), "external"), 0.5, 0.5)
    assert s.peak_method == "external"
