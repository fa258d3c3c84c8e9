"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import json
import time
from functools import lru_cache

import numpy as np
import pytest

import oracles
from ksparsify import (ExplicitTable, GroundSet, RatioInstance, approx_peaks,
                       check_sum_pi_bound, curvature, exact_peaks, extreme_points,
                       extreme_points_bounded_arity, fptas, join, meet, modular,
                       peaks_bounded_arity, run_trials, verify_k_submodular,
                       verify_max_inner_product, verify_monotone)
from ksparsify.cli import main
from ksparsify.generators import (coverage_function, coverage_instance, local_coverage_instance,
                                  random_digraph_cut, random_table, skewed_coverage_instance)
from ksparsify.peaks_curvature import s_sum_table
from ksparsify.peaks_exact import brute_force_minimizer, min_cut_minimizer
from ksparsify.polyhedron import arity_bound, counterexample_instance

ATOL = 1e-9


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        assert ok, detail
    return emit


# 1. counterexample reproduction


def test_criterion_1_counterexample(report, capsys, tmp_path):
    out = tmp_path / "ce.json"
    t0 = time.perf_counter()
    code = main(["counterexample", "--method", "bounded-arity", "--output", str(out)])
    elapsed = time.perf_counter() - t0
    text = capsys.readouterr().out
    d = json.loads(out.read_text())
    ok = (code == 0 and d["method"] == "bounded-arity" and d["sum_p"] == 25 and d["B"] == 2
          and d["n"] == 10 and d["Bn"] == 20 and d["violated"] and elapsed < 30
          and "violated: 25 > 20" in text)
    report(1, ok, f"sum p_e = {d['sum_p']:g}, B = {d['B']}, n = {d['n']}, Bn = {d['Bn']}, "
                  f"violated = {d['violated']}, {elapsed:.2f} s")


# 2. FPTAS guarantee


@lru_cache(maxsize=None)
def subset_matrix(n):
    masks = np.arange(1, 1 << n)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(float)


def ratio_optimum(x, y, A, B):
    M = subset_matrix(len(x))
    return float(((A + M @ np.asarray(x)) / (B + M @ np.asarray(y))).max())


def test_criterion_2_fptas(report):
    rng = np.random.default_rng(2024)
    count = violations = over_bound = 0
    for _ in range(510):
        n = int(rng.integers(1, 16))
        x = rng.uniform(1, 100, n)
        y = rng.uniform(1, 100, n)
        A, B = (rng.uniform(0, 100, 2) if rng.random() < 0.7 else (0.0, 0.0))
        inst = RatioInstance(tuple(x), tuple(y), A, B)
        opt = ratio_optimum(inst.x, inst.y, inst.A, inst.B)
        for eps in (0.5, 0.1, 0.01):
            res = fptas(inst, eps)
            count += 1
            violations += res.value < (1 - eps) * opt - 1e-12
            over_bound += res.iterations > inst.iteration_bound(eps)
    worked = RatioInstance((2, 1), (3, 1), A=1, B=100)
    worked_ok = all(fptas(worked, e).indices == (0, 1)
                    and abs(fptas(worked, e).value - 4 / 104) <= 1e-15 for e in (0.01, 0.001))
    ok = count >= 1500 and violations == 0 and over_bound == 0 and worked_ok
    report(2, ok, f"{count} runs on 510 instances, {violations} guarantee violations, "
                  f"{over_bound} iteration-bound violations, worked instance optimum 4/104: {worked_ok}")


# 3. sandwich inequalities


def monotone_pairs():
    rng = np.random.default_rng(7)
    out = []
    for t in range(120):
        k = 1 + t % 2
        n = int(rng.integers(1, 6 if k == 1 else 5))
        g = GroundSet(n, k)
        def draw():
            r = rng.random()
            if r < 0.5:
                return coverage_function(g, universe=int(rng.integers(2, 7)),
                                         density=float(rng.uniform(0.2, 0.6)),
                                         private=bool(rng.random() < 0.6), rng=rng)
            if r < 0.7:
                return modular(g, rng.integers(0, 5, size=(n, k)))
            if n <= 3:
                return random_table(g, seed=int(rng.integers(2**31)))
            return coverage_function(g, universe=3, rng=rng)
        out.append((draw(), draw()))
    return out


def test_criterion_3_sandwich(report):
    pairs = monotone_pairs()
    checked = violations = 0
    for f, g in pairs:
        assert verify_monotone(f) is None and verify_monotone(g) is None
        cf, cg = curvature(f), curvature(g)
        Sf, Sg = s_sum_table(f), s_sum_table(g)
        F, G = f.values(), g.values()
        live = G > ATOL
        r = F[live] / G[live]
        lo = ((1 - cf) * Sf[live] + F[0]) / (Sg[live] + G[0])
        denom = (1 - cg) * Sg[live] + G[0]
        # c_g = 1 with g(0) = 0 leaves the upper side unbounded
        hi = np.divide(Sf[live] + F[0], denom, out=np.full(denom.shape, np.inf), where=denom > 0)
        checked += int(live.sum())
        violations += int(np.sum(lo > r + ATOL) + np.sum(r > hi + ATOL))
    ok = len(pairs) >= 100 and violations == 0
    report(3, ok, f"{len(pairs)} pairs (k in {{1, 2}}, n <= 5), {checked} points, {violations} violations")


# 4. curvature-engine soundness


def test_criterion_4_curvature_engine(report):
    rng = np.random.default_rng(11)
    instances = lower = upper = 0
    worst = 1.0
    for t in range(210):
        k = 1 + t % 2
        n = int(rng.integers(2, 7 if k == 1 else 6))
        eps = (0.5, 0.1)[t % 4 // 2]
        inst = coverage_instance(n, int(rng.integers(1, 7)), k=k, universe=int(rng.integers(2, 7)),
                                 density=float(rng.uniform(0.2, 0.5)), seed=int(rng.integers(2**31)))
        p = exact_peaks(inst).values
        est = approx_peaks(inst, eps)
        cs = np.array(est.details["component_curvatures"])
        cF = est.details["total_curvature"]
        bound = p / ((1 - eps) * (1 - cs) * (1 - cF)) + ATOL
        lower += int(np.sum(est.values < p - ATOL))
        upper += int(np.sum(est.values > bound))
        worst = max(worst, float(np.max(est.values / p)))
        instances += 1
    ok = instances >= 200 and lower == 0 and upper == 0
    report(4, ok, f"{instances} instances, {lower} underestimates, {upper} inflation-bound "
                  f"violations, largest p_hat/p = {worst:.3g}")


# 5. sampler statistics


def test_criterion_5_sampler_statistics(report):
    eps, delta, trials = 0.4, 0.2, 2000
    inst = skewed_coverage_instance(6, 100, seed=0)
    t0 = time.perf_counter()
    p = exact_peaks(inst)
    s = run_trials(inst, p, eps, delta, trials, seed=0)
    elapsed = time.perf_counter() - t0
    kap = s.best.kappa_i
    expected = float(kap.sum())
    a = s.failure_rate <= delta
    b = abs(s.mean_nnz - expected) <= 4 * s.nnz_std_error
    c = s.frac_within_1_5 >= 1 - 4 * eps**2 - 0.03
    exact = s.weight_std_errors == 0
    z = np.abs(s.mean_weights - 1)[~exact] / s.weight_std_errors[~exact]
    d = bool(np.all(z <= 4)) and bool(np.allclose(s.mean_weights[exact], 1.0))
    ok = a and b and c and d and elapsed < 300
    report(5, ok, f"(a) failure rate {s.failure_rate:.4f} <= {delta}: {a}; "
                  f"(b) mean nnz {s.mean_nnz:.3f} vs sum kappa_i {expected:.3f} "
                  f"(SE {s.nnz_std_error:.3f}): {b}; "
                  f"(c) P[nnz <= 1.5 sum kappa_i] = {s.frac_within_1_5:.3f} >= {1 - 4 * eps**2 - 0.03:.2f}: {c}; "
                  f"(d) max |E w_i - 1| / SE = {z.max():.2f} over {int((~exact).sum())} sampled "
                  f"components: {d}; {elapsed:.1f} s")


# 6. engine equivalence


def test_criterion_6_engine_equivalence(report):
    rng = np.random.default_rng(6)
    count = mismatches = minimizer_mismatches = 0
    for _ in range(60):
        n = int(rng.integers(2, 9))
        arcs = int(rng.integers(1, min(25, n * (n - 1)) + 1))
        inst = random_digraph_cut(n, arcs, seed=int(rng.integers(2**31)))
        exact = exact_peaks(inst).values
        via_cut = peaks_bounded_arity(inst, minimizer="min-cut").values
        via_brute = peaks_bounded_arity(inst, minimizer="brute-force").values
        mismatches += int(np.sum(np.abs(via_cut - exact) > ATOL) + np.sum(np.abs(via_brute - exact) > ATOL))
        a, b = brute_force_minimizer(inst), min_cut_minimizer(inst)
        for f in inst:
            support = (1 << f.u) | (1 << f.v)
            for h in (0, 1 << f.u, 1 << f.v, support):
                minimizer_mismatches += abs(a(support, h) - b(support, h)) > ATOL
        count += 1
    ok = count >= 50 and mismatches == 0 and minimizer_mismatches == 0
    report(6, ok, f"{count} digraph instances (n <= 8, N <= 25), {mismatches} peak mismatches, "
                  f"{minimizer_mismatches} minimizer mismatches")


# 7. polyhedron suite


def monotone_suites():
    rng = np.random.default_rng(17)
    suites = []
    for t in range(24):
        n = int(rng.integers(2, 8))
        N = int(rng.integers(1, 9))
        seed = int(rng.integers(2**31))
        if t % 3 == 0:
            suites.append(local_coverage_instance(n, N, arity=min(3, n), seed=seed))
        else:
            suites.append(coverage_instance(n, N, universe=int(rng.integers(2, 7)),
                                            private=t % 3 == 1, seed=seed))
    return suites


def test_criterion_7_polyhedron(report):
    suites = monotone_suites()
    negative = identity_fail = bound_fail = arity_fail = claim_fail = 0
    components = 0
    for inst in suites:
        for f in inst:
            components += 1
            pts = extreme_points(f)
            negative += int(np.sum(pts.points < -ATOL))
            if f.n <= 6 and verify_max_inner_product(f, pts) is not None:
                identity_fail += 1
            C = f.declared_support
            if len(C) <= 3:
                sup = extreme_points_bounded_arity(f, C)
                arity_fail += len(sup) > 2 ** (len(C) ** 2) or len(sup) > arity_bound(len(C))
        if not check_sum_pi_bound(inst).holds:
            bound_fail += 1
    cut_suites = [random_digraph_cut(int(n), int(m), seed=s)
                  for s, (n, m) in enumerate([(4, 5), (5, 8), (6, 10), (7, 12), (8, 20)])]
    for inst in cut_suites:
        for f in inst:
            arity_fail += len(extreme_points(f)) > 2 ** 4
    k2 = [coverage_instance(4, 5, k=2, seed=s) for s in range(5)]
    for inst in suites + cut_suites + k2 + [counterexample_instance()]:
        if np.any(inst.total_values() > ATOL) and exact_peaks(inst).values.sum() < 1 - ATOL:
            claim_fail += 1
    ce = check_sum_pi_bound(counterexample_instance(), "bounded-arity")
    ok = (negative == identity_fail == bound_fail == arity_fail == claim_fail == 0 and not ce.holds)
    report(7, ok, f"{len(suites)} monotone suites / {components} components: {negative} negative "
                  f"coordinates, {identity_fail} max-inner-product failures, {bound_fail} "
                  f"sum-bound failures, {arity_fail} arity-bound failures, {claim_fail} "
                  f"sum p_i < 1 cases; counterexample bound holds = {ce.holds}")


# 8. verifier mutation tests


def generator_outputs():
    outs = []
    for s in range(4):
        outs += list(coverage_instance(3, 2, k=1 + s % 3, seed=s))
        outs += list(local_coverage_instance(4, 2, seed=s))
        outs.append(random_table(GroundSet(2 + s % 2, 1 + s % 2), seed=s))
    outs += list(skewed_coverage_instance(4, 6, seed=1))
    outs.append(modular(GroundSet(3, 2), [[1, 2], [3, 4], [5, 6]]))
    return outs


def plant_submodularity_violation(f, rng):
    g = f.ground
    T = f.values().copy()
    while True:
        A, B = (tuple(int(v) for v in rng.integers(0, g.k + 1, g.n)) for _ in range(2))
        m, j = meet(A, B), join(A, B)
        if len({m, j, A, B}) == 4 or (m != A and m != B):
            break
    excess = T[g.index(A)] + T[g.index(B)] - T[g.index(m)] - T[g.index(j)]
    T[g.index(j)] += excess + 1.0
    return ExplicitTable(g, T)


def plant_monotonicity_violation(f, rng):
    g = f.ground
    T = f.values().copy()
    A = [int(v) for v in rng.integers(0, g.k + 1, g.n)]
    e = int(rng.integers(g.n))
    A[e] = 0
    B = list(A)
    B[e] = int(rng.integers(1, g.k + 1))
    T[g.index(A)] = T[g.index(B)] + 1.0
    return ExplicitTable(g, T)


def test_criterion_8_verifiers(report):
    outs = generator_outputs()
    false_rejects = sum(verify_monotone(f) is not None or verify_k_submodular(f) is not None
                        for f in outs)
    cuts = list(random_digraph_cut(5, 8, seed=0))
    false_rejects += sum(verify_k_submodular(f) is not None for f in cuts)
    rng = np.random.default_rng(8)
    sub_missed = mono_missed = bad_witness = 0
    bases = [coverage_function(GroundSet(int(rng.integers(2, 4)), int(rng.integers(1, 3))),
                               seed=s) for s in range(25)]
    for f in bases:
        h = plant_submodularity_violation(f, rng)
        assert not oracles.is_k_submodular(h, h.n, h.k)
        v = verify_k_submodular(h)
        if v is None:
            sub_missed += 1
        else:
            lhs = h(meet(v.A, v.B)) + h(join(v.A, v.B))
            bad_witness += lhs <= h(v.A) + h(v.B) + ATOL
        h = plant_monotonicity_violation(f, rng)
        assert not oracles.is_monotone(h, h.n, h.k)
        v = verify_monotone(h)
        if v is None:
            mono_missed += 1
        else:
            B = v.A[:v.element] + (v.label,) + v.A[v.element + 1:]
            bad_witness += h(B) >= h(v.A) - ATOL
    ok = false_rejects == 0 and sub_missed == mono_missed == bad_witness == 0 and len(bases) >= 20
    report(8, ok, f"{len(outs) + len(cuts)} generator outputs, {false_rejects} false rejections; "
                  f"{len(bases)} planted violations per verifier, {sub_missed} + {mono_missed} "
                  f"missed, {bad_witness} invalid witnesses")
