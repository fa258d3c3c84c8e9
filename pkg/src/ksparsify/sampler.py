"""Importance sampling of components and exhaustive sparsifier checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import ATOL, DecomposableInstance, check_domain_size
from .peaks_exact import PeakEstimates

RNG_NAME = "philox4x64"


def kappa(epsilon: float, delta: float, domain_size: float) -> float:
    """Oversampling factor ``3 ln(2 |D| / delta) / epsilon**2``."""
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if domain_size < 1:
        raise ValueError("domain_size must be at least 1")
    return 3.0 * math.log(2.0 * domain_size / delta) / epsilon**2


def component_uniforms(seed, N: int) -> np.ndarray:
    """One uniform per component, ``u_i`` drawn from Philox block ``i``.

    ``u_i`` depends only on ``(seed, i)``: it equals the first draw of a Philox
    stream advanced by ``i`` blocks, so components can be sampled in any
    order or in parallel.
    """
    bitgen = np.random.Philox(np.random.SeedSequence(seed))
    # each Philox block yields four 64-bit words; keep the first of every block
    return np.random.Generator(bitgen).random(4 * N)[::4]


@dataclass
class SparsifierWeights:
    w: np.ndarray
    kappa: float
    kappa_i: np.ndarray
    seed: object
    epsilon: float
    delta: float
    peak_method: str = "unknown"
    rng: str = RNG_NAME
    meta: dict = field(default_factory=dict)

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.w))

    @property
    def expected_nnz(self) -> float:
        return float(self.kappa_i.sum())

    def to_dict(self) -> dict:
        d = {
            "kappa": float(self.kappa),
            "seed": self.seed if isinstance(self.seed, (int, str)) else list(self.seed),
            "weights": [{"i": int(i), "w": float(self.w[i])} for i in np.flatnonzero(self.w)],
            "nnz": self.nnz,
            "epsilon": float(self.epsilon),
            "delta": float(self.delta),
            "peak_method": self.peak_method,
            "N": int(self.w.size),
            "rng": self.rng,
            "kappa_i": [float(v) for v in self.kappa_i],
        }
        d.update(self.meta)
        return d

    @classmethod
    def from_dict(cls, d: dict, N: Optional[int] = None) -> "SparsifierWeights":
        N = int(d.get("N", N if N is not None else 0))
        w = np.zeros(N)
        for entry in d["weights"]:
            w[int(entry["i"])] = float(entry["w"])
        kap = np.asarray(d.get("kappa_i", np.where(w > 0, 1.0 / np.where(w > 0, w, 1.0), 1.0)))
        return cls(w, float(d["kappa"]), kap, d.get("seed"), float(d["epsilon"]),
                   float(d["delta"]), d.get("peak_method", "unknown"), d.get("rng", RNG_NAME))


def sampling_probabilities(peaks, k: float) -> np.ndarray:
    p = np.asarray(peaks.values if isinstance(peaks, PeakEstimates) else peaks, dtype=float)
    if np.any(p < 0):
        raise ValueError("peak estimates must be nonnegative")
    return np.minimum(1.0, k * p)


def sample(inst: DecomposableInstance, peaks, epsilon: float, delta: float, seed=0,
           domain_size: Optional[float] = None) -> SparsifierWeights:
    """Keep component ``i`` with probability ``min(1, kappa * p_hat_i)``, reweighted by its inverse.

    ``peaks`` must upper-bound the true peak contributions.  ``domain_size``
    defaults to ``(k+1)**n``.
    """
    p = np.asarray(peaks.values if isinstance(peaks, PeakEstimates) else peaks, dtype=float)
    if p.shape != (len(inst),):
        raise ValueError(f"expected {len(inst)} peak estimates, got {p.shape}")
    size = inst.ground.size if domain_size is None else domain_size
    k = kappa(epsilon, delta, size)
    probs = sampling_probabilities(p, k)
    u = component_uniforms(seed, len(inst))
    keep = u < probs
    w = np.zeros(len(inst))
    w[keep] = 1.0 / probs[keep]
    method = peaks.method if isinstance(peaks, PeakEstimates) else "external"
    return SparsifierWeights(w, k, probs, seed, epsilon, delta, method)


@dataclass
class SparsifierCheck:
    is_sparsifier: bool
    worst_ratio: float
    witness: Optional[tuple]
    min_ratio: float
    max_ratio: float
    definition_holds: bool

    def __bool__(self):
        return self.is_sparsifier


def _ratios(V: np.ndarray, w: np.ndarray, atol: float = ATOL):
    F = V.sum(axis=0)
    Fp = w @ V
    live = np.abs(F) > atol
    dead_ok = bool(np.all(np.abs(Fp[~live]) <= atol))
    ratio = np.ones_like(F)
    ratio[live] = Fp[live] / F[live]
    return ratio, live, dead_ok


def verify_sparsifier(inst: DecomposableInstance, w, epsilon: float, atol: float = ATOL,
                      force: bool = False) -> SparsifierCheck:
    """Exhaustive check that ``(1-eps) F <= F' <= (1+eps) F`` wherever ``F != 0``.

    ``F' = sum w_i f_i``.  ``worst_ratio`` is the ``F'/F`` farthest from one and
    ``witness`` the point attaining it.  ``definition_holds`` reports the
    reversed sandwich ``(1-eps) F' <= F <= (1+eps) F'``.
    """
    check_domain_size(inst.ground.size, force=force)
    weights = np.asarray(w.w if isinstance(w, SparsifierWeights) else w, dtype=float)
    V = inst.values(force=force)
    ratio, live, dead_ok = _ratios(V, weights, atol)
    if not live.any():
        return SparsifierCheck(dead_ok, 1.0, None, 1.0, 1.0, dead_ok)
    r = ratio[live]
    idx = np.flatnonzero(live)
    j = int(np.argmax(np.abs(r - 1.0)))
    ok = dead_ok and bool(np.all(r >= 1 - epsilon - atol) and np.all(r <= 1 + epsilon + atol))
    # (1-eps) F' <= F <= (1+eps) F'  <=>  1/(1+eps) <= F'/F <= 1/(1-eps)
    definition = dead_ok and bool(np.all(r * (1 + epsilon) >= 1 - atol) and np.all(r * (1 - epsilon) <= 1 + atol))
    return SparsifierCheck(ok, float(r[j]), inst.ground.assignment(int(idx[j])),
                           float(r.min()), float(r.max()), definition)


@dataclass
class TrialSummary:
    trials: int
    failure_rate: float
    mean_nnz: float
    expected_nnz: float
    nnz_std_error: float
    kappa_bound: float
    frac_within_1_5: float
    mean_weights: np.ndarray
    weight_std_errors: np.ndarray
    nnz: np.ndarray
    failures: np.ndarray
    best: Optional[SparsifierWeights]


def run_trials(inst: DecomposableInstance, peaks, epsilon: float, delta: float, trials: int,
               seed=0, domain_size: Optional[float] = None, check: bool = True) -> TrialSummary:
    """Repeat :func:`sample` with seeds ``(seed, t)`` and collect statistics.

    ``best`` is the smallest-support sample that passed the sparsifier check
    (or the smallest overall when ``check`` is false or nothing passed).
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    V = inst.values() if check else None
    N = len(inst)
    nnz = np.empty(trials, dtype=int)
    failed = np.zeros(trials, dtype=bool)
    wsum = np.zeros(N)
    best = best_any = None
    for t in range(trials):
        s = sample(inst, peaks, epsilon, delta, seed=_trial_seed(seed, t), domain_size=domain_size)
        nnz[t] = s.nnz
        wsum += s.w
        if check:
            ratio, live, dead_ok = _ratios(V, s.w)
            r = ratio[live]
            failed[t] = not (dead_ok and np.all(r >= 1 - epsilon - ATOL) and np.all(r <= 1 + epsilon + ATOL))
        if best_any is None or s.nnz < best_any.nnz:
            best_any = s
        if not failed[t] and (best is None or s.nnz < best.nnz):
            best = s
    probs = best_any.kappa_i
    mean_w = wsum / trials
    # Var[w_i] = 1/kappa_i - 1 exactly
    var_w = np.where(probs > 0, 1.0 / np.where(probs > 0, probs, 1.0) - 1.0, 0.0)
    expected = float(probs.sum())
    p = np.asarray(peaks.values if isinstance(peaks, PeakEstimates) else peaks, dtype=float)
    return TrialSummary(
        trials=trials,
        failure_rate=float(failed.mean()),
        mean_nnz=float(nnz.mean()),
        expected_nnz=expected,
        nnz_std_error=float(math.sqrt(float((probs * (1 - probs)).sum()) / trials)),
        kappa_bound=float(best_any.kappa * p.sum()),
        frac_within_1_5=float(np.mean(nnz <= 1.5 * expected)),
        mean_weights=mean_w,
        weight_std_errors=np.sqrt(var_w / trials),
        nnz=nnz,
        failures=failed,
        best=best if best is not None else best_any,
    )


def _trial_seed(seed, t: int):
    base = list(seed) if isinstance(seed, (list, tuple)) else [int(seed)]
    return base + [t]
