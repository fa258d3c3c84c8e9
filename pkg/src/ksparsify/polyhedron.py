"""Base-polyhedron extreme points of set functions and the peak-sum bound.

Extreme points of ``B(f)`` are the chain-marginal vectors
``y[e_j] = f(S_j) - f(S_{j-1})`` over all orderings of the ground set.
Only set functions (``k = 1``) are handled.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .exceptions import HypothesisError, SparsifyError
from .generators import complete_bipartite_cut
from .model import ATOL, ComponentFunction, DecomposableInstance, check_support
from .peaks_exact import exact_peaks, peaks_bounded_arity

MAX_CHAIN_N = 8


@dataclass
class ExtremePointSet:
    points: np.ndarray  # (count, n)
    source: str

    def __len__(self):
        return self.points.shape[0]

    def as_set(self, decimals: int = 9) -> set:
        return {tuple(np.round(p, decimals) + 0.0) for p in self.points}


def _require_set_function(f: ComponentFunction):
    if f.k != 1:
        raise HypothesisError("base polyhedra are only defined here for set functions (k = 1)")


def dedup(points: np.ndarray, tol: float = ATOL) -> np.ndarray:
    """Remove duplicates within ``tol`` in the max norm, keeping first occurrences."""
    if points.shape[0] == 0:
        return points
    coarse = np.unique(np.round(points / tol).astype(np.int64), axis=0, return_index=True)[1]
    kept = []
    for j in sorted(coarse):
        p = points[j]
        if all(np.max(np.abs(p - q)) > tol for q in kept):
            kept.append(p)
    return np.array(kept)


def _chain_points(f: ComponentFunction, order_elems) -> np.ndarray:
    """Chain marginals for every ordering of ``order_elems``, zero elsewhere.

    Elements outside ``order_elems`` are appended after them; for a valid
    support their marginals vanish.
    """
    n = f.n
    T = f.values()
    members = list(order_elems)
    perms = np.array(list(itertools.permutations(members)), dtype=np.int64).reshape(-1, len(members))
    bits = np.left_shift(np.int64(1), perms)
    prefix = np.cumsum(bits, axis=1)
    vals = T[prefix]
    prev = np.hstack([np.full((perms.shape[0], 1), T[0]), vals[:, :-1]])
    out = np.zeros((perms.shape[0], n))
    rows = np.arange(perms.shape[0])[:, None]
    out[rows, perms] = vals - prev
    if len(members) < n:
        # remaining elements are added after the ordered block
        full = (1 << n) - 1
        rest = [e for e in range(n) if e not in set(members)]
        done = prefix[:, -1] if members else np.zeros(perms.shape[0], dtype=np.int64)
        cur = T[done]
        for e in rest:
            done = done | (1 << e)
            nxt = T[done]
            out[:, e] = nxt - cur
            cur = nxt
        assert np.all(done == full)
    return out


def extreme_points(f: ComponentFunction, max_n: int = MAX_CHAIN_N) -> ExtremePointSet:
    """All extreme points of ``B(f)``, one candidate per ordering of ``E``.

    Above ``max_n`` elements the declared support is used instead (see
    :func:`extreme_points_bounded_arity`).
    """
    _require_set_function(f)
    if f.n > max_n:
        if f.declared_support is None:
            raise SparsifyError(
                f"all-chains enumeration needs n <= {max_n} (n = {f.n}) or a declared support"
            )
        return extreme_points_bounded_arity(f, f.declared_support)
    return ExtremePointSet(dedup(_chain_points(f, range(f.n))), "all-chains")


def extreme_points_bounded_arity(f: ComponentFunction, support, max_support: int = MAX_CHAIN_N
                                 ) -> ExtremePointSet:
    """Extreme points from orderings of the effective support only."""
    _require_set_function(f)
    C = check_support(f, support)
    if len(C) > max_support:
        raise SparsifyError(f"support of size {len(C)} exceeds the guard of {max_support}")
    if not C:
        return ExtremePointSet(np.zeros((1, f.n)), "support-chains")
    return ExtremePointSet(dedup(_chain_points(f, sorted(C))), "support-chains")


def in_base_polyhedron(y, f: ComponentFunction, atol: float = ATOL) -> bool:
    """``y(E) = f(E) - f(empty)`` and ``y(S) <= f(S) - f(empty)`` for every ``S``."""
    _require_set_function(f)
    T = f.values() - f.values()[0]
    L = f.ground.labels().astype(float)
    sums = L @ np.asarray(y, dtype=float)
    return bool(abs(sums[-1] - T[-1]) <= atol and np.all(sums <= T + atol))


class InnerProductViolation(NamedTuple):
    A: tuple
    value: float
    best: float


def verify_max_inner_product(f: ComponentFunction, points: Optional[ExtremePointSet] = None,
                             atol: float = ATOL) -> Optional[InnerProductViolation]:
    """Check ``f(A) = max_y <y, 1_A>`` over the extreme points, for every ``A``.

    Requires ``f(empty) = 0``.  Returns ``None`` on success.
    """
    _require_set_function(f)
    T = f.values()
    if abs(T[0]) > atol:
        raise HypothesisError(f"f(empty) = {T[0]:g}; the identity needs a normalised function")
    pts = extreme_points(f) if points is None else points
    L = f.ground.labels().astype(float)
    best = (L @ pts.points.T).max(axis=1)
    bad = np.abs(best - T) > atol
    if bad.any():
        j = int(np.flatnonzero(bad)[0])
        return InnerProductViolation(f.ground.assignment(j), float(T[j]), float(best[j]))
    return None


def counterexample_instance() -> DecomposableInstance:
    """Cut decomposition of the complete bipartite digraph with 5 + 5 vertices."""
    return complete_bipartite_cut(5, 5)


class SumBound(NamedTuple):
    sum_p: float
    B: int
    n: int
    holds: bool


def check_sum_pi_bound(inst: DecomposableInstance, method: str = "exact", atol: float = ATOL
                       ) -> SumBound:
    """Compare ``sum_i p_i`` with ``B * n`` where ``B = max_i |EX(B(f_i))|``."""
    if inst.k != 1:
        raise HypothesisError("the peak-sum bound is stated for set functions (k = 1)")
    if method == "bounded-arity":
        peaks = peaks_bounded_arity(inst)
    elif method == "exact":
        peaks = exact_peaks(inst)
    else:
        raise ValueError(f"unknown method {method!r}")
    B = max(len(extreme_points(f)) for f in inst)
    total = float(peaks.values.sum())
    return SumBound(total, B, inst.n, total <= B * inst.n + atol)


def arity_bound(a: int) -> int:
    """``min(2**(a*a), a!)``: extreme points of an arity-``a`` function."""
    return min(2 ** (a * a), math.factorial(a))
