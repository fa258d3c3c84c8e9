"""Peak estimates for monotone k-submodular components of low curvature.

Each ratio ``max f(A) / g(A)`` is approximated by linearising both functions
with their empty-set marginals, solving the resulting modular ratio problem
with the FPTAS, and inflating the true ratio at the returned point by
``1 / ((1 - eps)(1 - c_f)(1 - c_g))``.  The inflated value is an upper bound
on the true maximum as long as both curvatures are below one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .exceptions import HypothesisError, NotMonotoneError
from .model import ATOL, ComponentFunction, DecomposableInstance, curvature_with_source, empty_marginals
from .peaks_exact import PeakEstimates
from .ratio import RatioInstance, fptas


@dataclass
class LinearizedPair:
    """Empty-set marginals of ``f`` and ``g`` over the (element, label) pairs.

    ``pairs`` lists the retained ``(e, i)`` in lexicographic order, ``x`` and
    ``y`` their marginals under ``f`` and ``g``.  ``dropped`` collects pairs
    where a marginal is zero.
    """

    pairs: list
    x: np.ndarray
    y: np.ndarray
    A0: float
    B0: float
    dropped: list
    free_gain: list
    zero_gain: list

    @classmethod
    def build(cls, f: ComponentFunction, g: ComponentFunction, atol: float = ATOL,
              g_marginals: Optional[np.ndarray] = None) -> "LinearizedPair":
        df = empty_marginals(f)
        dg = empty_marginals(g) if g_marginals is None else g_marginals
        if df.min() < -atol or dg.min() < -atol:
            raise NotMonotoneError("negative empty-set marginal: input is not monotone")
        pairs, xs, ys, dropped, free_gain, zero_gain = [], [], [], [], [], []
        for e in range(f.n):
            for i in range(1, f.k + 1):
                a, b = df[e, i - 1], dg[e, i - 1]
                if a > atol and b > atol:
                    pairs.append((e, i))
                    xs.append(a)
                    ys.append(b)
                    continue
                dropped.append((e, i))
                if a > atol:
                    free_gain.append((e, i, a))
                elif b > atol:
                    zero_gain.append((e, i, b))
        e0 = f.ground.empty()
        return cls(pairs, np.array(xs), np.array(ys), f(e0), g(e0), dropped, free_gain, zero_gain)

    def ratio_instance(self) -> RatioInstance:
        return RatioInstance(tuple(self.x), tuple(self.y), self.A0, self.B0)

    def groups(self) -> list:
        return [e for e, _ in self.pairs]


def s_sum(f: ComponentFunction, A, atol: float = ATOL) -> float:
    """``sum over assigned e of Delta_{e, A[e]} f(empty)``."""
    A = f.ground.check(A)
    n = f.n
    base = f((0,) * n)
    total = 0.0
    for e, a in enumerate(A):
        if a:
            gain = f((0,) * e + (a,) + (0,) * (n - e - 1)) - base
            if gain < -atol:
                raise NotMonotoneError(f"not monotone: Delta_{{{e},{a}}} f(empty) = {gain:g} < 0")
            total += gain
    return total


def s_sum_table(f: ComponentFunction, atol: float = ATOL) -> np.ndarray:
    """:func:`s_sum` on every domain point."""
    d = empty_marginals(f)
    if d.min() < -atol:
        raise NotMonotoneError("negative empty-set marginal: input is not monotone")
    d0 = np.hstack([np.zeros((f.n, 1)), d])
    L = f.ground.labels()
    return d0[np.arange(f.n), L].sum(axis=1)


def _assignment(lin: LinearizedPair, indices, n: int, extra=()) -> tuple:
    labels = [0] * n
    for j in indices:
        e, i = lin.pairs[j]
        labels[e] = i
    for e, i in extra:
        labels[e] = i
    return tuple(labels)


def _check_curvature(c, name):
    if c is None or not 0.0 <= c < 1.0:
        raise HypothesisError(f"curvature of {name} is {c}; the curvature engine needs c < 1")


def approx_ratio_max(f: ComponentFunction, g: ComponentFunction, c_f: float, c_g: float,
                     epsilon: float = 0.5, g_marginals: Optional[np.ndarray] = None):
    """Upper estimate ``p_hat >= max_{g(A) > 0} f(A) / g(A)``.

    Returns ``(A_star, p_hat)``.  ``A_star`` maximises the linearised ratio up
    to ``1 - epsilon`` and ``p_hat`` is ``f(A_star)/g(A_star)`` divided by
    ``(1 - epsilon)(1 - c_f)(1 - c_g)``.  When ``f`` has no positive marginal
    (so it is constant) the exact ratio is returned instead.
    """
    _check_curvature(c_f, "f")
    _check_curvature(c_g, "g")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    n = f.n
    lin = LinearizedPair.build(f, g, g_marginals=g_marginals)

    if lin.free_gain:
        e, i, _ = lin.free_gain[0]
        # cannot happen for g = F with f a nonnegative monotone component
        raise HypothesisError(
            f"pair ({e}, {i}) raises f but not g at the empty point; "
            "the linearised ratio problem is ill-posed"
        )

    candidates = []  # (linearised ratio, assignment)
    if lin.pairs:
        res = fptas(lin.ratio_instance(), epsilon, groups=lin.groups())
        candidates.append((res.value, _assignment(lin, res.indices, n)))
    if lin.B0 > ATOL:
        candidates.append((lin.A0 / lin.B0, g.ground.empty()))
    if lin.zero_gain:
        # cheapest pair that only raises g; beats the FPTAS set when g(empty) = 0
        e, i, b = min(lin.zero_gain, key=lambda t: (t[2], t[0], t[1]))
        candidates.append((lin.A0 / (lin.B0 + b), _assignment(lin, [], n, [(e, i)])))

    if not lin.pairs:
        # f is constant: its ratio is maximised where g is smallest but positive
        gmin = min((g(A) for _, A in candidates if g(A) > ATOL), default=0.0)
        if gmin <= ATOL:
            raise HypothesisError("g vanishes on every candidate point")
        A_star = min((A for _, A in candidates if g(A) > ATOL), key=g)
        return A_star, f(A_star) / gmin

    if not candidates:
        raise HypothesisError("no assignment with positive linearised denominator")
    _, A_star = max(candidates, key=lambda t: t[0])
    gv = g(A_star)
    if gv <= ATOL:
        raise HypothesisError(f"g(A*) = {gv:g} at the linearised maximiser {A_star}")
    scale = (1 - epsilon) * (1 - c_f) * (1 - c_g)
    return A_star, (f(A_star) / gv) / scale


def approx_peaks(inst: DecomposableInstance, epsilon: float = 0.5,
                 curvatures: Optional[Sequence[float]] = None,
                 total_curvature: Optional[float] = None) -> PeakEstimates:
    """Curvature-engine peak estimates for every component.

    Component curvatures come from ``curvatures`` when given, otherwise from
    declarations or brute force; the same holds for ``total_curvature``.
    """
    from .model import Callback

    N = len(inst)
    sources = []
    if curvatures is None:
        cs = []
        for f in inst:
            c, src = curvature_with_source(f)
            cs.append(c)
            sources.append(src)
    else:
        if len(curvatures) != N:
            raise ValueError("need one curvature per component")
        cs = [float(c) for c in curvatures]
        sources = ["given"] * N
    total = Callback(inst.ground, inst.total) if inst.fast_total is not None else _TotalFunction(inst)
    if total_curvature is None:
        c_F, src_F = curvature_with_source(total)
    else:
        c_F, src_F = float(total_curvature), "given"
    for i, c in enumerate(cs):
        if not c < 1:
            raise HypothesisError(f"component {i} has curvature {c:g}; the curvature engine needs c < 1")
    if not c_F < 1:
        raise HypothesisError(f"F has curvature {c_F:g}; the curvature engine needs c < 1")
    g_marg = empty_marginals(total)
    values = np.empty(N)
    points = []
    for i, f in enumerate(inst):
        A_star, p_hat = approx_ratio_max(f, total, cs[i], c_F, epsilon, g_marginals=g_marg)
        values[i] = p_hat
        points.append(list(A_star))
    factor = 1.0 / ((1 - epsilon) * (1 - max(cs)) * (1 - c_F))
    notes = []
    if "declared" in sources or src_F == "declared":
        notes.append("curvature taken from a trusted declaration")
    return PeakEstimates(values, "curvature-fptas", factor, notes, {
        "epsilon": epsilon,
        "component_curvatures": cs,
        "total_curvature": c_F,
        "curvature_sources": sources + [src_F],
        "maximisers": points,
    })


class _TotalFunction(ComponentFunction):
    """``F = sum f_i`` as a component, reusing the instance's value matrix."""

    kind = "total"

    def __init__(self, inst: DecomposableInstance):
        super().__init__(inst.ground)
        self.inst = inst

    def _evaluate(self, A):
        return sum(f(A) for f in self.inst)

    def _table(self, labels):
        return self.inst.total_values()
