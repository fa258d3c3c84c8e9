"""Exact peak contributions ``p_i = max_{F(A) != 0} f_i(A) / F(A)``.

Two engines live here: plain enumeration of the domain, and the
bounded-arity decomposition for set functions, which enumerates subsets of
each component's effective support and minimises ``F`` over the rest.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import networkx as nx
import numpy as np

from .exceptions import HypothesisError, NotMonotoneError, SparsifyError
from .model import (
    ATOL,
    MAX_DOMAIN,
    ComponentFunction,
    DecomposableInstance,
    DirectedCut,
    check_domain_size,
    check_support,
    verify_monotone,
)

MAX_SUPPORT = 20


@dataclass
class PeakEstimates:
    """Per-component peak values with ``p_i <= values[i] <= guarantee_factor * p_i``."""

    values: np.ndarray
    method: str
    guarantee_factor: float = 1.0
    warnings: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if np.any(self.values < 0):
            raise ValueError("peak estimates must be nonnegative")
        if self.guarantee_factor < 1:
            raise ValueError("guarantee_factor must be at least 1")

    def __len__(self):
        return len(self.values)

    def to_dict(self) -> dict:
        d = {
            "method": self.method,
            "guarantee_factor": float(self.guarantee_factor),
            "values": [float(v) for v in self.values],
        }
        if self.warnings:
            d["warnings"] = list(self.warnings)
        if self.details:
            d["details"] = self.details
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PeakEstimates":
        return cls(np.asarray(d["values"], dtype=float), d.get("method", "external"),
                   float(d.get("guarantee_factor", 1.0)), list(d.get("warnings", [])),
                   dict(d.get("details", {})))


def peak_ratios(values: np.ndarray, atol: float = ATOL) -> np.ndarray:
    """Row-wise ``max f_i / F`` over columns with ``F != 0`` for an ``(N, D)`` value matrix."""
    F = values.sum(axis=0)
    live = np.abs(F) > atol
    if not live.any():
        return np.zeros(values.shape[0])
    return (values[:, live] / F[live]).max(axis=1)


def exact_peaks(inst: DecomposableInstance, force: bool = False) -> PeakEstimates:
    check_domain_size(inst.ground.size, limit=MAX_DOMAIN, force=force)
    V = inst.values(force=force)
    F = V.sum(axis=0)
    notes = []
    if not (np.abs(F) > ATOL).any():
        notes.append("F is identically zero; all peak contributions set to 0")
    return PeakEstimates(peak_ratios(V), "exact-enum", 1.0, notes)


def effective_support(f: ComponentFunction, atol: float = ATOL, samples: int = 64,
                      seed: int = 0) -> frozenset:
    """Elements ``e`` with ``f({e}) > f(empty)``, for monotone nonnegative set functions.

    Monotonicity is checked first (exhaustively on small domains, otherwise on
    all pairs plus random single-element extensions) since the singleton test
    is unsound without it.
    """
    if f.k != 1:
        raise HypothesisError("effective support detection requires k = 1")
    g = f.ground
    base = f(g.empty())
    support = set()
    for e in range(g.n):
        if f(tuple(1 if j == e else 0 for j in range(g.n))) < base - atol:
            raise NotMonotoneError(f"not monotone: adding element {e} to the empty set lowers f")
        if f(tuple(1 if j == e else 0 for j in range(g.n))) > base + atol:
            support.add(e)
    if g.size <= 4096:
        bad = verify_monotone(f, atol=atol)
        if bad is not None:
            raise NotMonotoneError(
                f"not monotone: adding element {bad.element} to {bad.A} lowers f; "
                "the singleton test for the support is unsound"
            )
        return frozenset(support)
    # pairs first: the singleton test leans hardest on f({e, j}) >= f({e})
    for e in range(g.n):
        single = tuple(1 if j == e else 0 for j in range(g.n))
        fe = f(single)
        for j in range(g.n):
            if j != e:
                pair = single[:j] + (1,) + single[j + 1:]
                if f(pair) < fe - atol:
                    raise NotMonotoneError(
                        f"not monotone: adding element {j} to {{{e}}} lowers f; "
                        "the singleton test for the support is unsound"
                    )
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        S = [int(b) for b in rng.integers(0, 2, size=g.n)]
        free = [e for e in range(g.n) if not S[e]]
        if not free:
            continue
        e = int(rng.choice(free))
        T = S.copy()
        T[e] = 1
        if f(T) < f(S) - atol:
            raise NotMonotoneError(
                f"not monotone: adding element {e} to {tuple(S)} lowers f; "
                "the singleton test for the support is unsound"
            )
    return frozenset(support)


# Minimisers of A -> F(A | H) over A in 2^(E \ C)


def brute_force_minimizer(inst: DecomposableInstance) -> Callable:
    """Minimise over the full value table of ``F``."""
    F = inst.total_values()
    masks = np.arange(inst.ground.size, dtype=np.int64)

    def minimize(support_mask: int, h_mask: int) -> float:
        return float(F[(masks & support_mask) == h_mask].min())

    return minimize


def min_cut_minimizer(inst: DecomposableInstance) -> Callable:
    """s-t min cut when every component is a directed-cut function.

    Vertices in ``H`` are tied to the source and the rest of the support to
    the sink with infinite capacity, so a minimum cut is a minimiser of
    ``F(A | H)``.
    """
    if not all(isinstance(f, DirectedCut) for f in inst):
        raise HypothesisError("the min-cut minimizer needs every component to be a directed cut")
    n = inst.n
    base = nx.DiGraph()
    base.add_nodes_from(range(n))
    for f in inst:
        if base.has_edge(f.u, f.v):
            base[f.u][f.v]["capacity"] += f.weight
        else:
            base.add_edge(f.u, f.v, capacity=f.weight)

    def minimize(support_mask: int, h_mask: int) -> float:
        G = base.copy()
        G.add_node("s")
        G.add_node("t")
        for e in range(n):
            bit = 1 << e
            if support_mask & bit:
                if h_mask & bit:
                    G.add_edge("s", e)  # missing capacity means infinite
                else:
                    G.add_edge(e, "t")
        value, _ = nx.minimum_cut(G, "s", "t")
        return float(value)

    return minimize


MINIMIZERS = {"brute-force": brute_force_minimizer, "min-cut": min_cut_minimizer}


def _resolve_minimizer(inst, minimizer):
    if callable(minimizer):
        return minimizer(inst)
    if minimizer == "auto":
        minimizer = "min-cut" if all(isinstance(f, DirectedCut) for f in inst) else "brute-force"
    try:
        return MINIMIZERS[minimizer](inst)
    except KeyError:
        raise ValueError(f"unknown minimizer {minimizer!r}") from None


def peaks_bounded_arity(inst: DecomposableInstance, supports: Optional[Sequence] = None,
                        minimizer="auto", force: bool = False) -> PeakEstimates:
    """Peak contributions via ``max_{H subset C_i} f_i(H) / min_{A subset E \\ C_i} F(A | H)``.

    ``supports`` defaults to each component's declared support, falling back
    to :func:`effective_support`.  ``minimizer`` is ``"brute-force"``,
    ``"min-cut"``, ``"auto"`` or a factory ``inst -> (support_mask, h_mask) -> min``.
    """
    if inst.k != 1:
        raise HypothesisError("the bounded-arity engine requires k = 1 (set functions)")
    n = inst.n
    if supports is None:
        supports = [f.declared_support if f.declared_support is not None else effective_support(f)
                    for f in inst]
    if len(supports) != len(inst):
        raise ValueError("need one support per component")
    supports = [check_support(f, C) for f, C in zip(inst, supports)]
    widest = max(len(C) for C in supports)
    if widest > MAX_SUPPORT and not force:
        raise SparsifyError(f"support of size {widest} exceeds the guard of {MAX_SUPPORT}")
    minimize = _resolve_minimizer(inst, minimizer)
    notes = []
    out = np.zeros(len(inst))
    for i, (f, C) in enumerate(zip(inst, supports)):
        members = sorted(C)
        support_mask = sum(1 << e for e in members)
        best = 0.0
        for bits in range(1 << len(members)):
            H = [members[j] for j in range(len(members)) if bits >> j & 1]
            h_mask = sum(1 << e for e in H)
            value = f(tuple(1 if h_mask >> e & 1 else 0 for e in range(n)))
            if value <= ATOL:
                continue
            low = minimize(support_mask, h_mask)
            if low <= ATOL:
                # f_i <= F pointwise for nonnegative components, so this needs negative parts
                notes.append(f"component {i}: F vanishes where f_i(H) > 0; p_i set to 1")
                best = max(best, 1.0)
                continue
            best = max(best, value / low)
        out[i] = best
    if notes:
        for msg in notes:
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return PeakEstimates(out, "bounded-arity", 1.0, notes,
                         {"supports": [sorted(C) for C in supports]})
