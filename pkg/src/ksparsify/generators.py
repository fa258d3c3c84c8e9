"""Seeded generators for test instances.

All generators take an integer ``seed`` and are deterministic given it.
"""
from __future__ import annotations

import itertools

import numpy as np

from .exceptions import SparsifyError
from .model import (
    Coverage,
    DecomposableInstance,
    DirectedCut,
    ExplicitTable,
    GroundSet,
    verify_k_submodular,
    verify_monotone,
)


def directed_cut_instance(n_vertices: int, arcs) -> DecomposableInstance:
    ground = GroundSet(n_vertices, 1)
    return DecomposableInstance([DirectedCut(ground, u, v) for u, v in arcs])


def complete_bipartite_cut(left: int = 5, right: int = 5) -> DecomposableInstance:
    """Cut decomposition of the complete bipartite digraph ``L x R``.

    Vertices ``0..left-1`` form ``L`` and ``left..left+right-1`` form ``R``;
    components are ordered row-major over ``(u, v)``.
    """
    arcs = [(u, left + v) for u in range(left) for v in range(right)]
    return directed_cut_instance(left + right, arcs)


def random_digraph_cut(n_vertices: int, n_arcs: int, seed: int = 0) -> DecomposableInstance:
    """Cut decomposition of a random simple digraph with ``n_arcs`` distinct arcs."""
    all_arcs = [(u, v) for u in range(n_vertices) for v in range(n_vertices) if u != v]
    if n_arcs > len(all_arcs):
        raise ValueError(f"a simple digraph on {n_vertices} vertices has at most {len(all_arcs)} arcs")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(all_arcs), size=n_arcs, replace=False)
    return directed_cut_instance(n_vertices, [all_arcs[c] for c in sorted(chosen)])


def coverage_function(ground: GroundSet, universe: int = 8, density: float = 0.3,
                      private: bool = True, seed: int = 0, weight_range=(1, 5),
                      rng=None) -> Coverage:
    """Random (k-label) coverage function.

    Every (element, label) pair covers each shared item independently with
    probability ``density``.  With ``private=True`` each pair also owns one
    item nobody else covers, which keeps curvature strictly below one.
    Weights are integers drawn uniformly from ``weight_range``.
    """
    rng = np.random.default_rng(seed) if rng is None else rng
    n, k = ground.n, ground.k
    n_private = n * k if private else 0
    total = universe + n_private
    lo, hi = weight_range
    weights = rng.integers(lo, hi + 1, size=total).astype(float)
    covers = []
    for e in range(n):
        row = []
        for i in range(k):
            items = np.flatnonzero(rng.random(universe) < density).tolist()
            if private:
                items.append(universe + e * k + i)
            row.append(items)
        covers.append(row)
    return Coverage(ground, total, weights, covers)


def coverage_instance(n: int, n_components: int, k: int = 1, universe: int = 8,
                      density: float = 0.3, private: bool = True, seed: int = 0,
                      weight_range=(1, 5)) -> DecomposableInstance:
    ground = GroundSet(n, k)
    rng = np.random.default_rng(seed)
    return DecomposableInstance([
        coverage_function(ground, universe, density, private, weight_range=weight_range, rng=rng)
        for _ in range(n_components)
    ])


def local_coverage_instance(n: int, n_components: int, arity: int = 2, universe: int = 4,
                            seed: int = 0, weight_range=(1, 10)) -> DecomposableInstance:
    """k = 1 coverage components each touching only ``arity`` random elements.

    Components have a small effective support, so peak contributions vary
    widely and the sampler keeps only part of them.
    """
    ground = GroundSet(n, 1)
    rng = np.random.default_rng(seed)
    comps = []
    for _ in range(n_components):
        touched = rng.choice(n, size=min(arity, n), replace=False)
        covers = [[] for _ in range(n)]
        for e in touched:
            covers[e] = rng.choice(universe, size=rng.integers(1, universe + 1), replace=False).tolist()
        scale = rng.integers(weight_range[0], weight_range[1] + 1)
        weights = scale * rng.integers(1, 4, size=universe).astype(float)
        comps.append(Coverage(ground, universe, weights, covers))
    return DecomposableInstance(comps)


def skewed_coverage_instance(n: int, n_components: int, n_heavy: int = 5, heavy_scale: int = 40,
                             seed: int = 0) -> DecomposableInstance:
    """A few heavy full-support coverage components plus many light local ones.

    Light components have peaks far below ``1 / n_components``, so at moderate
    ``epsilon`` the sampler genuinely drops part of them.
    """
    if not 0 < n_heavy <= n_components:
        raise ValueError("need 0 < n_heavy <= n_components")
    ground = GroundSet(n, 1)
    rng = np.random.default_rng(seed)
    heavy = [coverage_function(ground, universe=6, density=0.4, weight_range=(heavy_scale, 2 * heavy_scale),
                               rng=rng) for _ in range(n_heavy)]
    light = local_coverage_instance(n, n_components - n_heavy, arity=2, universe=3,
                                    seed=int(rng.integers(2**31)), weight_range=(1, 2))
    return DecomposableInstance(heavy + list(light))


def random_table(ground: GroundSet, seed: int = 0, max_attempts: int = 10_000,
                 max_value: int = 6) -> ExplicitTable:
    """Rejection-sampled explicit table that is monotone and k-submodular.

    Proposals are random small-coverage tables, optionally truncated at a
    random cap and perturbed by a random nonnegative constant; a proposal is
    accepted once both brute-force verifiers pass.  Only meant for ``n <= 4``.
    """
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        base = coverage_function(ground, universe=int(rng.integers(1, 5)),
                                 density=float(rng.uniform(0.2, 0.7)), private=bool(rng.random() < 0.5),
                                 weight_range=(1, max_value), rng=rng)
        table = base.values().copy()
        if rng.random() < 0.5:
            table = np.minimum(table, float(rng.integers(1, int(table.max()) + 2)))
        table += float(rng.integers(0, 3))
        if rng.random() < 0.3:
            # random noise on non-empty points; rejection weeds out the bad ones
            table[1:] += rng.integers(0, 2, size=table.size - 1)
        cand = ExplicitTable(ground, table)
        if verify_monotone(cand) is None and verify_k_submodular(cand) is None:
            return cand
    raise SparsifyError(f"no monotone k-submodular table found in {max_attempts} attempts")


def generate(kind: str, seed: int = 0, **params):
    """Dispatch to a generator by name.

    ``kind`` is one of ``"digraph-cut"``, ``"bipartite-cut"``,
    ``"weighted-coverage"``, ``"k-label-coverage"``, ``"local-coverage"``,
    ``"skewed-coverage"`` or
    ``"table"``.
    """
    if kind == "digraph-cut":
        return random_digraph_cut(params.get("n", 6), params.get("arcs", 10), seed=seed)
    if kind == "bipartite-cut":
        return complete_bipartite_cut(params.get("left", 5), params.get("right", 5))
    if kind in ("weighted-coverage", "k-label-coverage"):
        k = 1 if kind == "weighted-coverage" else params.get("k", 2)
        return coverage_instance(params.get("n", 6), params.get("components", 20), k=k,
                                 universe=params.get("universe", 8),
                                 density=params.get("density", 0.3),
                                 private=params.get("private", True), seed=seed)
    if kind == "local-coverage":
        return local_coverage_instance(params.get("n", 6), params.get("components", 20),
                                       arity=params.get("arity", 2), seed=seed)
    if kind == "skewed-coverage":
        return skewed_coverage_instance(params.get("n", 6), params.get("components", 100),
                                        n_heavy=params.get("heavy", 5), seed=seed)
    if kind == "table":
        return random_table(GroundSet(params.get("n", 2), params.get("k", 2)), seed=seed)
    raise ValueError(f"unknown generator kind {kind!r}")


def all_subsets(items):
    items = list(items)
    return itertools.chain.from_iterable(itertools.combinations(items, r) for r in range(len(items) + 1))
