"""Ground sets, component functions and brute-force checks on them.

A point of the domain ``(k+1)^E`` is stored as a label vector: entry ``e`` is
``0`` when element ``e`` is unassigned and ``l`` in ``1..k`` when it belongs to
part ``A_l``.  Disjointness of the parts is therefore structural.  The whole
domain is enumerated in mixed-radix order, with element ``0`` as the least
significant digit, so the domain index of ``A`` is ``sum(A[e] * (k+1)**e)``.
For ``k = 1`` this is the usual bitmask encoding of subsets.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .exceptions import DomainTooLargeError, NotMonotoneError, SupportError

ATOL = 1e-9
MAX_DOMAIN = 10**7
MAX_CURVATURE_N = 10

Assignment = tuple


@dataclass(frozen=True)
class GroundSet:
    """Elements ``0..n-1`` together with the number of parts ``k``."""

    n: int
    k: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")

    @property
    def radix(self) -> int:
        return self.k + 1

    @property
    def size(self) -> int:
        """Number of domain points, ``(k+1)**n``."""
        return self.radix**self.n

    @property
    def powers(self) -> np.ndarray:
        return self.radix ** np.arange(self.n, dtype=np.int64)

    def check(self, A) -> Assignment:
        """Validate a label vector and return it as a tuple of ints."""
        labels = tuple(int(a) for a in A)
        if len(labels) != self.n:
            raise ValueError(f"assignment has length {len(labels)}, expected {self.n}")
        for e, a in enumerate(labels):
            if a < 0 or a > self.k:
                raise ValueError(f"label {a} of element {e} outside [0, {self.k}]")
        return labels

    def index(self, A) -> int:
        labels = self.check(A)
        return sum(a * self.radix**e for e, a in enumerate(labels))

    def assignment(self, index: int) -> Assignment:
        if not 0 <= index < self.size:
            raise ValueError(f"domain index {index} out of range")
        out = []
        for _ in range(self.n):
            index, a = divmod(index, self.radix)
            out.append(a)
        return tuple(out)

    def empty(self) -> Assignment:
        return (0,) * self.n

    def labels(self, force: bool = False) -> np.ndarray:
        """All domain points as a read-only ``(size, n)`` label array."""
        check_domain_size(self.size, force=force)
        return domain_labels(self.n, self.k)


def check_domain_size(size: int, limit: int = MAX_DOMAIN, force: bool = False) -> None:
    if size > limit and not force:
        raise DomainTooLargeError(
            f"enumeration over {size} domain points exceeds the guard of {limit}; "
            "pass force=True to override"
        )


@lru_cache(maxsize=32)
def domain_labels(n: int, k: int) -> np.ndarray:
    radix = k + 1
    idx = np.arange(radix**n, dtype=np.int64)
    out = np.empty((radix**n, n), dtype=np.int8 if k < 127 else np.int64)
    for e in range(n):
        out[:, e] = (idx // radix**e) % radix
    out.setflags(write=False)
    return out


def as_set(A) -> frozenset:
    """Elements carrying a nonzero label."""
    return frozenset(e for e, a in enumerate(A) if a)


def from_set(S: Iterable[int], n: int) -> Assignment:
    """The ``k = 1`` assignment of the subset ``S``."""
    members = set(S)
    return tuple(1 if e in members else 0 for e in range(n))


# Component functions


class ComponentFunction:
    """A nonnegative function on ``(k+1)^E`` with an evaluation oracle.

    Subclasses implement ``_evaluate`` for single points and may override
    ``_table`` with a vectorised evaluation of the whole domain.
    """

    kind = "abstract"

    def __init__(self, ground: GroundSet, declared_curvature=None, declared_support=None):
        self.ground = ground
        if declared_curvature is not None and not 0.0 <= declared_curvature <= 1.0:
            raise ValueError("declared_curvature must lie in [0, 1]")
        self.declared_curvature = declared_curvature
        self.declared_support = (
            None if declared_support is None else frozenset(int(e) for e in declared_support)
        )
        self._values = None

    @property
    def n(self) -> int:
        return self.ground.n

    @property
    def k(self) -> int:
        return self.ground.k

    def __call__(self, A) -> float:
        return float(self._evaluate(self.ground.check(A)))

    def _evaluate(self, A: Assignment) -> float:
        raise NotImplementedError

    def _table(self, labels: np.ndarray) -> np.ndarray:
        return np.array([self._evaluate(tuple(int(a) for a in row)) for row in labels], dtype=float)

    def values(self, force: bool = False) -> np.ndarray:
        """Function values on every domain point, in domain-index order."""
        if self._values is None:
            table = np.asarray(self._table(self.ground.labels(force=force)), dtype=float)
            table.setflags(write=False)
            self._values = table
        return self._values

    def to_dict(self) -> dict:
        raise NotImplementedError(f"{type(self).__name__} has no serial form")

    def __repr__(self):
        return f"<{type(self).__name__} n={self.n} k={self.k}>"


class ExplicitTable(ComponentFunction):
    """A function given by its full value table in domain-index order."""

    kind = "explicit-table"

    def __init__(self, ground: GroundSet, values: Sequence[float], **kw):
        super().__init__(ground, **kw)
        table = np.asarray(values, dtype=float).ravel()
        if table.shape[0] != ground.size:
            raise ValueError(
                f"explicit table has {table.shape[0]} entries, expected (k+1)^n = {ground.size}"
            )
        table.setflags(write=False)
        self._values = table

    def _evaluate(self, A):
        return self._values[sum(a * self.ground.radix**e for e, a in enumerate(A))]

    def to_dict(self):
        return {"kind": self.kind, "values": [float(v) for v in self._values]}


class DirectedCut(ComponentFunction):
    """Indicator that the arc ``u -> v`` leaves the set: ``u in S`` and ``v`` not in ``S``."""

    kind = "directed-cut"

    def __init__(self, ground: GroundSet, u: int, v: int, weight: float = 1.0, **kw):
        if ground.k != 1:
            raise ValueError("directed-cut components require k = 1")
        if u == v or not (0 <= u < ground.n and 0 <= v < ground.n):
            raise ValueError(f"invalid arc ({u}, {v}) on {ground.n} vertices")
        if weight < 0:
            raise ValueError("arc weight must be nonnegative")
        kw.setdefault("declared_support", (u, v))
        super().__init__(ground, **kw)
        self.u, self.v, self.weight = int(u), int(v), float(weight)

    def _evaluate(self, A):
        return self.weight if (A[self.u] and not A[self.v]) else 0.0

    def _table(self, labels):
        return self.weight * ((labels[:, self.u] == 1) & (labels[:, self.v] == 0))

    def to_dict(self):
        d = {"kind": self.kind, "u": self.u, "v": self.v}
        if self.weight != 1.0:
            d["weight"] = self.weight
        return d


class Coverage(ComponentFunction):
    """Weighted coverage: each (element, label) pair covers a set of universe items.

    ``covers[e][l-1]`` lists the items covered by giving element ``e`` label
    ``l``.  The value of ``A`` is the total weight of the items covered by the
    pairs present in ``A``.  Such functions are monotone and k-submodular.
    """

    def __init__(self, ground: GroundSet, universe: int, weights, covers, **kw):
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (universe,):
            raise ValueError(f"expected {universe} weights, got shape {weights.shape}")
        if np.any(weights < 0):
            raise ValueError("coverage weights must be nonnegative")
        if len(covers) != ground.n:
            raise ValueError(f"covers must have one entry per element ({ground.n})")
        mask = np.zeros((ground.n, ground.k + 1, universe), dtype=bool)
        normalised = []
        for e, per_label in enumerate(covers):
            per_label = list(per_label)
            # one flat item list is accepted as shorthand when k = 1
            if ground.k == 1 and (not per_label or not isinstance(per_label[0], (list, tuple))):
                per_label = [per_label]
            if len(per_label) != ground.k:
                raise ValueError(f"element {e} needs {ground.k} cover lists")
            row = []
            for label, items in enumerate(per_label, start=1):
                items = sorted({int(t) for t in items})
                if items and (items[0] < 0 or items[-1] >= universe):
                    raise ValueError(f"cover of ({e}, {label}) references an item outside the universe")
                mask[e, label, items] = True
                row.append(items)
            normalised.append(row)
        if "declared_support" not in kw:
            live = (mask & (weights > 0)).any(axis=(1, 2))
            kw["declared_support"] = np.flatnonzero(live).tolist()
        super().__init__(ground, **kw)
        self.universe = int(universe)
        self.weights = weights
        self.covers = normalised
        self._mask = mask

    @property
    def kind(self):
        return "weighted-coverage" if self.k == 1 else "k-label-coverage"

    def _evaluate(self, A):
        covered = np.zeros(self.universe, dtype=bool)
        for e, a in enumerate(A):
            if a:
                covered |= self._mask[e, a]
        return float(self.weights @ covered)

    def _table(self, labels):
        n = self.n
        out = np.empty(labels.shape[0])
        step = max(1, 4_000_000 // max(1, n * self.universe))
        rows = np.arange(n)
        for lo in range(0, labels.shape[0], step):
            chunk = labels[lo:lo + step]
            covered = self._mask[rows, chunk].any(axis=1)
            out[lo:lo + step] = covered @ self.weights
        return out

    def to_dict(self):
        return {
            "kind": self.kind,
            "universe": self.universe,
            "weights": [float(w) for w in self.weights],
            "covers": [[list(items) for items in row] for row in self.covers],
        }


class Callback(ComponentFunction):
    """Wraps a Python callable taking a label tuple."""

    kind = "callback"

    def __init__(self, ground: GroundSet, func: Callable[[Assignment], float], **kw):
        super().__init__(ground, **kw)
        self.func = func

    def _evaluate(self, A):
        return float(self.func(A))


def modular(ground: GroundSet, gains) -> Coverage:
    """Modular function ``A -> sum of gains[e][A[e]-1]`` as a coverage function.

    ``gains`` is an ``(n, k)`` array of nonnegative per-pair values (or a length
    ``n`` vector when ``k = 1``).
    """
    gains = np.asarray(gains, dtype=float).reshape(ground.n, ground.k)
    covers = [[[e * ground.k + i] for i in range(ground.k)] for e in range(ground.n)]
    return Coverage(ground, ground.n * ground.k, gains.ravel(), covers)


class DecomposableInstance:
    """``F = f_1 + ... + f_N`` over a common ground set."""

    def __init__(self, components: Sequence[ComponentFunction], fast_total=None):
        components = list(components)
        if not components:
            raise ValueError("an instance needs at least one component")
        ground = components[0].ground
        for i, f in enumerate(components):
            if f.ground != ground:
                raise ValueError(f"component {i} lives on {f.ground}, expected {ground}")
        self.ground = ground
        self.components = components
        self.fast_total = fast_total
        self._matrix = None

    @property
    def n(self):
        return self.ground.n

    @property
    def k(self):
        return self.ground.k

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def values(self, force: bool = False) -> np.ndarray:
        """``(N, |D|)`` matrix of component values over the whole domain."""
        if self._matrix is None:
            check_domain_size(len(self) * self.ground.size, force=force)
            m = np.vstack([f.values(force=force) for f in self.components])
            m.setflags(write=False)
            self._matrix = m
        return self._matrix

    def total_values(self, force: bool = False) -> np.ndarray:
        return self.values(force=force).sum(axis=0)

    def total(self, A) -> float:
        if self.fast_total is not None:
            return float(self.fast_total(self.ground.check(A)))
        return float(sum(f(A) for f in self.components))

    def check_fast_total(self, samples: int = 1000, seed: int = 0, rtol: float = 1e-9) -> float:
        """Largest scaled gap between ``fast_total`` and the component sum on random points.

        Raises ``ValueError`` when the gap exceeds ``rtol * (1 + |F(A)|)``.
        """
        if self.fast_total is None:
            return 0.0
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(samples):
            A = tuple(int(a) for a in rng.integers(0, self.k + 1, size=self.n))
            exact = sum(f(A) for f in self.components)
            gap = abs(float(self.fast_total(A)) - exact) / (1.0 + abs(exact))
            worst = max(worst, gap)
            if gap > rtol:
                raise ValueError(f"fast_total disagrees with the component sum at {A}")
        return worst

    def __repr__(self):
        return f"<DecomposableInstance n={self.n} k={self.k} N={len(self)}>"


# Lattice operations and marginals


def evaluate(f: ComponentFunction, A) -> float:
    return f(A)


def meet(A, B) -> Assignment:
    """Componentwise intersection of the parts."""
    if len(A) != len(B):
        raise ValueError("assignments live on different ground sets")
    return tuple(a if a == b else 0 for a, b in zip(A, B))


def join(A, B) -> Assignment:
    """Componentwise union, dropping elements claimed by two different parts."""
    if len(A) != len(B):
        raise ValueError("assignments live on different ground sets")
    return tuple(b if a == 0 else (a if b == 0 or a == b else 0) for a, b in zip(A, B))


def marginal_gain(f: ComponentFunction, A, e: int, i: int) -> float:
    A = f.ground.check(A)
    if not 1 <= i <= f.k:
        raise ValueError(f"part index {i} outside [1, {f.k}]")
    if A[e] != 0:
        raise ValueError(f"element {e} is already assigned in {A}")
    B = A[:e] + (i,) + A[e + 1:]
    return f(B) - f(A)


def _meet_join_index(La: np.ndarray, Lb: np.ndarray, powers: np.ndarray):
    both = (La == Lb)
    m = np.where(both, La, 0)
    j = np.where(La == 0, Lb, np.where((Lb == 0) | both, La, 0))
    return m.astype(np.int64) @ powers, j.astype(np.int64) @ powers


def empty_marginals(f: ComponentFunction) -> np.ndarray:
    """``(n, k)`` array of marginal gains at the empty assignment."""
    g = f.ground
    base = f(g.empty())
    out = np.empty((g.n, g.k))
    for e in range(g.n):
        for i in range(1, g.k + 1):
            A = (0,) * e + (i,) + (0,) * (g.n - e - 1)
            out[e, i - 1] = f(A) - base
    return out


def curvature(f: ComponentFunction, max_n: int = MAX_CURVATURE_N, atol: float = ATOL) -> float:
    """Total curvature ``1 - min Delta_{e,i} f(A) / Delta_{e,i} f(empty)``.

    Pairs whose empty-set marginal vanishes are skipped.  Above ``max_n``
    elements the declared curvature is returned instead; see
    :func:`curvature_with_source`.
    """
    return curvature_with_source(f, max_n=max_n, atol=atol)[0]


def curvature_with_source(f: ComponentFunction, max_n: int = MAX_CURVATURE_N, atol: float = ATOL):
    """Curvature plus where it came from: ``"brute-force"`` or ``"declared"``."""
    if f.n > max_n:
        if f.declared_curvature is None:
            raise DomainTooLargeError(
                f"brute-force curvature needs n <= {max_n} (n = {f.n}); declare the curvature"
            )
        return float(f.declared_curvature), "declared"
    g = f.ground
    T = f.values()
    L = g.labels()
    idx = np.arange(g.size, dtype=np.int64)
    ratio = 1.0
    for e in range(g.n):
        free = idx[L[:, e] == 0]
        for i in range(1, g.k + 1):
            step = i * g.radix**e
            gains = T[free + step] - T[free]
            worst = int(np.argmin(gains))
            if gains[worst] < -atol:
                A = g.assignment(int(free[worst]))
                raise NotMonotoneError(
                    f"not monotone: adding element {e} with label {i} to {A} changes f by {gains[worst]:g}"
                )
            base = T[step] - T[0]
            if base <= atol:
                continue
            ratio = min(ratio, float(gains[worst]) / base)
    return float(min(1.0, max(0.0, 1.0 - ratio))), "brute-force"


# Brute-force verifiers


class SubmodularityViolation(NamedTuple):
    A: Assignment
    B: Assignment
    excess: float


class MonotonicityViolation(NamedTuple):
    A: Assignment
    element: int
    label: int
    drop: float


def verify_k_submodular(f: ComponentFunction, atol: float = ATOL, force: bool = False
                        ) -> Optional[SubmodularityViolation]:
    """Exhaustively test ``f(A meet B) + f(A join B) <= f(A) + f(B)``.

    Returns ``None`` when every pair passes, otherwise the pair with the first
    (in domain order) violation.
    """
    g = f.ground
    check_domain_size(g.size**2, limit=10**9, force=force)
    T = f.values(force=force)
    L = g.labels(force=force)
    powers = g.powers
    D = g.size
    step = max(1, 2_000_000 // (D * g.n))
    for lo in range(0, D, step):
        La = L[lo:lo + step, None, :]
        mi, ji = _meet_join_index(La, L[None, :, :], powers)
        lhs = T[mi] + T[ji]
        rhs = T[lo:lo + step, None] + T[None, :]
        bad = lhs - rhs > atol
        if bad.any():
            a, b = np.argwhere(bad)[0]
            return SubmodularityViolation(
                g.assignment(lo + int(a)), g.assignment(int(b)), float((lhs - rhs)[a, b])
            )
    return None


def verify_monotone(f: ComponentFunction, atol: float = ATOL, force: bool = False
                    ) -> Optional[MonotonicityViolation]:
    """Check that every single-element extension has a nonnegative marginal."""
    g = f.ground
    T = f.values(force=force)
    L = g.labels(force=force)
    idx = np.arange(g.size, dtype=np.int64)
    for e in range(g.n):
        free = idx[L[:, e] == 0]
        for i in range(1, g.k + 1):
            gains = T[free + i * g.radix**e] - T[free]
            worst = int(np.argmin(gains))
            if gains[worst] < -atol:
                return MonotonicityViolation(g.assignment(int(free[worst])), e, i, float(-gains[worst]))
    return None


def is_normalized(f: ComponentFunction, atol: float = ATOL) -> bool:
    return abs(f(f.ground.empty())) <= atol


def check_support(f: ComponentFunction, support: Iterable[int], samples: int = 256,
                  seed: int = 0, atol: float = ATOL) -> frozenset:
    """Spot-check ``f(S) == f(S & C)``; exhaustive when the domain is small.

    Returns the support as a frozenset or raises :class:`SupportError`.
    """
    C = frozenset(int(e) for e in support)
    g = f.ground
    if any(not 0 <= e < g.n for e in C):
        raise SupportError(f"support {sorted(C)} references elements outside the ground set")
    keep = np.array([e in C for e in range(g.n)])
    if g.size <= 4096:
        L = g.labels()
        T = f.values()
        proj = (np.where(keep, L, 0).astype(np.int64)) @ g.powers
        bad = np.abs(T - T[proj]) > atol
        if bad.any():
            A = g.assignment(int(np.flatnonzero(bad)[0]))
            raise SupportError(f"f changes outside the support {sorted(C)} at {A}")
        return C
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        A = tuple(int(a) for a in rng.integers(0, g.k + 1, size=g.n))
        P = tuple(a if keep[e] else 0 for e, a in enumerate(A))
        if abs(f(A) - f(P)) > atol:
            raise SupportError(f"f changes outside the support {sorted(C)} at {A}")
    return C

