"""Binary-search FPTAS for maximising ``(A + sum x_I) / (B + sum y_I)`` over nonempty ``I``."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

FEASIBILITY_SLACK = 1e-12


@dataclass(frozen=True)
class RatioInstance:
    """A modular-ratio-max instance; ``x`` and ``y`` are strictly positive."""

    x: tuple
    y: tuple
    A: float = 0.0
    B: float = 0.0

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        y = tuple(float(v) for v in self.y)
        if len(x) != len(y) or not x:
            raise ValueError("x and y must be nonempty and of equal length")
        if min(x) <= 0 or min(y) <= 0:
            raise ValueError("all x_i and y_i must be strictly positive")
        if self.A < 0 or self.B < 0:
            raise ValueError("A and B must be nonnegative")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "A", float(self.A))
        object.__setattr__(self, "B", float(self.B))

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def m(self) -> float:
        return min(min(self.x), min(self.y))

    @property
    def M(self) -> float:
        return max(max(self.x), max(self.y))

    def lower_bound(self) -> float:
        return (self.A + self.m) / (self.B + self.n * self.M)

    def upper_bound(self) -> float:
        return (self.A + self.n * self.M) / (self.B + self.m)

    def iteration_bound(self, epsilon: float) -> int:
        """``ceil(log2(1/eps) + 2 (log2 n + log2(M/m)))``."""
        return math.ceil(math.log2(1 / epsilon) + 2 * (math.log2(self.n) + math.log2(self.M / self.m)))

    @classmethod
    def from_dict(cls, d: dict) -> "RatioInstance":
        return cls(tuple(d["x"]), tuple(d["y"]), d.get("A", 0.0), d.get("B", 0.0))

    def to_dict(self) -> dict:
        return {"x": list(self.x), "y": list(self.y), "A": self.A, "B": self.B}


def rho(inst: RatioInstance, I) -> float:
    I = list(I)
    if not I:
        raise ValueError("rho is only defined for nonempty index sets")
    return (inst.A + sum(inst.x[i] for i in I)) / (inst.B + sum(inst.y[i] for i in I))


def check(inst: RatioInstance, lam: float, groups: Optional[Sequence[int]] = None,
          slack: float = FEASIBILITY_SLACK) -> Optional[tuple]:
    """Decide whether some nonempty ``I`` has ``rho(I) >= lam``.

    Indices are sorted by ``x_i - lam * y_i`` (descending, ties by index); the
    top index is always taken and every other positive one is added.  This
    maximises ``A - lam*B + sum_I (x_i - lam*y_i)`` over nonempty ``I``.

    With ``groups`` (one group id per index) at most one index per group may be
    chosen; only the best index of each group competes, which keeps the
    maximisation exact.  Returns the sorted index tuple or ``None``.
    """
    x = np.asarray(inst.x)
    y = np.asarray(inst.y)
    score = x - lam * y
    order = sorted(range(inst.n), key=lambda i: (-score[i], i))
    if groups is not None:
        seen = set()
        kept = []
        for i in order:
            if groups[i] not in seen:
                seen.add(groups[i])
                kept.append(i)
        order = kept
    chosen = [order[0]]
    total = (inst.A - lam * inst.B) + score[order[0]]
    for i in order[1:]:
        if score[i] > 0:
            chosen.append(i)
            total += score[i]
    if total >= -slack:
        return tuple(sorted(chosen))
    return None


@dataclass
class FptasResult:
    indices: tuple
    value: float
    iterations: int
    lower: float
    upper: float
    history: list = field(default_factory=list)


def fptas(inst: RatioInstance, epsilon: float, groups: Optional[Sequence[int]] = None,
          record: bool = False) -> FptasResult:
    """Return ``I`` with ``rho(I) >= (1 - epsilon) * rho(I*)`` for every nonempty ``I*``.

    The search is seeded with the bounds ``(A+m)/(B+nM)`` and ``(A+nM)/(B+m)``
    and stops once the bracket is at most ``epsilon * (A+m)/(B+nM)`` wide.
    With ``record=True`` the history holds ``(lam, lower, upper, rho(I))``
    after every iteration.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if groups is not None and len(groups) != inst.n:
        raise ValueError("groups must assign one group id per index")
    lo = inst.lower_bound()
    hi = inst.upper_bound()
    width = epsilon * lo
    I = (0,)
    history = []
    iterations = 0
    while hi - lo > width:
        lam = 0.5 * (lo + hi)
        found = check(inst, lam, groups)
        if found is None:
            hi = lam
        else:
            I = found
            lo = lam
        iterations += 1
        if record:
            history.append((lam, lo, hi, rho(inst, I)))
    return FptasResult(I, rho(inst, I), iterations, lo, hi, history)


def brute_force(inst: RatioInstance, groups: Optional[Sequence[int]] = None):
    """Exact optimum by enumerating nonempty index sets (respecting ``groups``)."""
    best, best_I = -math.inf, None
    for r in range(1, inst.n + 1):
        for I in itertools.combinations(range(inst.n), r):
            if groups is not None and len({groups[i] for i in I}) < len(I):
                continue
            v = rho(inst, I)
            if v > best:
                best, best_I = v, I
    return best_I, best
