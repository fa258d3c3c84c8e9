"""Slow, independent reference implementations used as test oracles.

Everything here works on plain tuples and Python loops and shares no code
with the package beyond calling ``f(A)``.
"""
from __future__ import annotations

import itertools
import math


def assignments(n, k):
    return list(itertools.product(range(k + 1), repeat=n))


def parts(A, k):
    return tuple(frozenset(e for e, l in enumerate(A) if l == i) for i in range(1, k + 1))


def from_parts(P, n):
    A = [0] * n
    for i, part in enumerate(P, start=1):
        for e in part:
            A[e] = i
    return tuple(A)


def meet(A, B, k):
    PA, PB = parts(A, k), parts(B, k)
    return from_parts([a & b for a, b in zip(PA, PB)], len(A))


def join(A, B, k):
    PA, PB = parts(A, k), parts(B, k)
    unions = [a | b for a, b in zip(PA, PB)]
    out = []
    for l in range(k):
        others = set().union(*[unions[j] for j in range(k) if j != l]) if k > 1 else set()
        out.append(unions[l] - others)
    return from_parts(out, len(A))


def table(f, n, k):
    return {A: f(A) for A in assignments(n, k)}


def is_k_submodular(f, n, k, atol=1e-9):
    T = table(f, n, k)
    for A in T:
        for B in T:
            if T[meet(A, B, k)] + T[join(A, B, k)] > T[A] + T[B] + atol:
                return False
    return True


def is_monotone(f, n, k, atol=1e-9):
    T = table(f, n, k)
    for A, v in T.items():
        for e in range(n):
            if A[e] == 0:
                for i in range(1, k + 1):
                    B = A[:e] + (i,) + A[e + 1:]
                    if T[B] < v - atol:
                        return False
    return True


def curvature(f, n, k, atol=1e-9):
    T = table(f, n, k)
    empty = (0,) * n
    best = 1.0
    for e in range(n):
        for i in range(1, k + 1):
            base = T[empty[:e] + (i,) + empty[e + 1:]] - T[empty]
            if base <= atol:
                continue
            for A, v in T.items():
                if A[e] == 0:
                    gain = T[A[:e] + (i,) + A[e + 1:]] - v
                    best = min(best, gain / base)
    return 1.0 - best


def peaks(components, n, k, atol=1e-9):
    doms = assignments(n, k)
    vals = [[f(A) for A in doms] for f in components]
    F = [sum(col) for col in zip(*vals)]
    out = []
    for row in vals:
        ratios = [r / t for r, t in zip(row, F) if abs(t) > atol]
        out.append(max(ratios) if ratios else 0.0)
    return out


def max_ratio(f, g, n, k, atol=1e-9):
    best = -math.inf
    for A in assignments(n, k):
        gv = g(A)
        if gv > atol:
            best = max(best, f(A) / gv)
    return best


def ratio_brute_force(x, y, A, B):
    best, arg = -math.inf, None
    idx = range(len(x))
    for r in range(1, len(x) + 1):
        for I in itertools.combinations(idx, r):
            v = (A + sum(x[i] for i in I)) / (B + sum(y[i] for i in I))
            if v > best:
                best, arg = v, I
    return arg, best


def chain_points(f, n):
    pts = set()
    for perm in itertools.permutations(range(n)):
        S = [0] * n
        prev = f(tuple(S))
        y = [0.0] * n
        for e in perm:
            S[e] = 1
            cur = f(tuple(S))
            y[e] = cur - prev
            prev = cur
        pts.add(tuple(round(v, 9) + 0.0 for v in y))
    return pts
