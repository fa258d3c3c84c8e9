"""Input validation shared by the estimators and the CLI."""
from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils import check_array

from .model import DecomposableInstance, GroundSet


def check_instance(X) -> DecomposableInstance:
    if isinstance(X, DecomposableInstance):
        return X
    if isinstance(X, dict):
        from .io import instance_from_dict

        return instance_from_dict(X)
    raise TypeError(f"expected a DecomposableInstance or its dict form, got {type(X).__name__}")


def check_open_unit(name: str, value) -> float:
    if not isinstance(value, numbers.Real) or not 0 < value < 1:
        raise ValueError(f"{name} must lie in (0, 1), got {value!r}")
    return float(value)


def check_assignments(A, ground: GroundSet) -> np.ndarray:
    """2-d integer label array of shape ``(n_points, n)`` with labels in ``[0, k]``."""
    arr = np.asarray(A)
    if arr.ndim == 1:
        arr = arr[None, :]
    arr = check_array(arr, dtype=np.int64, ensure_min_samples=1)
    if arr.shape[1] != ground.n:
        raise ValueError(f"assignments have {arr.shape[1]} columns, expected n = {ground.n}")
    if arr.min() < 0 or arr.max() > ground.k:
        raise ValueError(f"labels must lie in [0, {ground.k}]")
    return arr


def check_seed(seed):
    if seed is None:
        return int(np.random.SeedSequence().entropy)
    if isinstance(seed, numbers.Integral) and seed >= 0:
        return int(seed)
    if isinstance(seed, (list, tuple)) and all(isinstance(s, numbers.Integral) and s >= 0 for s in seed):
        return list(seed)
    raise ValueError(f"random_state must be a nonnegative int, a list of them, or None; got {seed!r}")
