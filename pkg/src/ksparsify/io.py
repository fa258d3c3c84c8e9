"""JSON forms of instances, peak sidecars and sparsifiers."""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .model import Coverage, DecomposableInstance, DirectedCut, ExplicitTable, GroundSet

COVERAGE_KINDS = ("weighted-coverage", "k-label-coverage")


def component_from_dict(d: dict, ground: GroundSet):
    kind = d.get("kind")
    extra = {}
    if "declared_curvature" in d:
        extra["declared_curvature"] = float(d["declared_curvature"])
    if "declared_support" in d:
        extra["declared_support"] = d["declared_support"]
    if kind == "directed-cut":
        return DirectedCut(ground, int(d["u"]), int(d["v"]), float(d.get("weight", 1.0)), **extra)
    if kind == "explicit-table":
        return ExplicitTable(ground, d["values"], **extra)
    if kind in COVERAGE_KINDS:
        if kind == "weighted-coverage" and ground.k != 1:
            raise ValueError("weighted-coverage components require k = 1")
        return Coverage(ground, int(d["universe"]), d["weights"], d["covers"], **extra)
    raise ValueError(f"unknown component kind {kind!r}")


def component_to_dict(f) -> dict:
    d = f.to_dict()
    if f.declared_curvature is not None:
        d["declared_curvature"] = f.declared_curvature
    return d


def instance_from_dict(d: dict) -> DecomposableInstance:
    ground = GroundSet(int(d["n"]), int(d.get("k", 1)))
    comps = d.get("components") or []
    if not comps:
        raise ValueError("instance has no components")
    return DecomposableInstance([component_from_dict(c, ground) for c in comps])


def instance_to_dict(inst: DecomposableInstance) -> dict:
    return {"n": inst.n, "k": inst.k, "components": [component_to_dict(f) for f in inst]}


def read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_json(path, payload) -> None:
    """Write atomically: dump to a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_instance(path) -> DecomposableInstance:
    return instance_from_dict(read_json(path))


def save_instance(inst: DecomposableInstance, path) -> None:
    write_json(path, instance_to_dict(inst))
