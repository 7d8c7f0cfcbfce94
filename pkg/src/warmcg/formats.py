"""JSON / JSON-Lines readers and writers for instances and identified sets."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from .model import Constraint, ConstraintSet, MilpInstance

FORMAT_VERSION = "1"


def instance_to_dict(inst: MilpInstance) -> dict:
    bounds = []
    for lo, hi in inst.var_bounds:
        entry = {}
        if lo is not None:
            entry["lo"] = lo
        if hi is not None:
            entry["hi"] = hi
        bounds.append(entry)
    return {
        "name": inst.name,
        "num_continuous": inst.num_continuous,
        "num_integer": inst.num_integer,
        "objective": list(inst.objective),
        "var_bounds": bounds,
        "constraints": [
            {"coeffs": [[i, v] for i, v in c.coeffs], "rhs": c.rhs, "learnable": c.learnable}
            for c in inst.constraints
        ],
        "theta": list(inst.theta),
    }


def instance_from_dict(d: dict) -> MilpInstance:
    try:
        cons = tuple(
            Constraint(tuple((int(i), float(v)) for i, v in c["coeffs"]), float(c["rhs"]),
                       bool(c.get("learnable", True)))
            for c in d["constraints"])
        nv = int(d["num_continuous"]) + int(d["num_integer"])
        raw_bounds = d.get("var_bounds") or [{}] * nv
        bounds = tuple((b.get("lo"), b.get("hi")) for b in raw_bounds)
        return MilpInstance(
            name=str(d["name"]),
            num_continuous=int(d["num_continuous"]),
            num_integer=int(d["num_integer"]),
            objective=tuple(float(v) for v in d["objective"]),
            constraints=cons,
            var_bounds=bounds,
            theta=tuple(float(v) for v in d.get("theta", ())),
        )
    except KeyError as e:
        raise ValueError(f"instance record is missing field {e}") from None


def write_dataset(path, instances: Iterable[MilpInstance]) -> None:
    with open(path, "w") as fh:
        for inst in instances:
            fh.write(json.dumps(instance_to_dict(inst)) + "\n")


def read_dataset(path) -> list[MilpInstance]:
    out = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                out.append(instance_from_dict(json.loads(line)))
    names = [i.name for i in out]
    if len(set(names)) != len(names):
        raise ValueError(f"{path}: duplicate instance names")
    return out


def write_sets(path, records: Iterable[tuple[str, ConstraintSet, ConstraintSet]]) -> None:
    with open(path, "w") as fh:
        for name, b, s in records:
            fh.write(json.dumps({"name": name, "B": sorted(b.ids), "S": sorted(s.ids)}) + "\n")


def read_sets(path) -> dict[str, dict]:
    """``{name: {"B": ids, "S": ids}}`` as stored on disk, plus ``"objective"`` if recorded."""
    out = {}
    with open(path) as fh:
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                try:
                    entry = {"B": [int(j) for j in rec["B"]], "S": [int(j) for j in rec["S"]]}
                    if "objective" in rec:
                        entry["objective"] = float(rec["objective"])
                    out[rec["name"]] = entry
                except KeyError as e:
                    raise ValueError(f"{path}: sets record is missing field {e}") from None
    return out


def read_any(path) -> list[MilpInstance]:
    """A dataset file, or a single-instance JSON file."""
    text = Path(path).read_text().strip()
    if text.startswith("{"):
        try:
            return [instance_from_dict(json.loads(text))]
        except json.JSONDecodeError:
            pass  # several records, one per line
    return read_dataset(path)
