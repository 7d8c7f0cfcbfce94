"""Conservative k-nearest-neighbour prediction of warm-start constraint sets.

A row is predicted in the set if *any* of the k nearest training instances
(Euclidean distance on theta, ties to the lower training index) has it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import ConstraintSet, MilpInstance

SOURCES = ("binding", "invariant")


@dataclass(frozen=True)
class LabelMatrix:
    family: str
    thetas: np.ndarray       # (T, dim)
    labels: np.ndarray       # (T, |learnable|) in {+1, -1}
    learnable_ids: tuple[int, ...]
    source: str = "invariant"
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.thetas.ndim != 2 or self.labels.ndim != 2:
            raise ValueError("thetas and labels must be 2-d")
        if self.thetas.shape[0] != self.labels.shape[0]:
            raise ValueError("one label vector per theta required")
        if self.labels.shape[1] != len(self.learnable_ids):
            raise ValueError("label width must equal the learnable constraint count")
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}")

    def __len__(self):
        return self.thetas.shape[0]

    @classmethod
    def from_sets(cls, instances: Sequence[MilpInstance], sets: Sequence[ConstraintSet],
                  source: str = "invariant", family: str = "") -> "LabelMatrix":
        if not instances:
            raise ValueError("empty training set")
        learnable = tuple(instances[0].learnable_ids)
        thetas = np.array([inst.theta for inst in instances], dtype=float)
        labels = np.array([s.labels(inst) for inst, s in zip(instances, sets)], dtype=np.int8)
        labels = labels.reshape(len(instances), len(learnable))
        return cls(family, thetas, labels, learnable, source,
                   tuple(inst.name for inst in instances))

    def subset(self, rows) -> "LabelMatrix":
        rows = np.asarray(rows)
        names = tuple(self.names[i] for i in rows) if self.names else ()
        return LabelMatrix(self.family, self.thetas[rows], self.labels[rows],
                           self.learnable_ids, self.source, names)


@dataclass(frozen=True)
class KnnModel:
    data: LabelMatrix
    k: int

    def neighbours(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float).ravel()
        if theta.size != self.data.thetas.shape[1]:
            raise ValueError(
                f"theta has dimension {theta.size}, model expects {self.data.thetas.shape[1]}")
        dist = np.sqrt(((self.data.thetas - theta) ** 2).sum(axis=1))
        # stable sort: equal distances keep training order
        return np.argsort(dist, kind="stable")[: self.k]

    def predict_labels(self, theta) -> np.ndarray:
        nb = self.neighbours(theta)
        hit = (self.data.labels[nb] > 0).any(axis=0)
        return np.where(hit, 1, -1).astype(np.int8)

    def predict_set(self, theta, instance: MilpInstance) -> ConstraintSet:
        """Warm-start set for ``instance``: voted learnable rows plus all fixed rows."""
        hit = self.predict_labels(theta) > 0
        ids = [j for j, h in zip(self.data.learnable_ids, hit) if h]
        return instance.make_set(ids)


def fit(data: LabelMatrix, k: int) -> KnnModel:
    if len(data) == 0:
        raise ValueError("empty training set")
    if not 1 <= k <= len(data):
        raise ValueError(f"k={k} outside [1, {len(data)}]")
    return KnnModel(data, int(k))


def predict_set(model: KnnModel, theta, instance: MilpInstance) -> ConstraintSet:
    return model.predict_set(theta, instance)
