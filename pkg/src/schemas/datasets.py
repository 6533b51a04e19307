from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class LabeledDataset(BaseModel):
    """
    Real records: an N x Fin float64 feature matrix with integer class labels.
    Arrays are copied on construction and made read-only.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    features: np.ndarray
    labels: np.ndarray
    label_mapping: dict[int, int] = Field(default_factory=dict)

    @field_validator("features", mode="before")
    @classmethod
    def validate_features(cls, v: Any):
        features = np.array(v, dtype=np.float64)
        if features.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        if not np.all(np.isfinite(features)):
            raise ValueError("features must be finite")
        return _frozen(features)

    @field_validator("labels", mode="before")
    @classmethod
    def validate_labels(cls, v: Any):
        labels = np.array(v)
        if labels.size == 0:
            labels = labels.astype(np.int64).reshape(0)
        if labels.ndim != 1:
            raise ValueError("labels must be a vector")
        if labels.size and not np.all(np.equal(np.mod(labels, 1), 0)):
            raise ValueError("labels must be integers")
        labels = labels.astype(np.int64)
        if labels.size and labels.min() < 0:
            raise ValueError("labels must be non-negative")
        return _frozen(labels)

    @model_validator(mode="after")
    def validate_lengths(self):
        if self.features.shape[0] != self.labels.shape[0]:
            raise ValueError("features and labels must have the same number of rows")
        return self

    @property
    def n_records(self) -> int:
        return int(self.features.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    @property
    def classes(self) -> list[int]:
        return [int(c) for c in np.unique(self.labels)]

    @property
    def num_classes(self) -> int:
        """Width of a classifier head covering every label."""
        return int(self.labels.max()) + 1 if self.n_records else 0

    def class_counts(self) -> dict[int, int]:
        values, counts = np.unique(self.labels, return_counts=True)
        return {int(c): int(n) for c, n in zip(values, counts)}

    def class_features(self, label: int) -> np.ndarray:
        return self.features[self.labels == label]

    def subset(self, indices: np.ndarray) -> "LabeledDataset":
        indices = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(
            features=self.features[indices],
            labels=self.labels[indices],
            label_mapping=self.label_mapping,
        )

    @classmethod
    def concat(cls, parts: list["LabeledDataset"], n_features: int) -> "LabeledDataset":
        if not parts:
            return cls(features=np.zeros((0, n_features)), labels=np.zeros(0, dtype=np.int64))
        return cls(
            features=np.vstack([p.features for p in parts]),
            labels=np.concatenate([p.labels for p in parts]),
        )


class SyntheticMetadata(BaseModel):
    budgets: dict[int, int]
    seed: int
    iterations_completed: int = 0
    distance: str | None = None
    condensation_ratio: float | None = None
    config: dict[str, Any] | None = None

    @field_validator("budgets")
    @classmethod
    def validate_budgets(cls, v: dict[int, int]):
        # records are grouped in ascending class order
        return dict(sorted(v.items()))


class SyntheticDataset(LabeledDataset):
    """
    Learnable records grouped per class, in ascending class order, with fixed
    labels. This is the optimization variable of condensation.
    """

    metadata: SyntheticMetadata

    @model_validator(mode="after")
    def validate_grouping(self):
        expected = np.repeat(
            list(self.metadata.budgets.keys()), list(self.metadata.budgets.values())
        )
        if not np.array_equal(expected.astype(np.int64), self.labels):
            raise ValueError("synthetic records must be grouped per class in budget order")
        return self

    def class_slice(self, label: int) -> slice:
        start = 0
        for c, budget in self.metadata.budgets.items():
            if c == label:
                return slice(start, start + budget)
            start += budget
        raise KeyError(label)

    def class_records(self, label: int) -> np.ndarray:
        return self.features[self.class_slice(label)]

    def to_labeled(self) -> LabeledDataset:
        return LabeledDataset(
            features=self.features, labels=self.labels, label_mapping=self.label_mapping
        )


class GraphData(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    nodes: LabeledDataset
    edges: np.ndarray

    @field_validator("edges", mode="before")
    @classmethod
    def validate_edges(cls, v: Any):
        edges = np.array(v, dtype=np.int64).reshape(-1, 2)
        return _frozen(edges)
