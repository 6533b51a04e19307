from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.schemas.datasets import LabeledDataset, SyntheticDataset


class LossResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    value: float = Field(ge=0)
    grad_syn: np.ndarray


class CondenseResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    synthetic: SyntheticDataset
    loss_trace: list[float]


class AccuracyReport(BaseModel):
    mean: float
    std: float
    accuracies: list[float]


class DiagnosticReport(BaseModel):
    kind: str
    per_class: dict[int, float]
    overall: float


class EcdfTable(BaseModel):
    """Three step functions evaluated on one ascending grid."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    value: np.ndarray
    f_real: np.ndarray
    f_syn: np.ndarray
    f_optimal: np.ndarray

    def rows(self) -> list[tuple[float, float, float, float]]:
        return [
            (float(v), float(r), float(s), float(o))
            for v, r, s, o in zip(self.value, self.f_real, self.f_syn, self.f_optimal)
        ]


class DistanceComparison(BaseModel):
    distance: str
    accuracy: AccuracyReport
    cvm: DiagnosticReport
    extremes: DiagnosticReport
    final_loss: float


class ComparisonReport(BaseModel):
    full_data: AccuracyReport
    results: list[DistanceComparison]


class Task(BaseModel):
    model_config = ConfigDict(frozen=True)

    classes: list[int]
    train: LabeledDataset
    val: LabeledDataset
    test: LabeledDataset


class TaskSequence(BaseModel):
    model_config = ConfigDict(frozen=True)

    tasks: list[Task]
    num_classes: int

    @property
    def num_tasks(self) -> int:
        return len(self.tasks)


class AccuracyMatrix(BaseModel):
    """
    values[k-1, i-1] is the accuracy on task i after stage k. Entries above
    the diagonal are NaN; stages that were never evaluated stay NaN too.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def validate_values(cls, v: Any):
        values = np.array(v, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] == 0:
            raise ValueError("accuracy matrix must be square and non-empty")
        upper = values[np.triu_indices(values.shape[0], k=1)]
        if not np.all(np.isnan(upper)):
            raise ValueError("accuracy matrix must be lower-triangular")
        filled = values[~np.isnan(values)]
        if np.any(filled < 0) or np.any(filled > 1):
            raise ValueError("accuracies must lie in [0, 1]")
        values.setflags(write=False)
        return values

    @classmethod
    def from_rows(cls, rows: list[list[float]]) -> "AccuracyMatrix":
        size = len(rows)
        values = np.full((size, size), np.nan)
        for k, row in enumerate(rows):
            values[k, : len(row)] = row
        return cls(values=values)

    @property
    def num_tasks(self) -> int:
        return int(self.values.shape[0])


class ContinualRunResult(BaseModel):
    test: AccuracyMatrix
    val: AccuracyMatrix
    memory_sizes: list[int]
    average_accuracy: float
    backward_transfer: float | None


class ContinualReport(BaseModel):
    method: str
    runs: list[ContinualRunResult]
    aa_mean: float
    aa_std: float
    bwt_mean: float | None
    bwt_std: float | None
