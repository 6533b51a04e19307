from typing import Any, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.schemas.configs import QuantileCriterion

# A sample is any one-dimensional collection of finite reals.
Sample = Union[Sequence[float], np.ndarray]


class EcdfView(BaseModel):
    """Right-continuous step function F(x) = #{v <= x} / n over a sorted sample."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    sorted_values: np.ndarray

    @field_validator("sorted_values", mode="before")
    @classmethod
    def validate_sorted_values(cls, v: Any):
        values = np.array(v, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("sorted_values must be a non-empty vector")
        if np.any(np.diff(values) < 0):
            raise ValueError("sorted_values must be non-decreasing")
        values.setflags(write=False)
        return values

    @property
    def n(self) -> int:
        return int(self.sorted_values.size)

    def __call__(self, x: float | np.ndarray) -> float | np.ndarray:
        counts = np.searchsorted(self.sorted_values, x, side="right")
        return counts / self.n


class QuantileSet(BaseModel):
    """
    Ascending probabilities in (0, 1) at which a k-point approximation places
    its support. `bounds` holds the cumulative cell boundaries Q_1..Q_k when
    the set came out of the fixed-point iteration.
    """

    model_config = ConfigDict(frozen=True)

    probs: tuple[float, ...] = Field(min_length=1)
    criterion: QuantileCriterion
    bounds: tuple[float, ...] | None = None
    iterations: int = 0
    eps: float = 0.0

    @field_validator("probs")
    @classmethod
    def validate_probs(cls, v: tuple[float, ...]):
        probs = np.asarray(v)
        if probs[0] <= 0 or probs[-1] >= 1:
            raise ValueError("probabilities must lie strictly inside (0, 1)")
        if np.any(np.diff(probs) <= 0):
            raise ValueError("probabilities must be strictly increasing")
        return v

    @property
    def k(self) -> int:
        return len(self.probs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=np.float64)
