from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class MlpParams(BaseModel):
    """
    Weights W_l of shape (dims[l], dims[l+1]) and biases b_l of shape
    (dims[l+1],). Hidden layers use ReLU, the output layer is linear.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    layer_dims: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @field_validator("layer_dims")
    @classmethod
    def validate_layer_dims(cls, v: list[int]):
        if len(v) < 2 or any(d < 1 for d in v):
            raise ValueError("layer_dims must list at least two positive widths")
        return v

    @field_validator("weights", "biases", mode="before")
    @classmethod
    def validate_arrays(cls, v: Any):
        arrays = [np.array(a, dtype=np.float64) for a in v]
        for a in arrays:
            if not np.all(np.isfinite(a)):
                raise ValueError("parameters must be finite")
            a.setflags(write=False)
        return arrays

    @model_validator(mode="after")
    def validate_shapes(self):
        dims = self.layer_dims
        if len(self.weights) != len(dims) - 1 or len(self.biases) != len(dims) - 1:
            raise ValueError("one weight matrix and bias per layer is required")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (dims[i], dims[i + 1]) or b.shape != (dims[i + 1],):
                raise ValueError(f"layer {i} has shapes {w.shape}, {b.shape}")
        return self

    @property
    def input_width(self) -> int:
        return self.layer_dims[0]

    @property
    def output_width(self) -> int:
        return self.layer_dims[-1]


class ClassifierParams(MlpParams):
    """An MLP whose output width is the number of classes."""

    @model_validator(mode="after")
    def validate_output_width(self):
        if self.layer_dims[-1] < 2:
            raise ValueError("a classifier needs at least two outputs")
        return self


class ParamGrads(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    weights: list[np.ndarray]
    biases: list[np.ndarray]
