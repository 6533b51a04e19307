import enum
import math

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.conf import messages
from src.conf.exceptions import ShapeMismatchException


class Distance(str, enum.Enum):
    lqm: str = "lqm"
    mmd: str = "mmd"


class QuantileCriterion(str, enum.Enum):
    cvm: str = "cvm"
    ad: str = "ad"


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TrainConfig(StrictModel):
    hidden_dims: list[int] = Field(default_factory=lambda: [128])
    epochs: int = Field(default=300, ge=0, le=100_000)
    learning_rate: float = Field(default=0.05, gt=0, le=10)
    batch_size: int = Field(default=32, ge=1)

    @field_validator("hidden_dims")
    @classmethod
    def validate_hidden_dims(cls, v: list[int]):
        if any(d < 1 for d in v):
            raise ValueError("hidden_dims entries must be positive")
        return v


class CondenseConfig(StrictModel):
    budget_per_class: int = Field(default=10, ge=1)
    budget_ratio: float | None = Field(default=None, gt=0, le=1)
    iterations: int = Field(default=2000, ge=1)
    learning_rate: float = Field(default=0.1, ge=0)
    real_batch_size: int = Field(default=256, ge=1)
    distance: Distance = Distance.lqm
    quantile_criterion: QuantileCriterion = QuantileCriterion.cvm
    layer_dims: list[int] | None = None
    normalize_features: bool = False
    clamp_budget: bool = False
    seed: int = Field(default=0, ge=0)
    log_every: int = Field(default=100, ge=1)
    ad_eps_max: float = Field(default=1e-10, gt=0, lt=1)
    ad_max_iters: int = Field(default=10_000, ge=1)

    @field_validator("layer_dims")
    @classmethod
    def validate_layer_dims(cls, v: list[int] | None):
        if v is not None and (len(v) < 2 or any(d < 1 for d in v)):
            raise ValueError("layer_dims must list at least two positive widths")
        return v

    def resolved_layer_dims(self, n_features: int) -> list[int]:
        """Extractor dims for data with `n_features` inputs; [Fin, 128, 128] unless set."""
        if self.layer_dims is None:
            return [n_features, 128, 128]
        if self.layer_dims[0] != n_features:
            raise ShapeMismatchException(
                messages.LAYER_DIMS_MISMATCH.format(width=self.layer_dims[0], n_features=n_features)
            )
        return list(self.layer_dims)


class EvaluationConfig(StrictModel):
    runs: int = Field(default=5, ge=1)
    train: TrainConfig = Field(default_factory=TrainConfig)
    probe_epochs: int = Field(default=500, ge=1)
    seed: int = Field(default=0, ge=0)


class ContinualConfig(StrictModel):
    classes_per_task: int = Field(default=2, ge=1)
    split_ratios: tuple[float, float, float] = (0.6, 0.2, 0.2)
    budget_ratio: float = Field(default=0.01, gt=0, le=1)
    runs: int = Field(default=5, ge=1)
    train: TrainConfig = Field(default_factory=TrainConfig)
    condense: CondenseConfig = Field(default_factory=CondenseConfig)
    seed: int = Field(default=0, ge=0)

    @field_validator("split_ratios")
    @classmethod
    def validate_split_ratios(cls, v: tuple[float, float, float]):
        if any(r <= 0 for r in v):
            raise ValueError("split_ratios must all be positive")
        if not math.isclose(sum(v), 1.0, abs_tol=1e-9):
            raise ValueError("split_ratios must sum to 1")
        return v


class GraphConfig(StrictModel):
    edges_path: str
    hops: int = Field(default=2, ge=0, le=10)


class RunConfig(StrictModel):
    train_path: str | None = None
    test_path: str | None = None
    output_dir: str = "runs"
    seed: int | None = Field(default=None, ge=0)
    graph: GraphConfig | None = None
    condense: CondenseConfig = Field(default_factory=CondenseConfig)
    evaluation: EvaluationConfig = Field(default_factory=EvaluationConfig)
    continual: ContinualConfig = Field(default_factory=ContinualConfig)

    @model_validator(mode="after")
    def propagate_seed(self):
        """A top-level seed overrides the seeds of every section."""
        if self.seed is not None:
            self.condense.seed = self.seed
            self.evaluation.seed = self.seed
            self.continual.seed = self.seed
            self.continual.condense.seed = self.seed
        return self
