import json
import os
import tempfile

import numpy as np
import pytest

from src.schemas.configs import CondenseConfig, EvaluationConfig, TrainConfig
from src.schemas.datasets import LabeledDataset
from src.services.generate import gen_mixture


@pytest.fixture(scope="session")
def mixture() -> LabeledDataset:
    """Three well separated 2-D classes, 200 records each."""
    return gen_mixture(classes=3, per_class=200, dim=2, separation=6.0, seed=11)


@pytest.fixture(scope="session")
def mixture_test() -> LabeledDataset:
    return gen_mixture(classes=3, per_class=100, dim=2, separation=6.0, seed=12)


@pytest.fixture
def small_train_cfg() -> TrainConfig:
    return TrainConfig(hidden_dims=[16], epochs=40, learning_rate=0.1, batch_size=16)


@pytest.fixture
def small_condense_cfg() -> CondenseConfig:
    return CondenseConfig(
        budget_per_class=5,
        iterations=60,
        learning_rate=1.0,
        real_batch_size=64,
        layer_dims=[2, 32, 32],
        normalize_features=True,
        seed=3,
    )


@pytest.fixture
def small_eval_cfg(small_train_cfg) -> EvaluationConfig:
    return EvaluationConfig(runs=2, train=small_train_cfg, probe_epochs=40, seed=5)


@pytest.fixture(scope="session")
def tmp_settings_dir():
    yield tempfile.mkdtemp()


@pytest.fixture
def tmp_settings_file(tmp_settings_dir):
    file_path = os.path.join(tmp_settings_dir, "dummy.env")
    with open(file_path, "w") as f:
        f.write("LQM_LOG_LEVEL=debug\nLQM_DEFAULT_SEED=42\nLQM_WORKERS=3\n")
    yield file_path


@pytest.fixture
def run_config_file(tmp_path, mixture, mixture_test):
    """A small but complete run config pointing at CSV copies of the mixtures."""
    from src.repository.datasets import csv_dataset_repo

    train_path = str(tmp_path / "train.csv")
    test_path = str(tmp_path / "test.csv")
    csv_dataset_repo.write(mixture, train_path)
    csv_dataset_repo.write(mixture_test, test_path)
    train = {"hidden_dims": [16], "epochs": 20, "learning_rate": 0.1, "batch_size": 32}
    document = {
        "train_path": train_path,
        "test_path": test_path,
        "output_dir": str(tmp_path / "out"),
        "seed": 1,
        "condense": {
            "budget_per_class": 4,
            "iterations": 20,
            "learning_rate": 1.0,
            "real_batch_size": 32,
            "layer_dims": [2, 16, 16],
            "normalize_features": True,
        },
        "evaluation": {"runs": 1, "train": train, "probe_epochs": 20},
        "continual": {
            "classes_per_task": 1,
            "budget_ratio": 0.05,
            "runs": 1,
            "train": train,
            "condense": {
                "iterations": 10,
                "learning_rate": 1.0,
                "real_batch_size": 32,
                "layer_dims": [2, 16, 16],
                "normalize_features": True,
            },
        },
    }
    path = tmp_path / "run.json"
    path.write_text(json.dumps(document))
    yield str(path)


def naive_forward(weights: list[np.ndarray], biases: list[np.ndarray], x: np.ndarray) -> np.ndarray:
    """Loop-based reference for the dense ReLU network."""
    h = [list(row) for row in x]
    for layer, (w, b) in enumerate(zip(weights, biases)):
        out = []
        for row in h:
            values = []
            for j in range(w.shape[1]):
                s = b[j]
                for i in range(w.shape[0]):
                    s += row[i] * w[i, j]
                if layer < len(weights) - 1:
                    s = max(s, 0.0)
                values.append(s)
            out.append(values)
        h = out
    return np.array(h)
