import logging

import numpy as np
import pytest

from src.conf import messages
from src.conf.exceptions import EmptySampleException, UndefinedMetricException
from src.schemas.configs import CondenseConfig, TrainConfig
from src.schemas.datasets import LabeledDataset
from src.schemas.reports import AccuracyMatrix
from src.services.continual import (
    CondensedReplay,
    Finetuning,
    Joint,
    average_accuracy,
    backward_transfer,
    build_task_sequence,
    classes_are_disjoint,
    run_cgl,
)
from src.services.generate import gen_mixture


@pytest.fixture(scope="module")
def four_classes() -> LabeledDataset:
    return gen_mixture(classes=4, per_class=100, dim=2, separation=6.0, seed=21)


@pytest.fixture
def stream_train_cfg() -> TrainConfig:
    return TrainConfig(hidden_dims=[16], epochs=40, learning_rate=0.1, batch_size=16)


@pytest.fixture
def stream_condense_cfg() -> CondenseConfig:
    return CondenseConfig(
        iterations=20,
        learning_rate=1.0,
        real_batch_size=32,
        layer_dims=[2, 16, 16],
        normalize_features=True,
    )


def test_build_task_sequence_pairs_classes_into_disjoint_tasks(four_classes):
    tasks = build_task_sequence(four_classes, classes_per_task=2, seed=0)
    assert tasks.num_tasks == 2
    assert [t.classes for t in tasks.tasks] == [[0, 1], [2, 3]]
    assert classes_are_disjoint(tasks)
    for task in tasks.tasks:
        assert set(task.train.classes) == set(task.classes)
        assert set(task.test.classes) == set(task.classes)


def test_build_task_sequence_splits_each_class_six_two_two():
    data = LabeledDataset(features=np.arange(20.0).reshape(20, 1), labels=[0] * 10 + [1] * 10)
    task = build_task_sequence(data, classes_per_task=2, seed=3).tasks[0]
    assert task.train.class_counts() == {0: 6, 1: 6}
    assert task.val.class_counts() == {0: 2, 1: 2}
    assert task.test.class_counts() == {0: 2, 1: 2}


def test_build_task_sequence_partitions_the_records(four_classes):
    tasks = build_task_sequence(four_classes, classes_per_task=2, seed=0)
    parts = [p for t in tasks.tasks for p in (t.train, t.val, t.test)]
    rows = np.vstack([p.features for p in parts])
    assert rows.shape[0] == four_classes.n_records
    assert np.unique(rows, axis=0).shape[0] == four_classes.n_records


def test_build_task_sequence_is_deterministic(four_classes):
    first = build_task_sequence(four_classes, seed=5)
    second = build_task_sequence(four_classes, seed=5)
    np.testing.assert_array_equal(first.tasks[1].train.features, second.tasks[1].train.features)


def test_build_task_sequence_with_remainder_warns(caplog):
    data = gen_mixture(classes=3, per_class=10, dim=2, separation=6.0, seed=0)
    with caplog.at_level(logging.WARNING):
        tasks = build_task_sequence(data, classes_per_task=2)
    assert [t.classes for t in tasks.tasks] == [[0, 1], [2]]
    assert "last task has 1" in caplog.text


def test_build_task_sequence_with_tiny_class_raises_exception():
    data = LabeledDataset(features=np.zeros((5, 1)), labels=[0, 0, 0, 1, 1])
    with pytest.raises(EmptySampleException):
        build_task_sequence(data, classes_per_task=2)


def matrix(rows):
    return AccuracyMatrix.from_rows(rows)


@pytest.mark.parametrize(
    "rows, k, expected",
    (
        ([[0.9], [0.8, 0.6]], 2, 0.7),
        ([[0.4], [0.4, 0.4]], 2, 0.4),
        ([[0.9], [0.8, 0.6]], 1, 0.9),
    ),
)
def test_average_accuracy_successfully(rows, k, expected):
    assert average_accuracy(matrix(rows), k) == pytest.approx(expected)


@pytest.mark.parametrize(
    "rows, expected",
    (
        ([[0.9], [0.8, 0.3]], -0.1),
        ([[0.9], [0.9, 0.5]], 0.0),
        ([[0.5], [0.7, 0.5]], 0.2),
    ),
)
def test_backward_transfer_successfully(rows, expected):
    assert backward_transfer(matrix(rows), 2) == pytest.approx(expected)


def test_backward_transfer_of_single_task_raises_exception():
    with pytest.raises(UndefinedMetricException, match=messages.BWT_UNDEFINED):
        backward_transfer(matrix([[0.9]]), 1)


def test_average_accuracy_out_of_range_raises_exception():
    with pytest.raises(UndefinedMetricException):
        average_accuracy(matrix([[0.9]]), 2)


def test_accuracy_matrix_rejects_entries_above_the_diagonal():
    with pytest.raises(ValueError):
        AccuracyMatrix(values=[[0.5, 0.5], [0.5, 0.5]])


def test_finetuning_forgets_the_first_task(four_classes, stream_train_cfg):
    tasks = build_task_sequence(four_classes, classes_per_task=2, seed=0)
    report = run_cgl(tasks, Finetuning(stream_train_cfg), runs=1, seed=0)
    values = report.runs[0].test.values
    assert values[0, 0] > 0.9
    assert values[1, 1] > 0.9
    assert values[1, 0] <= values[0, 0]
    assert report.bwt_mean == pytest.approx(values[1, 0] - values[0, 0])
    assert report.runs[0].memory_sizes == [0, 0]


def test_condensed_replay_keeps_a_growing_memory(four_classes, stream_train_cfg, stream_condense_cfg):
    tasks = build_task_sequence(four_classes, classes_per_task=2, seed=0)
    method = CondensedReplay(stream_train_cfg, stream_condense_cfg, budget_ratio=0.05)
    report = run_cgl(tasks, method, runs=2, seed=0)
    assert report.method == "replay"
    assert len(report.runs) == 2
    for run in report.runs:
        assert run.memory_sizes == [6, 12]
        assert run.test.num_tasks == 2
        assert not np.isnan(run.val.values[1, 0])
        assert 0 <= run.average_accuracy <= 1
        assert run.backward_transfer is not None
    assert report.aa_std >= 0
    assert report.bwt_mean is not None


def test_condensed_replay_task_budgets_are_proportional(four_classes, stream_train_cfg, stream_condense_cfg):
    tasks = build_task_sequence(four_classes, classes_per_task=2, seed=0)
    method = CondensedReplay(stream_train_cfg, stream_condense_cfg, budget_ratio=0.05)
    assert method.task_budgets(tasks.tasks[0]) == {0: 3, 1: 3}


def test_joint_trains_once_and_omits_bwt(four_classes, stream_train_cfg):
    tasks = build_task_sequence(four_classes, classes_per_task=2, seed=0)
    report = run_cgl(tasks, Joint(stream_train_cfg), runs=1, seed=0)
    run = report.runs[0]
    assert np.all(np.isnan(run.test.values[0]))
    assert not np.any(np.isnan(run.test.values[1]))
    assert run.backward_transfer is None
    assert report.bwt_mean is None
    assert run.memory_sizes == [0, 240]
    assert run.average_accuracy > 0.9


@pytest.mark.parametrize(
    "rows, aa, bwt",
    (
        ([[0.9], [0.6, 0.8], [0.5, 0.7, 0.9]], 0.7, -0.25),
        ([[1.0], [1.0, 0.5], [0.8, 0.6, 0.4]], 0.6, -0.05),
        ([[0.2], [0.4, 0.6], [0.6, 0.6, 0.3]], 0.5, 0.2),
    ),
)
def test_three_stage_metrics_successfully(rows, aa, bwt):
    assert average_accuracy(matrix(rows), 3) == pytest.approx(aa)
    assert backward_transfer(matrix(rows), 3) == pytest.approx(bwt)


def test_condensed_replay_beats_finetuning_on_a_long_stream(stream_train_cfg, stream_condense_cfg):
    data = gen_mixture(classes=8, per_class=500, dim=2, separation=6.0, seed=31)
    tasks = build_task_sequence(data, classes_per_task=2, seed=0)
    train_cfg = stream_train_cfg.model_copy(update={"epochs": 150})
    finetune = run_cgl(tasks, Finetuning(train_cfg), runs=1, seed=0)
    replay = run_cgl(tasks, CondensedReplay(train_cfg, stream_condense_cfg, budget_ratio=0.01), runs=1, seed=0)
    assert tasks.num_tasks == 4
    assert replay.runs[0].memory_sizes == [6, 12, 18, 24]
    assert finetune.bwt_mean <= -0.5
    assert replay.aa_mean >= finetune.aa_mean + 0.2
