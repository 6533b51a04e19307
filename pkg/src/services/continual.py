"""
Class-incremental continual learning over class-disjoint tasks, with
condensed replay and the finetuning / joint reference methods.
"""
import logging
import math
from abc import ABC, abstractmethod

import numpy as np

from src.conf import messages
from src.conf.exceptions import EmptySampleException, UndefinedMetricException
from src.schemas.configs import CondenseConfig, TrainConfig
from src.schemas.datasets import LabeledDataset
from src.schemas.reports import (
    AccuracyMatrix,
    ContinualReport,
    ContinualRunResult,
    Task,
    TaskSequence,
)
from src.services.condenser import condense, proportional_budgets
from src.services.nn import accuracy, sample_classifier, train_classifier
from src.services.seeds import derive_seed

logger = logging.getLogger(__name__)


def _split_sizes(n: int, ratios: tuple[float, float, float]) -> tuple[int, int, int]:
    n_train = max(1, min(n - 2, int(np.floor(ratios[0] * n + 0.5))))
    n_val = max(1, min(n - n_train - 1, int(np.floor(ratios[1] * n + 0.5))))
    return n_train, n_val, n - n_train - n_val


def classes_are_disjoint(tasks: TaskSequence) -> bool:
    seen: set[int] = set()
    for task in tasks.tasks:
        if seen & set(task.classes):
            return False
        seen |= set(task.classes)
    return True


def build_task_sequence(
    data: LabeledDataset,
    classes_per_task: int = 2,
    split_ratios: tuple[float, float, float] = (0.6, 0.2, 0.2),
    seed: int = 0,
) -> TaskSequence:
    """
    Splits every class into train/val/test by the given ratios, then groups
    classes in label order into tasks of `classes_per_task` classes.

    :param data: LabeledDataset: Full dataset
    :param classes_per_task: int: Classes per task; a smaller last task is allowed
    :param split_ratios: tuple: Train, validation and test shares
    :param seed: int: Shuffle seed
    :return: TaskSequence: Tasks with pairwise disjoint class sets
    """
    splits: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
    for label in data.classes:
        indices = np.flatnonzero(data.labels == label)
        if indices.size < 3:
            raise EmptySampleException(
                messages.CLASS_TOO_SMALL_TO_SPLIT.format(label=label, size=indices.size)
            )
        shuffled = np.random.default_rng([seed, label]).permutation(indices)
        n_train, n_val, _ = _split_sizes(indices.size, split_ratios)
        splits[label] = (
            shuffled[:n_train],
            shuffled[n_train:n_train + n_val],
            shuffled[n_train + n_val:],
        )

    classes = data.classes
    if len(classes) % classes_per_task:
        logger.warning(
            messages.REMAINDER_TASK.format(
                classes=len(classes), per_task=classes_per_task, rest=len(classes) % classes_per_task
            )
        )
    tasks = []
    for start in range(0, len(classes), classes_per_task):
        group = classes[start:start + classes_per_task]
        parts = [
            data.subset(np.sort(np.concatenate([splits[c][part] for c in group])))
            for part in range(3)
        ]
        tasks.append(Task(classes=group, train=parts[0], val=parts[1], test=parts[2]))
    sequence = TaskSequence(tasks=tasks, num_classes=data.num_classes)
    assert classes_are_disjoint(sequence)
    return sequence


def average_accuracy(matrix: AccuracyMatrix, k: int) -> float:
    """Mean accuracy over tasks 1..k after stage k."""
    if not 1 <= k <= matrix.num_tasks:
        raise UndefinedMetricException(
            messages.TASK_INDEX_OUT_OF_RANGE.format(k=k, low=1, high=matrix.num_tasks)
        )
    return float(np.mean(matrix.values[k - 1, :k]))


def backward_transfer(matrix: AccuracyMatrix, k: int) -> float:
    """Mean change A[k][i] - A[i][i] over the tasks before k."""
    if k < 2:
        raise UndefinedMetricException(messages.BWT_UNDEFINED)
    if k > matrix.num_tasks:
        raise UndefinedMetricException(
            messages.TASK_INDEX_OUT_OF_RANGE.format(k=k, low=2, high=matrix.num_tasks)
        )
    diagonal = np.diag(matrix.values)[: k - 1]
    return float(np.mean(matrix.values[k - 1, : k - 1] - diagonal))


def _score_row(
    params, tasks: TaskSequence, upto: int, allowed: list[int]
) -> tuple[list[float], list[float]]:
    test = [accuracy(params, t.test, allowed) for t in tasks.tasks[:upto]]
    val = [accuracy(params, t.val, allowed) for t in tasks.tasks[:upto]]
    return test, val


def _seen_classes(tasks: TaskSequence, upto: int) -> list[int]:
    return sorted(c for t in tasks.tasks[:upto] for c in t.classes)


class ContinualMethod(ABC):
    name: str

    def __init__(self, train_cfg: TrainConfig):
        self.train_cfg = train_cfg

    def _fresh(self, tasks: TaskSequence, n_features: int, seed: int):
        return sample_classifier(n_features, self.train_cfg.hidden_dims, max(tasks.num_classes, 2), seed)

    def _train(self, params, data: LabeledDataset, seed: int, allowed: list[int]):
        return train_classifier(
            params,
            data,
            epochs=self.train_cfg.epochs,
            lr=self.train_cfg.learning_rate,
            batch_size=self.train_cfg.batch_size,
            seed=seed,
            allowed_classes=allowed,
        )

    @abstractmethod
    def run(self, tasks: TaskSequence, seed: int) -> tuple[list[list[float]], list[list[float]], list[int]]:
        """Test rows, validation rows and memory size per stage."""
        raise NotImplementedError


class CondensedReplay(ContinualMethod):
    """
    Condenses each task's train split into a per-task budget of
    ceil(budget_ratio * task size) records, appends it to the memory, and
    trains a fresh classifier on the whole memory at every stage.
    """

    name = "replay"

    def __init__(self, train_cfg: TrainConfig, condense_cfg: CondenseConfig, budget_ratio: float = 0.01):
        super().__init__(train_cfg)
        self.condense_cfg = condense_cfg
        self.budget_ratio = budget_ratio

    def task_budgets(self, task: Task) -> dict[int, int]:
        total = math.ceil(self.budget_ratio * task.train.n_records)
        return proportional_budgets(task.train, total=total)

    def run(self, tasks, seed):
        n_features = tasks.tasks[0].train.n_features
        memory: list[LabeledDataset] = []
        test_rows, val_rows, sizes = [], [], []
        for b, task in enumerate(tasks.tasks, start=1):
            cfg = self.condense_cfg.model_copy(update={"seed": derive_seed(seed, b)})
            result = condense(task.train, cfg, budgets=self.task_budgets(task))
            memory.append(result.synthetic.to_labeled())
            replay = LabeledDataset.concat(memory, n_features)
            sizes.append(replay.n_records)
            allowed = _seen_classes(tasks, b)
            stage_seed = derive_seed(seed, b, 1)
            params = self._train(self._fresh(tasks, n_features, stage_seed), replay, stage_seed, allowed)
            test, val = _score_row(params, tasks, b, allowed)
            test_rows.append(test)
            val_rows.append(val)
            logger.info("replay stage %d: memory %d, AA %.4f", b, replay.n_records, np.mean(test))
        return test_rows, val_rows, sizes


class Finetuning(ContinualMethod):
    """Keeps one classifier and trains it on each task's raw data only."""

    name = "finetune"

    def run(self, tasks, seed):
        n_features = tasks.tasks[0].train.n_features
        params = self._fresh(tasks, n_features, derive_seed(seed, 0))
        test_rows, val_rows, sizes = [], [], []
        for b, task in enumerate(tasks.tasks, start=1):
            allowed = _seen_classes(tasks, b)
            params = self._train(params, task.train, derive_seed(seed, b), allowed)
            test, val = _score_row(params, tasks, b, allowed)
            test_rows.append(test)
            val_rows.append(val)
            sizes.append(0)
            logger.info("finetune stage %d: AA %.4f", b, np.mean(test))
        return test_rows, val_rows, sizes


class Joint(ContinualMethod):
    """Trains once on the union of all train splits; only the last row is filled."""

    name = "joint"

    def run(self, tasks, seed):
        n_features = tasks.tasks[0].train.n_features
        union = LabeledDataset.concat([t.train for t in tasks.tasks], n_features)
        allowed = _seen_classes(tasks, tasks.num_tasks)
        params = self._train(self._fresh(tasks, n_features, derive_seed(seed, 0)), union, derive_seed(seed, 1), allowed)
        test, val = _score_row(params, tasks, tasks.num_tasks, allowed)
        empty: list[list[float]] = [[] for _ in range(tasks.num_tasks - 1)]
        return empty + [test], empty + [val], [0] * (tasks.num_tasks - 1) + [union.n_records]


def run_cgl(tasks: TaskSequence, method: ContinualMethod, runs: int, seed: int = 0) -> ContinualReport:
    """
    Runs `method` over the task stream `runs` times and summarizes AA and BWT
    at the final stage. BWT is omitted for a single-stage method or stream.
    """
    if tasks.num_tasks == 0:
        raise EmptySampleException(messages.EMPTY_DATASET)
    results = []
    for r in range(runs):
        test_rows, val_rows, sizes = method.run(tasks, derive_seed(seed, r))
        test = AccuracyMatrix.from_rows(test_rows)
        final = tasks.num_tasks
        bwt = None
        if not isinstance(method, Joint) and final >= 2:
            bwt = backward_transfer(test, final)
        results.append(
            ContinualRunResult(
                test=test,
                val=AccuracyMatrix.from_rows(val_rows),
                memory_sizes=sizes,
                average_accuracy=average_accuracy(test, final),
                backward_transfer=bwt,
            )
        )
    aa = [r.average_accuracy for r in results]
    bwt_values = [r.backward_transfer for r in results if r.backward_transfer is not None]
    return ContinualReport(
        method=method.name,
        runs=results,
        aa_mean=float(np.mean(aa)),
        aa_std=float(np.std(aa)),
        bwt_mean=float(np.mean(bwt_values)) if bwt_values else None,
        bwt_std=float(np.std(bwt_values)) if bwt_values else None,
    )
