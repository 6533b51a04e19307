import numpy as np

from src.conf import messages
from src.conf.exceptions import BudgetException
from src.schemas.datasets import LabeledDataset


def class_means(classes: int, dim: int, separation: float) -> np.ndarray:
    """
    Class centres whose closest pair is `separation` apart: simplex vertices
    when there is room, otherwise a regular polygon in the first two axes.
    """
    means = np.zeros((classes, dim))
    if classes == 1 or separation == 0:
        return means
    if dim == 1:
        means[:, 0] = separation * np.arange(classes)
    elif classes <= dim:
        means[np.arange(classes), np.arange(classes)] = separation / np.sqrt(2)
    else:
        radius = separation / (2 * np.sin(np.pi / classes))
        angles = 2 * np.pi * np.arange(classes) / classes
        means[:, 0] = radius * np.cos(angles)
        means[:, 1] = radius * np.sin(angles)
    return means


def gen_mixture(
    classes: int, per_class: int, dim: int, separation: float, seed: int
) -> LabeledDataset:
    """
    Gaussian blobs with unit covariance, `per_class` records each, written
    class after class.

    :param classes: int: Number of classes
    :param per_class: int: Records per class
    :param dim: int: Feature count
    :param separation: float: Distance between the closest class means
    :param seed: int: Generator seed
    :return: LabeledDataset: Balanced labelled records
    """
    if classes < 1 or per_class < 1 or dim < 1 or separation < 0:
        raise BudgetException(messages.BUDGET_MUST_BE_POSITIVE)
    rng = np.random.default_rng(seed)
    means = class_means(classes, dim, separation)
    features = np.vstack([rng.normal(means[c], 1.0, size=(per_class, dim)) for c in range(classes)])
    labels = np.repeat(np.arange(classes), per_class)
    return LabeledDataset(features=features, labels=labels)
