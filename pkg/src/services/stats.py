"""
Deterministic statistics over empirical samples: ECDFs, linear-interpolation
quantiles, Cramér-von Mises statistics and the extreme latent value share.
"""
from typing import Callable

import numpy as np

from src.conf import messages
from src.conf.exceptions import (
    EmptySampleException,
    NonFiniteValueException,
    QuantileOutOfRangeException,
    ShapeMismatchException,
    UnsortedPointsException,
)
from src.schemas.stats import EcdfView, Sample


def as_sample(values: Sample) -> np.ndarray:
    sample = np.asarray(values, dtype=np.float64).ravel()
    if sample.size == 0:
        raise EmptySampleException(messages.EMPTY_SAMPLE)
    if not np.all(np.isfinite(sample)):
        raise NonFiniteValueException(messages.NON_FINITE_VALUES)
    return sample


def as_batch(values: np.ndarray) -> np.ndarray:
    batch = np.asarray(values, dtype=np.float64)
    if batch.ndim != 2:
        raise ShapeMismatchException(
            messages.SHAPE_MISMATCH.format(expected="2-D matrix", got=batch.shape)
        )
    if not np.all(np.isfinite(batch)):
        raise NonFiniteValueException(messages.NON_FINITE_VALUES)
    return batch


def ecdf(values: Sample) -> EcdfView:
    return EcdfView(sorted_values=np.sort(as_sample(values), kind="stable"))


def _check_probability(q: float | np.ndarray) -> None:
    q = np.asarray(q, dtype=np.float64)
    if not np.all(np.isfinite(q)) or np.any(q < 0) or np.any(q > 1):
        raise QuantileOutOfRangeException(messages.QUANTILE_OUT_OF_RANGE)


def empirical_quantile(values: Sample, q: float) -> float:
    """
    Linear interpolation between order statistics at position q*(n-1),
    zero-indexed. q=0 gives the minimum and q=1 the maximum.

    :param values: Sample: Finite reals, any order
    :param q: float: Probability in [0, 1]
    :return: float: The interpolated quantile
    """
    sample = as_sample(values)
    _check_probability(q)
    return float(np.quantile(sample, q, method="linear"))


def quantile_matrix(batch: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """Per-column quantiles of a D x F batch at k probabilities, as a k x F matrix."""
    batch = as_batch(batch)
    if batch.shape[0] == 0:
        raise EmptySampleException(messages.EMPTY_SAMPLE)
    _check_probability(probs)
    return np.quantile(batch, np.asarray(probs, dtype=np.float64), axis=0, method="linear")


def cvm_one_sample_vs_points(cdf: Callable[[np.ndarray], np.ndarray], points: Sample) -> float:
    """
    One-sample Cramér-von Mises statistic of k support points against a
    continuous CDF. Its minimum 1/(12k) is reached at F(x_i) = (2i-1)/(2k).
    """
    x = as_sample(points)
    if np.any(np.diff(x) < 0):
        raise UnsortedPointsException(messages.UNSORTED_POINTS)
    k = x.size
    plotting = (2 * np.arange(1, k + 1) - 1) / (2 * k)
    return float(1 / (12 * k) + np.sum((np.asarray(cdf(x), dtype=np.float64) - plotting) ** 2))


def cvm_two_sample(a: Sample, b: Sample) -> float:
    """
    Two-sample statistic nm/(n+m)^2 * sum over pooled values of the squared
    ECDF difference. Identical multisets score exactly zero.
    """
    first = ecdf(a)
    second = ecdf(b)
    n, m = first.n, second.n
    pooled = np.concatenate([first.sorted_values, second.sorted_values])
    diff = first(pooled) - second(pooled)
    return float(n * m / (n + m) ** 2 * np.sum(diff**2))


def cvm_two_sample_columns(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = as_batch(a), as_batch(b)
    if a.shape[1] != b.shape[1]:
        raise ShapeMismatchException(
            messages.FEATURE_COUNT_MISMATCH.format(left=a.shape[1], right=b.shape[1])
        )
    return np.array([cvm_two_sample(a[:, f], b[:, f]) for f in range(a.shape[1])])


def extreme_value_fraction(real_emb: np.ndarray, syn_emb: np.ndarray) -> float:
    """
    Percentage of synthetic entries lying strictly outside the per-feature
    [min, max] range of the real batch.
    """
    real, syn = as_batch(real_emb), as_batch(syn_emb)
    if real.shape[1] != syn.shape[1]:
        raise ShapeMismatchException(
            messages.FEATURE_COUNT_MISMATCH.format(left=real.shape[1], right=syn.shape[1])
        )
    if real.shape[0] == 0 or syn.size == 0:
        raise EmptySampleException(messages.EMPTY_SAMPLE)
    outside = (syn > real.max(axis=0)) | (syn < real.min(axis=0))
    return float(100.0 * np.count_nonzero(outside) / syn.size)
