import logging
from abc import ABC, abstractmethod

import numpy as np
from scipy import optimize

from src.conf import messages
from src.conf.exceptions import BudgetException, ConvergenceException
from src.schemas.configs import QuantileCriterion
from src.schemas.stats import QuantileSet

logger = logging.getLogger(__name__)

AD_EPS_MAX = 1e-10
AD_MAX_ITERS = 10_000


def _check_budget(k: int) -> None:
    if k < 1:
        raise BudgetException(messages.BUDGET_MUST_BE_POSITIVE)


def cvm_optimal_quantiles(k: int) -> QuantileSet:
    """
    The k probabilities (2i-1)/(2k) whose quantiles form the k-point
    approximation with the smallest Cramér-von Mises statistic.

    :param k: int: Number of support points
    :return: QuantileSet: Ascending probabilities, uniformly spaced by 1/k
    """
    _check_budget(k)
    probs = (2 * np.arange(1, k + 1) - 1) / (2 * k)
    return QuantileSet(probs=tuple(float(p) for p in probs), criterion=QuantileCriterion.cvm)


def _ad_step(bounds: np.ndarray) -> np.ndarray:
    """
    One sweep of the Anderson-Darling fixed point. Support points are cell
    midpoints; each inner boundary Q_i is the AD-optimal split between q_i and
    q_{i+1}. Q_0 = 0 and Q_k = 1 are fixed.
    """
    cells = np.concatenate([[0.0], bounds])
    q = (cells[:-1] + cells[1:]) / 2
    left, right = q[:-1], q[1:]
    tail = np.log1p(-left) - np.log1p(-right)
    odds = np.log(right) - np.log(left) + tail
    return np.concatenate([tail / odds, [1.0]])


def _midpoints(bounds: np.ndarray) -> np.ndarray:
    cells = np.concatenate([[0.0], bounds])
    return (cells[:-1] + cells[1:]) / 2


def _solve_ad_bounds(k: int) -> np.ndarray | None:
    """Newton-type solve of bounds = step(bounds); None when the solver fails."""
    start = np.arange(1, k) / k

    def residual(inner: np.ndarray) -> np.ndarray:
        return _ad_step(np.concatenate([inner, [1.0]]))[:-1] - inner

    with np.errstate(divide="ignore", invalid="ignore"):
        solution = optimize.root(residual, start, method="hybr", tol=1e-14)
    inner = solution.x
    valid = (
        solution.success
        and np.all(np.isfinite(inner))
        and np.all(np.diff(np.concatenate([[0.0], inner, [1.0]])) > 0)
    )
    if not valid:
        logger.warning("AD root solve failed for k=%d (%s), iterating from i/k", k, solution.message)
        return None
    return np.concatenate([inner, [1.0]])


def ad_optimal_quantiles(
    k: int,
    eps_max: float = AD_EPS_MAX,
    max_iters: int = AD_MAX_ITERS,
    accelerate: bool = True,
    initial_bounds: np.ndarray | None = None,
) -> QuantileSet:
    """
    Optimal k-point quantiles under the Anderson-Darling statistic, found by
    iterating the cell-midpoint / AD-boundary updates until the largest change
    in cell probabilities is at most eps_max.

    The iteration starts from the cumulative boundaries i/k unless
    `initial_bounds` is given. With `accelerate` the start is replaced by a
    root solve of the same fixed-point equations, after which the iteration
    only confirms convergence.

    :param k: int: Number of support points
    :param eps_max: float: Convergence tolerance on cell probabilities
    :param max_iters: int: Iteration cap
    :param accelerate: bool: Warm-start from a root solve
    :param initial_bounds: np.ndarray: Cumulative boundaries Q_1..Q_k to start from
    :return: QuantileSet: Converged support probabilities plus boundaries
    """
    _check_budget(k)
    if initial_bounds is not None:
        bounds = np.asarray(initial_bounds, dtype=np.float64).copy()
        bounds[-1] = 1.0
    else:
        bounds = np.arange(1, k + 1) / k
        if accelerate and k > 1:
            solved = _solve_ad_bounds(k)
            if solved is not None:
                bounds = solved

    previous = np.diff(np.concatenate([[0.0], bounds]))
    eps = np.inf
    for t in range(1, max_iters + 1):
        with np.errstate(divide="ignore", invalid="ignore"):
            bounds = _ad_step(bounds)
        probabilities = np.diff(np.concatenate([[0.0], bounds]))
        eps = float(np.max(np.abs(probabilities - previous)))
        previous = probabilities
        if not np.isfinite(eps):
            break
        if eps <= eps_max:
            logger.debug("AD quantiles for k=%d converged after %d iterations", k, t)
            return QuantileSet(
                probs=tuple(float(p) for p in _midpoints(bounds)),
                criterion=QuantileCriterion.ad,
                bounds=tuple(float(b) for b in bounds),
                iterations=t,
                eps=eps,
            )
    raise ConvergenceException(
        messages.NON_CONVERGENCE.format(max_iters=max_iters, eps=eps), last_eps=eps
    )


class QuantileCriterionService(ABC):

    @abstractmethod
    def optimal_quantiles(self, k: int) -> QuantileSet:
        raise NotImplementedError


class CvMQuantiles(QuantileCriterionService):
    def optimal_quantiles(self, k: int) -> QuantileSet:
        return cvm_optimal_quantiles(k)


class ADQuantiles(QuantileCriterionService):
    def __init__(self, eps_max: float = AD_EPS_MAX, max_iters: int = AD_MAX_ITERS):
        self.eps_max = eps_max
        self.max_iters = max_iters
        self._cache: dict[int, QuantileSet] = {}

    def optimal_quantiles(self, k: int) -> QuantileSet:
        if k not in self._cache:
            self._cache[k] = ad_optimal_quantiles(k, self.eps_max, self.max_iters)
        return self._cache[k]


def get_quantile_service(
    criterion: QuantileCriterion,
    eps_max: float = AD_EPS_MAX,
    max_iters: int = AD_MAX_ITERS,
) -> QuantileCriterionService:
    if criterion == QuantileCriterion.ad:
        if eps_max == AD_EPS_MAX and max_iters == AD_MAX_ITERS:
            return ad_quantiles
        return ADQuantiles(eps_max, max_iters)
    return cvm_quantiles


cvm_quantiles: QuantileCriterionService = CvMQuantiles()
ad_quantiles: QuantileCriterionService = ADQuantiles()
