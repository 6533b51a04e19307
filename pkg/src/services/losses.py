from abc import ABC, abstractmethod

import numpy as np

from src.conf import messages
from src.conf.exceptions import (
    BudgetException,
    EmptySampleException,
    ShapeMismatchException,
)
from src.schemas.configs import Distance
from src.schemas.reports import LossResult
from src.schemas.stats import QuantileSet
from src.services.stats import as_batch, quantile_matrix


def _check_pair(real_emb: np.ndarray, syn_emb: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    real, syn = as_batch(real_emb), as_batch(syn_emb)
    if real.shape[0] == 0 or syn.shape[0] == 0:
        raise EmptySampleException(messages.EMPTY_SAMPLE)
    if real.shape[1] != syn.shape[1]:
        raise ShapeMismatchException(
            messages.FEATURE_COUNT_MISMATCH.format(left=real.shape[1], right=syn.shape[1])
        )
    return real, syn


def lqm_loss(
    real_emb: np.ndarray,
    syn_emb: np.ndarray,
    quantiles: QuantileSet,
    normalize_features: bool = False,
) -> LossResult:
    """
    Squared distance between each sorted synthetic feature column and the
    real column's values at the given quantiles, divided by the budget.

    Targets are constants. The gradient of rank i in feature f is routed back
    to the synthetic row holding that rank under a stable sort, so among tied
    values the lower row index takes the lower rank.

    :param real_emb: np.ndarray: D x F real embeddings
    :param syn_emb: np.ndarray: beta x F synthetic embeddings
    :param quantiles: QuantileSet: Exactly beta probabilities
    :param normalize_features: bool: Also divide by F
    :return: LossResult: Loss value and gradient w.r.t. syn_emb
    """
    real, syn = _check_pair(real_emb, syn_emb)
    budget = syn.shape[0]
    if quantiles.k != budget:
        raise BudgetException(messages.QUANTILE_COUNT_MISMATCH.format(k=quantiles.k, budget=budget))
    targets = quantile_matrix(real, quantiles.as_array())
    order = np.argsort(syn, axis=0, kind="stable")
    diff = np.take_along_axis(syn, order, axis=0) - targets
    scale = 1.0 / budget
    if normalize_features:
        scale /= syn.shape[1]
    grad = np.zeros_like(syn)
    np.put_along_axis(grad, order, 2.0 * scale * diff, axis=0)
    return LossResult(value=float(scale * np.sum(diff**2)), grad_syn=grad)


def mmd_loss(real_emb: np.ndarray, syn_emb: np.ndarray, normalize_features: bool = False) -> LossResult:
    """Squared distance between the per-feature mean embeddings (linear kernel)."""
    real, syn = _check_pair(real_emb, syn_emb)
    scale = 1.0 / syn.shape[1] if normalize_features else 1.0
    gap = real.mean(axis=0) - syn.mean(axis=0)
    grad = np.broadcast_to(-2.0 * scale / syn.shape[0] * gap, syn.shape).copy()
    return LossResult(value=float(scale * np.sum(gap**2)), grad_syn=grad)


class MatchingLoss(ABC):

    @abstractmethod
    def compute(
        self, real_emb: np.ndarray, syn_emb: np.ndarray, quantiles: QuantileSet | None = None
    ) -> LossResult:
        raise NotImplementedError


class LQMLoss(MatchingLoss):
    def __init__(self, normalize_features: bool = False):
        self.normalize_features = normalize_features

    def compute(
        self, real_emb: np.ndarray, syn_emb: np.ndarray, quantiles: QuantileSet | None = None
    ) -> LossResult:
        if quantiles is None:
            raise BudgetException(messages.QUANTILE_COUNT_MISMATCH.format(k=0, budget=len(syn_emb)))
        return lqm_loss(real_emb, syn_emb, quantiles, self.normalize_features)


class MMDLoss(MatchingLoss):
    def __init__(self, normalize_features: bool = False):
        self.normalize_features = normalize_features

    def compute(
        self, real_emb: np.ndarray, syn_emb: np.ndarray, quantiles: QuantileSet | None = None
    ) -> LossResult:
        return mmd_loss(real_emb, syn_emb, self.normalize_features)


def get_matching_loss(distance: Distance, normalize_features: bool = False) -> MatchingLoss:
    """Loss for `distance`; normalize_features divides either loss by the embedding width."""
    if distance == Distance.mmd:
        return MMDLoss(normalize_features) if normalize_features else mmd_matching_loss
    return LQMLoss(normalize_features) if normalize_features else lqm_matching_loss


lqm_matching_loss: MatchingLoss = LQMLoss()
mmd_matching_loss: MatchingLoss = MMDLoss()
