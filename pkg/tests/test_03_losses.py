import numpy as np
import pytest

from src.conf.exceptions import BudgetException, EmptySampleException, ShapeMismatchException
from src.schemas.configs import Distance
from src.services.losses import (
    LQMLoss,
    get_matching_loss,
    lqm_loss,
    lqm_matching_loss,
    mmd_loss,
    mmd_matching_loss,
)
from src.services.quantiles import cvm_optimal_quantiles
from src.services.stats import empirical_quantile


def numeric_gradient(fn, syn, h=1e-6):
    grad = np.zeros_like(syn)
    for index in np.ndindex(*syn.shape):
        step = np.zeros_like(syn)
        step[index] = h
        grad[index] = (fn(syn + step) - fn(syn - step)) / (2 * h)
    return grad


def test_lqm_loss_hand_computed_value():
    real = np.array([[0.0], [1.0], [2.0], [3.0]])
    syn = np.array([[0.0], [2.0]])
    result = lqm_loss(real, syn, cvm_optimal_quantiles(2))
    assert empirical_quantile(real[:, 0], 0.25) == pytest.approx(0.75)
    assert result.value == pytest.approx(((0.75 - 0.0) ** 2 + (2.25 - 2.0) ** 2) / 2)
    assert result.value == pytest.approx(0.3125)


def test_lqm_loss_at_targets_is_zero():
    rng = np.random.default_rng(0)
    real = rng.normal(size=(50, 3))
    quantiles = cvm_optimal_quantiles(4)
    syn = np.quantile(real, quantiles.as_array(), axis=0, method="linear")[::-1]
    result = lqm_loss(real, syn, quantiles)
    assert result.value == pytest.approx(0.0, abs=1e-24)
    np.testing.assert_allclose(result.grad_syn, 0.0, atol=1e-12)


def test_lqm_loss_gradient_matches_finite_differences():
    rng = np.random.default_rng(1)
    real = rng.normal(size=(40, 3))
    syn = rng.normal(size=(5, 3))
    quantiles = cvm_optimal_quantiles(5)
    result = lqm_loss(real, syn, quantiles, normalize_features=True)
    numeric = numeric_gradient(lambda s: lqm_loss(real, s, quantiles, normalize_features=True).value, syn)
    np.testing.assert_allclose(result.grad_syn, numeric, rtol=1e-5, atol=1e-8)


def test_lqm_loss_normalization_divides_by_feature_count():
    rng = np.random.default_rng(2)
    real, syn = rng.normal(size=(30, 4)), rng.normal(size=(3, 4))
    quantiles = cvm_optimal_quantiles(3)
    plain = lqm_loss(real, syn, quantiles)
    scaled = lqm_loss(real, syn, quantiles, normalize_features=True)
    assert scaled.value == pytest.approx(plain.value / 4)


def test_lqm_loss_routes_gradient_of_tied_values_in_row_order():
    real = np.array([[0.0], [4.0]])
    syn = np.array([[1.0], [1.0]])
    result = lqm_loss(real, syn, cvm_optimal_quantiles(2))
    # targets are 1 and 3, so only the second-ranked row is off target
    np.testing.assert_allclose(result.grad_syn[:, 0], [0.0, -2.0])


def test_lqm_loss_with_wrong_quantile_count_raises_exception():
    with pytest.raises(BudgetException):
        lqm_loss(np.zeros((4, 2)), np.zeros((3, 2)), cvm_optimal_quantiles(2))


def test_lqm_loss_with_feature_mismatch_raises_exception():
    with pytest.raises(ShapeMismatchException):
        lqm_loss(np.zeros((4, 2)), np.zeros((2, 3)), cvm_optimal_quantiles(2))


def test_lqm_loss_with_empty_real_batch_raises_exception():
    with pytest.raises(EmptySampleException):
        lqm_loss(np.zeros((0, 2)), np.zeros((2, 2)), cvm_optimal_quantiles(2))


def test_mmd_loss_of_copy_is_zero():
    real = np.random.default_rng(3).normal(size=(10, 4))
    result = mmd_loss(real, real.copy())
    assert result.value == pytest.approx(0.0, abs=1e-24)


def test_mmd_loss_hand_computed_value():
    real = np.array([[0.0, 2.0], [2.0, 0.0]])
    result = mmd_loss(real, np.array([[0.0, 0.0]]))
    assert result.value == pytest.approx(2.0)
    np.testing.assert_allclose(result.grad_syn, [[-2.0, -2.0]])


def test_mmd_loss_gradient_matches_finite_differences():
    rng = np.random.default_rng(4)
    real, syn = rng.normal(size=(20, 3)), rng.normal(size=(4, 3))
    result = mmd_loss(real, syn)
    numeric = numeric_gradient(lambda s: mmd_loss(real, s).value, syn)
    np.testing.assert_allclose(result.grad_syn, numeric, rtol=1e-5, atol=1e-8)


def test_mmd_loss_ignores_outliers_that_keep_the_mean():
    rng = np.random.default_rng(5)
    real, syn = rng.normal(size=(30, 1)), rng.normal(size=(4, 1))
    skewed = syn.copy()
    skewed[0, 0] += 100.0
    skewed[1, 0] -= 100.0
    assert mmd_loss(real, skewed).value == pytest.approx(mmd_loss(real, syn).value)
    quantiles = cvm_optimal_quantiles(4)
    assert lqm_loss(real, skewed, quantiles).value > lqm_loss(real, syn, quantiles).value


def test_get_matching_loss_successfully():
    assert get_matching_loss(Distance.mmd) is mmd_matching_loss
    assert get_matching_loss(Distance.lqm) is lqm_matching_loss
    normalized = get_matching_loss(Distance.lqm, normalize_features=True)
    assert isinstance(normalized, LQMLoss)
    assert normalized.normalize_features


def test_lqm_matching_loss_without_quantiles_raises_exception():
    with pytest.raises(BudgetException):
        lqm_matching_loss.compute(np.zeros((3, 1)), np.zeros((1, 1)))


@pytest.mark.parametrize("feature", (0, 1, 2))
def test_lqm_loss_strictly_penalizes_entries_above_the_real_max(feature):
    rng = np.random.default_rng(6)
    real, syn = rng.normal(size=(25, 3)), rng.normal(size=(4, 3))
    quantiles = cvm_optimal_quantiles(4)
    top = int(np.argmax(syn[:, feature]))
    ceiling = max(real[:, feature].max(), syn[top, feature])
    values = []
    for excess in (0.0, 1e-3, 0.5, 10.0):
        moved = syn.copy()
        moved[top, feature] = ceiling + excess
        values.append(lqm_loss(real, moved, quantiles).value)
    assert all(a < b for a, b in zip(values, values[1:]))


def test_losses_are_invariant_to_row_order():
    rng = np.random.default_rng(7)
    real, syn = rng.normal(size=(40, 3)), rng.normal(size=(6, 3))
    real_perm, syn_perm = rng.permutation(40), rng.permutation(6)
    quantiles = cvm_optimal_quantiles(6)

    lqm = lqm_loss(real, syn, quantiles)
    lqm_permuted = lqm_loss(real[real_perm], syn[syn_perm], quantiles)
    assert lqm_permuted.value == lqm.value
    np.testing.assert_array_equal(lqm_permuted.grad_syn, lqm.grad_syn[syn_perm])

    mmd = mmd_loss(real, syn)
    mmd_permuted = mmd_loss(real[real_perm], syn[syn_perm])
    assert mmd_permuted.value == pytest.approx(mmd.value, rel=1e-12)
    np.testing.assert_allclose(mmd_permuted.grad_syn, mmd.grad_syn[syn_perm], rtol=1e-12)
