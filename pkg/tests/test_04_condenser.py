import logging

import numpy as np
import pytest

from src.conf import messages
from src.conf.exceptions import BudgetException, ShapeMismatchException
from src.schemas.configs import CondenseConfig, Distance, QuantileCriterion
from src.schemas.datasets import LabeledDataset, SyntheticDataset, SyntheticMetadata
from src.services.condenser import (
    condense,
    init_synthetic,
    proportional_budgets,
    resolve_budgets,
    select_random,
)


def imbalanced() -> LabeledDataset:
    rng = np.random.default_rng(0)
    counts = {0: 500, 1: 300, 2: 150, 3: 50}
    features = np.vstack([rng.normal(c * 4.0, 1.0, size=(n, 2)) for c, n in counts.items()])
    labels = np.concatenate([np.full(n, c) for c, n in counts.items()])
    return LabeledDataset(features=features, labels=labels)


def test_init_synthetic_with_exact_class_size_takes_all_records():
    data = LabeledDataset(features=[[1.0], [2.0], [3.0], [10.0]], labels=[0, 0, 0, 1])
    syn = init_synthetic(data, {0: 3, 1: 1}, seed=4)
    assert sorted(syn.class_records(0)[:, 0]) == [1.0, 2.0, 3.0]
    np.testing.assert_array_equal(syn.class_records(1), [[10.0]])
    assert list(syn.labels) == [0, 0, 0, 1]


def test_init_synthetic_is_deterministic(mixture):
    first = init_synthetic(mixture, {0: 5, 1: 5, 2: 5}, seed=9)
    second = init_synthetic(mixture, {0: 5, 1: 5, 2: 5}, seed=9)
    np.testing.assert_array_equal(first.features, second.features)


def test_init_synthetic_picks_distinct_real_records(mixture):
    syn = init_synthetic(mixture, {0: 20, 1: 20, 2: 20}, seed=1)
    for label in (0, 1, 2):
        records = syn.class_records(label)
        assert np.unique(records, axis=0).shape[0] == 20
        real = mixture.class_features(label)
        assert all(any(np.array_equal(r, x) for x in real) for r in records)


def test_init_synthetic_with_oversized_budget_raises_exception():
    data = LabeledDataset(features=[[1.0], [2.0]], labels=[0, 0])
    with pytest.raises(BudgetException, match=messages.BUDGET_EXCEEDS_CLASS_SIZE):
        init_synthetic(data, {0: 3}, seed=0)


def test_init_synthetic_with_clamp_shrinks_budget(caplog):
    data = LabeledDataset(features=[[1.0], [2.0]], labels=[0, 0])
    with caplog.at_level(logging.WARNING):
        syn = init_synthetic(data, {0: 3}, seed=0, clamp=True)
    assert syn.metadata.budgets == {0: 2}
    assert "clamped" in caplog.text


def test_init_synthetic_with_zero_budget_raises_exception():
    data = LabeledDataset(features=[[1.0], [2.0]], labels=[0, 0])
    with pytest.raises(BudgetException, match=messages.BUDGET_MUST_BE_POSITIVE):
        init_synthetic(data, {0: 0}, seed=0)


def test_proportional_budgets_at_one_percent():
    data = imbalanced()
    budgets = proportional_budgets(data, ratio=0.01)
    assert sum(budgets.values()) == 10
    assert all(b >= 1 for b in budgets.values())
    assert budgets[0] >= budgets[1] >= budgets[2] >= budgets[3]


def test_proportional_budgets_keep_every_class():
    data = imbalanced()
    budgets = proportional_budgets(data, total=2)
    assert set(budgets) == {0, 1, 2, 3}
    assert all(b == 1 for b in budgets.values())


def test_resolve_budgets_successfully():
    data = imbalanced()
    assert resolve_budgets(data, CondenseConfig(budget_per_class=7)) == {0: 7, 1: 7, 2: 7, 3: 7}
    assert sum(resolve_budgets(data, CondenseConfig(budget_ratio=0.02)).values()) == 20


def test_select_random_records_condensation_ratio(mixture):
    syn = select_random(mixture, CondenseConfig(budget_per_class=6, seed=2))
    assert syn.n_records == 18
    assert syn.metadata.condensation_ratio == pytest.approx(18 / mixture.n_records)
    assert syn.metadata.iterations_completed == 0


def test_condense_moves_single_record_towards_the_real_one():
    real = LabeledDataset(features=[[2.0, -1.0]], labels=[0])
    start = SyntheticDataset(
        features=[[0.0, 0.0]], labels=[0], metadata=SyntheticMetadata(budgets={0: 1}, seed=0)
    )
    cfg = CondenseConfig(
        iterations=200, learning_rate=0.5, real_batch_size=1, layer_dims=[2, 16, 16],
        normalize_features=True, budget_per_class=1,
    )
    result = condense(real, cfg, initial=start)
    final = result.synthetic.features[0]
    assert np.linalg.norm(final - [2.0, -1.0]) < np.linalg.norm([2.0, -1.0])
    assert result.loss_trace[-1] < result.loss_trace[0]


@pytest.mark.parametrize("distance, factor", ((Distance.lqm, 0.75), (Distance.mmd, 0.5)))
def test_condense_reduces_mean_loss(mixture, small_condense_cfg, distance, factor):
    cfg = small_condense_cfg.model_copy(update={"distance": distance, "iterations": 300})
    result = condense(mixture, cfg)
    assert len(result.loss_trace) == 300
    first = np.mean(result.loss_trace[:20])
    last = np.mean(result.loss_trace[-20:])
    assert last <= factor * first


def test_condense_with_ad_quantiles_runs(mixture, small_condense_cfg):
    cfg = small_condense_cfg.model_copy(update={"quantile_criterion": QuantileCriterion.ad, "iterations": 20})
    result = condense(mixture, cfg)
    assert result.synthetic.n_records == 15
    assert np.all(np.isfinite(result.loss_trace))


def test_condense_is_deterministic(mixture, small_condense_cfg):
    first = condense(mixture, small_condense_cfg)
    second = condense(mixture, small_condense_cfg)
    np.testing.assert_array_equal(first.synthetic.features, second.synthetic.features)
    assert first.loss_trace == second.loss_trace


def test_condense_keeps_labels_and_budgets(mixture, small_condense_cfg):
    result = condense(mixture, small_condense_cfg, budgets={0: 2, 1: 3, 2: 4})
    syn = result.synthetic
    assert list(syn.labels) == [0, 0, 1, 1, 1, 2, 2, 2, 2]
    assert syn.metadata.iterations_completed == small_condense_cfg.iterations
    assert syn.metadata.distance == "lqm"
    assert syn.metadata.config["seed"] == small_condense_cfg.seed


def test_condense_resume_continues_iteration_count(mixture, small_condense_cfg):
    first = condense(mixture, small_condense_cfg)
    resumed = condense(mixture, small_condense_cfg, initial=first.synthetic)
    assert resumed.synthetic.metadata.iterations_completed == 2 * small_condense_cfg.iterations


def test_condense_warns_when_real_batch_is_smaller_than_budget(mixture, small_condense_cfg, caplog):
    cfg = small_condense_cfg.model_copy(update={"real_batch_size": 2, "iterations": 1})
    with caplog.at_level(logging.WARNING):
        condense(mixture, cfg)
    assert "real_batch_size=2" in caplog.text


def test_condense_with_mismatched_layer_dims_raises_exception(mixture):
    with pytest.raises(ShapeMismatchException, match="layer_dims"):
        condense(mixture, CondenseConfig(layer_dims=[3, 8], iterations=1))


def test_condense_with_zero_learning_rate_leaves_records_unchanged(mixture, small_condense_cfg):
    cfg = small_condense_cfg.model_copy(update={"learning_rate": 0.0, "iterations": 10})
    result = condense(mixture, cfg)
    np.testing.assert_array_equal(result.synthetic.features, select_random(mixture, cfg).features)
    assert result.synthetic.metadata.iterations_completed == 10


def test_condense_result_does_not_depend_on_class_processing_order(mixture, small_condense_cfg):
    joint = condense(mixture, small_condense_cfg).synthetic
    for label in (2, 0, 1):
        alone = condense(mixture, small_condense_cfg, budgets={label: 5}).synthetic
        np.testing.assert_array_equal(alone.features, joint.features[joint.class_slice(label)])
