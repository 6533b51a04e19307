"""
Distribution-matching condensation: synthetic records start as real records
and are moved by gradient descent so that their embeddings under freshly
sampled random extractors match the real embeddings of their class.
"""
import logging

import numpy as np

from src.conf import messages
from src.conf.exceptions import BudgetException, NonFiniteValueException
from src.schemas.configs import CondenseConfig, Distance
from src.schemas.datasets import LabeledDataset, SyntheticDataset, SyntheticMetadata
from src.schemas.reports import CondenseResult
from src.schemas.stats import QuantileSet
from src.services.losses import get_matching_loss
from src.services.nn import backward_to_input, forward, sample_params
from src.services.quantiles import get_quantile_service
from src.services.seeds import derive_seed

logger = logging.getLogger(__name__)


def uniform_budgets(real: LabeledDataset, per_class: int) -> dict[int, int]:
    return {c: per_class for c in real.classes}


def proportional_budgets(
    real: LabeledDataset, ratio: float | None = None, total: int | None = None
) -> dict[int, int]:
    """
    Per-class budgets proportional to class frequency, each at least 1 and at
    most the class size. The total is round(ratio * N) unless given directly;
    remainders go to the largest fractional shares, lower class first on ties.
    """
    counts = real.class_counts()
    n = sum(counts.values())
    if total is None:
        if ratio is None:
            raise BudgetException(messages.BUDGET_MUST_BE_POSITIVE)
        total = int(np.floor(ratio * n + 0.5))
    total = max(total, len(counts))
    classes = list(counts)
    shares = np.array([total * counts[c] / n for c in classes])
    budgets = np.maximum(np.floor(shares).astype(int), 1)
    fractions = shares - np.floor(shares)
    remaining = total - int(budgets.sum())
    if remaining > 0:
        order = sorted(range(len(classes)), key=lambda i: (-fractions[i], classes[i]))
        for i in order[:remaining]:
            budgets[i] += 1
    # the minimum of one per class can overshoot; take back from the largest
    while budgets.sum() > total:
        i = max(range(len(classes)), key=lambda j: (budgets[j], -fractions[j], -classes[j]))
        budgets[i] -= 1
    return {c: int(min(b, counts[c])) for c, b in zip(classes, budgets)}


def resolve_budgets(real: LabeledDataset, cfg: CondenseConfig) -> dict[int, int]:
    if cfg.budget_ratio is not None:
        return proportional_budgets(real, ratio=cfg.budget_ratio)
    return uniform_budgets(real, cfg.budget_per_class)


def init_synthetic(
    real: LabeledDataset,
    budgets: dict[int, int],
    seed: int,
    clamp: bool = False,
) -> SyntheticDataset:
    """
    Picks beta_c distinct real records per class uniformly without
    replacement.

    :param real: LabeledDataset: Source records
    :param budgets: dict[int, int]: Records to keep per class
    :param seed: int: Sampling seed
    :param clamp: bool: Shrink budgets larger than their class instead of failing
    :return: SyntheticDataset: Records grouped per class in ascending class order
    """
    counts = real.class_counts()
    features, labels, effective = [], [], {}
    for label in sorted(budgets):
        budget = budgets[label]
        if budget < 1:
            raise BudgetException(messages.BUDGET_MUST_BE_POSITIVE)
        size = counts.get(label, 0)
        if budget > size:
            if not clamp or size == 0:
                raise BudgetException(messages.BUDGET_EXCEEDS_CLASS_SIZE)
            logger.warning(messages.BUDGET_CLAMPED.format(label=label, budget=budget, size=size))
            budget = size
        rng = np.random.default_rng([seed, label])
        chosen = rng.choice(np.flatnonzero(real.labels == label), size=budget, replace=False)
        features.append(real.features[chosen])
        labels.append(np.full(budget, label))
        effective[label] = budget
    return SyntheticDataset(
        features=np.vstack(features) if features else np.zeros((0, real.n_features)),
        labels=np.concatenate(labels) if labels else np.zeros(0, dtype=np.int64),
        label_mapping=real.label_mapping,
        metadata=SyntheticMetadata(
            budgets=effective,
            seed=seed,
            condensation_ratio=sum(effective.values()) / real.n_records if real.n_records else None,
        ),
    )


def select_random(real: LabeledDataset, cfg: CondenseConfig) -> SyntheticDataset:
    """The initialization alone: a random per-class subset of the real records."""
    return init_synthetic(real, resolve_budgets(real, cfg), cfg.seed, cfg.clamp_budget)


def sample_real_batch(records: np.ndarray, batch_size: int, rng: np.random.Generator) -> np.ndarray:
    replace = records.shape[0] < batch_size
    return records[rng.choice(records.shape[0], size=batch_size, replace=replace)]


def condense(
    real: LabeledDataset,
    cfg: CondenseConfig,
    budgets: dict[int, int] | None = None,
    initial: SyntheticDataset | None = None,
) -> CondenseResult:
    """
    Runs the condensation loop. Each iteration samples one extractor shared by
    all classes; each class then draws a real mini-batch, embeds it together
    with its synthetic records, and takes one SGD step on the records through
    the extractor's input gradient.

    Classes touch disjoint rows and use their own (seed, iteration, class)
    random stream, so class order does not affect the result.

    :param real: LabeledDataset: Training records
    :param cfg: CondenseConfig: Loop hyperparameters
    :param budgets: dict[int, int]: Overrides the budgets derived from cfg
    :param initial: SyntheticDataset: Start from these records instead of a random pick
    :return: CondenseResult: Final synthetic dataset and per-iteration mean loss
    """
    layer_dims = cfg.resolved_layer_dims(real.n_features)
    if initial is None:
        budgets = budgets if budgets is not None else resolve_budgets(real, cfg)
        initial = init_synthetic(real, budgets, cfg.seed, cfg.clamp_budget)
    budgets = dict(initial.metadata.budgets)
    loss_fn = get_matching_loss(cfg.distance, cfg.normalize_features)
    quantiles: dict[int, QuantileSet | None] = {c: None for c in budgets}
    if cfg.distance == Distance.lqm:
        criterion = get_quantile_service(cfg.quantile_criterion, cfg.ad_eps_max, cfg.ad_max_iters)
        quantiles = {c: criterion.optimal_quantiles(b) for c, b in budgets.items()}
    real_by_class = {c: real.class_features(c) for c in budgets}
    slices = {c: initial.class_slice(c) for c in budgets}
    for label, budget in budgets.items():
        if cfg.real_batch_size < budget:
            logger.warning(
                messages.REAL_BATCH_SMALLER_THAN_BUDGET.format(
                    batch=cfg.real_batch_size, budget=budget, label=label
                )
            )

    logger.info(
        "Condensing %d records into %d (%s, %d iterations)",
        real.n_records, sum(budgets.values()), cfg.distance.value, cfg.iterations,
    )
    records = initial.features.copy()
    start = initial.metadata.iterations_completed
    trace = []
    for k in range(start, start + cfg.iterations):
        params = sample_params(layer_dims, derive_seed(cfg.seed, k))
        losses = []
        for label in budgets:
            rng = np.random.default_rng([cfg.seed, k, label])
            batch = sample_real_batch(real_by_class[label], cfg.real_batch_size, rng)
            syn = records[slices[label]]
            result = loss_fn.compute(forward(params, batch), forward(params, syn), quantiles[label])
            if not np.isfinite(result.value):
                raise NonFiniteValueException(
                    messages.NON_FINITE_LOSS.format(loss=result.value, iteration=k, label=label)
                )
            grad = backward_to_input(params, syn, result.grad_syn)
            records[slices[label]] = syn - cfg.learning_rate * grad
            losses.append(result.value)
        trace.append(float(np.mean(losses)))
        if not np.all(np.isfinite(records)):
            raise NonFiniteValueException(
                messages.NON_FINITE_LOSS.format(loss=trace[-1], iteration=k, label="*")
            )
        if (k + 1) % cfg.log_every == 0:
            logger.debug("iteration %d mean loss %.6g", k + 1, trace[-1])

    logger.info("Condensation finished, final mean loss %.6g", trace[-1])
    synthetic = SyntheticDataset(
        features=records,
        labels=initial.labels,
        label_mapping=initial.label_mapping,
        metadata=SyntheticMetadata(
            budgets=budgets,
            seed=cfg.seed,
            iterations_completed=start + cfg.iterations,
            distance=cfg.distance.value,
            condensation_ratio=sum(budgets.values()) / real.n_records,
            config=cfg.model_dump(mode="json"),
        ),
    )
    return CondenseResult(synthetic=synthetic, loss_trace=trace)
