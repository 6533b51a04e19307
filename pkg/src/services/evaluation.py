"""
Train-on-synthetic evaluation and latent-space diagnostics. Diagnostics embed
real and synthetic records with the last hidden layer of a probe classifier
trained on the synthetic set.
"""
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from src.conf import messages
from src.conf.exceptions import EmptySampleException, ShapeMismatchException
from src.schemas.configs import CondenseConfig, Distance, EvaluationConfig, TrainConfig
from src.schemas.datasets import LabeledDataset
from src.schemas.nn import ClassifierParams
from src.schemas.reports import (
    AccuracyReport,
    ComparisonReport,
    DiagnosticReport,
    DistanceComparison,
    EcdfTable,
)
from src.services.condenser import condense
from src.services.nn import accuracy, hidden_features, sample_classifier, train_classifier
from src.services.quantiles import cvm_optimal_quantiles
from src.services.seeds import derive_seed
from src.services.stats import cvm_two_sample_columns, ecdf, extreme_value_fraction, quantile_matrix

logger = logging.getLogger(__name__)


def _train_one(
    train: LabeledDataset, num_classes: int, cfg: TrainConfig, seed: int, epochs: int | None = None
) -> ClassifierParams:
    params = sample_classifier(train.n_features, cfg.hidden_dims, num_classes, seed)
    return train_classifier(
        params,
        train,
        epochs=cfg.epochs if epochs is None else epochs,
        lr=cfg.learning_rate,
        batch_size=cfg.batch_size,
        seed=seed,
    )


def evaluate_synthetic(
    syn: LabeledDataset,
    test: LabeledDataset,
    runs: int,
    train_cfg: TrainConfig,
    seed: int = 0,
    workers: int = 1,
) -> AccuracyReport:
    """
    Trains `runs` independently seeded classifiers on `syn` and scores each on
    `test`.

    :param syn: LabeledDataset: Training records, synthetic or real
    :param test: LabeledDataset: Held-out real records
    :param runs: int: Number of classifiers
    :param train_cfg: TrainConfig: Classifier recipe
    :param seed: int: Base seed, run r uses derive_seed(seed, r)
    :param workers: int: Threads used for independent runs
    :return: AccuracyReport: Mean, population std and per-run accuracies
    """
    if syn.n_records == 0 or test.n_records == 0:
        raise EmptySampleException(messages.EMPTY_DATASET)
    if syn.n_features != test.n_features:
        raise ShapeMismatchException(
            messages.FEATURE_COUNT_MISMATCH.format(left=syn.n_features, right=test.n_features)
        )
    num_classes = max(syn.num_classes, test.num_classes, 2)

    def run(r: int) -> float:
        params = _train_one(syn, num_classes, train_cfg, derive_seed(seed, r))
        return accuracy(params, test)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        accuracies = list(pool.map(run, range(runs)))
    return AccuracyReport(
        mean=float(np.mean(accuracies)), std=float(np.std(accuracies)), accuracies=accuracies
    )


def evaluate_full(
    train: LabeledDataset, test: LabeledDataset, runs: int, train_cfg: TrainConfig, seed: int = 0
) -> AccuracyReport:
    """Reference accuracy of the same recipe trained on the whole training set."""
    return evaluate_synthetic(train, test, runs, train_cfg, seed)


def train_probe(
    syn: LabeledDataset, real: LabeledDataset, probe_seed: int, cfg: EvaluationConfig
) -> ClassifierParams:
    num_classes = max(syn.num_classes, real.num_classes, 2)
    return _train_one(syn, num_classes, cfg.train, probe_seed, epochs=cfg.probe_epochs)


def _per_class_embeddings(
    real: LabeledDataset, syn: LabeledDataset, probe_seed: int, cfg: EvaluationConfig
):
    if real.n_records == 0 or syn.n_records == 0:
        raise EmptySampleException(messages.EMPTY_DATASET)
    probe = train_probe(syn, real, probe_seed, cfg)
    real_classes = set(real.classes)
    for label in syn.classes:
        if label not in real_classes:
            continue
        yield (
            label,
            hidden_features(probe, real.class_features(label)),
            hidden_features(probe, syn.class_features(label)),
        )


def diagnose_cvm(
    real: LabeledDataset, syn: LabeledDataset, probe_seed: int, cfg: EvaluationConfig | None = None
) -> DiagnosticReport:
    """Mean two-sample CvM statistic over latent features, per class and overall."""
    cfg = cfg or EvaluationConfig()
    per_class = {
        label: float(np.mean(cvm_two_sample_columns(real_emb, syn_emb)))
        for label, real_emb, syn_emb in _per_class_embeddings(real, syn, probe_seed, cfg)
    }
    return DiagnosticReport(kind="cvm", per_class=per_class, overall=float(np.mean(list(per_class.values()))))


def diagnose_extremes(
    real: LabeledDataset, syn: LabeledDataset, probe_seed: int, cfg: EvaluationConfig | None = None
) -> DiagnosticReport:
    """Percentage of synthetic latent values outside the real per-feature range."""
    cfg = cfg or EvaluationConfig()
    per_class = {
        label: extreme_value_fraction(real_emb, syn_emb)
        for label, real_emb, syn_emb in _per_class_embeddings(real, syn, probe_seed, cfg)
    }
    return DiagnosticReport(
        kind="extremes", per_class=per_class, overall=float(np.mean(list(per_class.values())))
    )


def export_ecdf(
    real: LabeledDataset,
    syn: LabeledDataset,
    class_id: int,
    feature_index: int,
    probe_seed: int,
    cfg: EvaluationConfig | None = None,
) -> EcdfTable:
    """
    ECDFs of one latent feature for the real class, the synthetic class and
    the optimal k-point approximation (mass 1/k at each target quantile),
    on the ascending grid of all their values.
    """
    cfg = cfg or EvaluationConfig()
    if class_id not in syn.classes or class_id not in real.classes:
        raise ShapeMismatchException(messages.UNKNOWN_CLASS.format(label=class_id))
    probe = train_probe(syn, real, probe_seed, cfg)
    real_emb = hidden_features(probe, real.class_features(class_id))
    syn_emb = hidden_features(probe, syn.class_features(class_id))
    if not 0 <= feature_index < real_emb.shape[1]:
        raise ShapeMismatchException(
            messages.SHAPE_MISMATCH.format(
                expected=f"feature index in [0, {real_emb.shape[1]})", got=feature_index
            )
        )
    real_col, syn_col = real_emb[:, feature_index], syn_emb[:, feature_index]
    probs = cvm_optimal_quantiles(syn_col.size).as_array()
    targets = quantile_matrix(real_col[:, None], probs)[:, 0]
    grid = np.unique(np.concatenate([real_col, syn_col, targets]))
    return EcdfTable(
        value=grid,
        f_real=ecdf(real_col)(grid),
        f_syn=ecdf(syn_col)(grid),
        f_optimal=ecdf(targets)(grid),
    )


def compare_distances(
    train: LabeledDataset,
    test: LabeledDataset,
    condense_cfg: CondenseConfig,
    eval_cfg: EvaluationConfig,
    distances: tuple[Distance, ...] = (Distance.lqm, Distance.mmd),
) -> ComparisonReport:
    """
    Condenses the same data under one seed with each distance and reports
    accuracy, CvM and extreme-value diagnostics side by side, together with
    the full-data reference accuracy.
    """
    full = evaluate_full(train, test, eval_cfg.runs, eval_cfg.train, eval_cfg.seed)
    results = []
    for distance in distances:
        cfg = condense_cfg.model_copy(update={"distance": distance})
        outcome = condense(train, cfg)
        syn = outcome.synthetic.to_labeled()
        results.append(
            DistanceComparison(
                distance=distance.value,
                accuracy=evaluate_synthetic(syn, test, eval_cfg.runs, eval_cfg.train, eval_cfg.seed),
                cvm=diagnose_cvm(train, syn, eval_cfg.seed, eval_cfg),
                extremes=diagnose_extremes(train, syn, eval_cfg.seed, eval_cfg),
                final_loss=outcome.loss_trace[-1],
            )
        )
        logger.info("%s: accuracy %.4f", distance.value, results[-1].accuracy.mean)
    return ComparisonReport(full_data=full, results=results)
