import json
import logging

import click

from src.conf.config import settings
from src.endpoints.common import (
    handle_errors,
    load_config,
    load_dataset,
    load_training_data,
    output_path,
    require_path,
    seed_option,
)
from src.repository.reports import jsonable, report_repo
from src.schemas.configs import Distance
from src.services.evaluation import (
    compare_distances,
    diagnose_cvm,
    diagnose_extremes,
    evaluate_synthetic,
    export_ecdf,
)

logger = logging.getLogger(__name__)


@click.command("eval")
@click.option("--syn", "syn_path", type=click.Path(dir_okay=False), required=True)
@click.option("--test", "test_path", type=click.Path(dir_okay=False), required=True)
@click.option("--runs", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
@seed_option
@handle_errors
def evaluate(
    syn_path: str, test_path: str, runs: int, config_path: str | None, out_path: str | None, seed: int | None
):
    """Trains classifiers on the synthetic file and reports test accuracy."""
    config = load_config(config_path, seed)
    syn = load_dataset(syn_path)
    report = evaluate_synthetic(
        syn,
        load_dataset(test_path, reference=syn),
        runs,
        config.evaluation.train,
        seed=config.evaluation.seed,
        workers=settings.workers,
    )
    if out_path:
        report_repo.write_json(out_path, report.model_dump())
    click.echo(json.dumps(jsonable(report.model_dump()), sort_keys=True))


def _diagnostic_rows(report):
    return [(label, value) for label, value in sorted(report.per_class.items())]


@click.command("diagnose")
@click.option("--real", "real_path", type=click.Path(dir_okay=False), required=True)
@click.option("--syn", "syn_path", type=click.Path(dir_okay=False), required=True)
@click.option("--ecdf", type=(int, int), default=None, metavar="CLASS FEATURE")
@click.option("--out-dir", type=click.Path(file_okay=False), default=None)
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None)
@seed_option
@handle_errors
def diagnose(
    real_path: str,
    syn_path: str,
    ecdf: tuple[int, int] | None,
    out_dir: str | None,
    config_path: str | None,
    seed: int | None,
):
    """
    Writes cvm.csv and extremes.csv with per-class latent diagnostics, and
    ecdf_c<CLASS>_f<FEATURE>.csv when --ecdf is given.
    """
    config = load_config(config_path, seed)
    out_dir = out_dir or config.output_dir
    probe_seed = config.evaluation.seed
    real = load_dataset(real_path)
    syn = load_dataset(syn_path, reference=real)

    cvm = diagnose_cvm(real, syn, probe_seed, config.evaluation)
    extremes = diagnose_extremes(real, syn, probe_seed, config.evaluation)
    report_repo.write_csv(output_path(out_dir, "cvm.csv"), ["class", "cvm"], _diagnostic_rows(cvm))
    report_repo.write_csv(
        output_path(out_dir, "extremes.csv"), ["class", "extreme_percent"], _diagnostic_rows(extremes)
    )
    if ecdf is not None:
        class_id, feature_index = ecdf
        table = export_ecdf(real, syn, class_id, feature_index, probe_seed, config.evaluation)
        report_repo.write_csv(
            output_path(out_dir, f"ecdf_c{class_id}_f{feature_index}.csv"),
            ["value", "f_real", "f_syn", "f_optimal"],
            table.rows(),
        )
    click.echo(f"cvm {cvm.overall!r} extremes {extremes.overall!r}")


@click.command("compare")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), required=True)
@seed_option
@handle_errors
def compare(config_path: str, seed: int | None):
    """Condenses with LQM and MMD under one seed and writes comparison.json."""
    config = load_config(config_path, seed)
    train = load_training_data(config)
    test = load_dataset(require_path(config.test_path, "test_path"), reference=train)
    report = compare_distances(
        train, test, config.condense, config.evaluation, (Distance.lqm, Distance.mmd)
    )
    target = output_path(config.output_dir, "comparison.json")
    report_repo.write_json(target, report.model_dump())
    for result in report.results:
        click.echo(f"{result.distance} {result.accuracy.mean!r}")
    click.echo(f"full {report.full_data.mean!r}")
