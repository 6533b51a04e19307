import logging

import click
import numpy as np

from src.endpoints.common import handle_errors, load_config, load_training_data, output_path, seed_option
from src.repository.reports import report_repo
from src.schemas.configs import ContinualConfig, Distance
from src.schemas.reports import ContinualReport
from src.services.continual import (
    CondensedReplay,
    ContinualMethod,
    Finetuning,
    Joint,
    build_task_sequence,
    run_cgl,
)

logger = logging.getLogger(__name__)

METHODS = ["lqm", "mmd", "finetune", "joint"]


def make_method(name: str, cfg: ContinualConfig) -> ContinualMethod:
    """lqm and mmd are condensed replay with that matching distance."""
    if name == "finetune":
        return Finetuning(cfg.train)
    if name == "joint":
        return Joint(cfg.train)
    condense_cfg = cfg.condense.model_copy(update={"distance": Distance(name)})
    return CondensedReplay(cfg.train, condense_cfg, cfg.budget_ratio)


def stage_rows(report: ContinualReport):
    for r, run in enumerate(report.runs):
        for k in range(run.test.num_tasks):
            for i in range(k + 1):
                test = run.test.values[k, i]
                if np.isnan(test):
                    continue
                yield r, k + 1, i + 1, float(test), float(run.val.values[k, i]), run.memory_sizes[k]


def summary(name: str, report: ContinualReport) -> dict:
    return {
        "method": name,
        "runs": len(report.runs),
        "aa_mean": report.aa_mean,
        "aa_std": report.aa_std,
        "bwt_mean": report.bwt_mean,
        "bwt_std": report.bwt_std,
        "average_accuracy": [run.average_accuracy for run in report.runs],
        "backward_transfer": [run.backward_transfer for run in report.runs],
        "memory_sizes": [run.memory_sizes for run in report.runs],
    }


@click.command("continual")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), required=True)
@click.option("--method", type=click.Choice(METHODS), required=True)
@seed_option
@handle_errors
def continual(config_path: str, method: str, seed: int | None):
    """
    Runs the class-incremental stream and writes continual_<method>_stages.csv
    and continual_<method>_summary.json to output_dir.
    """
    config = load_config(config_path, seed)
    cfg = config.continual
    data = load_training_data(config)
    tasks = build_task_sequence(data, cfg.classes_per_task, cfg.split_ratios, cfg.seed)
    report = run_cgl(tasks, make_method(method, cfg), cfg.runs, cfg.seed)

    report_repo.write_csv(
        output_path(config.output_dir, f"continual_{method}_stages.csv"),
        ["run", "stage", "task", "test_accuracy", "val_accuracy", "memory_size"],
        stage_rows(report),
    )
    report_repo.write_json(
        output_path(config.output_dir, f"continual_{method}_summary.json"), summary(method, report)
    )
    bwt = "n/a" if report.bwt_mean is None else f"{report.bwt_mean!r}"
    click.echo(f"AA {report.aa_mean!r} BWT {bwt}")
