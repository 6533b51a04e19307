import logging

import click

from src.endpoints.common import handle_errors, load_config, load_training_data, output_path, seed_option
from src.repository.reports import report_repo
from src.repository.synthetic import synthetic_repo
from src.schemas.configs import Distance
from src.services.condenser import condense as run_condense
from src.services.condenser import select_random

logger = logging.getLogger(__name__)


@click.command("condense")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), required=True)
@click.option("--distance", type=click.Choice([d.value for d in Distance]), default=None)
@click.option("--random-only", is_flag=True, help="Write the random initial subset, no optimization.")
@click.option("--resume", "resume_path", type=click.Path(dir_okay=False), default=None)
@seed_option
@handle_errors
def condense(
    config_path: str,
    distance: str | None,
    random_only: bool,
    resume_path: str | None,
    seed: int | None,
):
    """
    Condenses the training set named in the run config and writes
    synthetic.lqmd, its metadata sidecar and loss_trace.csv to output_dir.
    """
    config = load_config(config_path, seed)
    cfg = config.condense
    if distance is not None:
        cfg = cfg.model_copy(update={"distance": Distance(distance)})
    real = load_training_data(config)
    target = output_path(config.output_dir, "synthetic.lqmd")

    if random_only:
        synthetic_repo.save(select_random(real, cfg), target)
        click.echo(target)
        return

    initial = synthetic_repo.load(resume_path) if resume_path else None
    result = run_condense(real, cfg, initial=initial)
    start = result.synthetic.metadata.iterations_completed - len(result.loss_trace)
    synthetic_repo.save(result.synthetic, target)
    report_repo.write_csv(
        output_path(config.output_dir, "loss_trace.csv"),
        ["iteration", "loss"],
        ((start + i + 1, loss) for i, loss in enumerate(result.loss_trace)),
    )
    click.echo(target)
