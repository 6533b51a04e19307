import logging

import click

from src.endpoints.common import handle_errors, resolve_seed, seed_option
from src.repository.datasets import repo_for
from src.schemas.configs import QuantileCriterion
from src.services.generate import gen_mixture
from src.services.quantiles import get_quantile_service

logger = logging.getLogger(__name__)


@click.command("gen-data")
@click.option("--classes", type=click.IntRange(min=1), default=3, show_default=True)
@click.option("--per-class", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--dim", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--separation", type=click.FloatRange(min=0), default=6.0, show_default=True)
@click.option("--out", "out_path", required=True, help="Target file; .lqmd writes binary, anything else CSV.")
@seed_option
@handle_errors
def gen_data(classes: int, per_class: int, dim: int, separation: float, out_path: str, seed: int | None):
    """Writes a Gaussian mixture dataset."""
    dataset = gen_mixture(classes, per_class, dim, separation, resolve_seed(seed))
    repo_for(out_path).write(dataset, out_path)
    click.echo(out_path)


@click.command("quantiles")
@click.option("--k", "k", type=click.IntRange(min=1), required=True, help="Number of support points.")
@click.option(
    "--criterion",
    type=click.Choice([c.value for c in QuantileCriterion]),
    default=QuantileCriterion.cvm.value,
    show_default=True,
)
@click.option("--eps-max", type=click.FloatRange(min=0, min_open=True), default=1e-10, show_default=True)
@click.option("--max-iters", type=click.IntRange(min=1), default=10_000, show_default=True)
@handle_errors
def quantiles(k: int, criterion: str, eps_max: float, max_iters: int):
    """Prints the optimal quantile probabilities for k points, space separated."""
    service = get_quantile_service(QuantileCriterion(criterion), eps_max, max_iters)
    result = service.optimal_quantiles(k)
    if result.iterations:
        logger.info("converged after %d iterations, eps %.3e", result.iterations, result.eps)
    click.echo(" ".join(repr(float(p)) for p in result.probs))
