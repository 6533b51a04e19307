import click

from src.conf.config import configure_logging
from src.endpoints import condense, continual, data, evaluate


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], case_sensitive=False),
    default=None,
    help="Overrides LQM_LOG_LEVEL.",
)
def cli(log_level: str | None):
    """Dataset condensation by latent quantile matching."""
    configure_logging(log_level.upper() if log_level else None)


cli.add_command(data.gen_data)
cli.add_command(data.quantiles)
cli.add_command(condense.condense)
cli.add_command(evaluate.evaluate)
cli.add_command(evaluate.diagnose)
cli.add_command(evaluate.compare)
cli.add_command(continual.continual)


if __name__ == "__main__":
    cli()
