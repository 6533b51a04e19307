import functools
import os

import click
from pydantic import ValidationError

from src.conf.config import load_run_config, settings
from src.conf.exceptions import LQMException
from src.repository.datasets import align_labels, graph_repo, ingest
from src.repository.synthetic import meta_path, synthetic_repo
from src.schemas.configs import RunConfig
from src.schemas.datasets import LabeledDataset
from src.services.graph import propagate_graph


def handle_errors(func):
    """Turns domain, validation and file errors into a one-line message with exit code 1."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (LQMException, ValidationError, OSError) as err:
            raise click.ClickException(str(err)) from err

    return wrapper


seed_option = click.option(
    "--seed", type=click.IntRange(min=0), default=None, help="Seed for every random choice."
)


def resolve_seed(seed: int | None) -> int:
    return settings.default_seed if seed is None else seed


def load_config(path: str | None, seed: int | None) -> RunConfig:
    """Run config from JSON (defaults when no path); `--seed` overrides its seeds."""
    document = load_run_config(path).model_dump(mode="json") if path else {}
    if seed is not None or not path:
        document["seed"] = resolve_seed(seed)
    return RunConfig.model_validate(document)


def require_path(value: str | None, name: str) -> str:
    if not value:
        raise click.UsageError(f"run config must set {name}")
    return value


def load_dataset(path: str, reference: LabeledDataset | None = None) -> LabeledDataset:
    """
    Any dataset file; a synthetic file brings the label mapping of its
    sidecar. With `reference` the labels are put in its label space.
    """
    if os.path.exists(meta_path(path)):
        dataset = synthetic_repo.load(path).to_labeled()
    else:
        dataset = ingest(path)
    return dataset if reference is None else align_labels(dataset, reference, path)


def load_training_data(config: RunConfig) -> LabeledDataset:
    """Training records, pre-propagated over the graph when the config names one."""
    train_path = require_path(config.train_path, "train_path")
    if config.graph is None:
        return ingest(train_path)
    graph = graph_repo.read(train_path, config.graph.edges_path)
    return propagate_graph(graph, config.graph.hops)


def output_path(directory: str, name: str) -> str:
    os.makedirs(directory, exist_ok=True)
    return os.path.join(directory, name)
