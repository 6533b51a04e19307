import json
import logging
import os

from pydantic import ValidationError

from src.conf import messages
from src.conf.exceptions import DatasetFileNotFoundException, DatasetFormatException
from src.repository.abstract_repos import SyntheticRepository
from src.repository.datasets import binary_dataset_repo
from src.repository.reports import atomic_write, report_repo
from src.schemas.datasets import SyntheticDataset, SyntheticMetadata

logger = logging.getLogger(__name__)


def meta_path(path: str) -> str:
    return f"{path}.meta.json"


class FileSyntheticRepository(SyntheticRepository):
    """Records in an LQMD file, metadata and label mapping in a JSON sidecar."""

    def save(self, synthetic: SyntheticDataset, path: str) -> str:
        atomic_write(path, binary_dataset_repo.encode(synthetic))
        report_repo.write_json(
            meta_path(path),
            {
                "metadata": synthetic.metadata.model_dump(mode="json"),
                "label_mapping": synthetic.label_mapping,
            },
        )
        logger.info(messages.WRITTEN.format(path=path))
        return path

    def load(self, path: str) -> SyntheticDataset:
        for required in (path, meta_path(path)):
            if not os.path.exists(required):
                raise DatasetFileNotFoundException(
                    messages.DATASET_FILE_NOT_FOUND.format(path=required)
                )
        with open(path, "rb") as f:
            features, labels = binary_dataset_repo.decode(f.read())
        with open(meta_path(path), encoding="utf-8") as f:
            sidecar = json.load(f)
        try:
            return SyntheticDataset(
                features=features,
                labels=labels,
                label_mapping=sidecar.get("label_mapping", {}),
                metadata=SyntheticMetadata.model_validate(sidecar["metadata"]),
            )
        except (KeyError, ValidationError) as err:
            raise DatasetFormatException(f"{meta_path(path)}: {err}") from err


synthetic_repo = FileSyntheticRepository()
