from abc import ABC, abstractmethod
from typing import Any, Iterable

from src.schemas.datasets import GraphData, LabeledDataset, SyntheticDataset


class DatasetRepository(ABC):

    @abstractmethod
    def read(self, path: str) -> LabeledDataset:
        raise NotImplementedError

    @abstractmethod
    def write(self, dataset: LabeledDataset, path: str) -> str:
        raise NotImplementedError


class GraphRepository(ABC):

    @abstractmethod
    def read(self, nodes_path: str, edges_path: str) -> GraphData:
        raise NotImplementedError


class SyntheticRepository(ABC):

    @abstractmethod
    def save(self, synthetic: SyntheticDataset, path: str) -> str:
        raise NotImplementedError

    @abstractmethod
    def load(self, path: str) -> SyntheticDataset:
        raise NotImplementedError


class ReportRepository(ABC):

    @abstractmethod
    def write_csv(self, path: str, header: list[str], rows: Iterable[Iterable[Any]]) -> str:
        raise NotImplementedError

    @abstractmethod
    def write_json(self, path: str, document: Any) -> str:
        raise NotImplementedError
