"""
Dataset files: a headered CSV with a `label` column, and the LQMD
little-endian binary layout

    magic "LQMD" | version u16 | n u32 | f u32 | labels n x u32 | data n*f x f64

Labels that are not already 0..C-1 are remapped to that range in ascending
order of the original values; the mapping travels with the dataset.
"""
import csv
import logging
import math
import os

import numpy as np

from src.conf import messages
from src.conf.exceptions import (
    DatasetFileNotFoundException,
    DatasetFormatException,
    NonFiniteValueException,
)
from src.repository.abstract_repos import DatasetRepository, GraphRepository
from src.repository.reports import atomic_write, format_cell, report_repo
from src.schemas.datasets import GraphData, LabeledDataset

logger = logging.getLogger(__name__)

MAGIC = b"LQMD"
VERSION = 1
HEADER_DTYPE = np.dtype([("magic", "S4"), ("version", "<u2"), ("n", "<u4"), ("f", "<u4")])
LABEL_DTYPE = np.dtype("<u4")
DATA_DTYPE = np.dtype("<f8")


def _check_exists(path: str) -> None:
    if not os.path.exists(path):
        raise DatasetFileNotFoundException(messages.DATASET_FILE_NOT_FOUND.format(path=path))


def remap_labels(labels: np.ndarray) -> tuple[np.ndarray, dict[int, int]]:
    """Contiguous labels plus {original: contiguous}; empty mapping if nothing moved."""
    values = np.unique(labels)
    if np.array_equal(values, np.arange(values.size)):
        return labels, {}
    mapping = {int(v): i for i, v in enumerate(values)}
    logger.warning(
        messages.LABELS_REMAPPED.format(original=[int(v) for v in values], last=values.size - 1)
    )
    return np.searchsorted(values, labels).astype(np.int64), mapping


def _parse_label(cell: str, line: int) -> int:
    text = cell.strip()
    try:
        value = int(text)
    except ValueError:
        try:
            number = float(text)
        except ValueError:
            number = math.nan
        if not math.isfinite(number) or not number.is_integer():
            raise DatasetFormatException(messages.NEGATIVE_LABEL.format(value=cell, line=line))
        value = int(number)
    if value < 0:
        raise DatasetFormatException(messages.NEGATIVE_LABEL.format(value=cell, line=line))
    return value


def _parse_value(cell: str, column: str, line: int) -> float:
    text = cell.strip()
    if not text:
        raise DatasetFormatException(messages.MISSING_CELL.format(column=column, line=line))
    try:
        value = float(text)
    except ValueError:
        raise DatasetFormatException(
            messages.NOT_A_NUMBER.format(value=cell, column=column, line=line)
        )
    if not math.isfinite(value):
        raise NonFiniteValueException(
            f"{messages.NON_FINITE_VALUES}: {column!r} on line {line}"
        )
    return value


def original_labels(dataset: LabeledDataset) -> np.ndarray:
    """Labels as they were on disk, undoing the contiguous remapping."""
    if not dataset.label_mapping:
        return np.asarray(dataset.labels)
    lookup = np.zeros(len(dataset.label_mapping), dtype=np.int64)
    for original, contiguous in dataset.label_mapping.items():
        lookup[contiguous] = original
    return lookup[dataset.labels]


def align_labels(dataset: LabeledDataset, reference: LabeledDataset, source: str = "") -> LabeledDataset:
    """
    Expresses `dataset` in the label space of `reference`, so a test file
    holding only some of the classes keeps their ids. Labels the reference
    never saw raise instead of being renumbered.

    :param dataset: LabeledDataset: Records to relabel
    :param reference: LabeledDataset: Dataset whose mapping fixes the label ids
    :param source: str: File name used in the error message
    :return: LabeledDataset: Same records, labels in the reference space
    """
    known = reference.label_mapping or {c: c for c in range(reference.num_classes)}
    raw = original_labels(dataset)
    unknown = sorted(set(np.unique(raw).tolist()) - set(known))
    if unknown:
        raise DatasetFormatException(
            messages.LABELS_OUTSIDE_REFERENCE.format(labels=unknown, path=source, known=sorted(known))
        )
    keys = np.array(sorted(known), dtype=np.int64)
    values = np.array([known[int(k)] for k in keys], dtype=np.int64)
    labels = values[np.searchsorted(keys, raw)] if raw.size else raw
    return LabeledDataset(features=dataset.features, labels=labels, label_mapping=reference.label_mapping)


def build_dataset(features: np.ndarray, labels: np.ndarray) -> LabeledDataset:
    labels, mapping = remap_labels(labels)
    return LabeledDataset(features=features, labels=labels, label_mapping=mapping)


class CSVDatasetRepository(DatasetRepository):

    def read(self, path: str) -> LabeledDataset:
        """
        Parses a headered CSV. Blank lines are skipped; every other line must
        have one cell per header column. Errors name the 1-based line.

        :param path: str: CSV file
        :return: LabeledDataset: Records with contiguous labels
        """
        _check_exists(path)
        with open(path, newline="", encoding="utf-8") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header is None:
                raise DatasetFormatException(messages.EMPTY_DATASET)
            header = [h.strip() for h in header]
            if "label" not in header:
                raise DatasetFormatException(messages.MISSING_LABEL_COLUMN)
            label_index = header.index("label")
            columns = [(i, name) for i, name in enumerate(header) if i != label_index]
            rows, labels = [], []
            for cells in reader:
                line = reader.line_num
                if not cells or all(not c.strip() for c in cells):
                    continue
                if len(cells) != len(header):
                    raise DatasetFormatException(
                        messages.ROW_LENGTH_MISMATCH.format(
                            line=line, got=len(cells), expected=len(header)
                        )
                    )
                if not cells[label_index].strip():
                    raise DatasetFormatException(messages.MISSING_CELL.format(column="label", line=line))
                labels.append(_parse_label(cells[label_index], line))
                rows.append([_parse_value(cells[i], name, line) for i, name in columns])
        features = np.array(rows, dtype=np.float64).reshape(len(rows), len(columns))
        return build_dataset(features, np.array(labels, dtype=np.int64))

    def write(self, dataset: LabeledDataset, path: str) -> str:
        header = ["label"] + [f"x{j}" for j in range(dataset.n_features)]
        rows = (
            [int(label)] + [format_cell(v) for v in row]
            for label, row in zip(dataset.labels, dataset.features)
        )
        return report_repo.write_csv(path, header, rows)


class BinaryDatasetRepository(DatasetRepository):

    @staticmethod
    def encode(dataset: LabeledDataset) -> bytes:
        header = np.array(
            [(MAGIC, VERSION, dataset.n_records, dataset.n_features)], dtype=HEADER_DTYPE
        )
        return (
            header.tobytes()
            + dataset.labels.astype(LABEL_DTYPE).tobytes()
            + dataset.features.astype(DATA_DTYPE).tobytes()
        )

    @staticmethod
    def decode(payload: bytes) -> tuple[np.ndarray, np.ndarray]:
        if len(payload) < HEADER_DTYPE.itemsize:
            raise DatasetFormatException(
                messages.TRUNCATED_FILE.format(expected=HEADER_DTYPE.itemsize, got=len(payload))
            )
        header = np.frombuffer(payload, dtype=HEADER_DTYPE, count=1)[0]
        if header["magic"] != MAGIC:
            raise DatasetFormatException(messages.INVALID_MAGIC.format(magic=bytes(header["magic"])))
        if header["version"] != VERSION:
            raise DatasetFormatException(
                messages.UNSUPPORTED_VERSION.format(version=int(header["version"]))
            )
        n, f = int(header["n"]), int(header["f"])
        label_bytes = n * LABEL_DTYPE.itemsize
        expected = HEADER_DTYPE.itemsize + label_bytes + n * f * DATA_DTYPE.itemsize
        if len(payload) != expected:
            raise DatasetFormatException(
                messages.TRUNCATED_FILE.format(expected=expected, got=len(payload))
            )
        offset = HEADER_DTYPE.itemsize
        labels = np.frombuffer(payload, dtype=LABEL_DTYPE, count=n, offset=offset)
        features = np.frombuffer(
            payload, dtype=DATA_DTYPE, count=n * f, offset=offset + label_bytes
        ).reshape(n, f)
        if not np.all(np.isfinite(features)):
            raise NonFiniteValueException(messages.NON_FINITE_VALUES)
        return features.astype(np.float64), labels.astype(np.int64)

    def read(self, path: str) -> LabeledDataset:
        _check_exists(path)
        with open(path, "rb") as f:
            features, labels = self.decode(f.read())
        return build_dataset(features, labels)

    def write(self, dataset: LabeledDataset, path: str) -> str:
        atomic_write(path, self.encode(dataset))
        logger.info(messages.WRITTEN.format(path=path))
        return path


class CSVGraphRepository(GraphRepository):

    def read_edges(self, path: str) -> np.ndarray:
        """Edge list CSV with a header line followed by `src,dst` index pairs."""
        _check_exists(path)
        edges = []
        with open(path, newline="", encoding="utf-8") as f:
            reader = csv.reader(f)
            next(reader, None)
            for cells in reader:
                line = reader.line_num
                if not cells or all(not c.strip() for c in cells):
                    continue
                if len(cells) != 2:
                    raise DatasetFormatException(
                        messages.ROW_LENGTH_MISMATCH.format(line=line, got=len(cells), expected=2)
                    )
                try:
                    edges.append((int(cells[0]), int(cells[1])))
                except ValueError:
                    raise DatasetFormatException(
                        messages.NOT_A_NUMBER.format(value=",".join(cells), column="src,dst", line=line)
                    )
        return np.array(edges, dtype=np.int64).reshape(-1, 2)

    def read(self, nodes_path: str, edges_path: str) -> GraphData:
        nodes = ingest(nodes_path)
        edges = self.read_edges(edges_path)
        bad = np.flatnonzero(((edges < 0) | (edges >= nodes.n_records)).any(axis=1))
        if bad.size:
            row = int(bad[0])
            raise DatasetFormatException(
                messages.DANGLING_EDGE.format(
                    src=edges[row, 0], dst=edges[row, 1], line=row + 2, n=nodes.n_records
                )
            )
        return GraphData(nodes=nodes, edges=edges)


csv_dataset_repo = CSVDatasetRepository()
binary_dataset_repo = BinaryDatasetRepository()
graph_repo = CSVGraphRepository()


def repo_for(path: str) -> DatasetRepository:
    """Binary when the file starts with the LQMD magic or ends in .lqmd, CSV otherwise."""
    if os.path.exists(path):
        with open(path, "rb") as f:
            if f.read(len(MAGIC)) == MAGIC:
                return binary_dataset_repo
        return csv_dataset_repo
    return binary_dataset_repo if path.endswith(".lqmd") else csv_dataset_repo


def labels_path(path: str) -> str:
    return f"{path}.labels.json"


def ingest(path: str) -> LabeledDataset:
    """
    Reads a dataset file of either format. When labels had to be remapped the
    mapping is persisted as `<path>.labels.json`.
    """
    dataset = repo_for(path).read(path)
    if dataset.label_mapping:
        report_repo.write_json(labels_path(path), dataset.label_mapping)
    logger.info("Loaded %d records with %d features from %s", dataset.n_records, dataset.n_features, path)
    return dataset
