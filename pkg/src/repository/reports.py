import csv
import io
import json
import logging
import math
import os
import tempfile
from typing import Any, Iterable

import numpy as np

from src.conf import messages
from src.repository.abstract_repos import ReportRepository

logger = logging.getLogger(__name__)


def atomic_write(path: str, payload: bytes) -> str:
    """Writes to a temp file in the target directory, then renames over `path`."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(payload)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
    return path


def format_cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    if value is None:
        return ""
    return str(value)


def jsonable(value: Any) -> Any:
    """Plain JSON values; NaN becomes null so the output stays strict JSON."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) else value
    if isinstance(value, np.integer):
        return int(value)
    return value


class FileReportRepository(ReportRepository):

    def write_csv(self, path: str, header: list[str], rows: Iterable[Iterable[Any]]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])
        atomic_write(path, buffer.getvalue().encode("utf-8"))
        logger.info(messages.WRITTEN.format(path=path))
        return path

    def write_json(self, path: str, document: Any) -> str:
        text = json.dumps(jsonable(document), sort_keys=True, indent=2, allow_nan=False)
        atomic_write(path, (text + "\n").encode("utf-8"))
        logger.info(messages.WRITTEN.format(path=path))
        return path


report_repo = FileReportRepository()
