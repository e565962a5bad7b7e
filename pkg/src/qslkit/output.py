"""Delimited output.

Tables are the data contract of every experiment: a name, a header row,
and plain tuples. CSV cells carry full double precision (17 significant
digits, '.' decimal, UTF-8); JSON mirrors the same rows. Missing values
(None) serialize as nan so numeric columns stay loadable with numpy.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

__all__ = ["Table", "format_value", "write_csv", "write_json", "table_payload"]


@dataclass(frozen=True)
class Table:
    name: str
    header: tuple[str, ...]
    rows: list[tuple]

    def __post_init__(self) -> None:
        for row in self.rows:
            if len(row) != len(self.header):
                raise ValueError(
                    f"table {self.name!r}: row width {len(row)} does not "
                    f"match header width {len(self.header)}"
                )

    def column(self, name: str) -> np.ndarray:
        i = self.header.index(name)
        return np.array([_numeric(row[i]) for row in self.rows])


def _numeric(v: Any) -> float:
    if v is None:
        return math.nan
    if isinstance(v, bool):
        return 1.0 if v else 0.0
    if isinstance(v, str):
        return math.nan
    return float(v)


def format_value(v: Any) -> str:
    if v is None:
        return "nan"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def write_csv(path: str | Path, table: Table) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(table.header)
        for row in table.rows:
            writer.writerow([format_value(v) for v in row])
    return path


def _jsonable(v: Any) -> Any:
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return str(v)


def table_payload(table: Table) -> dict:
    return {
        "name": table.name,
        "header": list(table.header),
        "rows": [[_jsonable(v) for v in row] for row in table.rows],
    }


def write_json(path: str | Path, payload: Any) -> Path:
    """Serialize a payload (tables, summaries, plain dicts) as strict JSON.

    Non-finite floats become the strings "nan"/"inf"/"-inf" so the files
    stay valid for any JSON parser.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(payload), fh, indent=2, allow_nan=False)
        fh.write("\n")
    return path
