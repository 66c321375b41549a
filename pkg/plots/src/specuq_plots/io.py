"""Readers for the experiment output bundle (points.csv, report CSVs, summary.json).

These consume exactly the file schemas the experiment CLI writes; nothing
here imports the experiment package itself.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "SchemaError",
    "PointTable",
    "ReportTable",
    "read_points",
    "read_report",
    "read_summary",
    "discover_reports",
]

REPORT_COLUMNS = (
    "index",
    "coverage",
    "mean_level",
    "mean_odf",
    "in_vorobev",
    "in_odf_set",
    "in_spectral_set",
    "in_reference_cluster",
)

_REPORT_NAME = re.compile(r"report_eps_(?P<eps>[0-9.eE+-]+)\.csv$")


class SchemaError(Exception):
    """An input file does not match the experiment CLI's schema."""


@dataclass(frozen=True)
class PointTable:
    x: np.ndarray
    y: np.ndarray
    labels: np.ndarray | None


@dataclass(frozen=True)
class ReportTable:
    epsilon: float
    columns: dict[str, np.ndarray]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]


def _read_rows(path: Path) -> tuple[list[str], list[list[str]]]:
    if not path.exists():
        raise SchemaError(f"missing input file {path}")
    with path.open(newline="", encoding="utf-8") as handle:
        rows = [row for row in csv.reader(handle) if row]
    if len(rows) < 2:
        raise SchemaError(f"{path}: no data rows")
    return rows[0], rows[1:]


def read_points(path: Path) -> PointTable:
    """Scatter coordinates for plotting: the PCA columns when present,
    otherwise the first two raw coordinates (y = 0 for 1-d data)."""
    header, rows = _read_rows(path)
    if "x0" not in header:
        raise SchemaError(f"{path}: missing column 'x0'")
    if "pca_x" in header:
        x_col, y_col = header.index("pca_x"), header.index("pca_y")
    else:
        x_col = header.index("x0")
        y_col = header.index("x1") if "x1" in header else None
    label_col = header.index("label") if "label" in header else None

    x, y, labels = [], [], []
    for row in rows:
        x.append(float(row[x_col]))
        y.append(float(row[y_col]) if y_col is not None else 0.0)
        if label_col is not None and row[label_col] != "":
            labels.append(int(row[label_col]))
    label_arr = np.asarray(labels) if len(labels) == len(rows) else None
    return PointTable(x=np.asarray(x), y=np.asarray(y), labels=label_arr)


def read_report(path: Path, epsilon: float | None = None) -> ReportTable:
    header, rows = _read_rows(path)
    for required in REPORT_COLUMNS:
        if required not in header:
            raise SchemaError(f"{path}: missing column '{required}'")
    if epsilon is None:
        match = _REPORT_NAME.search(path.name)
        if not match:
            raise SchemaError(f"{path}: cannot infer noise level from file name")
        epsilon = float(match.group("eps"))
    columns: dict[str, np.ndarray] = {}
    for name in REPORT_COLUMNS:
        col = header.index(name)
        try:
            columns[name] = np.asarray([float(row[col]) for row in rows])
        except ValueError as exc:
            raise SchemaError(f"{path}: column '{name}' is not numeric: {exc}") from exc
    return ReportTable(epsilon=epsilon, columns=columns)


def discover_reports(directory: Path) -> list[ReportTable]:
    """All report CSVs in a directory, sorted by noise level."""
    reports = [read_report(path) for path in directory.glob("report_eps_*.csv")]
    if not reports:
        raise SchemaError(f"no report_eps_*.csv files in {directory}")
    return sorted(reports, key=lambda table: table.epsilon)


def read_summary(directory: Path) -> dict:
    path = directory / "summary.json"
    if not path.exists():
        raise SchemaError(f"missing input file {path}")
    try:
        summary = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from exc
    if "reports" not in summary:
        raise SchemaError(f"{path}: missing key 'reports'")
    for entry in summary["reports"]:
        for key in ("epsilon", "expected_misclustering_rate"):
            if key not in entry:
                raise SchemaError(f"{path}: report entry missing key '{key}'")
    return summary
