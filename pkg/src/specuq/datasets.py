"""Synthetic reference-data generators, CSV ingestion, and PCA projection."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corruption import ClusterSampler, RegenerationSource
from .errors import (
    CSVParseError,
    DegenerateDataError,
    InvalidConfigError,
    InvalidInputError,
)
from .kernel import DataSet

__all__ = [
    "GeneratorSpec",
    "gen_point_in_circle",
    "gen_half_circles",
    "lower_half_circle",
    "upper_half_circle",
    "point_in_circle_samplers",
    "half_circle_samplers",
    "load_csv",
    "pca_project",
    "make_dataset",
    "make_regeneration_source",
]

GENERATOR_KINDS = ("point_in_circle", "half_circles", "csv")

NORMALIZATIONS = ("zscore", "minmax", "none")

# Second parameter of the Gaussian spreads used by the generators.  The
# conventions below interpret it either as a variance or directly as a
# standard deviation; the generators default to the variance reading.
RING_RADIUS_MEAN = 2.5
RING_RADIUS_SPREAD = 0.25
HALF_CIRCLE_SPREAD = 0.2


def _std(spread: float, convention: str) -> float:
    if convention == "variance":
        return math.sqrt(spread)
    if convention == "std":
        return float(spread)
    raise InvalidConfigError(f"unknown Gaussian parameter convention {convention!r}")


@dataclass(frozen=True)
class GeneratorSpec:
    """How to obtain the reference data set.

    ``m`` is the cluster-size parameter of the synthetic kinds; CSV data is
    selected with ``kind='csv'`` plus a path, normalization mode and a flag
    for a trailing integer label column.
    """

    kind: str = "point_in_circle"
    m: int = 100
    seed: int = 0
    csv_path: str | None = None
    normalization: str = "zscore"
    label_column: bool = False
    param_convention: str = "variance"

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise InvalidConfigError(f"unknown generator kind {self.kind!r}")
        if self.kind != "csv" and self.m < 1:
            raise InvalidConfigError("cluster size parameter m must be >= 1")
        if self.kind == "csv" and not self.csv_path:
            raise InvalidConfigError("csv generator requires csv_path")
        if self.normalization not in NORMALIZATIONS:
            raise InvalidConfigError(f"unknown normalization {self.normalization!r}")
        if self.param_convention not in ("variance", "std"):
            raise InvalidConfigError(
                f"unknown Gaussian parameter convention {self.param_convention!r}"
            )


def _sample_blob(count: int, rng: np.random.Generator) -> np.ndarray:
    return rng.normal(0.0, 1.0, size=(count, 2))


def _sample_ring(count: int, rng: np.random.Generator, convention: str) -> np.ndarray:
    radius = rng.normal(RING_RADIUS_MEAN, _std(RING_RADIUS_SPREAD, convention), size=count)
    angle = rng.uniform(0.0, 2.0 * np.pi, size=count)
    return np.column_stack((radius * np.cos(angle), radius * np.sin(angle)))


def lower_half_circle(x):
    """Mean curve of the first half-circle cluster: y = 0.1 - 1.3 sin(x)."""
    return 0.1 - 1.3 * np.sin(x)


def upper_half_circle(x):
    """Mean curve of the second half-circle cluster: y = 1.3 sin(x - 0.4 pi)."""
    return 1.3 * np.sin(x - 0.4 * np.pi)


def _sample_lower_arc(count: int, rng: np.random.Generator, convention: str) -> np.ndarray:
    x = rng.uniform(0.0, np.pi, size=count)
    y = lower_half_circle(x) + rng.normal(0.0, _std(HALF_CIRCLE_SPREAD, convention), size=count)
    return np.column_stack((x, y))


def _sample_upper_arc(count: int, rng: np.random.Generator, convention: str) -> np.ndarray:
    x = rng.uniform(0.4 * np.pi, 1.4 * np.pi, size=count)
    y = upper_half_circle(x) + rng.normal(0.0, _std(HALF_CIRCLE_SPREAD, convention), size=count)
    return np.column_stack((x, y))


def gen_point_in_circle(
    m: int, rng: np.random.Generator, param_convention: str = "variance"
) -> DataSet:
    """Gaussian blob inside a ring: m blob points (label 1), 2m ring points (label 2).

    The blob is standard normal in the plane; ring points are
    (r cos phi, r sin phi) with r ~ N(2.5, 0.25) and phi uniform on [0, 2 pi).
    """
    if m < 1:
        raise InvalidInputError("m must be >= 1")
    blob = _sample_blob(m, rng)
    ring = _sample_ring(2 * m, rng, param_convention)
    labels = np.concatenate([np.ones(m, dtype=int), np.full(2 * m, 2, dtype=int)])
    return DataSet(points=np.vstack([blob, ring]), labels=labels)


def gen_half_circles(
    m: int, rng: np.random.Generator, param_convention: str = "variance"
) -> DataSet:
    """Two entangled half circles with m points each (labels 1 and 2).

    Both arcs carry additive N(0, 0.2) vertical noise around the mean curves
    ``lower_half_circle`` and ``upper_half_circle``.
    """
    if m < 1:
        raise InvalidInputError("m must be >= 1")
    lower = _sample_lower_arc(m, rng, param_convention)
    upper = _sample_upper_arc(m, rng, param_convention)
    labels = np.concatenate([np.ones(m, dtype=int), np.full(m, 2, dtype=int)])
    return DataSet(points=np.vstack([lower, upper]), labels=labels)


def point_in_circle_samplers(param_convention: str = "variance") -> dict[int, ClusterSampler]:
    """Per-cluster samplers matching ``gen_point_in_circle``."""
    return {
        1: _sample_blob,
        2: lambda count, rng: _sample_ring(count, rng, param_convention),
    }


def half_circle_samplers(param_convention: str = "variance") -> dict[int, ClusterSampler]:
    """Per-cluster samplers matching ``gen_half_circles``."""
    return {
        1: lambda count, rng: _sample_lower_arc(count, rng, param_convention),
        2: lambda count, rng: _sample_upper_arc(count, rng, param_convention),
    }


def load_csv(
    path: str | Path,
    normalization: str = "zscore",
    label_column: bool = False,
) -> DataSet:
    """Load a rectangular numeric CSV and normalize each feature column.

    The first row may be a header (detected by failing to parse as numbers).
    With ``label_column`` the trailing column is read as integer cluster
    labels.  ``zscore`` maps each column to zero mean and unit population
    standard deviation, ``minmax`` affinely onto [0, 1]; constant columns are
    rejected for either mode.
    """
    if normalization not in NORMALIZATIONS:
        raise InvalidConfigError(f"unknown normalization {normalization!r}")
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        rows = [row for row in csv.reader(handle) if row]
    if not rows:
        raise CSVParseError(f"{path}: file contains no rows")

    start = 0
    if any(_parse_cell(cell) is None for cell in rows[0]):
        start = 1  # header row
    if start >= len(rows):
        raise CSVParseError(f"{path}: no data rows after header")

    width = len(rows[start])
    data: list[list[float]] = []
    for line_no, row in enumerate(rows[start:], start=start + 1):
        if len(row) != width:
            raise CSVParseError(
                f"{path}: row {line_no} has {len(row)} cells, expected {width}"
            )
        parsed = []
        for col_no, cell in enumerate(row, start=1):
            value = _parse_cell(cell)
            if value is None:
                raise CSVParseError(
                    f"{path}: non-numeric value {cell!r} at row {line_no}, column {col_no}"
                )
            parsed.append(value)
        data.append(parsed)

    matrix = np.asarray(data, dtype=float)
    labels = None
    if label_column:
        if matrix.shape[1] < 2:
            raise CSVParseError(f"{path}: label column requested but only one column present")
        labels = matrix[:, -1].astype(int)
        matrix = matrix[:, :-1]
    return DataSet(points=_normalize_columns(matrix, normalization), labels=labels)


def _parse_cell(cell: str) -> float | None:
    try:
        return float(cell)
    except ValueError:
        return None


def _normalize_columns(matrix: np.ndarray, mode: str) -> np.ndarray:
    if mode == "none":
        return matrix
    if mode == "zscore":
        std = matrix.std(axis=0)
        degenerate = np.flatnonzero(std <= 0)
        if degenerate.size:
            raise DegenerateDataError(
                f"column {int(degenerate[0]) + 1} is constant; z-score normalization impossible"
            )
        return (matrix - matrix.mean(axis=0)) / std
    spread = matrix.max(axis=0) - matrix.min(axis=0)
    degenerate = np.flatnonzero(spread <= 0)
    if degenerate.size:
        raise DegenerateDataError(
            f"column {int(degenerate[0]) + 1} is constant; min-max normalization impossible"
        )
    return (matrix - matrix.min(axis=0)) / spread


def pca_project(X: DataSet, k: int = 2) -> DataSet:
    """Project centered data on the top-k principal directions.

    Component signs are fixed by making the largest-magnitude loading of each
    direction positive, so the projection is deterministic.  Components whose
    variance is negligible relative to the leading one are rejected.
    """
    if len(X) < 2:
        raise InvalidInputError("PCA requires at least 2 points")
    if X.dimension < k:
        raise InvalidInputError(f"cannot extract {k} components from d={X.dimension}")
    centered = X.points - X.points.mean(axis=0)
    cov = np.atleast_2d(np.cov(centered, rowvar=False, ddof=1))
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    order = np.argsort(eigenvalues)[::-1][:k]
    leading = float(eigenvalues[order[0]])
    if leading <= 0:
        raise DegenerateDataError("data has zero variance; PCA undefined")
    for rank, idx in enumerate(order):
        if eigenvalues[idx] < 1e-12 * leading:
            raise DegenerateDataError(
                f"principal component {rank + 1} is degenerate "
                f"(variance ratio {float(eigenvalues[idx]) / leading:.2e})"
            )
    components = eigenvectors[:, order]
    for j in range(components.shape[1]):
        col = components[:, j]
        if col[int(np.argmax(np.abs(col)))] < 0:
            components[:, j] = -col
    return DataSet(points=centered @ components, labels=X.labels)


def make_dataset(spec: GeneratorSpec) -> DataSet:
    """Materialize the reference data set described by a generator spec."""
    if spec.kind == "csv":
        return load_csv(spec.csv_path, spec.normalization, spec.label_column)
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "point_in_circle":
        return gen_point_in_circle(spec.m, rng, spec.param_convention)
    return gen_half_circles(spec.m, rng, spec.param_convention)


def make_regeneration_source(spec: GeneratorSpec) -> RegenerationSource:
    """Regeneration source matching a generator spec.

    Synthetic kinds regenerate from their own cluster distributions; CSV data
    falls back to bootstrap resampling.
    """
    if spec.kind == "point_in_circle":
        return RegenerationSource.from_samplers(point_in_circle_samplers(spec.param_convention))
    if spec.kind == "half_circles":
        return RegenerationSource.from_samplers(half_circle_samplers(spec.param_convention))
    return RegenerationSource.bootstrap()
