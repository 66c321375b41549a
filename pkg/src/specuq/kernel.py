"""Gaussian similarity, bandwidth heuristic, and normalized graph Laplacian.

All matrices are dense; the Gaussian kernel produces fully connected
similarity graphs and the data sizes of interest (up to a few thousand
points) make sparsification pointless.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial.distance import cdist

from .errors import (
    DegenerateDataError,
    InvalidConfigError,
    InvalidInputError,
    InvalidSimilarityError,
)

__all__ = [
    "DataSet",
    "SimilarityConfig",
    "LaplacianBundle",
    "gaussian_similarity",
    "mst_sigma",
    "similarity_matrix",
    "cross_similarity",
    "laplacian",
    "resolve_sigma",
]


@dataclass(frozen=True)
class DataSet:
    """A finite list of d-dimensional points with stable indices 0..n-1.

    ``labels`` carries optional integer cluster tags (generator ground truth).
    ``origin`` is filled for corrupted samples: the index of the surviving
    source point, or -1 for regenerated/additional points.
    """

    points: np.ndarray
    labels: np.ndarray | None = None
    origin: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InvalidInputError("points must form a non-empty (n, d) array")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("points must be finite")
        object.__setattr__(self, "points", pts)
        for name in ("labels", "origin"):
            value = getattr(self, name)
            if value is None:
                continue
            arr = np.asarray(value, dtype=int)
            if arr.shape != (pts.shape[0],):
                raise InvalidInputError(f"{name} must have one entry per point")
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class SimilarityConfig:
    """Kernel bandwidth selection.

    ``sigma=None`` selects the spanning-tree heuristic: the bandwidth is
    ``scale`` times the longest edge of a Euclidean minimum spanning tree of
    the reference set.  ``per_sample=True`` recomputes the heuristic on every
    corrupted sample instead of reusing the reference bandwidth.
    """

    sigma: float | None = None
    scale: float = 1.0
    per_sample: bool = False

    def __post_init__(self):
        if self.sigma is not None and not self.sigma > 0:
            raise InvalidConfigError("sigma must be positive")
        if not self.scale > 0:
            raise InvalidConfigError("scale must be positive")
        if self.per_sample and self.sigma is not None:
            raise InvalidConfigError(
                "per-sample bandwidth recomputation requires the spanning-tree "
                "heuristic (sigma=None)"
            )


@dataclass(frozen=True)
class LaplacianBundle:
    """Similarity matrix, node degrees and the symmetric normalized Laplacian.

    Invariants: ``K`` symmetric with unit diagonal, ``degrees`` strictly
    positive row sums of ``K``, and ``L = I - D^{-1/2} K D^{-1/2}`` symmetric
    with spectrum contained in [0, 2] and smallest eigenvalue 0.
    """

    K: np.ndarray
    degrees: np.ndarray
    L: np.ndarray

    @property
    def n(self) -> int:
        return self.K.shape[0]


def gaussian_similarity(x, y, sigma: float) -> float:
    """Gaussian kernel value exp(-||x - y||^2 / (2 sigma^2)).

    Symmetric, strictly positive, and equal to 1 exactly when x == y.
    """
    if not sigma > 0:
        raise InvalidInputError("sigma must be positive")
    xv = np.asarray(x, dtype=float).ravel()
    yv = np.asarray(y, dtype=float).ravel()
    if xv.shape != yv.shape:
        raise InvalidInputError(
            f"dimension mismatch: {xv.shape[0]} vs {yv.shape[0]}"
        )
    sq = float(np.sum((xv - yv) ** 2))
    return float(np.exp(-sq / (2.0 * sigma * sigma)))


def mst_sigma(X: DataSet, scale: float = 1.0) -> float:
    """Bandwidth heuristic: ``scale`` times the longest MST edge of ``X``.

    Deterministic even under distance ties, because all minimum spanning
    trees of a graph share the same multiset of edge weights.
    """
    if not scale > 0:
        raise InvalidInputError("scale must be positive")
    if len(X) < 2:
        raise DegenerateDataError("bandwidth heuristic needs at least 2 points")
    dist = cdist(X.points, X.points)
    tree = minimum_spanning_tree(dist)
    # csgraph drops zero-weight edges; no edges at all means every point
    # coincides and the heuristic bandwidth would be zero.
    if tree.nnz == 0:
        raise DegenerateDataError("all points identical; MST bandwidth is zero")
    longest = float(tree.data.max())
    if longest <= 0:
        raise DegenerateDataError("longest MST edge is zero")
    return scale * longest


def similarity_matrix(X: DataSet, sigma: float) -> np.ndarray:
    """Pairwise Gaussian similarity matrix of ``X``; symmetric, unit diagonal."""
    if not sigma > 0:
        raise InvalidInputError("sigma must be positive")
    sq = cdist(X.points, X.points, "sqeuclidean")
    return np.exp(-sq / (2.0 * sigma * sigma))


def cross_similarity(targets: np.ndarray, source: np.ndarray, sigma: float) -> np.ndarray:
    """Rectangular kernel matrix k(t, s) between two point arrays."""
    if not sigma > 0:
        raise InvalidInputError("sigma must be positive")
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    source = np.atleast_2d(np.asarray(source, dtype=float))
    if targets.shape[1] != source.shape[1]:
        raise InvalidInputError(
            f"dimension mismatch: targets have d={targets.shape[1]}, "
            f"source has d={source.shape[1]}"
        )
    sq = cdist(targets, source, "sqeuclidean")
    return np.exp(-sq / (2.0 * sigma * sigma))


def laplacian(K: np.ndarray) -> LaplacianBundle:
    """Symmetric normalized graph Laplacian L = I - D^{-1/2} K D^{-1/2}.

    ``K`` must be a square symmetric similarity matrix with strictly positive
    row sums (always true for the Gaussian kernel; the guard protects against
    foreign inputs).
    """
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise InvalidSimilarityError("similarity matrix must be square")
    degrees = K.sum(axis=1)
    if np.any(degrees <= 0):
        bad = int(np.argmax(degrees <= 0))
        raise InvalidSimilarityError(f"row {bad} of K has non-positive sum")
    inv_sqrt = 1.0 / np.sqrt(degrees)
    # Entrywise K_ij * s_i * s_j keeps L symmetric to the last bit.
    L = np.eye(K.shape[0]) - K * np.outer(inv_sqrt, inv_sqrt)
    return LaplacianBundle(K=K, degrees=degrees, L=L)


def resolve_sigma(X: DataSet, config: SimilarityConfig) -> float:
    """Explicit bandwidth if configured, MST heuristic otherwise."""
    if config.sigma is not None:
        return float(config.sigma)
    return mst_sigma(X, config.scale)
