"""Fiedler pairs, bi-clustering, out-of-sample extension, and sign gauging.

The bi-clustering of a data set is read off the sign pattern of the
eigenvector of the second-smallest Laplacian eigenvalue.  That eigenvector
extends to an eigenfunction defined on the whole data space, which makes
clusterings computed on one set evaluable on any other set, regardless of
cardinality.  Because eigenvector signs are arbitrary, every realization is
gauged against a fixed reference direction before it enters any statistic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EigenvalueOneError, InvalidInputError, NumericError
from .estimators import ClusterSample, odf_values
from .kernel import DataSet, LaplacianBundle, cross_similarity, laplacian, similarity_matrix

__all__ = [
    "FiedlerPair",
    "ExtendedEigenfunction",
    "GaugeContext",
    "fiedler_pair",
    "bi_cluster",
    "extend",
    "gauge_sign",
    "cluster_reference_under_sample",
]

# Below this eigenvalue gap the second eigenvector is numerically ambiguous.
DEGENERATE_GAP = 1e-10

EIGEN_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class FiedlerPair:
    """Second-smallest eigenvalue of a normalized Laplacian and its eigenvector.

    ``vector`` has unit Euclidean norm with arbitrary sign (gauging is a
    separate step).  ``gap`` is the distance to the third-smallest eigenvalue
    (+inf for 2x2 problems); ``degenerate`` flags a gap below 1e-10, which is
    reported but never fatal.
    """

    value: float
    vector: np.ndarray
    gap: float
    degenerate: bool = False


@dataclass(frozen=True)
class ExtendedEigenfunction:
    """Closure data for evaluating an eigenfunction away from its sample.

    ``source_degrees`` holds the sample-measure degrees
    d(y) = mean_z k(y, z) over the source set; ``value`` must stay away from
    1, where the representation is singular.
    """

    source_points: np.ndarray
    vector: np.ndarray
    value: float
    source_degrees: np.ndarray
    sigma: float

    def __post_init__(self):
        if abs(1.0 - self.value) <= 1e-8:
            raise EigenvalueOneError(
                "eigenfunction representation is singular at eigenvalue 1"
            )
        if np.any(self.source_degrees <= 0):
            raise InvalidInputError("source degrees must be strictly positive")

    @classmethod
    def from_clustering(
        cls,
        source: DataSet,
        sigma: float,
        bundle: LaplacianBundle,
        pair: FiedlerPair,
    ) -> "ExtendedEigenfunction":
        return cls(
            source_points=source.points,
            vector=pair.vector,
            value=pair.value,
            source_degrees=bundle.degrees / len(source),
            sigma=sigma,
        )


@dataclass(frozen=True)
class GaugeContext:
    """Reference direction and warning tolerance for sign gauging.

    A realization whose normalized inner product with ``reference_levels``
    falls below ``tolerance`` in magnitude is close to orthogonal and the two
    clusterings are hardly comparable; such samples are flagged, not dropped.
    """

    reference_levels: np.ndarray
    tolerance: float = 1e-2

    def __post_init__(self):
        ref = np.asarray(self.reference_levels, dtype=float)
        if ref.ndim != 1 or ref.size == 0:
            raise InvalidInputError("reference levels must be a non-empty vector")
        if not np.linalg.norm(ref) > 0:
            raise InvalidInputError("reference levels must have nonzero norm")
        if self.tolerance < 0:
            raise InvalidInputError("gauge tolerance must be nonnegative")
        object.__setattr__(self, "reference_levels", ref)


def fiedler_pair(bundle: LaplacianBundle) -> FiedlerPair:
    """Eigenpair of the second-smallest eigenvalue of ``bundle.L``.

    Uses a full dense symmetric eigendecomposition; robustness matters more
    than speed at the problem sizes considered here.
    """
    n = bundle.n
    if n < 2:
        raise InvalidInputError("Fiedler pair requires at least 2 points")
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(bundle.L)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigendecomposition failed: {exc}") from exc
    value = float(eigenvalues[1])
    vector = eigenvectors[:, 1]
    if value < -1e-8 or value > 2 + 1e-8:
        raise NumericError(f"eigenvalue {value} outside [0, 2]")
    residual = float(np.linalg.norm(bundle.L @ vector - value * vector))
    if residual > EIGEN_RESIDUAL_TOL:
        raise NumericError(f"eigenpair residual {residual:.3e} too large")
    gap = float(eigenvalues[2] - eigenvalues[1]) if n > 2 else np.inf
    return FiedlerPair(
        value=value,
        vector=vector,
        gap=gap,
        degenerate=gap < DEGENERATE_GAP,
    )


def bi_cluster(levels) -> tuple[np.ndarray, np.ndarray]:
    """Split indices by sign: (levels >= 0, levels < 0).

    Zero levels deterministically join the first cluster.
    """
    values = np.asarray(levels, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise InvalidInputError("levels must be a non-empty vector")
    inside = values >= 0
    return np.flatnonzero(inside), np.flatnonzero(~inside)


def extend(ef: ExtendedEigenfunction, targets, normalized: bool = True) -> np.ndarray:
    """Evaluate the extended eigenfunction at arbitrary target points.

    With ``normalized=True`` (default) the kernel is degree-normalized,
    h(x, y) = k(x, y) / sqrt(d(x) d(y)), under which evaluation at the source
    points reproduces the eigenvector exactly.  ``normalized=False`` keeps the
    raw-kernel variant for comparison; it rescales the restriction.
    """
    pts = targets.points if isinstance(targets, DataSet) else np.atleast_2d(np.asarray(targets, dtype=float))
    if abs(1.0 - ef.value) <= 1e-8:
        raise EigenvalueOneError("eigenfunction representation is singular at eigenvalue 1")
    kernel = cross_similarity(pts, ef.source_points, ef.sigma)
    n_source = ef.source_points.shape[0]
    if normalized:
        target_degrees = kernel.mean(axis=1)
        if np.any(target_degrees <= 0):
            raise NumericError(
                "a target point has zero kernel degree with respect to the source set"
            )
        kernel = kernel / np.sqrt(np.outer(target_degrees, ef.source_degrees))
    return (kernel @ ef.vector) / ((1.0 - ef.value) * n_source)


def gauge_sign(levels, ctx: GaugeContext) -> tuple[int, bool]:
    """Sign aligning ``levels`` with the gauge reference, plus a warning flag.

    Returns +1 when the inner product with the reference is >= 0 and -1
    otherwise; the flag is set when the normalized inner product is smaller
    in magnitude than ``ctx.tolerance`` (near-orthogonal realization).
    """
    values = np.asarray(levels, dtype=float)
    ref = ctx.reference_levels
    if values.shape != ref.shape:
        raise InvalidInputError("levels and reference must have equal length")
    norm = float(np.linalg.norm(values))
    if not norm > 0:
        raise InvalidInputError("cannot gauge a zero level vector")
    inner = float(values @ ref)
    sign = 1 if inner >= 0 else -1
    cosine = abs(inner) / (norm * float(np.linalg.norm(ref)))
    return sign, cosine < ctx.tolerance


def cluster_reference_under_sample(
    X: DataSet,
    sample: DataSet,
    sigma: float,
    ctx: GaugeContext,
    normalized: bool = True,
) -> ClusterSample:
    """Gauged clustering of the reference set X induced by a sample set.

    Clusters the sample spectrally, extends its eigenfunction to X, gauges
    the sign against the context and thresholds at zero.  The returned sample
    carries the gauged level values, the membership bits over X and the
    oriented distances of the membership set.
    """
    if len(sample) < 2:
        raise InvalidInputError("sample must contain at least 2 points")
    if sample.dimension != X.dimension:
        raise InvalidInputError("sample and reference dimensions differ")
    bundle = laplacian(similarity_matrix(sample, sigma))
    pair = fiedler_pair(bundle)
    ef = ExtendedEigenfunction.from_clustering(sample, sigma, bundle, pair)
    levels = extend(ef, X, normalized=normalized)
    sign, gauge_warned = gauge_sign(levels, ctx)
    gauged = sign * levels
    membership = gauged >= 0
    return ClusterSample(
        membership=membership,
        levels=gauged,
        odf=odf_values(membership, X),
        sample_cardinality=int(np.count_nonzero(membership)),
        warned=bool(gauge_warned or pair.degenerate),
    )
