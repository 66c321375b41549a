"""Monte Carlo accumulation of clustering samples and set-valued expectations.

Five quantities of interest are computed from a stream of gauged clustering
samples over a fixed reference set X:

* the per-point coverage function (probability of cluster membership),
* the expected misclustering rate E[|A_X symdiff A_sample|],
* the Vorob'ev expectation via its empirical Kovyazin construction,
* the oriented-distance-function (ODF) expectation, and
* the spectral expectation (zero superlevel set of the mean gauged levels).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InvalidInputError, NoSamplesError
from .kernel import DataSet

__all__ = [
    "ClusterSample",
    "Accumulator",
    "ExpectationReport",
    "odf_values",
    "accumulate",
    "coverage",
    "kovyazin_mean",
    "odf_expectation",
    "spectral_expectation",
    "finalize",
]


@dataclass(frozen=True)
class ClusterSample:
    """One gauged Monte Carlo realization of the random clustering of X.

    ``membership[i]`` is True iff point i falls in the gauged cluster,
    ``levels`` are the gauged extended-eigenfunction values on X (so
    ``membership == levels >= 0``), ``odf`` the oriented distance values of
    the membership set (signed infinities when one side is empty), and
    ``warned`` marks near-orthogonal gauging or a near-degenerate
    eigenvalue gap.
    """

    membership: np.ndarray
    levels: np.ndarray
    odf: np.ndarray
    sample_cardinality: int
    warned: bool = False

    def __post_init__(self):
        memb = np.asarray(self.membership, dtype=bool)
        levels = np.asarray(self.levels, dtype=float)
        odf = np.asarray(self.odf, dtype=float)
        if not (memb.shape == levels.shape == odf.shape) or memb.ndim != 1:
            raise InvalidInputError("membership, levels and odf must be equal-length vectors")
        object.__setattr__(self, "membership", memb)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "odf", odf)
        object.__setattr__(self, "sample_cardinality", int(self.sample_cardinality))
        object.__setattr__(self, "warned", bool(self.warned))


def odf_values(membership, X: DataSet) -> np.ndarray:
    """Oriented distance b_C(x) = dist(x, complement of C) - dist(x, C).

    Distances are Euclidean point-to-set distances within X; the distance to
    an empty set is +inf, so b is +inf everywhere when C = X and -inf
    everywhere when C is empty.  Points inside C have b >= 0.
    """
    memb = np.asarray(membership, dtype=bool)
    n = len(X)
    if memb.shape != (n,):
        raise InvalidInputError(f"membership length {memb.shape} does not match |X| = {n}")
    dist = cdist(X.points, X.points)
    if memb.any():
        d_in = dist[:, memb].min(axis=1)
    else:
        d_in = np.full(n, np.inf)
    if (~memb).any():
        d_out = dist[:, ~memb].min(axis=1)
    else:
        d_out = np.full(n, np.inf)
    return d_out - d_in


@dataclass
class Accumulator:
    """Running sums over clustering samples; mergeable for parallel workers.

    Integer fields are exactly order-independent.  Floating sums depend on
    addition order; reproducibility across worker counts is obtained by the
    caller merging partial accumulators in a fixed order.
    """

    size: int
    sample_count: int = 0
    coverage_counts: np.ndarray = field(default=None)  # type: ignore[assignment]
    level_sums: np.ndarray = field(default=None)  # type: ignore[assignment]
    odf_sums: np.ndarray = field(default=None)  # type: ignore[assignment]
    symdiff_sum: int = 0
    cardinality_sum: int = 0
    warn_count: int = 0

    def __post_init__(self):
        if self.size < 1:
            raise InvalidInputError("accumulator needs a positive reference size")
        if self.coverage_counts is None:
            self.coverage_counts = np.zeros(self.size, dtype=np.int64)
        if self.level_sums is None:
            self.level_sums = np.zeros(self.size, dtype=float)
        if self.odf_sums is None:
            self.odf_sums = np.zeros(self.size, dtype=float)

    def add(self, sample: ClusterSample, reference_membership) -> "Accumulator":
        ref = np.asarray(reference_membership, dtype=bool)
        if sample.membership.shape != (self.size,) or ref.shape != (self.size,):
            raise InvalidInputError("sample/reference length does not match accumulator size")
        self.coverage_counts += sample.membership
        self.level_sums += sample.levels
        with np.errstate(invalid="ignore"):  # +inf + -inf at one point -> nan
            self.odf_sums += sample.odf
        self.symdiff_sum += int(np.count_nonzero(sample.membership != ref))
        self.cardinality_sum += sample.sample_cardinality
        self.warn_count += int(sample.warned)
        self.sample_count += 1
        return self

    def merge(self, other: "Accumulator") -> "Accumulator":
        """Fold another accumulator into this one (caller fixes the order)."""
        if other.size != self.size:
            raise InvalidInputError("cannot merge accumulators of different sizes")
        self.coverage_counts += other.coverage_counts
        self.level_sums += other.level_sums
        with np.errstate(invalid="ignore"):
            self.odf_sums += other.odf_sums
        self.symdiff_sum += other.symdiff_sum
        self.cardinality_sum += other.cardinality_sum
        self.warn_count += other.warn_count
        self.sample_count += other.sample_count
        return self


def accumulate(acc: Accumulator, sample: ClusterSample, reference_membership) -> Accumulator:
    """Advance all running sums of ``acc`` by one sample (in place)."""
    return acc.add(sample, reference_membership)


def coverage(acc: Accumulator) -> np.ndarray:
    """Per-point empirical membership probability, in [0, 1]."""
    if acc.sample_count < 1:
        raise NoSamplesError("coverage requires at least one sample")
    return acc.coverage_counts / acc.sample_count


def kovyazin_mean(coverage_values, gamma: float) -> tuple[np.ndarray, float]:
    """Empirical Vorob'ev expectation with mean cardinality ``gamma``.

    The threshold is t* = inf{t in [0,1] : |{coverage >= t}| <= gamma},
    computed exactly over the distinct coverage values.  The returned index
    set S satisfies {coverage > t*} <= S <= {coverage >= t*} and has
    cardinality equal to gamma rounded to the nearest integer (ties broken
    downward); boundary points with coverage == t* are added in ascending
    index order.
    """
    cov = np.asarray(coverage_values, dtype=float)
    if cov.ndim != 1 or cov.size == 0:
        raise InvalidInputError("coverage must be a non-empty vector")
    if np.any(cov < -1e-12) or np.any(cov > 1 + 1e-12):
        raise InvalidInputError("coverage values must lie in [0, 1]")
    n = cov.size
    if not 0 <= gamma <= n:
        raise InvalidInputError("mean cardinality must lie in [0, |X|]")

    distinct = np.unique(cov)
    if n <= gamma:
        t_star = 0.0
    else:
        # |{coverage >= t}| is piecewise constant between consecutive distinct
        # values, so the infimum is either 0 or one of those values.
        t_star = float(distinct[-1])
        for k in range(distinct.size - 1):
            if np.count_nonzero(cov >= distinct[k + 1]) <= gamma:
                t_star = float(distinct[k])
                break

    kappa = math.ceil(gamma - 0.5)  # nearest integer, half rounds down
    mandatory = np.flatnonzero(cov > t_star)
    if mandatory.size >= kappa:
        if mandatory.size > kappa:
            warnings.warn(
                f"Vorob'ev target cardinality {kappa} is below the "
                f"{mandatory.size} mandatory points; keeping all of them",
                stacklevel=2,
            )
        return mandatory, t_star
    boundary = np.flatnonzero(cov == t_star)
    fill = boundary[: kappa - mandatory.size]
    return np.sort(np.concatenate([mandatory, fill])), t_star


def odf_expectation(acc: Accumulator) -> np.ndarray:
    """Indices where the mean oriented distance is >= 0.

    Points whose mean is not finite (some sample had an empty cluster or
    complement) are included only at +inf and reported via a warning.
    """
    if acc.sample_count < 1:
        raise NoSamplesError("ODF expectation requires at least one sample")
    mean_odf = acc.odf_sums / acc.sample_count
    flagged = np.flatnonzero(~np.isfinite(mean_odf))
    if flagged.size:
        warnings.warn(
            f"mean ODF is not finite at {flagged.size} point(s): {flagged.tolist()}",
            stacklevel=2,
        )
    return np.flatnonzero(mean_odf >= 0)


def spectral_expectation(acc: Accumulator) -> np.ndarray:
    """Indices where the mean gauged level value is >= 0."""
    if acc.sample_count < 1:
        raise NoSamplesError("spectral expectation requires at least one sample")
    return np.flatnonzero(acc.level_sums / acc.sample_count >= 0)


@dataclass(frozen=True)
class ExpectationReport:
    """All estimated quantities for one corruption level.

    ``mean_levels_unit`` is the mean gauged level vector rescaled to unit
    Euclidean norm (zero when the mean vanishes); the raw mean is kept in
    ``mean_levels``.  ``odf_flagged`` lists points whose mean ODF is not
    finite.  The Vorob'ev set satisfies
    {coverage > t_star} <= vorobev_set <= {coverage >= t_star}.
    """

    coverage: np.ndarray
    expected_misclustering_rate: float
    vorobev_set: np.ndarray
    odf_set: np.ndarray
    spectral_set: np.ndarray
    t_star: float
    mean_levels: np.ndarray
    mean_odf: np.ndarray
    mean_levels_unit: np.ndarray
    odf_flagged: np.ndarray
    M: int
    warn_count: int


def finalize(acc: Accumulator, reference_membership) -> ExpectationReport:
    """Assemble the expectation report from a filled accumulator."""
    if acc.sample_count < 1:
        raise NoSamplesError("cannot finalize an empty accumulator")
    ref = np.asarray(reference_membership, dtype=bool)
    if ref.shape != (acc.size,):
        raise InvalidInputError("reference membership length does not match accumulator")
    cov = coverage(acc)
    gamma = acc.cardinality_sum / acc.sample_count
    vorobev_set, t_star = kovyazin_mean(cov, gamma)
    mean_levels = acc.level_sums / acc.sample_count
    mean_odf = acc.odf_sums / acc.sample_count
    norm = float(np.linalg.norm(mean_levels))
    unit = mean_levels / norm if norm > 0 else np.zeros_like(mean_levels)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        odf_set = odf_expectation(acc)
    return ExpectationReport(
        coverage=cov,
        expected_misclustering_rate=acc.symdiff_sum / acc.sample_count,
        vorobev_set=vorobev_set,
        odf_set=odf_set,
        spectral_set=spectral_expectation(acc),
        t_star=t_star,
        mean_levels=mean_levels,
        mean_odf=mean_odf,
        mean_levels_unit=unit,
        odf_flagged=np.flatnonzero(~np.isfinite(mean_odf)),
        M=acc.sample_count,
        warn_count=acc.warn_count,
    )
