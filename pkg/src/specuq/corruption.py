"""Random corruption of a reference data set with reproducible streams.

A corrupted sample is the union of two parts: the survivors of a per-cluster
random deletion, each perturbed by additive Gaussian noise, and a set of
regenerated or additional points.  Every sample is a pure function of
(master_seed, sample_index), so Monte Carlo runs reproduce bit-exactly no
matter how samples are scheduled across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import EmptySampleError, InvalidConfigError, InvalidInputError
from .kernel import DataSet

__all__ = [
    "CorruptionConfig",
    "RegenerationSource",
    "sample_stream",
    "corrupt",
]

ClusterSampler = Callable[[int, np.random.Generator], np.ndarray]


@dataclass(frozen=True)
class CorruptionConfig:
    """Parameters of the corruption process.

    Per cluster, a deletion fraction is drawn uniformly from
    ``deletion_range`` and that share of points is removed (count rounded
    half away from zero).  Survivors receive iid N(0, noise_std^2 I) noise.
    With ``regenerate`` the deleted points are replaced by fresh draws;
    ``additional_count`` adds that many extra points beyond regeneration.
    ``per_cluster=False`` draws a single deletion fraction for the whole set.
    """

    deletion_range: tuple[float, float] = (0.0, 0.0)
    noise_std: float = 0.0
    regenerate: bool = True
    master_seed: int = 0
    per_cluster: bool = True
    additional_count: int = 0

    def __post_init__(self):
        lo, hi = self.deletion_range
        if not (0 <= lo <= hi <= 1):
            raise InvalidConfigError("deletion_range must satisfy 0 <= lo <= hi <= 1")
        object.__setattr__(self, "deletion_range", (float(lo), float(hi)))
        if self.noise_std < 0:
            raise InvalidConfigError("noise_std must be nonnegative")
        if self.additional_count < 0:
            raise InvalidConfigError("additional_count must be nonnegative")


@dataclass(frozen=True)
class RegenerationSource:
    """Where replacement and additional points come from.

    Exactly one variant is active: ``cluster_samplers`` maps a cluster label
    to a sampler drawing fresh points from that cluster's distribution
    (synthetic data), while the bootstrap variant resamples the reference set
    uniformly with replacement and perturbs the copies with the configured
    noise (data without a generative model).
    """

    cluster_samplers: Mapping[int, ClusterSampler] | None = None
    use_bootstrap: bool = False

    def __post_init__(self):
        if (self.cluster_samplers is None) == (not self.use_bootstrap):
            raise InvalidConfigError(
                "exactly one of cluster_samplers / bootstrap must be selected"
            )

    @classmethod
    def from_samplers(cls, samplers: Mapping[int, ClusterSampler]) -> "RegenerationSource":
        return cls(cluster_samplers=dict(samplers), use_bootstrap=False)

    @classmethod
    def bootstrap(cls) -> "RegenerationSource":
        return cls(cluster_samplers=None, use_bootstrap=True)


def sample_stream(master_seed: int, sample_index: int) -> np.random.Generator:
    """Independent random stream for one Monte Carlo sample.

    Counter-based: the stream is derived from (master_seed, sample_index)
    alone, so distinct indices give statistically independent streams and
    parallel workers need no coordination.
    """
    if sample_index < 0:
        raise InvalidInputError("sample_index must be nonnegative")
    seq = np.random.SeedSequence(
        entropy=int(master_seed) & 0xFFFFFFFFFFFFFFFF,
        spawn_key=(int(sample_index),),
    )
    return np.random.default_rng(seq)


def _round_half_away(x: float) -> int:
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


def _deletion_groups(X: DataSet, cfg: CorruptionConfig) -> list[np.ndarray]:
    """Index groups over which deletion fractions are drawn, in label order."""
    if cfg.per_cluster and X.labels is not None:
        return [np.flatnonzero(X.labels == lab) for lab in np.unique(X.labels)]
    if cfg.per_cluster and X.labels is None and cfg.deletion_range[1] > 0:
        raise InvalidConfigError(
            "per-cluster deletion requested but the data set carries no labels"
        )
    return [np.arange(len(X))]


def corrupt(
    X: DataSet,
    cfg: CorruptionConfig,
    src: RegenerationSource,
    sample_index: int,
) -> DataSet:
    """Draw one corrupted sample of ``X``.

    Stream consumption order is fixed: deletion draws (fraction, then index
    choice, per group in ascending label order), regeneration draws (same
    group order; bootstrap resampling in one batch), additional-point draws,
    and finally noise draws for the survivors in ascending point index.

    The result keeps labels where known and carries an origin map: the index
    of the surviving source point, or -1 for regenerated/additional points.
    """
    if len(X) == 0:
        raise InvalidInputError("reference set is empty")
    rng = sample_stream(cfg.master_seed, sample_index)
    groups = _deletion_groups(X, cfg)
    lo, hi = cfg.deletion_range

    deleted_per_group: list[np.ndarray] = []
    for group in groups:
        fraction = float(rng.uniform(lo, hi))
        count = min(_round_half_away(fraction * group.size), group.size)
        chosen = rng.choice(group.size, size=count, replace=False)
        deleted_per_group.append(group[np.sort(chosen)])

    deleted = (
        np.concatenate(deleted_per_group) if deleted_per_group else np.empty(0, dtype=int)
    )
    survivor_mask = np.ones(len(X), dtype=bool)
    survivor_mask[deleted] = False
    survivors = np.flatnonzero(survivor_mask)
    if survivors.size == 0 and not cfg.regenerate and cfg.additional_count == 0:
        raise EmptySampleError("every point was deleted and regeneration is off")

    new_points: list[np.ndarray] = []
    new_labels: list[np.ndarray] = []
    if cfg.regenerate:
        if src.use_bootstrap:
            total = int(deleted.size)
            pts, labs = _bootstrap_draw(X, total, cfg.noise_std, rng)
            new_points.append(pts)
            new_labels.append(labs)
        else:
            for group, removed in zip(groups, deleted_per_group):
                if removed.size == 0:
                    continue
                label = int(X.labels[group[0]]) if X.labels is not None else 0
                pts = _generator_draw(src, label, removed.size, rng)
                new_points.append(pts)
                new_labels.append(np.full(removed.size, label, dtype=int))

    if cfg.additional_count > 0:
        if src.use_bootstrap:
            pts, labs = _bootstrap_draw(X, cfg.additional_count, cfg.noise_std, rng)
            new_points.append(pts)
            new_labels.append(labs)
        else:
            labels_available = sorted(src.cluster_samplers.keys())
            picks = rng.integers(0, len(labels_available), size=cfg.additional_count)
            for pick in picks:
                label = labels_available[int(pick)]
                new_points.append(_generator_draw(src, label, 1, rng))
                new_labels.append(np.array([label], dtype=int))

    survivor_points = X.points[survivors]
    noise = rng.normal(0.0, cfg.noise_std, size=survivor_points.shape)
    survivor_points = survivor_points + noise

    parts = [survivor_points] + new_points
    points = np.concatenate([p for p in parts if p.size], axis=0) if any(
        p.size for p in parts
    ) else np.empty((0, X.dimension))
    if points.shape[0] == 0:
        raise EmptySampleError("corrupted sample is empty")

    n_new = points.shape[0] - survivors.size
    origin = np.concatenate([survivors, np.full(n_new, -1, dtype=int)])
    labels = None
    if X.labels is not None:
        labels = np.concatenate(
            [X.labels[survivors]] + new_labels if new_labels else [X.labels[survivors]]
        )
    return DataSet(points=points, labels=labels, origin=origin)


def _generator_draw(
    src: RegenerationSource, label: int, count: int, rng: np.random.Generator
) -> np.ndarray:
    sampler = src.cluster_samplers.get(label)
    if sampler is None:
        raise InvalidConfigError(f"no regeneration sampler for cluster label {label}")
    return np.atleast_2d(np.asarray(sampler(count, rng), dtype=float))


def _bootstrap_draw(
    X: DataSet, count: int, noise_std: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Uniform resample of X with replacement, perturbed by the noise level."""
    idx = rng.integers(0, len(X), size=count)
    pts = X.points[idx] + rng.normal(0.0, noise_std, size=(count, X.dimension))
    labs = X.labels[idx] if X.labels is not None else np.zeros(count, dtype=int)
    return pts, labs
