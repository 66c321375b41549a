"""Experiment orchestration: config, Monte Carlo driving, and serialization.

A run is a pure function of its configuration.  Monte Carlo samples are
processed in fixed-size chunks whose partial accumulators are merged in
ascending chunk order; because that reduction tree depends only on the
sample count, outputs are byte-identical for any worker count.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corruption import CorruptionConfig, RegenerationSource, corrupt
from .datasets import GeneratorSpec, make_dataset, make_regeneration_source, pca_project
from .errors import DataError, InvalidConfigError, SpecUQError
from .estimators import Accumulator, ClusterSample, ExpectationReport, finalize, odf_values
from .kernel import DataSet, SimilarityConfig, laplacian, mst_sigma, resolve_sigma, similarity_matrix
from .spectral import GaugeContext, cluster_reference_under_sample, fiedler_pair

__all__ = [
    "SAMPLE_CHUNK",
    "ExperimentConfig",
    "RunResult",
    "ExperimentOutput",
    "load_config",
    "run_experiment",
    "emit",
    "replay_stored_samples",
]

# Fixed reduction granularity: partial sums are always formed over chunks of
# this many consecutive sample indices, so floating-point totals do not
# depend on how chunks are assigned to workers.
SAMPLE_CHUNK = 25

DEFAULT_EPSILON_GRID = (0.025, 0.05, 0.1, 0.2, 0.4)

ERROR_POLICIES = ("skip", "abort")


@dataclass(frozen=True)
class ExperimentConfig:
    generator: GeneratorSpec
    corruption: CorruptionConfig
    similarity: SimilarityConfig
    mc_samples: int = 200
    epsilon_grid: tuple[float, ...] = DEFAULT_EPSILON_GRID
    gauge_tolerance: float = 1e-2
    workers: int = 1
    output_dir: str = "out"
    error_policy: str = "skip"
    store_samples: bool = False

    def __post_init__(self):
        if self.mc_samples < 1:
            raise InvalidConfigError("mc_samples must be >= 1")
        grid = tuple(float(e) for e in self.epsilon_grid)
        if not grid:
            raise InvalidConfigError("epsilon_grid must not be empty")
        if any(e < 0 for e in grid):
            raise InvalidConfigError("noise levels must be nonnegative")
        if len(set(grid)) != len(grid):
            raise InvalidConfigError("epsilon_grid contains duplicates")
        object.__setattr__(self, "epsilon_grid", tuple(sorted(grid)))
        if self.gauge_tolerance < 0:
            raise InvalidConfigError("gauge_tolerance must be nonnegative")
        if self.workers < 1:
            raise InvalidConfigError("workers must be >= 1")
        if self.error_policy not in ERROR_POLICIES:
            raise InvalidConfigError(f"error_policy must be one of {ERROR_POLICIES}")

    def to_dict(self) -> dict:
        """JSON-ready echo of every field."""
        return {
            "generator": dataclasses.asdict(self.generator),
            "corruption": {
                "deletion_range": list(self.corruption.deletion_range),
                "regenerate": self.corruption.regenerate,
                "master_seed": self.corruption.master_seed,
                "per_cluster": self.corruption.per_cluster,
                "additional_count": self.corruption.additional_count,
            },
            "similarity": dataclasses.asdict(self.similarity),
            "mc_samples": self.mc_samples,
            "epsilon_grid": list(self.epsilon_grid),
            "gauge_tolerance": self.gauge_tolerance,
            "workers": self.workers,
            "output_dir": self.output_dir,
            "error_policy": self.error_policy,
            "store_samples": self.store_samples,
        }


@dataclass(frozen=True)
class SampleStore:
    """Per-sample memberships and levels kept for later re-estimation."""

    sample_index: np.ndarray
    membership: np.ndarray
    levels: np.ndarray
    warned: np.ndarray


@dataclass(frozen=True)
class RunResult:
    epsilon: float
    report: ExpectationReport
    skipped: tuple[int, ...]
    wall_time_s: float
    store: SampleStore | None = None


@dataclass(frozen=True)
class ExperimentOutput:
    config: dict
    master_seed: int
    sigma: float
    reference: DataSet
    reference_membership: np.ndarray
    reference_levels: np.ndarray
    projection: np.ndarray | None
    runs: tuple[RunResult, ...]


def load_config(source, overrides: dict | None = None) -> ExperimentConfig:
    """Build an ExperimentConfig from a JSON file path or a plain dict.

    ``overrides`` replace file values; this is how CLI flags win over the
    config file.  Nested fields are addressed with dotted keys, e.g.
    ``corruption.master_seed``.  CSV data defaults to noise-only corruption
    (no deletion) unless the file says otherwise.
    """
    if isinstance(source, (str, Path)):
        try:
            raw = json.loads(Path(source).read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise InvalidConfigError(f"config file not found: {source}") from exc
        except json.JSONDecodeError as exc:
            raise InvalidConfigError(f"config file is not valid JSON: {exc}") from exc
    else:
        raw = dict(source)
    if not isinstance(raw, dict):
        raise InvalidConfigError("config root must be a JSON object")
    raw = {k: dict(v) if isinstance(v, dict) else v for k, v in raw.items()}
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if "." in key:
            section, field = key.split(".", 1)
            raw.setdefault(section, {})[field] = value
        else:
            raw[key] = value

    try:
        generator = GeneratorSpec(**raw.get("generator", {}))
        corruption_raw = dict(raw.get("corruption", {}))
        corruption_raw.pop("noise_std", None)  # noise level comes from the grid
        if "deletion_range" not in corruption_raw and generator.kind == "csv":
            corruption_raw["deletion_range"] = (0.0, 0.0)
        elif "deletion_range" not in corruption_raw:
            corruption_raw["deletion_range"] = (0.01, 0.07)
        if "deletion_range" in corruption_raw:
            corruption_raw["deletion_range"] = tuple(corruption_raw["deletion_range"])
        corruption = CorruptionConfig(**corruption_raw)
        similarity = SimilarityConfig(**raw.get("similarity", {}))
        known = {
            "mc_samples",
            "epsilon_grid",
            "gauge_tolerance",
            "workers",
            "output_dir",
            "error_policy",
            "store_samples",
        }
        extra = set(raw) - known - {"generator", "corruption", "similarity"}
        if extra:
            raise InvalidConfigError(f"unknown config keys: {sorted(extra)}")
        kwargs = {key: raw[key] for key in known if key in raw}
        if "epsilon_grid" in kwargs:
            kwargs["epsilon_grid"] = tuple(kwargs["epsilon_grid"])
        return ExperimentConfig(
            generator=generator,
            corruption=corruption,
            similarity=similarity,
            **kwargs,
        )
    except TypeError as exc:
        raise InvalidConfigError(f"bad config structure: {exc}") from exc


@dataclass(frozen=True)
class _ChunkTask:
    reference: DataSet
    sigma: float
    sigma_scale: float
    per_sample_sigma: bool
    ctx: GaugeContext
    corruption: CorruptionConfig
    source: RegenerationSource
    start: int
    stop: int
    error_policy: str
    store: bool


@dataclass
class _ChunkResult:
    accumulator: Accumulator
    reference_membership: np.ndarray
    stored_index: list[int]
    stored_membership: list[np.ndarray]
    stored_levels: list[np.ndarray]
    stored_warned: list[bool]
    skipped: list[int]


def _run_chunk(task: _ChunkTask) -> _ChunkResult:
    reference_membership = task.ctx.reference_levels >= 0
    result = _ChunkResult(
        accumulator=Accumulator(size=len(task.reference)),
        reference_membership=reference_membership,
        stored_index=[],
        stored_membership=[],
        stored_levels=[],
        stored_warned=[],
        skipped=[],
    )
    for index in range(task.start, task.stop):
        try:
            sample = corrupt(task.reference, task.corruption, task.source, index)
            sigma = (
                mst_sigma(sample, task.sigma_scale)
                if task.per_sample_sigma
                else task.sigma
            )
            cluster = cluster_reference_under_sample(
                task.reference, sample, sigma, task.ctx
            )
        except SpecUQError as exc:
            if task.error_policy == "abort":
                raise type(exc)(
                    f"sample {index} (noise_std={task.corruption.noise_std}): {exc}"
                ) from exc
            result.skipped.append(index)
            continue
        result.accumulator.add(cluster, reference_membership)
        if task.store:
            result.stored_index.append(index)
            result.stored_membership.append(cluster.membership)
            result.stored_levels.append(cluster.levels)
            result.stored_warned.append(cluster.warned)
    return result


def _merge_chunk_results(results: list[_ChunkResult], size: int, store: bool):
    total = Accumulator(size=size)
    skipped: list[int] = []
    stored = None
    if store:
        index: list[int] = []
        membership: list[np.ndarray] = []
        levels: list[np.ndarray] = []
        warned: list[bool] = []
    for result in results:  # ascending chunk order fixes the reduction tree
        total.merge(result.accumulator)
        skipped.extend(result.skipped)
        if store:
            index.extend(result.stored_index)
            membership.extend(result.stored_membership)
            levels.extend(result.stored_levels)
            warned.extend(result.stored_warned)
    if store:
        stored = SampleStore(
            sample_index=np.asarray(index, dtype=int),
            membership=(
                np.asarray(membership, dtype=bool)
                if membership
                else np.empty((0, size), dtype=bool)
            ),
            levels=(
                np.asarray(levels, dtype=float)
                if levels
                else np.empty((0, size), dtype=float)
            ),
            warned=np.asarray(warned, dtype=bool),
        )
    return total, tuple(skipped), stored


def _monte_carlo(cfg: ExperimentConfig, reference, sigma, ctx, corruption, source):
    chunks = [
        _ChunkTask(
            reference=reference,
            sigma=sigma,
            sigma_scale=cfg.similarity.scale,
            per_sample_sigma=cfg.similarity.per_sample,
            ctx=ctx,
            corruption=corruption,
            source=source,
            start=start,
            stop=min(start + SAMPLE_CHUNK, cfg.mc_samples),
            error_policy=cfg.error_policy,
            store=cfg.store_samples,
        )
        for start in range(0, cfg.mc_samples, SAMPLE_CHUNK)
    ]
    if cfg.workers == 1:
        results = [_run_chunk(task) for task in chunks]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_chunk, chunks))
    return _merge_chunk_results(results, len(reference), cfg.store_samples)


def run_experiment(cfg: ExperimentConfig) -> ExperimentOutput:
    """Run the full pipeline once per noise level in the grid.

    The reference set is clustered once; its Fiedler vector serves as the
    gauge anchor.  Each noise level then accumulates ``mc_samples`` corrupted
    clusterings and finalizes an expectation report.
    """
    reference = make_dataset(cfg.generator)
    sigma = resolve_sigma(reference, cfg.similarity)
    bundle = laplacian(similarity_matrix(reference, sigma))
    pair = fiedler_pair(bundle)
    ctx = GaugeContext(reference_levels=pair.vector, tolerance=cfg.gauge_tolerance)
    reference_membership = pair.vector >= 0
    source = make_regeneration_source(cfg.generator)
    projection = (
        pca_project(reference, 2).points if reference.dimension > 2 else None
    )

    runs = []
    for epsilon in cfg.epsilon_grid:
        corruption = dataclasses.replace(cfg.corruption, noise_std=epsilon)
        started = time.perf_counter()
        accumulator, skipped, stored = _monte_carlo(
            cfg, reference, sigma, ctx, corruption, source
        )
        if accumulator.sample_count == 0:
            raise DataError(
                f"all {cfg.mc_samples} samples failed at noise_std={epsilon}"
            )
        report = finalize(accumulator, reference_membership)
        runs.append(
            RunResult(
                epsilon=epsilon,
                report=report,
                skipped=skipped,
                wall_time_s=time.perf_counter() - started,
                store=stored,
            )
        )
    return ExperimentOutput(
        config=cfg.to_dict(),
        master_seed=cfg.corruption.master_seed,
        sigma=sigma,
        reference=reference,
        reference_membership=reference_membership,
        reference_levels=pair.vector,
        projection=projection,
        runs=tuple(runs),
    )


def _format_epsilon(epsilon: float) -> str:
    return format(float(epsilon), "g")


def _format_float(value: float) -> str:
    return repr(float(value))


# Execution parameters that cannot change any computed value; they are echoed
# in summary.json but excluded from the config hash so the hash identifies
# the experiment's deterministic content.
_NON_RESULT_KEYS = ("workers", "output_dir", "store_samples")


def config_hash(config: dict) -> str:
    reduced = {k: v for k, v in config.items() if k not in _NON_RESULT_KEYS}
    canonical = json.dumps(reduced, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def emit(output: ExperimentOutput, out_dir: str | Path) -> list[Path]:
    """Write points.csv, one report CSV per noise level, and summary.json.

    Overwrites existing files.  Every byte except summary.json's
    ``wall_time_s`` values and its echo of the execution parameters
    (``workers``, ``output_dir``, ``store_samples``) is a deterministic
    function of the result-determining config fields; in particular the
    CSVs are byte-identical across reruns and worker counts.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [_write_points_csv(output, out_dir / "points.csv")]

    for run in output.runs:
        path = out_dir / f"report_eps_{_format_epsilon(run.epsilon)}.csv"
        _write_report_csv(output, run, path)
        written.append(path)
        if run.store is not None:
            store_path = out_dir / f"samples_eps_{_format_epsilon(run.epsilon)}.npz"
            np.savez(
                store_path,
                epsilon=np.float64(run.epsilon),
                chunk=np.int64(SAMPLE_CHUNK),
                sample_index=run.store.sample_index,
                membership=run.store.membership,
                levels=run.store.levels,
                warned=run.store.warned,
                reference_membership=output.reference_membership,
            )
            written.append(store_path)

    summary_path = out_dir / "summary.json"
    summary_path.write_text(_summary_json(output), encoding="utf-8")
    written.append(summary_path)
    return written


def _write_points_csv(output: ExperimentOutput, path: Path) -> Path:
    X = output.reference
    d = X.dimension
    header = ["index"] + [f"x{i}" for i in range(d)] + ["label"]
    if output.projection is not None:
        header += ["pca_x", "pca_y"]
    lines = [",".join(header)]
    for i in range(len(X)):
        row = [str(i)]
        row += [_format_float(v) for v in X.points[i]]
        row.append(str(int(X.labels[i])) if X.labels is not None else "")
        if output.projection is not None:
            row += [_format_float(v) for v in output.projection[i]]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _write_report_csv(output: ExperimentOutput, run: RunResult, path: Path) -> Path:
    report = run.report
    n = len(output.reference)
    in_vorobev = np.zeros(n, dtype=int)
    in_vorobev[report.vorobev_set] = 1
    in_odf = np.zeros(n, dtype=int)
    in_odf[report.odf_set] = 1
    in_spectral = np.zeros(n, dtype=int)
    in_spectral[report.spectral_set] = 1
    header = (
        "index,coverage,mean_level,mean_odf,"
        "in_vorobev,in_odf_set,in_spectral_set,in_reference_cluster"
    )
    lines = [header]
    for i in range(n):
        lines.append(
            ",".join(
                [
                    str(i),
                    _format_float(report.coverage[i]),
                    _format_float(report.mean_levels[i]),
                    _format_float(report.mean_odf[i]),
                    str(in_vorobev[i]),
                    str(in_odf[i]),
                    str(in_spectral[i]),
                    str(int(output.reference_membership[i])),
                ]
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _summary_json(output: ExperimentOutput) -> str:
    reports = []
    for run in output.runs:
        report = run.report
        reports.append(
            {
                "epsilon": run.epsilon,
                "M": report.M,
                "expected_misclustering_rate": report.expected_misclustering_rate,
                "t_star": report.t_star,
                "vorobev_cardinality": int(report.vorobev_set.size),
                "odf_cardinality": int(report.odf_set.size),
                "spectral_cardinality": int(report.spectral_set.size),
                "reference_cardinality": int(np.count_nonzero(output.reference_membership)),
                "warn_count": report.warn_count,
                "skipped_samples": len(run.skipped),
                "wall_time_s": round(run.wall_time_s, 3),
            }
        )
    payload = {
        "master_seed": output.master_seed,
        "sigma": output.sigma,
        "config": output.config,
        "config_hash": config_hash(output.config),
        "reports": reports,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def replay_stored_samples(
    reference: DataSet,
    store_path: str | Path,
    mc_samples: int,
) -> tuple[Accumulator, np.ndarray, tuple[int, ...], float]:
    """Rebuild an accumulator from stored per-sample memberships and levels.

    Samples are re-accumulated chunk by chunk with the chunk size recorded at
    store time, reproducing the original reduction tree (and therefore the
    original floating-point sums) exactly.  Oriented distances are recomputed
    from the stored memberships.  Returns the accumulator, the stored
    reference membership, the skipped sample indices and the stored epsilon.
    """
    with np.load(Path(store_path)) as archive:
        epsilon = float(archive["epsilon"])
        chunk = int(archive["chunk"])
        sample_index = archive["sample_index"].astype(int)
        membership = archive["membership"].astype(bool)
        levels = archive["levels"].astype(float)
        warned = archive["warned"].astype(bool)
        reference_membership = archive["reference_membership"].astype(bool)

    n = len(reference)
    if membership.shape[1:] != (n,):
        raise DataError(
            f"{store_path}: stored membership width {membership.shape} "
            f"does not match |X| = {n}"
        )
    total = Accumulator(size=n)
    order = np.argsort(sample_index)
    boundaries: dict[int, Accumulator] = {}
    for pos in order:
        chunk_id = int(sample_index[pos]) // chunk
        acc = boundaries.get(chunk_id)
        if acc is None:
            acc = boundaries[chunk_id] = Accumulator(size=n)
        memb = membership[pos]
        acc.add(
            ClusterSample(
                membership=memb,
                levels=levels[pos],
                odf=odf_values(memb, reference),
                sample_cardinality=int(np.count_nonzero(memb)),
                warned=bool(warned[pos]),
            ),
            reference_membership,
        )
    for chunk_id in sorted(boundaries):
        total.merge(boundaries[chunk_id])
    present = set(int(i) for i in sample_index)
    skipped = tuple(i for i in range(mc_samples) if i not in present)
    return total, reference_membership, skipped, epsilon
