"""Command line interface.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric error.
"""

from __future__ import annotations

import functools
import json
import sys
import time
from pathlib import Path

import click
import numpy as np

from .datasets import GeneratorSpec, load_csv, make_dataset, pca_project
from .errors import (
    DataError,
    InvalidConfigError,
    InvalidInputError,
    NoSamplesError,
    NumericError,
)
from .experiment import (
    ExperimentOutput,
    RunResult,
    _format_epsilon,
    emit,
    load_config,
    replay_stored_samples,
    run_experiment,
)
from .estimators import finalize
from .kernel import DataSet

CONFIG_EXIT = 2
DATA_EXIT = 3
NUMERIC_EXIT = 4


def _exit_codes(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except InvalidConfigError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(CONFIG_EXIT)
        except (DataError, InvalidInputError, NoSamplesError) as exc:
            click.echo(f"data error: {exc}", err=True)
            sys.exit(DATA_EXIT)
        except NumericError as exc:
            click.echo(f"numeric error: {exc}", err=True)
            sys.exit(NUMERIC_EXIT)

    return wrapper


@click.group()
def main():
    """Monte Carlo uncertainty quantification for spectral bi-clustering."""


@main.command()
@click.option("--kind", type=click.Choice(["point_in_circle", "half_circles", "csv"]), default="point_in_circle", show_default=True)
@click.option("--m", type=int, default=100, show_default=True, help="Cluster size parameter for synthetic kinds.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--csv", "csv_path", type=click.Path(), default=None, help="Input CSV for kind=csv.")
@click.option("--normalization", type=click.Choice(["zscore", "minmax", "none"]), default="zscore", show_default=True)
@click.option("--label-column", is_flag=True, help="Treat trailing CSV column as integer labels.")
@click.option("--out", type=click.Path(), default="points.csv", show_default=True)
@_exit_codes
def generate(kind, m, seed, csv_path, normalization, label_column, out):
    """Generate a reference data set and write it as points.csv."""
    spec = GeneratorSpec(
        kind=kind,
        m=m,
        seed=seed,
        csv_path=csv_path,
        normalization=normalization,
        label_column=label_column,
    )
    dataset = make_dataset(spec)
    _write_points(dataset, Path(out))
    click.echo(f"wrote {out}: n={len(dataset)}, d={dataset.dimension}")


def _write_points(dataset: DataSet, path: Path):
    projection = pca_project(dataset, 2).points if dataset.dimension > 2 else None
    header = ["index"] + [f"x{i}" for i in range(dataset.dimension)] + ["label"]
    if projection is not None:
        header += ["pca_x", "pca_y"]
    lines = [",".join(header)]
    for i in range(len(dataset)):
        row = [str(i)]
        row += [repr(float(v)) for v in dataset.points[i]]
        row.append(str(int(dataset.labels[i])) if dataset.labels is not None else "")
        if projection is not None:
            row += [repr(float(v)) for v in projection[i]]
        lines.append(",".join(row))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


@main.command()
@click.option("--config", "config_path", type=click.Path(), required=True, help="JSON experiment configuration.")
@click.option("--samples", type=int, default=None, help="Override mc_samples.")
@click.option("--workers", type=int, default=None, help="Override worker count.")
@click.option("--master-seed", type=int, default=None, help="Override corruption.master_seed.")
@click.option("--output-dir", type=click.Path(), default=None, help="Override output directory.")
@click.option("--epsilon", "epsilons", type=float, multiple=True, help="Override the noise grid (repeatable).")
@click.option("--store-samples/--no-store-samples", default=None, help="Keep per-sample memberships and levels.")
@_exit_codes
def run(config_path, samples, workers, master_seed, output_dir, epsilons, store_samples):
    """Run the full experiment described by a config file."""
    overrides = {
        "mc_samples": samples,
        "workers": workers,
        "corruption.master_seed": master_seed,
        "output_dir": output_dir,
        "epsilon_grid": list(epsilons) if epsilons else None,
        "store_samples": store_samples,
    }
    cfg = load_config(config_path, overrides)
    output = run_experiment(cfg)
    written = emit(output, cfg.output_dir)
    for run_result in output.runs:
        report = run_result.report
        click.echo(
            f"eps={_format_epsilon(run_result.epsilon)}: M={report.M} "
            f"rate={report.expected_misclustering_rate:.4f} "
            f"t*={report.t_star:.4f} warn={report.warn_count} "
            f"skipped={len(run_result.skipped)}"
        )
    click.echo(f"wrote {len(written)} files to {cfg.output_dir}")


@main.command()
@click.option("--input", "input_dir", type=click.Path(), required=True, help="Directory produced by `specuq run --store-samples`.")
@click.option("--out", "out_dir", type=click.Path(), default=None, help="Output directory (defaults to the input directory).")
@_exit_codes
def report(input_dir, out_dir):
    """Recompute expectation reports from stored per-sample data."""
    input_dir = Path(input_dir)
    out_dir = Path(out_dir) if out_dir else input_dir
    summary_path = input_dir / "summary.json"
    if not summary_path.exists():
        raise DataError(f"no summary.json in {input_dir}")
    summary = json.loads(summary_path.read_text(encoding="utf-8"))
    reference = _read_points(input_dir / "points.csv")
    stores = sorted(input_dir.glob("samples_eps_*.npz"))
    if not stores:
        raise DataError(
            f"no stored samples in {input_dir}; rerun with --store-samples"
        )

    mc_samples = int(summary["config"]["mc_samples"])
    runs = []
    reference_membership = None
    for store_path in stores:
        started = time.perf_counter()
        accumulator, reference_membership, skipped, epsilon = replay_stored_samples(
            reference, store_path, mc_samples
        )
        expectation = finalize(accumulator, reference_membership)
        runs.append(
            RunResult(
                epsilon=epsilon,
                report=expectation,
                skipped=skipped,
                wall_time_s=time.perf_counter() - started,
                store=None,
            )
        )
    runs.sort(key=lambda r: r.epsilon)
    levels = np.where(reference_membership, 1.0, -1.0)
    output = ExperimentOutput(
        config=summary["config"],
        master_seed=int(summary["master_seed"]),
        sigma=float(summary["sigma"]),
        reference=reference,
        reference_membership=reference_membership,
        reference_levels=levels,
        projection=_read_projection(input_dir / "points.csv"),
        runs=tuple(runs),
    )
    written = emit(output, out_dir)
    click.echo(f"recomputed {len(runs)} report(s); wrote {len(written)} files to {out_dir}")


@main.command()
@click.option("--input", "input_csv", type=click.Path(), required=True)
@click.option("--out", "out_csv", type=click.Path(), required=True)
@click.option("--normalization", type=click.Choice(["zscore", "minmax", "none"]), default="zscore", show_default=True)
@click.option("--label-column", is_flag=True)
@_exit_codes
def project(input_csv, out_csv, normalization, label_column):
    """Project a CSV data set onto its two leading principal directions."""
    dataset = load_csv(input_csv, normalization, label_column)
    projected = pca_project(dataset, 2)
    header = ["index", "pca_x", "pca_y", "label"]
    lines = [",".join(header)]
    for i in range(len(projected)):
        lines.append(
            ",".join(
                [
                    str(i),
                    repr(float(projected.points[i, 0])),
                    repr(float(projected.points[i, 1])),
                    str(int(projected.labels[i])) if projected.labels is not None else "",
                ]
            )
        )
    Path(out_csv).parent.mkdir(parents=True, exist_ok=True)
    Path(out_csv).write_text("\n".join(lines) + "\n", encoding="utf-8")
    click.echo(f"wrote {out_csv}")


def _read_points(path: Path) -> DataSet:
    if not path.exists():
        raise DataError(f"missing {path}")
    lines = path.read_text(encoding="utf-8").strip().splitlines()
    header = lines[0].split(",")
    coord_cols = [i for i, name in enumerate(header) if name.startswith("x")]
    label_col = header.index("label") if "label" in header else None
    points = []
    labels = []
    for line in lines[1:]:
        cells = line.split(",")
        points.append([float(cells[i]) for i in coord_cols])
        if label_col is not None and cells[label_col] != "":
            labels.append(int(cells[label_col]))
    label_arr = np.asarray(labels, dtype=int) if len(labels) == len(points) else None
    return DataSet(points=np.asarray(points, dtype=float), labels=label_arr)


def _read_projection(path: Path) -> np.ndarray | None:
    lines = path.read_text(encoding="utf-8").strip().splitlines()
    header = lines[0].split(",")
    if "pca_x" not in header:
        return None
    ix, iy = header.index("pca_x"), header.index("pca_y")
    rows = [
        (float(line.split(",")[ix]), float(line.split(",")[iy])) for line in lines[1:]
    ]
    return np.asarray(rows, dtype=float)


if __name__ == "__main__":
    main()
