"""Figure generation from experiment output directories.

Each expectation quantity produces one image per noise level: the coverage
function as a continuous color scale, the three expectation sets as
two-color scatters with deviations from the reference clustering
highlighted.  The misclustering quantity draws rate-versus-noise curves,
one per input directory.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import PointTable, ReportTable, discover_reports, read_points, read_summary

__all__ = ["PanelStats", "SET_QUANTITIES", "plot_expectations", "plot_misclustering"]

SET_QUANTITIES = {
    "vorobev": "in_vorobev",
    "odf": "in_odf_set",
    "spectral": "in_spectral_set",
}

QUANTITIES = ("coverage", *SET_QUANTITIES, "misclustering")

IN_COLOR = "tab:blue"
OUT_COLOR = "tab:orange"
DEVIATION_COLOR = "tab:green"
COVERAGE_CMAP = "viridis"  # perceptually uniform


@dataclass(frozen=True)
class PanelStats:
    """What one panel drew; category counts match the CSV contents exactly."""

    epsilon: float
    quantity: str
    in_set: int
    out_set: int
    deviating: int
    values: np.ndarray  # per-point plotted values (coverage or 0/1 membership)


def _format_epsilon(epsilon: float) -> str:
    return format(float(epsilon), "g")


def _panel_path(out_dir: Path, quantity: str, epsilon: float, fmt: str) -> Path:
    return out_dir / f"{quantity}_eps_{_format_epsilon(epsilon)}.{fmt}"


def _draw_coverage(points: PointTable, report: ReportTable, path: Path) -> PanelStats:
    values = report["coverage"]
    fig, ax = plt.subplots(figsize=(5, 4.2))
    scatter = ax.scatter(points.x, points.y, c=values, cmap=COVERAGE_CMAP, s=18, vmin=0.0, vmax=1.0)
    fig.colorbar(scatter, ax=ax, label="coverage")
    ax.set_title(f"coverage, noise {_format_epsilon(report.epsilon)}")
    ax.set_aspect("equal", adjustable="datalim")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return PanelStats(
        epsilon=report.epsilon,
        quantity="coverage",
        in_set=int(np.count_nonzero(values >= 0.5)),
        out_set=int(np.count_nonzero(values < 0.5)),
        deviating=0,
        values=values,
    )


def _draw_set(points: PointTable, report: ReportTable, quantity: str, path: Path) -> PanelStats:
    member = report[SET_QUANTITIES[quantity]].astype(bool)
    reference = report["in_reference_cluster"].astype(bool)
    deviating = member != reference
    fig, ax = plt.subplots(figsize=(5, 4.2))
    for mask, color, label in (
        (member & ~deviating, IN_COLOR, "in set"),
        (~member & ~deviating, OUT_COLOR, "out"),
        (deviating, DEVIATION_COLOR, "deviates from reference"),
    ):
        if mask.any():
            ax.scatter(points.x[mask], points.y[mask], color=color, s=18, label=label)
    ax.legend(loc="upper right", fontsize=8)
    ax.set_title(f"{quantity} expectation, noise {_format_epsilon(report.epsilon)}")
    ax.set_aspect("equal", adjustable="datalim")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return PanelStats(
        epsilon=report.epsilon,
        quantity=quantity,
        in_set=int(np.count_nonzero(member)),
        out_set=int(np.count_nonzero(~member)),
        deviating=int(np.count_nonzero(deviating)),
        values=member.astype(float),
    )


def plot_expectations(
    input_dir: str | Path,
    quantity: str,
    out_dir: str | Path,
    fmt: str = "png",
) -> tuple[list[Path], list[PanelStats]]:
    """One image per noise level for a coverage/set quantity.

    Returns the written paths and per-panel category statistics, which
    mirror the CSV contents one-to-one (used by tests to verify that the
    highlighted deviations equal the CSV-level disagreement counts).
    """
    if quantity not in SET_QUANTITIES and quantity != "coverage":
        raise ValueError(f"unknown expectation quantity {quantity!r}")
    input_dir, out_dir = Path(input_dir), Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    points = read_points(input_dir / "points.csv")
    paths, stats = [], []
    for report in discover_reports(input_dir):
        path = _panel_path(out_dir, quantity, report.epsilon, fmt)
        if quantity == "coverage":
            stats.append(_draw_coverage(points, report, path))
        else:
            stats.append(_draw_set(points, report, quantity, path))
        paths.append(path)
    return paths, stats


def plot_misclustering(
    input_dirs,
    out_dir: str | Path,
    fmt: str = "png",
) -> tuple[Path, list[tuple[str, np.ndarray, np.ndarray]]]:
    """Expected misclustering rate against the noise level, one curve per run.

    The noise axis is log-scaled unless some run contains a zero noise
    level.  Returns the written path and the plotted (label, eps, rate)
    series.
    """
    input_dirs = [Path(d) for d in (
        [input_dirs] if isinstance(input_dirs, (str, Path)) else list(input_dirs)
    )]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    series = []
    for directory in input_dirs:
        summary = read_summary(directory)
        entries = sorted(summary["reports"], key=lambda e: e["epsilon"])
        eps = np.asarray([e["epsilon"] for e in entries], dtype=float)
        rate = np.asarray(
            [e["expected_misclustering_rate"] for e in entries], dtype=float
        )
        series.append((directory.name, eps, rate))

    fig, ax = plt.subplots(figsize=(5.5, 4))
    for label, eps, rate in series:
        ax.plot(eps, rate, marker="o", label=label)
    if all(np.all(eps > 0) for _, eps, _ in series):
        ax.set_xscale("log")
    ax.set_xlabel("noise level")
    ax.set_ylabel("expected misclustering rate")
    if len(series) > 1:
        ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = out_dir / f"misclustering.{fmt}"
    fig.savefig(path)
    plt.close(fig)
    return path, series
