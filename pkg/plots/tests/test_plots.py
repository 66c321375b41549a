"""Smoke and contract tests for the figure package.

Everything here runs from the checked-in miniature experiment fixture; the
experiment package itself is never imported.
"""

import csv
import hashlib
import json
import shutil
from pathlib import Path

import pytest
from click.testing import CliRunner

from specuq_plots import (
    SchemaError,
    discover_reports,
    plot_expectations,
    plot_misclustering,
    read_points,
    read_summary,
)
from specuq_plots.cli import main

FIXTURE = Path(__file__).parent / "fixtures" / "mini"

SET_COLUMNS = {
    "vorobev": "in_vorobev",
    "odf": "in_odf_set",
    "spectral": "in_spectral_set",
}


def fixture_hashes():
    return {
        path.name: hashlib.sha256(path.read_bytes()).hexdigest()
        for path in sorted(FIXTURE.iterdir())
    }


def csv_disagreements(report_csv, column):
    with open(report_csv, newline="") as handle:
        rows = list(csv.DictReader(handle))
    return sum(1 for row in rows if row[column] != row["in_reference_cluster"])


class TestFixture:
    def test_fixture_complete(self):
        names = {path.name for path in FIXTURE.iterdir()}
        assert "points.csv" in names and "summary.json" in names
        assert sum(1 for name in names if name.startswith("report_eps_")) == 2

    def test_fixture_has_deviations(self):
        # the deviation-highlight test below must not pass vacuously
        total = sum(
            csv_disagreements(path, "in_vorobev")
            for path in FIXTURE.glob("report_eps_*.csv")
        )
        assert total > 0


class TestPlotExpectations:
    @pytest.mark.parametrize("quantity", ["coverage", "vorobev", "odf", "spectral"])
    @pytest.mark.parametrize("fmt", ["png", "svg"])
    def test_produces_one_file_per_noise_level(self, tmp_path, quantity, fmt):
        paths, stats = plot_expectations(FIXTURE, quantity, tmp_path, fmt)
        assert len(paths) == 2
        for path in paths:
            assert path.exists() and path.stat().st_size > 0
            assert path.suffix == f".{fmt}"
        assert [s.epsilon for s in stats] == [0.05, 0.5]

    @pytest.mark.parametrize("quantity", ["vorobev", "odf", "spectral"])
    def test_deviation_counts_match_csv(self, tmp_path, quantity):
        _, stats = plot_expectations(FIXTURE, quantity, tmp_path)
        for panel in stats:
            expected = csv_disagreements(
                FIXTURE / f"report_eps_{panel.epsilon:g}.csv", SET_COLUMNS[quantity]
            )
            assert panel.deviating == expected
            assert panel.in_set + panel.out_set == len(panel.values)

    def test_constant_coverage_single_color(self, tmp_path):
        clone = tmp_path / "clone"
        shutil.copytree(FIXTURE, clone)
        report = clone / "report_eps_0.05.csv"
        lines = report.read_text().splitlines()
        header = lines[0].split(",")
        cov = header.index("coverage")
        rewritten = [lines[0]]
        for line in lines[1:]:
            cells = line.split(",")
            cells[cov] = "1.0"
            rewritten.append(",".join(cells))
        report.write_text("\n".join(rewritten) + "\n")
        _, stats = plot_expectations(clone, "coverage", tmp_path / "out")
        first = next(s for s in stats if s.epsilon == 0.05)
        assert set(first.values.tolist()) == {1.0}

    def test_inputs_unchanged(self, tmp_path):
        before = fixture_hashes()
        plot_expectations(FIXTURE, "coverage", tmp_path)
        plot_expectations(FIXTURE, "vorobev", tmp_path)
        plot_misclustering(FIXTURE, tmp_path)
        assert fixture_hashes() == before

    def test_missing_column_named_in_error(self, tmp_path):
        clone = tmp_path / "broken"
        shutil.copytree(FIXTURE, clone)
        report = clone / "report_eps_0.05.csv"
        text = report.read_text().replace("in_vorobev", "vorobev_flag")
        report.write_text(text)
        with pytest.raises(SchemaError, match="in_vorobev"):
            plot_expectations(clone, "vorobev", tmp_path / "out")

    def test_missing_points_file(self, tmp_path):
        clone = tmp_path / "no_points"
        shutil.copytree(FIXTURE, clone)
        (clone / "points.csv").unlink()
        with pytest.raises(SchemaError, match="points.csv"):
            plot_expectations(clone, "coverage", tmp_path / "out")


class TestPlotMisclustering:
    def test_curve_has_one_marker_per_noise_level(self, tmp_path):
        path, series = plot_misclustering(FIXTURE, tmp_path)
        assert path.exists() and path.stat().st_size > 0
        assert len(series) == 1
        _, eps, rate = series[0]
        assert eps.tolist() == [0.05, 0.5]
        assert len(rate) == 2

    def test_overlay_two_runs(self, tmp_path):
        second = tmp_path / "second"
        shutil.copytree(FIXTURE, second)
        path, series = plot_misclustering([FIXTURE, second], tmp_path / "out")
        assert path.exists()
        assert len(series) == 2
        labels = [label for label, _, _ in series]
        assert len(set(labels)) == 2

    def test_identity_summary_flat_zero_curve(self, tmp_path):
        clone = tmp_path / "identity"
        shutil.copytree(FIXTURE, clone)
        summary = json.loads((clone / "summary.json").read_text())
        for entry in summary["reports"]:
            entry["expected_misclustering_rate"] = 0.0
        summary["reports"][0]["epsilon"] = 0.0
        (clone / "summary.json").write_text(json.dumps(summary))
        _, series = plot_misclustering(clone, tmp_path / "out")
        _, eps, rate = series[0]
        assert rate.tolist() == [0.0, 0.0]
        assert eps[0] == 0.0  # zero noise level forces the linear axis branch

    def test_missing_summary(self, tmp_path):
        with pytest.raises(SchemaError, match="summary.json"):
            plot_misclustering(tmp_path, tmp_path / "out")


class TestCli:
    def test_all_quantities_smoke(self, tmp_path):
        runner = CliRunner()
        for quantity in ("coverage", "vorobev", "odf", "spectral", "misclustering"):
            out = tmp_path / quantity
            result = runner.invoke(
                main,
                [
                    "--input",
                    str(FIXTURE),
                    "--quantity",
                    quantity,
                    "--out",
                    str(out),
                    "--format",
                    "png",
                ],
            )
            assert result.exit_code == 0, result.output
            images = list(out.glob("*.png"))
            assert images and all(p.stat().st_size > 0 for p in images)

    def test_svg_format(self, tmp_path):
        runner = CliRunner()
        result = runner.invoke(
            main,
            [
                "--input",
                str(FIXTURE),
                "--quantity",
                "coverage",
                "--out",
                str(tmp_path),
                "--format",
                "svg",
            ],
        )
        assert result.exit_code == 0, result.output
        assert list(tmp_path.glob("*.svg"))

    def test_schema_error_exit_code(self, tmp_path):
        runner = CliRunner()
        result = runner.invoke(
            main,
            ["--input", str(tmp_path), "--quantity", "misclustering", "--out", str(tmp_path)],
        )
        assert result.exit_code == 3


class TestAcceptanceSecondary:
    def test_plot_smoke_suite(self, tmp_path):
        """Every figure command produces files from the stored fixture, and
        the deviation-panel categories equal the CSV disagreement counts."""
        produced = []
        for quantity in ("coverage", "vorobev", "odf", "spectral"):
            paths, stats = plot_expectations(FIXTURE, quantity, tmp_path / quantity)
            produced.extend(paths)
            if quantity in SET_COLUMNS:
                for panel in stats:
                    expected = csv_disagreements(
                        FIXTURE / f"report_eps_{panel.epsilon:g}.csv",
                        SET_COLUMNS[quantity],
                    )
                    assert panel.deviating == expected
        path, _ = plot_misclustering(FIXTURE, tmp_path / "rate")
        produced.append(path)
        assert all(p.exists() and p.stat().st_size > 0 for p in produced)
        print("\n[acceptance] plot smoke suite: PASS")
