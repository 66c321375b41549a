"""Command line entry point: render figures from an experiment output directory."""

from __future__ import annotations

import sys

import click

from .figures import SET_QUANTITIES, plot_expectations, plot_misclustering
from .io import SchemaError


@click.command()
@click.option(
    "--input",
    "input_dirs",
    type=click.Path(),
    multiple=True,
    required=True,
    help="Experiment output directory; repeat to overlay misclustering curves.",
)
@click.option(
    "--quantity",
    type=click.Choice(["coverage", *SET_QUANTITIES, "misclustering"]),
    required=True,
)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--format", "fmt", type=click.Choice(["png", "svg"]), default="png", show_default=True)
def main(input_dirs, quantity, out_dir, fmt):
    """Render figures from specuq experiment CSV/JSON outputs."""
    try:
        if quantity == "misclustering":
            path, _ = plot_misclustering(list(input_dirs), out_dir, fmt)
            click.echo(f"wrote {path}")
        else:
            if len(input_dirs) != 1:
                raise click.UsageError("expectation quantities take exactly one --input")
            paths, _ = plot_expectations(input_dirs[0], quantity, out_dir, fmt)
            for path in paths:
                click.echo(f"wrote {path}")
    except SchemaError as exc:
        click.echo(f"schema error: {exc}", err=True)
        sys.exit(3)


if __name__ == "__main__":
    main()
