"""Figure generation for experiment output bundles (CSV/JSON in, PNG/SVG out)."""

from .figures import PanelStats, plot_expectations, plot_misclustering
from .io import SchemaError, discover_reports, read_points, read_report, read_summary

__version__ = "0.1.0"

__all__ = [
    "PanelStats",
    "SchemaError",
    "discover_reports",
    "plot_expectations",
    "plot_misclustering",
    "read_points",
    "read_report",
    "read_summary",
]
