"""Figure rendering for dsm-lab result CSVs.

This package talks to the lab only through its published CSV schemas; it
never imports the lab itself.
"""

import matplotlib

matplotlib.use("Agg")
# svg element ids are salted with a per-process uuid by default; pin the
# salt so re-rendering the same inputs gives identical bytes
matplotlib.rcParams["svg.hashsalt"] = "dsm-figures"

from .binning import bin_counts, histogram_edges
from .figspec import DEFAULT_BIN_WIDTH, FIGURE_KEYS, FORMATS, FigureSpec
from .render import build_series, dump_text, render
from .schema import (
    SUMMARY_COLUMNS,
    TRIAL_COLUMNS,
    NoDataError,
    SchemaError,
    SummaryRow,
    TrialRow,
    protocol_label,
    read_summary,
    read_trials,
    series_key,
    shared_f0,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_BIN_WIDTH",
    "FIGURE_KEYS",
    "FORMATS",
    "FigureSpec",
    "NoDataError",
    "SUMMARY_COLUMNS",
    "SchemaError",
    "SummaryRow",
    "TRIAL_COLUMNS",
    "TrialRow",
    "bin_counts",
    "build_series",
    "dump_text",
    "histogram_edges",
    "protocol_label",
    "read_summary",
    "read_trials",
    "render",
    "series_key",
    "shared_f0",
]
