"""Figure rendering pipeline: read CSVs, build series, draw, save.

Rendering is a pure function of the two input CSVs and the figure spec:
build_series() extracts every plotted value into a plain dict (the same
dict the dump mode writes as JSON), and draw() consumes only that dict.
Nothing is computed from the CSVs at draw time, so the dump is a faithful
record of what the image shows.
"""

from __future__ import annotations

import json
from pathlib import Path

from matplotlib.figure import Figure

from . import fig_copies, fig_coverage, fig_histogram, fig_noise, fig_qubits
from .figspec import FigureSpec
from .schema import NoDataError, read_summary, read_trials

_FIGURES = {
    "fig2": fig_histogram,
    "fig3": fig_copies,
    "fig4": fig_qubits,
    "fig5": fig_coverage,
    "fig6": fig_noise,
}

# stamp-free output so the same inputs produce the same bytes
_SAVE_METADATA = {
    "svg": {"Date": None},
    "pdf": {"CreationDate": None},
}


def _figsize(key: str, data: dict) -> tuple[float, float]:
    if key == "fig2":
        return (7.0, 1.0 + 1.9 * len(data["series"]))
    return {
        "fig3": (7.0, 6.0),
        "fig4": (7.0, 4.5),
        "fig5": (9.5, 4.2),
        "fig6": (7.0, 4.5),
    }[key]


def dump_text(data: dict) -> str:
    """Deterministic JSON for the plotted data series."""
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def build_series(spec: FigureSpec) -> dict:
    """Read the input CSVs and extract the plotted data series."""
    trials = read_trials(spec.trials)
    summary = read_summary(spec.summary)
    if not trials:
        raise NoDataError(f"trial CSV {spec.trials} has no data rows")
    if not summary:
        raise NoDataError(f"summary CSV {spec.summary} has no data rows")
    return _FIGURES[spec.figure].build_series(trials, summary, spec)


def render(spec: FigureSpec) -> dict:
    """Render the requested figure and return its plotted data series.

    No output file is touched until the inputs have validated and the data
    series exist, so a schema error or an empty CSV never leaves a partial
    image behind. With spec.dump set, the series dict is also written as
    JSON next to the image.
    """
    data = build_series(spec)
    fig = Figure(figsize=_figsize(spec.figure, data), layout="constrained")
    _FIGURES[spec.figure].draw(data, fig)
    fmt = spec.resolved_format()
    fig.savefig(spec.out, format=fmt, dpi=150, metadata=_SAVE_METADATA.get(fmt))
    if spec.dump is not None:
        Path(spec.dump).write_text(dump_text(data))
    return data
