"""fig2: per-protocol fidelity histograms with a Gaussian overlay.

One panel per (protocol, theta) series found in the trial CSV. Bars are raw
trial counts at the lab bin width; the overlay is a normal curve whose mean
and standard deviation come straight from the matching summary row, scaled
to the count axis. A dashed vertical line marks the target fidelity.
"""

from __future__ import annotations

import math
import sys

import numpy as np

from .binning import bin_counts
from .schema import (
    NoDataError,
    SchemaError,
    SummaryRow,
    TrialRow,
    protocol_label,
    series_key,
    shared_f0,
)


def build_series(trials: list[TrialRow], summary: list[SummaryRow], spec) -> dict:
    groups: dict[tuple[str, float], list[TrialRow]] = {}
    for row in trials:
        if row.usable:
            groups.setdefault(series_key(row.protocol, row.theta), []).append(row)
    if not groups:
        raise NoDataError("trial CSV has no usable rows (status ok, finite fidelity)")

    stats: dict[tuple[str, float], SummaryRow] = {}
    for row in summary:
        key = series_key(row.protocol, row.theta)
        if key in groups:
            if key in stats:
                raise SchemaError(
                    "summary CSV has more than one row for series "
                    f"{protocol_label(*key)!r}; histogram overlays need exactly one"
                )
            stats[key] = row

    series = []
    for key in sorted(groups):
        rows = groups[key]
        edges, counts = bin_counts([r.fidelity for r in rows], spec.bin_width)
        stat = stats.get(key)
        overlay_mean = stat.f_ave if stat else None
        overlay_std = stat.std_f if stat else None
        if overlay_std is not None and overlay_std <= 0:
            overlay_mean = overlay_std = None
        series.append(
            {
                "protocol": key[0],
                "theta": key[1],
                "label": protocol_label(*key),
                "n_trials_ok": len(rows),
                "bin_edges": edges,
                "counts": counts,
                "overlay_mean": overlay_mean,
                "overlay_std": overlay_std,
            }
        )
    return {
        "figure": "fig2",
        "bin_width": float(spec.bin_width),
        "f0": shared_f0(summary, spec.summary),
        "series": series,
    }


def draw(data: dict, fig) -> None:
    series = data["series"]
    axes = fig.subplots(len(series), 1, sharex=True, squeeze=False)[:, 0]
    width = data["bin_width"]
    for ax, s in zip(axes, series):
        edges = np.asarray(s["bin_edges"])
        ax.bar(
            edges[:-1],
            s["counts"],
            width=np.diff(edges),
            align="edge",
            color="#6699cc",
            edgecolor="white",
            linewidth=0.3,
            label=s["label"],
        )
        if s["overlay_mean"] is not None:
            mean, std = s["overlay_mean"], s["overlay_std"]
            xs = np.linspace(
                min(edges[0], mean - 4 * std), max(edges[-1], mean + 4 * std), 400
            )
            dens = np.exp(-0.5 * ((xs - mean) / std) ** 2) / (std * math.sqrt(2 * math.pi))
            ax.plot(xs, s["n_trials_ok"] * width * dens, color="#cc4444", linewidth=1.2)
        ax.axvline(data["f0"], color="black", linestyle="--", linewidth=1.0)
        ax.legend(loc="upper left", frameon=False, fontsize=9)
        ax.set_ylabel("trials")
    axes[-1].set_xlabel("estimated fidelity")


def main(argv: list[str] | None = None) -> int:
    from .cli import main as cli_main

    args = list(sys.argv[1:] if argv is None else argv)
    return cli_main(["--figure", "fig2", *args])


if __name__ == "__main__":
    raise SystemExit(main())
