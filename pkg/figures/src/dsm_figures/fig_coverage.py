"""fig5: confidence-interval coverage and the fidelity spread behind it.

Left panel: grouped bars of the per-cell coverage percentage against the
copy budget, one bar group per budget, one color per series. Right panel:
histogram of the trial fidelities at the largest budget, with the target
fidelity as a dashed line and, when bounds are supplied, the acceptance
interval shaded. The summary CSV does not carry the interval endpoints, so
the shading bounds are caller inputs rather than plotted data.
"""

from __future__ import annotations

import sys

import numpy as np

from .binning import histogram_edges
from .schema import (
    NoDataError,
    SummaryRow,
    TrialRow,
    protocol_label,
    series_key,
    shared_f0,
)


def build_series(trials: list[TrialRow], summary: list[SummaryRow], spec) -> dict:
    groups: dict[tuple[str, float], list[SummaryRow]] = {}
    for row in summary:
        if row.coverage_pct is None:
            continue
        groups.setdefault(series_key(row.protocol, row.theta), []).append(row)
    if not groups:
        raise NoDataError("summary CSV has no cells with a coverage percentage")

    bars = []
    for key in sorted(groups):
        rows = sorted(groups[key], key=lambda r: r.n_copies)
        bars.append(
            {
                "protocol": key[0],
                "theta": key[1],
                "label": protocol_label(*key),
                "n_copies": [r.n_copies for r in rows],
                "coverage_pct": [r.coverage_pct for r in rows],
            }
        )

    nc_max = max(nc for s in bars for nc in s["n_copies"])
    pool: dict[tuple[str, float], list[float]] = {}
    for row in trials:
        if row.usable and row.n_copies == nc_max:
            pool.setdefault(series_key(row.protocol, row.theta), []).append(row.fidelity)
    hist = None
    if pool:
        values = np.asarray([f for fs in pool.values() for f in fs])
        edges = histogram_edges(values, spec.bin_width)
        hist = {
            "n_copies": nc_max,
            "bin_edges": [float(e) for e in edges],
            "series": [
                {
                    "label": protocol_label(*key),
                    "counts": [int(c) for c in np.histogram(pool[key], bins=edges)[0]],
                }
                for key in sorted(pool)
            ],
        }

    region = None
    if spec.region_lower is not None:
        region = {"lower": float(spec.region_lower), "upper": float(spec.region_upper)}
    return {
        "figure": "fig5",
        "f0": shared_f0(summary, spec.summary),
        "bin_width": float(spec.bin_width),
        "bars": bars,
        "hist": hist,
        "region": region,
    }


def draw(data: dict, fig) -> None:
    ax_bar, ax_hist = fig.subplots(1, 2)

    bars = data["bars"]
    budgets = sorted({nc for s in bars for nc in s["n_copies"]})
    slot = {nc: i for i, nc in enumerate(budgets)}
    group_width = 0.8
    bar_width = group_width / len(bars)
    for i, s in enumerate(bars):
        xs = [slot[nc] - group_width / 2 + (i + 0.5) * bar_width for nc in s["n_copies"]]
        ax_bar.bar(xs, s["coverage_pct"], width=bar_width, label=s["label"])
    ax_bar.set_xticks(range(len(budgets)))
    ax_bar.set_xticklabels([str(nc) for nc in budgets])
    ax_bar.set_ylim(0, 105)
    ax_bar.set_xlabel("copies per trial")
    ax_bar.set_ylabel("coverage (%)")
    ax_bar.legend(loc="lower right", frameon=False, fontsize=8)

    hist = data["hist"]
    if hist is not None:
        edges = np.asarray(hist["bin_edges"])
        bottom = np.zeros(len(edges) - 1)
        for s in hist["series"]:
            counts = np.asarray(s["counts"], dtype=float)
            ax_hist.bar(
                edges[:-1], counts, width=np.diff(edges), align="edge",
                bottom=bottom, label=s["label"], edgecolor="white", linewidth=0.3,
            )
            bottom += counts
        ax_hist.set_xlabel(f"estimated fidelity at {hist['n_copies']} copies")
        ax_hist.set_ylabel("trials")
        ax_hist.legend(loc="upper left", frameon=False, fontsize=8)
    else:
        ax_hist.set_axis_off()
    if data["region"] is not None:
        ax_hist.axvspan(
            data["region"]["lower"], data["region"]["upper"],
            color="#88cc88", alpha=0.3, zorder=0,
        )
    ax_hist.axvline(data["f0"], color="black", linestyle="--", linewidth=1.0)


def main(argv: list[str] | None = None) -> int:
    from .cli import main as cli_main

    args = list(sys.argv[1:] if argv is None else argv)
    return cli_main(["--figure", "fig5", *args])


if __name__ == "__main__":
    raise SystemExit(main())
