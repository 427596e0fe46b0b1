"""fig6: mean fidelity versus detector crosstalk strength.

One line per (protocol, theta) series from the summary CSV with
one-standard-deviation error bars. When one series stays nearly flat while
others fall, an inset zooms into the flat series so its residual variation
is visible at all.
"""

from __future__ import annotations

import sys

from .schema import NoDataError, SummaryRow, TrialRow, protocol_label, series_key, shared_f0

_INSET_SPAN = 0.02


def build_series(trials: list[TrialRow], summary: list[SummaryRow], spec) -> dict:
    groups: dict[tuple[str, float], list[SummaryRow]] = {}
    for row in summary:
        if row.f_ave is None:
            continue
        groups.setdefault(series_key(row.protocol, row.theta), []).append(row)
    series = []
    for key in sorted(groups):
        rows = sorted(groups[key], key=lambda r: r.eta)
        series.append(
            {
                "protocol": key[0],
                "theta": key[1],
                "label": protocol_label(*key),
                "eta": [r.eta for r in rows],
                "f_ave": [r.f_ave for r in rows],
                "std_f": [r.std_f for r in rows],
            }
        )
    if not series:
        raise NoDataError("summary CSV has no cells with usable statistics")
    return {
        "figure": "fig6",
        "f0": shared_f0(summary, spec.summary),
        "series": series,
    }


def _flat_series(series: list[dict]) -> dict | None:
    """The series worth zooming into: flat while at least one other is not."""
    spans = [max(s["f_ave"]) - min(s["f_ave"]) for s in series]
    if len(series) < 2 or max(spans) <= _INSET_SPAN:
        return None
    flat = min(range(len(series)), key=lambda i: spans[i])
    if spans[flat] > _INSET_SPAN:
        return None
    return series[flat]


def draw(data: dict, fig) -> None:
    ax = fig.subplots()
    lines = {}
    for s in data["series"]:
        err = ax.errorbar(
            s["eta"], s["f_ave"], yerr=s["std_f"],
            marker="o", markersize=4, capsize=3, label=s["label"],
        )
        lines[s["label"]] = err.lines[0].get_color()
    ax.axhline(data["f0"], color="black", linestyle="--", linewidth=1.0)
    ax.set_xlabel("crosstalk strength")
    ax.set_ylabel("mean estimated fidelity")
    ax.legend(loc="lower left", frameon=False, fontsize=9)

    flat = _flat_series(data["series"])
    if flat is not None:
        inset = ax.inset_axes([0.55, 0.55, 0.4, 0.38])
        inset.plot(
            flat["eta"], flat["f_ave"],
            marker="o", markersize=3, color=lines[flat["label"]],
        )
        inset.axhline(data["f0"], color="black", linestyle="--", linewidth=0.8)
        mid = (max(flat["f_ave"]) + min(flat["f_ave"])) / 2
        inset.set_ylim(mid - _INSET_SPAN, mid + _INSET_SPAN)
        inset.tick_params(labelsize=7)
        inset.set_title(flat["label"], fontsize=8)


def main(argv: list[str] | None = None) -> int:
    from .cli import main as cli_main

    args = list(sys.argv[1:] if argv is None else argv)
    return cli_main(["--figure", "fig6", *args])


if __name__ == "__main__":
    raise SystemExit(main())
