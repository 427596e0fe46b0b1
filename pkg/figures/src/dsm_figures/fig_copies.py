"""fig3: mean fidelity and bias versus the per-trial copy budget.

Top panel: mean estimated fidelity per series with one-standard-deviation
error bars, against the copy budget on a log axis, with the target fidelity
as a dashed line. Bottom panel: the signed bias of the same cells around
zero. All values come from the summary CSV.
"""

from __future__ import annotations

import sys

from .schema import NoDataError, SummaryRow, TrialRow, protocol_label, series_key, shared_f0


def _summary_series(summary: list[SummaryRow], x_field: str) -> list[dict]:
    groups: dict[tuple[str, float], list[SummaryRow]] = {}
    for row in summary:
        if row.f_ave is None:
            continue
        groups.setdefault(series_key(row.protocol, row.theta), []).append(row)
    series = []
    for key in sorted(groups):
        rows = sorted(groups[key], key=lambda r: getattr(r, x_field))
        series.append(
            {
                "protocol": key[0],
                "theta": key[1],
                "label": protocol_label(*key),
                x_field: [getattr(r, x_field) for r in rows],
                "f_ave": [r.f_ave for r in rows],
                "std_f": [r.std_f for r in rows],
                "delta_f_bias": [r.delta_f_bias for r in rows],
            }
        )
    if not series:
        raise NoDataError("summary CSV has no cells with usable statistics")
    return series


def build_series(trials: list[TrialRow], summary: list[SummaryRow], spec) -> dict:
    return {
        "figure": "fig3",
        "f0": shared_f0(summary, spec.summary),
        "series": _summary_series(summary, "n_copies"),
    }


def draw(data: dict, fig) -> None:
    ax_f, ax_b = fig.subplots(2, 1, sharex=True)
    for s in data["series"]:
        ax_f.errorbar(
            s["n_copies"], s["f_ave"], yerr=s["std_f"],
            marker="o", markersize=4, capsize=3, label=s["label"],
        )
        ax_b.plot(s["n_copies"], s["delta_f_bias"], marker="o", markersize=4)
    ax_f.axhline(data["f0"], color="black", linestyle="--", linewidth=1.0)
    ax_b.axhline(0.0, color="black", linewidth=0.8)
    ax_f.set_xscale("log")
    ax_f.set_ylabel("mean estimated fidelity")
    ax_b.set_ylabel("bias")
    ax_b.set_xlabel("copies per trial")
    ax_f.legend(loc="best", frameon=False, fontsize=9)


def main(argv: list[str] | None = None) -> int:
    from .cli import main as cli_main

    args = list(sys.argv[1:] if argv is None else argv)
    return cli_main(["--figure", "fig3", *args])


if __name__ == "__main__":
    raise SystemExit(main())
