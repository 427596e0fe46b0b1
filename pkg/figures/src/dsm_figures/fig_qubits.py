"""fig4: mean fidelity versus register size.

One line per (protocol, theta) series from the summary CSV, with
one-standard-deviation error bars and the target fidelity as a dashed line.
"""

from __future__ import annotations

import sys

from .fig_copies import _summary_series
from .schema import SummaryRow, TrialRow, shared_f0


def build_series(trials: list[TrialRow], summary: list[SummaryRow], spec) -> dict:
    return {
        "figure": "fig4",
        "f0": shared_f0(summary, spec.summary),
        "series": _summary_series(summary, "n_qubits"),
    }


def draw(data: dict, fig) -> None:
    ax = fig.subplots()
    for s in data["series"]:
        ax.errorbar(
            s["n_qubits"], s["f_ave"], yerr=s["std_f"],
            marker="o", markersize=4, capsize=3, label=s["label"],
        )
    ax.axhline(data["f0"], color="black", linestyle="--", linewidth=1.0)
    ax.set_xlabel("number of qubits")
    ax.set_ylabel("mean estimated fidelity")
    xs = sorted({x for s in data["series"] for x in s["n_qubits"]})
    ax.set_xticks(xs)
    ax.legend(loc="best", frameon=False, fontsize=9)


def main(argv: list[str] | None = None) -> int:
    from .cli import main as cli_main

    args = list(sys.argv[1:] if argv is None else argv)
    return cli_main(["--figure", "fig4", *args])


if __name__ == "__main__":
    raise SystemExit(main())
