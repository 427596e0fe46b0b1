"""Readers for the dsm-lab result CSVs.

The lab writes two files per run: a per-trial table and a per-cell summary
table. Both are plain CSV with a fixed header row. This module is the only
place the figure scripts touch those files; everything downstream works on
the typed rows returned here.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

TRIAL_COLUMNS = (
    "experiment",
    "protocol",
    "theta",
    "n_qubits",
    "n_copies",
    "eta",
    "trial",
    "fidelity",
    "status",
    "seed",
)

SUMMARY_COLUMNS = (
    "experiment",
    "protocol",
    "theta",
    "n_qubits",
    "n_copies",
    "eta",
    "n_trials",
    "f0",
    "f_ave",
    "delta_f_bias",
    "std_f",
    "coverage_pct",
)


class SchemaError(ValueError):
    """Raised when a CSV does not match the expected dsm-lab schema."""


class NoDataError(ValueError):
    """Raised when an input CSV parses but holds no rows a figure can use."""


@dataclass(frozen=True)
class TrialRow:
    experiment: str
    protocol: str
    theta: float
    n_qubits: int
    n_copies: int
    eta: float
    trial: int
    fidelity: float
    status: str
    seed: int

    @property
    def usable(self) -> bool:
        return self.status == "ok" and math.isfinite(self.fidelity)


@dataclass(frozen=True)
class SummaryRow:
    experiment: str
    protocol: str
    theta: float
    n_qubits: int
    n_copies: int
    eta: float
    n_trials: int
    f0: float
    f_ave: float | None
    delta_f_bias: float | None
    std_f: float | None
    coverage_pct: float | None


def _check_header(found: list[str] | None, expected: tuple[str, ...], path: Path, kind: str) -> None:
    if found is None:
        raise SchemaError(f"{kind} CSV {path} is empty (no header row)")
    if tuple(found) == expected:
        return
    missing = [c for c in expected if c not in found]
    extra = [c for c in found if c not in expected]
    parts = []
    if missing:
        parts.append("missing column(s) " + ", ".join(repr(c) for c in missing))
    if extra:
        parts.append("unexpected column(s) " + ", ".join(repr(c) for c in extra))
    if not parts:
        parts.append(f"columns out of order (found {found!r})")
    raise SchemaError(f"{kind} CSV {path}: " + "; ".join(parts))


def _float_cell(text: str, column: str, path: Path, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise SchemaError(
            f"{path} line {line}: column {column!r} is not a number: {text!r}"
        ) from None


def _int_cell(text: str, column: str, path: Path, line: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise SchemaError(
            f"{path} line {line}: column {column!r} is not an integer: {text!r}"
        ) from None


def _optional_float_cell(text: str, column: str, path: Path, line: int) -> float | None:
    if text == "":
        return None
    return _float_cell(text, column, path, line)


def read_trials(path: str | Path) -> list[TrialRow]:
    """Read a per-trial CSV, validating the header and every cell."""
    path = Path(path)
    rows: list[TrialRow] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        _check_header(header, TRIAL_COLUMNS, path, "trial")
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(TRIAL_COLUMNS):
                raise SchemaError(
                    f"{path} line {lineno}: expected {len(TRIAL_COLUMNS)} cells, got {len(rec)}"
                )
            rows.append(
                TrialRow(
                    experiment=rec[0],
                    protocol=rec[1],
                    theta=_float_cell(rec[2], "theta", path, lineno),
                    n_qubits=_int_cell(rec[3], "n_qubits", path, lineno),
                    n_copies=_int_cell(rec[4], "n_copies", path, lineno),
                    eta=_float_cell(rec[5], "eta", path, lineno),
                    trial=_int_cell(rec[6], "trial", path, lineno),
                    fidelity=_float_cell(rec[7], "fidelity", path, lineno),
                    status=rec[8],
                    seed=_int_cell(rec[9], "seed", path, lineno),
                )
            )
    return rows


def read_summary(path: str | Path) -> list[SummaryRow]:
    """Read a per-cell summary CSV, validating the header and every cell.

    Statistics cells may be empty (a cell whose trials all failed, or a
    coverage column that does not apply); those come back as None.
    """
    path = Path(path)
    rows: list[SummaryRow] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        _check_header(header, SUMMARY_COLUMNS, path, "summary")
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(SUMMARY_COLUMNS):
                raise SchemaError(
                    f"{path} line {lineno}: expected {len(SUMMARY_COLUMNS)} cells, got {len(rec)}"
                )
            rows.append(
                SummaryRow(
                    experiment=rec[0],
                    protocol=rec[1],
                    theta=_float_cell(rec[2], "theta", path, lineno),
                    n_qubits=_int_cell(rec[3], "n_qubits", path, lineno),
                    n_copies=_int_cell(rec[4], "n_copies", path, lineno),
                    eta=_float_cell(rec[5], "eta", path, lineno),
                    n_trials=_int_cell(rec[6], "n_trials", path, lineno),
                    f0=_float_cell(rec[7], "f0", path, lineno),
                    f_ave=_optional_float_cell(rec[8], "f_ave", path, lineno),
                    delta_f_bias=_optional_float_cell(rec[9], "delta_f_bias", path, lineno),
                    std_f=_optional_float_cell(rec[10], "std_f", path, lineno),
                    coverage_pct=_optional_float_cell(rec[11], "coverage_pct", path, lineno),
                )
            )
    return rows


def protocol_label(protocol: str, theta: float) -> str:
    """Human-readable series label for a (protocol, theta) pair.

    Rotation angles are printed in units of pi, matching the notation the
    lab CLI accepts ("type2:0.5pi").
    """
    if theta == 0.0:
        return protocol
    return f"{protocol}:{theta / math.pi:g}pi"


def series_key(protocol: str, theta: float) -> tuple[str, float]:
    """Grouping key for one plotted series.

    Theta travels through the CSV at 9 significant digits, so round before
    using it as a dict key.
    """
    return (protocol, round(theta, 6))


def shared_f0(rows: list[SummaryRow], path: str | Path) -> float:
    """The target fidelity, which must be a single value across the file."""
    values = sorted({row.f0 for row in rows})
    if not values:
        raise SchemaError(f"summary CSV {path} has no data rows")
    if len(values) > 1:
        raise SchemaError(
            f"summary CSV {path}: column 'f0' is not constant ({values})"
        )
    return values[0]
