import math

import pytest

from dsm_figures import (
    NoDataError,
    SchemaError,
    protocol_label,
    read_summary,
    read_trials,
    series_key,
    shared_f0,
)


def test_reads_trial_rows(write_trials):
    path = write_trials(
        [
            {"trial": 0, "fidelity": 0.91, "seed": 11},
            {"trial": 1, "fidelity": 0.87, "seed": 12, "status": "failed"},
        ]
    )
    rows = read_trials(path)
    assert len(rows) == 2
    assert rows[0].fidelity == 0.91
    assert rows[0].n_copies == 100
    assert rows[0].usable
    assert not rows[1].usable


def test_nan_fidelity_parses_but_is_not_usable(write_trials):
    path = write_trials([{"fidelity": "nan", "status": "failed"}])
    (row,) = read_trials(path)
    assert math.isnan(row.fidelity)
    assert not row.usable


def test_reads_summary_rows(write_summary):
    path = write_summary(
        [
            {"n_copies": 1000, "f_ave": 0.899, "coverage_pct": 96.5},
            {"n_copies": 100, "f_ave": "", "delta_f_bias": "", "std_f": "", "n_trials": 0},
        ]
    )
    rows = read_summary(path)
    assert rows[0].coverage_pct == 96.5
    assert rows[1].f_ave is None
    assert rows[1].std_f is None
    assert rows[1].coverage_pct is None


def test_missing_column_is_named(tmp_path):
    path = tmp_path / "trials.csv"
    path.write_text("experiment,protocol,theta\nhistogram,type1,0.0\n")
    with pytest.raises(SchemaError, match="missing column.*'fidelity'"):
        read_trials(path)


def test_unexpected_column_is_named(tmp_path, write_summary):
    good = write_summary([{}])
    text = good.read_text().replace("coverage_pct", "coverage_pct,bogus")
    bad = tmp_path / "bad.csv"
    bad.write_text(text)
    with pytest.raises(SchemaError, match="unexpected column.*'bogus'"):
        read_summary(bad)


def test_reordered_columns_rejected(tmp_path, write_trials):
    good = write_trials([{}])
    lines = good.read_text().splitlines()
    cols = lines[0].split(",")
    cols[0], cols[1] = cols[1], cols[0]
    bad = tmp_path / "reordered.csv"
    bad.write_text(",".join(cols) + "\n" + "\n".join(lines[1:]) + "\n")
    with pytest.raises(SchemaError, match="out of order"):
        read_trials(bad)


def test_headerless_file_rejected(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(SchemaError, match="no header row"):
        read_trials(path)


def test_bad_cell_reports_line_and_column(tmp_path, write_trials):
    good = write_trials([{"fidelity": 0.9}])
    bad = tmp_path / "cell.csv"
    bad.write_text(good.read_text().replace("0.9", "not-a-number"))
    with pytest.raises(SchemaError, match=r"line 2.*'fidelity'"):
        read_trials(bad)


def test_short_row_rejected(write_trials, tmp_path):
    good = write_trials([{}])
    lines = good.read_text().splitlines()
    bad = tmp_path / "short.csv"
    bad.write_text(lines[0] + "\n" + ",".join(lines[1].split(",")[:-2]) + "\n")
    with pytest.raises(SchemaError, match="expected 10 cells"):
        read_trials(bad)


def test_protocol_label():
    assert protocol_label("type1", 0.0) == "type1"
    assert protocol_label("type2", math.pi / 2) == "type2:0.5pi"
    assert protocol_label("weak", 0.1 * math.pi) == "weak:0.1pi"


def test_series_key_absorbs_csv_rounding():
    written_back = float(f"{math.pi / 2:.9g}")
    assert series_key("type2", written_back) == series_key("type2", math.pi / 2)


def test_shared_f0(write_summary):
    path = write_summary([{"f0": 0.9}, {"f0": 0.9, "n_copies": 1000}])
    assert shared_f0(read_summary(path), path) == 0.9


def test_shared_f0_rejects_mixed_values(write_summary):
    path = write_summary([{"f0": 0.9}, {"f0": 0.8, "n_copies": 1000}])
    with pytest.raises(SchemaError, match="'f0' is not constant"):
        shared_f0(read_summary(path), path)


def test_shared_f0_rejects_empty():
    with pytest.raises((SchemaError, NoDataError)):
        shared_f0([], "summary.csv")
