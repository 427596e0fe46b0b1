import csv

import pytest

from dsm_figures.schema import SUMMARY_COLUMNS, TRIAL_COLUMNS

TRIAL_DEFAULTS = {
    "experiment": "histogram",
    "protocol": "type1",
    "theta": 0.0,
    "n_qubits": 2,
    "n_copies": 100,
    "eta": 0.0,
    "trial": 0,
    "fidelity": 0.9,
    "status": "ok",
    "seed": 1,
}

SUMMARY_DEFAULTS = {
    "experiment": "histogram",
    "protocol": "type1",
    "theta": 0.0,
    "n_qubits": 2,
    "n_copies": 100,
    "eta": 0.0,
    "n_trials": 10,
    "f0": 0.9,
    "f_ave": 0.9,
    "delta_f_bias": 0.0,
    "std_f": 0.05,
    "coverage_pct": "",
}


def _write(path, columns, defaults, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for overrides in rows:
            merged = {**defaults, **overrides}
            writer.writerow([merged[c] for c in columns])
    return path


@pytest.fixture
def write_trials(tmp_path):
    def _factory(rows, name="trials.csv"):
        return _write(tmp_path / name, TRIAL_COLUMNS, TRIAL_DEFAULTS, rows)

    return _factory


@pytest.fixture
def write_summary(tmp_path):
    def _factory(rows, name="summary.csv"):
        return _write(tmp_path / name, SUMMARY_COLUMNS, SUMMARY_DEFAULTS, rows)

    return _factory
