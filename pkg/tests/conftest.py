"""Shared fixtures and the acceptance scorecard.

The terminal summary prints one PASS/FAIL line per acceptance criterion
so a run can be graded at a glance without scrolling through tracebacks.
"""

from __future__ import annotations

import numpy as np
import pytest

from lab_testkit import REPORTED_VALUES

ACCEPTANCE_CRITERIA = [
    ("oracle_equivalence", "test_closed_form_matches_oracle"),
    ("exact_inversion_round_trip", "test_exact_inversion_round_trip"),
    ("weak_bias_closed_form", "test_weak_bias_closed_form"),
    ("histogram_replication", "test_histogram_replication"),
    ("confidence_numbers", "test_confidence_numbers"),
    ("trend_orderings", "test_trend_orderings"),
    ("noise_robustness", "test_noise_robustness"),
    ("parallel_determinism", "test_parallel_determinism"),
]

@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260822)


def _outcome_of(stats: dict, name: str) -> str | None:
    for key in ("passed", "failed", "error"):
        for rep in stats.get(key, []):
            nodeid = getattr(rep, "nodeid", "")
            if nodeid.endswith(f"::{name}"):
                return "PASS" if key == "passed" else "FAIL"
    for rep in stats.get("skipped", []):
        if getattr(rep, "nodeid", "").endswith(f"::{name}"):
            return "SKIP"
    return None


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for label, test_name in ACCEPTANCE_CRITERIA:
        outcome = _outcome_of(terminalreporter.stats, test_name)
        if outcome is not None:
            lines.append(f"ACCEPTANCE {label}: {outcome}")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
        for line in REPORTED_VALUES:
            terminalreporter.write_line(f"  reported {line}")
