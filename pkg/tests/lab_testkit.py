"""Helpers shared across the lab's test modules.

Lives outside conftest.py so test files can import it by a name that stays
unique when another package's test tree is collected in the same run.
"""

from __future__ import annotations

import numpy as np

# Ungated diagnostics the acceptance tests want surfaced next to the
# PASS/FAIL lines (value reported, no assertion attached).
REPORTED_VALUES: list[str] = []


def report_value(name: str, text: str) -> None:
    REPORTED_VALUES.append(f"{name}: {text}")


def random_density(d: int, rng: np.random.Generator) -> np.ndarray:
    """Full-rank random mixed state from a complex Wishart draw."""
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real
