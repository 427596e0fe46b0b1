"""Histogram binning matching the lab's own convention.

The lab aligns bin edges to integer multiples of the bin width and covers
the full data range, so a re-binned trial CSV reproduces the lab's
histogram.csv exactly. The same rule is used here to keep the figures
consistent with those counts.
"""

from __future__ import annotations

import numpy as np


def histogram_edges(values: np.ndarray, width: float) -> np.ndarray:
    """Width-aligned bin edges covering all of ``values``."""
    lo = np.floor(values.min() / width) * width
    hi = np.ceil(values.max() / width) * width
    edges = np.arange(lo, hi + width / 2, width)
    if edges.size < 2:
        edges = np.array([lo, lo + width])
    return edges


def bin_counts(values: list[float], width: float) -> tuple[list[float], list[int]]:
    """Edge list and per-bin counts for one data series."""
    arr = np.asarray(values, dtype=float)
    edges = histogram_edges(arr, width)
    counts, edges = np.histogram(arr, bins=edges)
    return [float(e) for e in edges], [int(c) for c in counts]
