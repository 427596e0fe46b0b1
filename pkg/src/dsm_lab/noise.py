"""Detector crosstalk noise on probe outcome probabilities.

Imperfect detection is modeled as Gaussian crosstalk between the two
probe outcomes of a basis: outcome labels j are placed on an integer
grid (0 and 1, separated by label_spacing) and the readout kernel

    K(j, j') proportional to exp(-(j - j')^2 spacing^2 / (2 eta^2))

is row-normalized, so each true outcome leaks a fraction

    q = w / (1 + w),    w = exp(-spacing^2 / (2 eta^2))

into the other label. eta = 0 is an exact identity (no division by zero
is ever attempted), and eta -> infinity mixes both outcomes to their
average. Noise acts on the exact physical distributions before any
sampling; the counts a simulated detector reports are draws from the
corrupted statistics.

By default only the probe readout is noisy. The same kernel can
optionally be extended to the d-outcome postselection readout (labels
0..d-1) for sensitivity studies; see apply_postselection_noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .protocol import OutcomeDistribution


@dataclass(frozen=True)
class NoiseModel:
    """Crosstalk strength eta and the outcome-label spacing (default 1)."""

    eta: float
    label_spacing: float = 1.0

    def __post_init__(self) -> None:
        if self.eta < 0:
            raise ValueError(f"eta must be nonnegative, got {self.eta}")
        if self.label_spacing <= 0:
            raise ValueError(
                f"label_spacing must be positive, got {self.label_spacing}"
            )


def crosstalk_weight(model: NoiseModel) -> float:
    """Off-diagonal weight q of the row-normalized 2x2 kernel."""
    if model.eta == 0.0:
        return 0.0
    w = np.exp(-(model.label_spacing**2) / (2.0 * model.eta**2))
    return float(w / (1.0 + w))


def kernel_matrix(model: NoiseModel, n_outcomes: int = 2) -> np.ndarray:
    """Row-normalized crosstalk kernel over n_outcomes integer labels."""
    if model.eta == 0.0:
        return np.eye(n_outcomes)
    j = np.arange(n_outcomes) * model.label_spacing
    k = np.exp(-np.subtract.outer(j, j) ** 2 / (2.0 * model.eta**2))
    return k / k.sum(axis=1, keepdims=True)


def apply_detector_noise(
    dist: OutcomeDistribution, model: NoiseModel
) -> OutcomeDistribution:
    """Mix the two probe outcomes within every postselection row.

    The discard weight never reaches a detector and is untouched; row
    totals, and hence the overall normalization, are preserved exactly.
    """
    if model.eta == 0.0:
        return dist
    q = crosstalk_weight(model)
    p0 = dist.probs[:, 0]
    p1 = dist.probs[:, 1]
    mixed = np.empty_like(dist.probs)
    mixed[:, 0] = (1.0 - q) * p0 + q * p1
    mixed[:, 1] = q * p0 + (1.0 - q) * p1
    return OutcomeDistribution(
        n=dist.n, basis=dist.basis, probs=mixed, discard=dist.discard
    )


def apply_postselection_noise(
    dist: OutcomeDistribution, model: NoiseModel
) -> OutcomeDistribution:
    """Extended reading: crosstalk between the d postselection outcomes.

    The same Gaussian kernel, with integer labels 0..d-1, mixes the k
    index separately for each probe outcome column. Off by default in the
    experiment drivers; exists so the two readings of where imperfect
    detection strikes can be compared.
    """
    if model.eta == 0.0:
        return dist
    d = dist.probs.shape[0]
    kern = kernel_matrix(model, d)
    mixed = kern.T @ dist.probs
    return OutcomeDistribution(
        n=dist.n, basis=dist.basis, probs=mixed, discard=dist.discard
    )
