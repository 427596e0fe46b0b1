"""Density-matrix reconstruction from probe-block estimates.

The postselection index k enters every block entry through a discrete
Fourier phase, so summing the measured e10 entries against that phase
inverts the encoding row by row:

    M_nm = sum_k e^{i 2 pi (n-m) k / d} e10(n, k)

recovers rho_nm/2 exactly for the projective interaction. The rotation
interaction needs its diagonal repaired (the branch operator shaved
eps(theta) rho_nn off every e10 entry), which the e11 entries provide:

    M_nm = sum_k [ e^{i 2 pi (n-m) k / d} e10(n, k)
                   + tan(theta/2) delta_nm e11(n, k) ]

equals (sin(theta)/2) rho_nm exactly, because tan(theta/2) sin(theta)
is the same eps(theta) the off-diagonal entry lost. The weak-style
estimator keeps only the first term on purpose: on exact inputs its
normalized output is

    [ rho0 - eps(theta) diag(rho0) ] / (1 - eps(theta)),

a closed-form witness of the systematic error that truncation buys.

Absolute prefactors never matter downstream: every estimate is
hermitized and divided by its trace before use, and fidelities are read
from the normalized matrix. Raw estimates are generally not positive
semidefinite; an optional clamping projection is provided but the
production pipeline leaves estimates unprojected.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .protocol import ProbeBlock, Protocol, ProtocolKind
from .qcore import hermitize


class DegenerateEstimateError(ValueError):
    """Raised when an estimate carries no usable weight (zero trace)."""


@dataclass(frozen=True)
class RawEstimate:
    """Reconstruction output plus bookkeeping of what was applied to it."""

    entries: np.ndarray
    protocol: Protocol
    hermitized: bool
    trace_normalized: bool

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class SummaryStats:
    """Per-cell trial statistics: mean, spread and relative bias of fidelity."""

    f_ave: float
    df_std: float
    bias: float
    n_trials: int


def blocks_to_arrays(
    blocks: Iterable[ProbeBlock], d: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Collect ProbeBlock objects into (e00, e10, e11) arrays indexed [n, k]."""
    e00 = np.zeros((d, d), dtype=float)
    e10 = np.zeros((d, d), dtype=complex)
    e11 = np.zeros((d, d), dtype=float)
    seen = np.zeros((d, d), dtype=bool)
    for b in blocks:
        e00[b.n, b.k] = b.e00
        e10[b.n, b.k] = b.e10
        e11[b.n, b.k] = b.e11
        seen[b.n, b.k] = True
    if not seen.all():
        missing = np.argwhere(~seen)[0]
        raise ValueError(
            f"incomplete block set: missing (n={missing[0]}, k={missing[1]})"
        )
    return e00, e10, e11


def _fourier_sum(e10: np.ndarray) -> np.ndarray:
    """M_nm = sum_k e^{i 2 pi (n-m) k / d} e10[n, k]."""
    d = e10.shape[0]
    idx = np.arange(d)
    w = np.exp(2j * np.pi * np.outer(idx, idx) / d)
    # e^{i 2 pi (n-m) k/d} = w[n,k] * conj(w[m,k]); fold the n phase into
    # the data, then contract the k axis against conj(w).
    return (e10 * w) @ w.conj()


def _finalize(
    m: np.ndarray, protocol: Protocol, normalize: bool
) -> RawEstimate:
    m = hermitize(m)
    if not normalize:
        return RawEstimate(m, protocol, hermitized=True, trace_normalized=False)
    tr = float(np.trace(m).real)
    if tr == 0.0:
        raise DegenerateEstimateError(
            "estimate has exactly zero trace (no counts reached any diagonal)"
        )
    return RawEstimate(m / tr, protocol, hermitized=True, trace_normalized=True)


def reconstruct_type1(
    e10: np.ndarray, protocol: Protocol | None = None, normalize: bool = True
) -> RawEstimate:
    """Fourier inversion for the projective interaction.

    e10 is the [n, k] array of off-diagonal block estimates (use
    blocks_to_arrays to convert from ProbeBlock objects). On exact inputs
    the normalized result reproduces the true state to round-off.
    """
    if protocol is None:
        protocol = Protocol(ProtocolKind.TYPE_I)
    return _finalize(_fourier_sum(np.asarray(e10, dtype=complex)), protocol, normalize)


def reconstruct_type2(
    e10: np.ndarray,
    e11: np.ndarray,
    theta: float,
    normalize: bool = True,
) -> RawEstimate:
    """Fourier inversion plus diagonal repair for the rotation interaction.

    The relative coefficient between the Fourier term and the summed e11
    term is tan(theta/2) per k; that choice (and no other) makes exact
    inputs reproduce the true state, which the round-trip tests certify.
    """
    if not 0.0 < theta <= np.pi / 2 + 1e-12:
        raise ValueError(f"theta must lie in (0, pi/2], got {theta}")
    m = _fourier_sum(np.asarray(e10, dtype=complex))
    diag = np.tan(theta / 2.0) * np.asarray(e11, dtype=float).sum(axis=1)
    m = m + np.diag(diag.astype(complex))
    return _finalize(m, Protocol(ProtocolKind.TYPE_II, theta), normalize)


def reconstruct_weak(
    e10: np.ndarray, theta: float, normalize: bool = True
) -> RawEstimate:
    """Truncated estimator: Fourier term only, diagonal repair dropped.

    Deliberately biased. On exact rotation-interaction inputs the
    normalized output equals [rho0 - eps diag(rho0)]/(1 - eps); finite
    statistics add their usual scatter on top of that floor.
    """
    if not 0.0 < theta <= np.pi / 2 + 1e-12:
        raise ValueError(f"theta must lie in (0, pi/2], got {theta}")
    m = _fourier_sum(np.asarray(e10, dtype=complex))
    return _finalize(m, Protocol(ProtocolKind.WEAK, theta), normalize)


def physicality_projection(raw: RawEstimate) -> np.ndarray:
    """Optional clamp-to-physical step: zero negative eigenvalues, renormalize.

    Not used by the default pipeline; fidelities are read from the
    unprojected linear-inversion estimates.
    """
    if not raw.hermitized:
        raise ValueError("projection expects a hermitized estimate")
    w, v = np.linalg.eigh(raw.entries)
    w = np.clip(w, 0.0, None)
    total = w.sum()
    if total <= 0.0:
        raise DegenerateEstimateError("no positive eigenvalue weight to keep")
    w /= total
    return (v * w) @ v.conj().T


def summarize(fidelities: Sequence[float], f0: float) -> SummaryStats:
    """Sample mean and sample standard deviation (n-1 denominator) plus bias.

    The bias is relative: (f0 - mean)/f0. A single trial has no spread
    estimate; its standard deviation is reported as zero.
    """
    arr = np.asarray(list(fidelities), dtype=float)
    if arr.size == 0:
        raise ValueError("cannot summarize an empty fidelity sequence")
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return SummaryStats(
        f_ave=mean,
        df_std=std,
        bias=(f0 - mean) / f0,
        n_trials=int(arr.size),
    )
