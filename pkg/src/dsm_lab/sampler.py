"""Finite-statistics measurement simulation.

Counts are drawn from the exact joint outcome distributions by the
cumulative method: the (k, outcome, discard) cells are flattened, a
cumulative array is built once, and each prepared copy turns into one
uniform variate located in that array by binary search. Probability
estimates are plain frequencies.

Randomness is counter-based and fully stateless: a SeedSpec names a
Philox stream by (master_seed, stream_index), and child streams are
derived by folding integers into the stream index with a splitmix64
round per field. Identical SeedSpecs always reproduce identical counts,
no matter which thread or process consumes them, which is what makes
the parallel experiment drivers bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .protocol import BASIS_LABELS, OutcomeDistribution, ProbeBlock

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

NEGATIVE_PROB_TOL = 1e-12


def _splitmix64(x: int) -> int:
    """One splitmix64 output step; the documented stream-mixing primitive."""
    x = (x + _GOLDEN) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def fold_stream(base: int, *indices: int) -> int:
    """Fold integers into a stream index, one splitmix64 round per field.

    fold_stream(s, a, b) != fold_stream(s, b, a) in general; field order
    is part of the contract.
    """
    h = base & _MASK64
    for v in indices:
        h = _splitmix64((h ^ (int(v) & _MASK64)) & _MASK64)
    return h


@dataclass(frozen=True)
class SeedSpec:
    """Name of one random stream: (master_seed, stream_index), both 64-bit."""

    master_seed: int
    stream_index: int = 0

    def __post_init__(self) -> None:
        for field in ("master_seed", "stream_index"):
            v = getattr(self, field)
            if not 0 <= v <= _MASK64:
                raise ValueError(f"{field} must be an unsigned 64-bit integer, got {v}")

    def child(self, *indices: int) -> "SeedSpec":
        """Derived stream for a sub-task (e.g. one (n, basis) cell of a trial)."""
        return SeedSpec(self.master_seed, fold_stream(self.stream_index, *indices))

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed, self.stream_index], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class CountsTable:
    """Outcome tallies for one (row n, probe basis) setting.

    counts[k, j] copies ended in postselection k with probe outcome j;
    discard_count copies produced no detector click. Totals always add
    up to n_copies, the number of prepared copies.
    """

    n: int
    basis: str
    counts: np.ndarray
    discard_count: int
    n_copies: int

    def __post_init__(self) -> None:
        if self.basis not in BASIS_LABELS:
            raise ValueError(f"basis must be one of {BASIS_LABELS}, got {self.basis!r}")
        total = int(self.counts.sum()) + self.discard_count
        if total != self.n_copies:
            raise ValueError(
                f"counts ({total}) do not conserve the copy budget ({self.n_copies})"
            )


def sample_counts(
    dist: OutcomeDistribution,
    n_copies: int,
    seed: SeedSpec,
    count_discards: bool = True,
) -> CountsTable:
    """Draw outcome counts for n_copies prepared copies.

    Each copy is one inverse-CDF lookup of a uniform variate in the
    cumulative array over the flattened (k, j, discard) cells. Entries
    more negative than -1e-12 are rejected; tinier negatives (roundoff
    from the closed forms or the noise kernel) are clamped to zero and
    the table renormalized.

    count_discards=False switches the copy-budget interpretation: the
    discard cell is removed and the remaining cells renormalized, so all
    n_copies land on detectors (the budget counts retained copies only).
    """
    if n_copies < 1:
        raise ValueError(f"n_copies must be at least 1, got {n_copies}")
    d = dist.probs.shape[0]
    flat = np.empty(2 * d + 1, dtype=float)
    flat[: 2 * d] = dist.probs.reshape(-1)
    flat[2 * d] = dist.discard
    if flat.min() < -NEGATIVE_PROB_TOL:
        raise ValueError(
            f"distribution has negative probability {flat.min():.3e}"
        )
    np.clip(flat, 0.0, None, out=flat)
    if not count_discards:
        flat[2 * d] = 0.0
    cum = np.cumsum(flat)
    if cum[-1] <= 0.0:
        raise ValueError("distribution has no positive weight to sample")
    cum /= cum[-1]
    cum[-1] = 1.0
    rng = seed.generator()
    u = rng.random(n_copies)
    cells = np.searchsorted(cum, u, side="right")
    tallies = np.bincount(cells, minlength=2 * d + 1)
    return CountsTable(
        n=dist.n,
        basis=dist.basis,
        counts=tallies[: 2 * d].reshape(d, 2).copy(),
        discard_count=int(tallies[2 * d]),
        n_copies=n_copies,
    )


def estimate_probabilities(counts: CountsTable) -> OutcomeDistribution:
    """Frequency estimates: p_hat(k, j) = counts(k, j)/n_copies."""
    probs = counts.counts.astype(float) / counts.n_copies
    discard = counts.discard_count / counts.n_copies
    return OutcomeDistribution(
        n=counts.n, basis=counts.basis, probs=probs, discard=float(discard)
    )


def estimate_probe_block(
    est_z: OutcomeDistribution,
    est_x: OutcomeDistribution,
    est_y: OutcomeDistribution,
    k: int,
) -> ProbeBlock:
    """Assemble the probe-block estimate at one k from three basis estimates.

    e10 = (1/2)[(P+ - P-) + i(P_L - P_R)], e11 = P_1, e00 = P_0, with all
    probabilities read at the same postselection row k.
    """
    if not (est_z.n == est_x.n == est_y.n):
        raise ValueError("basis estimates belong to different rows n")
    shapes = {est_z.probs.shape, est_x.probs.shape, est_y.probs.shape}
    if len(shapes) != 1:
        raise ValueError("basis estimates have mismatched dimensions")
    e00, e10, e11 = estimate_probe_blocks_all(est_z, est_x, est_y)
    return ProbeBlock(
        n=est_z.n,
        k=k,
        e00=float(e00[k]),
        e01=complex(np.conj(e10[k])),
        e10=complex(e10[k]),
        e11=float(e11[k]),
    )


def estimate_probe_blocks_all(
    est_z: OutcomeDistribution,
    est_x: OutcomeDistribution,
    est_y: OutcomeDistribution,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized probe-block estimates (e00, e10, e11) over all k."""
    e10 = 0.5 * (
        (est_x.probs[:, 0] - est_x.probs[:, 1])
        + 1j * (est_y.probs[:, 0] - est_y.probs[:, 1])
    )
    return est_z.probs[:, 0].copy(), e10, est_z.probs[:, 1].copy()
