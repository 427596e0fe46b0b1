"""Dense complex linear algebra for qubit-register states.

Everything downstream works with plain numpy arrays: pure states are
length-d complex vectors, density matrices are d x d complex arrays.
This module builds the canonical target states, mixes in white noise to
hit a requested reference fidelity, supplies the discrete-Fourier
(conjugate) basis used for postselection, and computes fidelities.

Dimensions are arbitrary (d >= 1); the experiment drivers only ever use
powers of two. Basis index m is read as the binary word of qubit values
with the first qubit in the most significant bit, so for four qubits
the all-ones configuration sits at index 15.
"""

from __future__ import annotations

from math import comb

import numpy as np

# Construction tolerances. Hermiticity and normalization are checked at
# 1e-12; eigenvalues are allowed to dip to -1e-10 before a matrix stops
# counting as positive semidefinite.
ATOL = 1e-12
PSD_FLOOR = -1e-10


def ghz_state(n_qubits: int) -> np.ndarray:
    """Equal superposition of the all-zeros and all-ones basis states."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be at least 1")
    d = 2**n_qubits
    psi = np.zeros(d, dtype=complex)
    psi[0] = psi[d - 1] = 1 / np.sqrt(2)
    return psi


def dicke_state(n_qubits: int, excitations: int) -> np.ndarray:
    """Equal-amplitude superposition of all words with the given popcount.

    excitations=1 gives the W state; excitations in {0, n_qubits} gives a
    single computational basis state.
    """
    if n_qubits < 1:
        raise ValueError("n_qubits must be at least 1")
    if not 0 <= excitations <= n_qubits:
        raise ValueError(
            f"excitations must lie in [0, {n_qubits}], got {excitations}"
        )
    d = 2**n_qubits
    psi = np.zeros(d, dtype=complex)
    amp = 1 / np.sqrt(comb(n_qubits, excitations))
    for m in range(d):
        if bin(m).count("1") == excitations:
            psi[m] = amp
    return psi


def mix_white_noise(psi: np.ndarray, f0: float) -> tuple[np.ndarray, float]:
    """Mix a pure state with the maximally mixed state to reach fidelity f0.

    Returns (rho0, p) where rho0 = (1-p)|psi><psi| + p I/d and p solves
    f0 = (1-p) + p/d. Fidelities at or below 1/d are unreachable this way
    and are rejected.
    """
    psi = np.asarray(psi, dtype=complex)
    d = psi.size
    if abs(np.vdot(psi, psi) - 1.0) > 1e-10:
        raise ValueError("input state is not normalized")
    if not 1.0 / d < f0 <= 1.0:
        raise ValueError(f"target fidelity must lie in (1/d, 1], got {f0}")
    p = (1.0 - f0) / (1.0 - 1.0 / d)
    rho0 = (1.0 - p) * np.outer(psi, psi.conj()) + p * np.eye(d) / d
    return rho0, p


def conjugate_basis_vector(d: int, k: int) -> np.ndarray:
    """The k-th Fourier-conjugate basis vector, amplitudes e^{i2pi mk/d}/sqrt(d)."""
    if not 0 <= k < d:
        raise ValueError(f"k must lie in [0, {d - 1}], got {k}")
    m = np.arange(d)
    return np.exp(2j * np.pi * m * k / d) / np.sqrt(d)


def conjugate_basis_matrix(d: int) -> np.ndarray:
    """All conjugate basis vectors as columns: W[m, k] = e^{i2pi mk/d}/sqrt(d)."""
    m = np.arange(d)
    return np.exp(2j * np.pi * np.outer(m, m) / d) / np.sqrt(d)


def hermitize(mat: np.ndarray) -> np.ndarray:
    """Hermitian part (M + M^dagger)/2."""
    return 0.5 * (mat + mat.conj().T)


def fidelity_pure(
    rho: np.ndarray, psi: np.ndarray, with_imag: bool = False
) -> float | tuple[float, float]:
    """Overlap <psi|rho|psi>, real part.

    rho does not have to be a physical state; raw linear-inversion
    estimates are accepted. For Hermitian input the imaginary part is
    numerical noise; pass with_imag=True to get it back as a diagnostic.
    """
    rho = np.asarray(rho)
    psi = np.asarray(psi)
    if rho.shape != (psi.size, psi.size):
        raise ValueError(
            f"dimension mismatch: rho is {rho.shape}, psi has length {psi.size}"
        )
    val = complex(np.vdot(psi, rho @ psi))
    if with_imag:
        return val.real, val.imag
    return val.real


def _psd_sqrt(rho: np.ndarray, atol: float) -> np.ndarray:
    w, v = np.linalg.eigh(rho)
    if w.min() < -atol:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {w.min():.3e})")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity_general(rho: np.ndarray, sigma: np.ndarray, atol: float = 1e-8) -> float:
    """Uhlmann fidelity tr sqrt(sqrt(rho) sigma sqrt(rho)) of two density matrices.

    Both inputs must be PSD within atol; eigenvalues are clamped at zero
    before taking matrix square roots, which keeps the computation stable
    for nearly singular states.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError("density matrices must have equal dimensions")
    s = _psd_sqrt(rho, atol)
    inner = s @ sigma @ s
    w = np.linalg.eigvalsh(hermitize(inner))
    # sqrt amplifies spurious eigensolver residue (1e-17 becomes 3e-9 per
    # mode), so zero everything below a relative floor before the sqrt
    floor = max(float(w.max()), 0.0) * w.size * 1e-15
    w = np.where(w > floor, w, 0.0)
    return float(np.sqrt(w).sum())


def is_density_matrix(rho: np.ndarray, atol: float = ATOL) -> bool:
    """Hermitian, unit trace, PSD within tolerance."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    if np.abs(rho - rho.conj().T).max() > atol:
        return False
    if abs(np.trace(rho).real - 1.0) > atol or abs(np.trace(rho).imag) > atol:
        return False
    return bool(np.linalg.eigvalsh(hermitize(rho)).min() >= PSD_FLOOR)
