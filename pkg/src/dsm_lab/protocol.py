"""Controlled probe-system interactions and their exact outcome statistics.

A single-qubit probe prepared in |+> is coupled to the system through a
controlled pair of branch operators (A0, A1): the joint state picks up
A0 on the probe-|0> branch and A1 on the probe-|1> branch. Postselecting
the system onto a Fourier-conjugate basis vector |k> leaves an
(unnormalized) 2x2 probe block whose entries are

    e_ab(n, k) = (1/2) <k| A_a rho0 A_b^dagger |k>,

the 1/2 coming from the |+> preparation. Two interaction types are
supported:

* projective ("type1"): A0 = I, A1 = |n><n|. The pair is a contraction,
  not a unitary, so part of the joint weight is unobservable; it is
  tracked as an explicit discard outcome.
* rotation ("type2"): A0 = I - eps(theta)|n><n|, A1 = sin(theta)|n><n|
  with eps(theta) = 2 sin^2(theta/2). These satisfy exact Kraus
  completeness A0^dag A0 + A1^dag A1 = I for every theta and arise from
  the unitary exp(-i theta |n><n| x sigma_y) acting on a probe prepared
  in |0> (see vnm_unitary).

The "weak" protocol label uses the type2 interaction unchanged; it only
selects a different (deliberately truncated) reconstruction formula
downstream.

Closed forms for the block entries are the production path; the
joint-operator oracle builds the full 2d x 2d state and is the ground
truth the closed forms are tested against. Note the sign of the diagonal
correction in the type2 off-diagonal entry:

    e10(n, k) = (sin(theta)/2d) [ S(n, k) - eps(theta) rho_nn ],
    S(n, k) = sum_m e^{i 2 pi (m-n) k / d} rho_nm.

Expanding <k|A1 rho A0^dag|k> by hand makes it tempting to add that
correction instead; the cross term carries cos(theta) - 1 < 0, so it
subtracts. probe_block_oracle arbitrates and the tests hold the closed
form to it at 1e-12.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .qcore import conjugate_basis_matrix, conjugate_basis_vector


class ProtocolKind(str, Enum):
    TYPE_I = "type1"
    TYPE_II = "type2"
    WEAK = "weak"


@dataclass(frozen=True)
class Protocol:
    """Interaction choice plus coupling angle.

    theta is required for the type2 and weak kinds and must lie in
    (0, pi/2]; the projective kind takes no angle.
    """

    kind: ProtocolKind
    theta: float | None = None

    def __post_init__(self) -> None:
        kind = ProtocolKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is ProtocolKind.TYPE_I:
            if self.theta is not None:
                raise ValueError("type1 takes no coupling angle")
        else:
            if self.theta is None:
                raise ValueError(f"{kind.value} requires a coupling angle")
            if not 0.0 < self.theta <= np.pi / 2 + 1e-12:
                raise ValueError(
                    f"theta must lie in (0, pi/2], got {self.theta}"
                )

    @property
    def label(self) -> str:
        return self.kind.value

    def uses_rotation(self) -> bool:
        return self.kind is not ProtocolKind.TYPE_I


def epsilon_theta(theta: float) -> float:
    """eps(theta) = 2 sin^2(theta/2) = 1 - cos(theta)."""
    return 2.0 * np.sin(theta / 2.0) ** 2


@dataclass(frozen=True)
class ProbeBlock:
    """Unnormalized 2x2 probe state after postselecting |k> for row n.

    The trace e00 + e11 is the joint probability weight of the
    postselection outcome; summed over k it stays at or below one, the
    rest being discard weight.
    """

    n: int
    k: int
    e00: float
    e01: complex
    e10: complex
    e11: float

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.e00, self.e01], [self.e10, self.e11]], dtype=complex)


BASIS_LABELS = ("Z", "X", "Y")


@dataclass(frozen=True)
class OutcomeDistribution:
    """Exact joint outcome probabilities for one (row n, probe basis) setting.

    probs[k, j] is the probability of postselecting |k> and reading probe
    outcome j, with j = 0 meaning the first basis vector (|0>, |+> or |L>)
    and j = 1 the second (|1>, |-> or |R>). discard absorbs the weight the
    contraction never delivers to a detector, so the whole table sums
    to one.
    """

    n: int
    basis: str
    probs: np.ndarray
    discard: float

    def __post_init__(self) -> None:
        if self.basis not in BASIS_LABELS:
            raise ValueError(f"basis must be one of {BASIS_LABELS}, got {self.basis!r}")

    def total(self) -> float:
        return float(self.probs.sum() + self.discard)


def branch_operators(proto: Protocol, d: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """The probe-|0> and probe-|1> branch operators as d x d matrices."""
    if not 0 <= n < d:
        raise ValueError(f"n must lie in [0, {d - 1}], got {n}")
    a0 = np.eye(d, dtype=complex)
    a1 = np.zeros((d, d), dtype=complex)
    if proto.kind is ProtocolKind.TYPE_I:
        a1[n, n] = 1.0
    else:
        eps = epsilon_theta(proto.theta)
        a0[n, n] -= eps
        a1[n, n] = np.sin(proto.theta)
    return a0, a1


def vnm_unitary(theta: float, d: int, n: int) -> np.ndarray:
    """exp(-i theta |n><n| x sigma_y) on the joint (system x probe) space.

    Acting on a probe prepared in |0> this reproduces the type2 branch
    operators exactly: the only nontrivial action is a rotation by theta
    in the two-dimensional subspace spanned by |n,0> and |n,1>. Ordering
    is kron(system, probe), probe index fastest.
    """
    if not 0 <= n < d:
        raise ValueError(f"n must lie in [0, {d - 1}], got {n}")
    u = np.eye(2 * d, dtype=complex)
    c, s = np.cos(theta), np.sin(theta)
    u[2 * n, 2 * n] = c
    u[2 * n, 2 * n + 1] = -s
    u[2 * n + 1, 2 * n] = s
    u[2 * n + 1, 2 * n + 1] = c
    return u


def _row_transform(rho0: np.ndarray, n: int) -> np.ndarray:
    """T(n, k) = sum_m rho_nm e^{i 2 pi m k / d} for all k."""
    d = rho0.shape[0]
    w = np.exp(2j * np.pi * np.outer(np.arange(d), np.arange(d)) / d)
    return rho0[n, :] @ w


def _conjugate_diagonal(rho0: np.ndarray) -> np.ndarray:
    """q(k) = <k|rho0|k> for all k."""
    d = rho0.shape[0]
    w = conjugate_basis_matrix(d)
    return np.einsum("mk,mn,nk->k", w.conj(), rho0, w).real


def probe_blocks_for_row(
    rho0: np.ndarray, proto: Protocol, n: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Closed-form block entries (e00, e10, e11) for all k at fixed n.

    Vectorized production path: O(d^2) per row. e00 needs the conjugate
    diagonal <k|rho0|k>, which is recomputed here per call; the experiment
    drivers cache whole distribution tables per state instead of calling
    this in a loop.
    """
    d = rho0.shape[0]
    if not 0 <= n < d:
        raise ValueError(f"n must lie in [0, {d - 1}], got {n}")
    k = np.arange(d)
    t = _row_transform(rho0, n)
    s = np.exp(-2j * np.pi * n * k / d) * t
    q = _conjugate_diagonal(rho0)
    rho_nn = rho0[n, n].real
    if proto.kind is ProtocolKind.TYPE_I:
        e00 = 0.5 * q
        e10 = s / (2.0 * d)
        e11 = np.full(d, rho_nn / (2.0 * d))
    else:
        eps = epsilon_theta(proto.theta)
        sin_t = np.sin(proto.theta)
        e00 = 0.5 * (q - (2.0 * eps / d) * s.real + (eps**2) * rho_nn / d)
        e10 = (sin_t / (2.0 * d)) * (s - eps * rho_nn)
        e11 = np.full(d, (sin_t**2) * rho_nn / (2.0 * d))
    return e00, e10, e11


def probe_block_closed_form(
    rho0: np.ndarray, proto: Protocol, n: int, k: int
) -> ProbeBlock:
    """Single (n, k) probe block from the closed forms."""
    d = rho0.shape[0]
    if not 0 <= k < d:
        raise ValueError(f"k must lie in [0, {d - 1}], got {k}")
    e00, e10, e11 = probe_blocks_for_row(rho0, proto, n)
    return ProbeBlock(
        n=n,
        k=k,
        e00=float(e00[k]),
        e01=complex(np.conj(e10[k])),
        e10=complex(e10[k]),
        e11=float(e11[k]),
    )


def probe_block_oracle(
    rho0: np.ndarray, proto: Protocol, n: int, k: int
) -> ProbeBlock:
    """Ground-truth probe block via the full joint-operator construction.

    Builds U = A0 x |0><0| + A1 x |1><1| on the 2d-dimensional joint
    space, applies it to rho0 x |+><+|, and contracts the system with
    <k| . |k>. O(d^3); reserved for tests and the oracle-check command.
    """
    d = rho0.shape[0]
    if not 0 <= k < d:
        raise ValueError(f"k must lie in [0, {d - 1}], got {k}")
    a0, a1 = branch_operators(proto, d, n)
    p0 = np.array([[1, 0], [0, 0]], dtype=complex)
    p1 = np.array([[0, 0], [0, 1]], dtype=complex)
    u = np.kron(a0, p0) + np.kron(a1, p1)
    plus = np.full((2, 2), 0.5, dtype=complex)
    joint = u @ np.kron(rho0, plus) @ u.conj().T
    kvec = conjugate_basis_vector(d, k)
    # <k|_system joint |k>_system, leaving the 2x2 probe block
    joint = joint.reshape(d, 2, d, 2)
    block = np.einsum("m,manb,n->ab", kvec.conj(), joint, kvec)
    return ProbeBlock(
        n=n,
        k=k,
        e00=float(block[0, 0].real),
        e01=complex(block[0, 1]),
        e10=complex(block[1, 0]),
        e11=float(block[1, 1].real),
    )


def outcome_distribution(
    rho0: np.ndarray, proto: Protocol, n: int, basis: str
) -> OutcomeDistribution:
    """Exact joint (k, probe outcome) distribution for one basis setting.

    Z reads the probe in {|0>, |1>}, X in {|+>, |->}, Y in
    {|L>, |R>} with |L/R> = (|0> +/- i|1>)/sqrt(2). Probabilities come
    straight from the probe blocks:

        P(k, first)  = (e00 + e11)/2 + Re e10   (X), + Im e10 (Y)
        P(k, second) = (e00 + e11)/2 - Re e10   (X), - Im e10 (Y)

    and simply (e00, e11) for Z. Whatever the rows do not account for is
    the discard weight.
    """
    e00, e10, e11 = probe_blocks_for_row(rho0, proto, n)
    d = e00.size
    probs = np.empty((d, 2), dtype=float)
    if basis == "Z":
        probs[:, 0] = e00
        probs[:, 1] = e11
    elif basis == "X":
        half = 0.5 * (e00 + e11)
        probs[:, 0] = half + e10.real
        probs[:, 1] = half - e10.real
    elif basis == "Y":
        half = 0.5 * (e00 + e11)
        probs[:, 0] = half + e10.imag
        probs[:, 1] = half - e10.imag
    else:
        raise ValueError(f"basis must be one of {BASIS_LABELS}, got {basis!r}")
    discard = 1.0 - probs.sum()
    return OutcomeDistribution(n=n, basis=basis, probs=probs, discard=float(discard))
