"""Shannon, binary and von Neumann entropies, and the conditional entropies
of the raw key given Eve's environment.

All entropies are in bits (log base 2).  Eve is modelled as holding the
environment of a Stinespring dilation of the channel: the dilation is fixed as
Choi -> eigendecomposition -> Kraus -> complementary channel, with the
environment zero-padded to dimension 4.  The result is independent of the
unitary freedom in the Kraus decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import (
    ENV_DIM,
    BlochVector,
    DensityMatrix,
    QubitChannel,
    apply_channel,
    apply_to_operator,
    choi_to_kraus,
    channel_to_choi,
    _complementary_raw,
)
from .errors import DomainError, InvalidChoi, NonPhysicalState

# Stricter than the channel-validity tolerance: log is very sensitive near 0.
ENTROPY_CLIP = 1e-12
PSD_HARD = 1e-10


@dataclass(frozen=True)
class SourceDistribution:
    """Bit-transmission bias: P(bit = 0) = q."""

    q: float

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise DomainError(f"bias q={self.q} must lie strictly inside (0, 1)")


def _bias(q) -> float:
    if isinstance(q, SourceDistribution):
        return q.q
    return SourceDistribution(float(q)).q


@dataclass(frozen=True)
class JointDistribution:
    """2x2 table P_XY(x, y) over Alice's bit x and Bob's z-basis outcome y."""

    p_xy: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p_xy, dtype=float).reshape(2, 2)
        object.__setattr__(self, "p_xy", p)
        if p.min() < 0.0:
            raise DomainError("joint distribution has a negative entry")
        if abs(p.sum() - 1.0) > 1e-12:
            raise DomainError(f"joint distribution sums to {p.sum()!r}, not 1")


def binary_entropy(x: float) -> float:
    """h(x) = -x log2 x - (1-x) log2 (1-x), with h(0) = h(1) = 0."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"binary entropy argument {x} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1.0 - x) * np.log2(1.0 - x))


def _entropy_from_eigenvalues(vals: np.ndarray) -> float:
    vals = np.asarray(vals, dtype=float)
    if vals.min(initial=0.0) < -PSD_HARD:
        raise InvalidChoi(f"eigenvalue {vals.min():.3e} below -1e-10")
    vals = vals[vals > ENTROPY_CLIP]
    return float(-(vals * np.log2(vals)).sum())


def von_neumann_entropy(rho) -> float:
    """Spectral entropy -sum lambda log2 lambda of a density matrix (in bits)."""
    entries = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return _entropy_from_eigenvalues(np.linalg.eigvalsh(entries))


def _shannon(probs: np.ndarray) -> float:
    p = np.asarray(probs, dtype=float).ravel()
    p = p[p > 0.0]
    return float(-(p * np.log2(p)).sum())


def joint_distribution(ch: QubitChannel, q) -> JointDistribution:
    """P_XY(x, y) = P_X(x) <y| E(|x><x|) |y> for z-basis preparation/measurement."""
    q = _bias(q)
    p = np.zeros((2, 2))
    for x, (px, theta_in) in enumerate(((q, 1.0), (1.0 - q, -1.0))):
        out = apply_channel(ch, BlochVector(theta_in, 0.0, 0.0))
        prob0 = (1.0 + out.theta_z) / 2.0
        if not -1e-12 <= prob0 <= 1.0 + 1e-12:
            raise NonPhysicalState(
                f"channel maps the z axis outside the Bloch ball (P(0)={prob0})"
            )
        p[x, 0] = px * prob0
        p[x, 1] = px * (1.0 - prob0)
    return JointDistribution(np.clip(p, 0.0, None))


def conditional_shannon(j: JointDistribution, direction: str) -> float:
    """H(X|Y) for 'x_given_y', H(Y|X) for 'y_given_x'."""
    p = j.p_xy
    if direction == "x_given_y":
        marginal = p.sum(axis=0)
    elif direction == "y_given_x":
        marginal = p.sum(axis=1)
    else:
        raise DomainError(f"unknown direction {direction!r}")
    return _shannon(p) - _shannon(marginal)


def _environment_outputs(ch: QubitChannel):
    """E_E(|0><0|) and E_E(|1><1|) as 4x4 environment matrices."""
    ops = choi_to_kraus(channel_to_choi(ch)).operators
    e0 = _complementary_raw(ops, np.diag([1.0 + 0.0j, 0.0]))
    e1 = _complementary_raw(ops, np.diag([0.0j, 1.0]))
    return e0, e1


def h_x_given_e(ch: QubitChannel, q) -> float:
    """Conditional entropy H(X|E) of Alice's bit given Eve's environment.

    Built from the classical-quantum state
    rho_XE = q |0><0| (x) E_E(|0><0|) + (1-q) |1><1| (x) E_E(|1><1|).
    """
    q = _bias(q)
    e0, e1 = _environment_outputs(ch)
    block0, block1 = q * e0, (1.0 - q) * e1
    # rho_XE is block diagonal, so its spectrum is the union of the blocks'.
    vals_xe = np.concatenate(
        [np.linalg.eigvalsh(block0), np.linalg.eigvalsh(block1)]
    )
    rho_e = block0 + block1
    return _entropy_from_eigenvalues(vals_xe) - von_neumann_entropy(rho_e)


def purify(rho: np.ndarray, env_dim: int = ENV_DIM) -> np.ndarray:
    """Purification amplitudes Psi[i, k] with sum_k Psi Psi^dag = rho.

    Built from the eigendecomposition rho = sum_k l_k |u_k><u_k| as
    Psi[i, k] = sqrt(l_k) u_k[i]; env_dim must be at least rank(rho).
    """
    rho = np.asarray(rho, dtype=complex)
    vals, vecs = np.linalg.eigh(rho)
    if vals.min() < -PSD_HARD:
        raise InvalidChoi(f"eigenvalue {vals.min():.3e} below -1e-10")
    vals = np.clip(vals, 0.0, None)
    if env_dim < rho.shape[0]:
        raise DomainError(f"environment dimension {env_dim} below rank bound")
    psi = np.zeros((rho.shape[0], env_dim), dtype=complex)
    psi[:, : rho.shape[0]] = vecs * np.sqrt(vals)
    return psi


def h_y_given_e(ch: QubitChannel, q) -> float:
    """Conditional entropy H(Y|E) of Bob's z outcome given Eve's environment.

    Sends half of sqrt(q)|00> + sqrt(1-q)|11> through the channel, purifies the
    result into a dimension-4 environment, traces out Alice, and pinches Bob's
    system in the z basis.
    """
    q = _bias(q)
    amp = np.array([np.sqrt(q), np.sqrt(1.0 - q)])

    # rho_AB = sum_{i,j} amp_i amp_j |i><j| (x) E(|i><j|), a 4x4 state.
    rho_ab = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            basis_op = np.zeros((2, 2), dtype=complex)
            basis_op[i, j] = 1.0
            ref = np.zeros((2, 2), dtype=complex)
            ref[i, j] = 1.0
            rho_ab += amp[i] * amp[j] * np.kron(ref, apply_to_operator(ch, basis_op))

    # Purify via the eigendecomposition: |Psi> = sum_k sqrt(l_k) |u_k>_AB |k>_E.
    psi = purify(rho_ab).reshape(2, 2, ENV_DIM)  # indices (a, b, k)

    # rho_BE with Alice traced out; Bob's z pinching keeps the diagonal blocks.
    rho_be = np.einsum("abk,acl->bkcl", psi, psi.conj())
    block_y0 = rho_be[0, :, 0, :]
    block_y1 = rho_be[1, :, 1, :]
    vals_ye = np.concatenate(
        [np.linalg.eigvalsh(block_y0), np.linalg.eigvalsh(block_y1)]
    )
    rho_e = block_y0 + block_y1
    return _entropy_from_eigenvalues(vals_ye) - von_neumann_entropy(rho_e)
