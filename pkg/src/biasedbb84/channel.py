"""Qubit channel representations and validity checks.

A qubit state is a Bloch (Stokes) vector (theta_z, theta_x, theta_y), ordered
z first, with |0> the +1 eigenstate of sigma_z.  A channel acts on Bloch
vectors as the affine map v -> R v + t with a real 3x3 matrix R and a real
translation t, i.e. 12 real parameters.

Choi convention used throughout: Choi = (I (x) E)(|Phi><Phi|) with
|Phi> = (|00> + |11>)/sqrt(2).  The *first* tensor factor is the channel-input
reference and the Choi matrix is normalized to trace 1.  Trace preservation is
equivalent to the partial trace over the output factor being I/2, and complete
positivity to the Choi matrix being positive semidefinite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidChoi, NonPhysicalState

EPS_POS = 1e-12       # slack on the Bloch-ball norm constraint
HERM_TOL = 1e-12      # max allowed |A - A^dag| entry
TRACE_TOL = 1e-12
PSD_TOL = 1e-10       # eigenvalues in [-PSD_TOL, 0) are numerical noise
KRAUS_CUTOFF = 1e-10  # Choi eigenvalues below this do not produce a Kraus op
ENV_DIM = 4           # fixed environment dimension (zero-padded)

PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULIS = np.stack([PAULI_Z, PAULI_X, PAULI_Y])  # (z, x, y) ordering
I2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class BlochVector:
    """Stokes coordinates of a qubit state, ordered (z, x, y)."""

    theta_z: float
    theta_x: float
    theta_y: float

    def as_array(self) -> np.ndarray:
        return np.array([self.theta_z, self.theta_x, self.theta_y], dtype=float)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    @classmethod
    def from_array(cls, arr) -> "BlochVector":
        a = np.asarray(arr, dtype=float).reshape(3)
        return cls(float(a[0]), float(a[1]), float(a[2]))


def clipped_spectrum(vals: np.ndarray, tol: float = PSD_TOL) -> np.ndarray:
    """Clip eigenvalues in [-tol, 0) to 0; anything more negative is an error."""
    vals = np.asarray(vals, dtype=float)
    if vals.min(initial=0.0) < -tol:
        raise InvalidChoi(f"eigenvalue {vals.min():.3e} below -{tol:.0e}")
    return np.clip(vals, 0.0, None)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, PSD operator on a 2- or 4-dimensional space."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", a)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise NonPhysicalState(f"not square: shape {a.shape}")
        if np.abs(a - a.conj().T).max() > HERM_TOL:
            raise NonPhysicalState("not Hermitian within 1e-12")
        if abs(a.trace() - 1.0) > TRACE_TOL:
            raise NonPhysicalState(f"trace {a.trace():.15f} != 1 within 1e-12")
        if np.linalg.eigvalsh(a).min() < -PSD_TOL:
            raise NonPhysicalState("negative eigenvalue below -1e-10")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class QubitChannel:
    """Affine (Stokes) form of a qubit channel: v -> R v + t."""

    R: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float).reshape(3, 3)
        t = np.asarray(self.t, dtype=float).reshape(3)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "t", t)

    @classmethod
    def identity(cls) -> "QubitChannel":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def amplitude_damping(cls, p: float) -> "QubitChannel":
        """Decay-to-|0> channel: R = diag(1-p, sqrt(1-p), sqrt(1-p)), t = (p, 0, 0)."""
        if not 0.0 <= p <= 1.0:
            raise NonPhysicalState(f"damping parameter p={p} outside [0, 1]")
        s = np.sqrt(1.0 - p)
        return cls(np.diag([1.0 - p, s, s]), np.array([p, 0.0, 0.0]))

    @classmethod
    def from_dict(cls, d: dict) -> "QubitChannel":
        if "amplitude_damping" in d:
            return cls.amplitude_damping(float(d["amplitude_damping"]["p"]))
        return cls(np.array(d["R"], dtype=float), np.array(d["t"], dtype=float))

    @classmethod
    def from_json(cls, text: str) -> "QubitChannel":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return {"R": self.R.tolist(), "t": self.t.tolist()}


@dataclass(frozen=True)
class ChoiState:
    """Trace-normalized Choi matrix, input reference factor first."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=complex).reshape(4, 4)
        object.__setattr__(self, "entries", a)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])

    def trace_defect(self) -> float:
        """Max deviation of the output partial trace from I/2."""
        c4 = self.entries.reshape(2, 2, 2, 2)
        reduced = np.einsum("imjm->ij", c4)
        return float(np.abs(reduced - I2 / 2.0).max())


@dataclass(frozen=True)
class KrausSet:
    """Kraus operators K_i with sum_i K_i^dag K_i = I."""

    operators: tuple

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex).reshape(2, 2) for k in self.operators)
        if not 1 <= len(ops) <= 4:
            raise InvalidChoi(f"expected 1..4 Kraus operators, got {len(ops)}")
        object.__setattr__(self, "operators", ops)
        # Tolerance budget: up to four Choi eigenvalues of magnitude KRAUS_CUTOFF
        # may be discarded for channels at the CP boundary, each carrying
        # weight 2*lambda.
        total = sum(k.conj().T @ k for k in ops)
        if np.abs(total - I2).max() > 1e-8:
            raise InvalidChoi("Kraus completeness sum differs from I by > 1e-8")


def apply_channel(ch: QubitChannel, v: BlochVector) -> BlochVector:
    """Evaluate the affine map R v + t."""
    return BlochVector.from_array(ch.R @ v.as_array() + ch.t)


def bloch_to_density(v: BlochVector) -> DensityMatrix:
    """rho = (I + theta_z sigma_z + theta_x sigma_x + theta_y sigma_y) / 2."""
    if v.norm > 1.0 + EPS_POS:
        raise NonPhysicalState(f"Bloch norm {v.norm} exceeds 1")
    rho = (I2 + np.tensordot(v.as_array(), PAULIS, axes=1)) / 2.0
    return DensityMatrix(rho)


def density_to_bloch(rho: DensityMatrix) -> BlochVector:
    a = rho.entries
    comps = [float(np.trace(s @ a).real) for s in PAULIS]
    return BlochVector(*comps)


def apply_to_operator(ch: QubitChannel, m: np.ndarray) -> np.ndarray:
    """Linear extension of the channel to arbitrary 2x2 operators.

    For m = a I + b.sigma the image is a (I + t.sigma) + (R b).sigma, which
    reduces to the affine Bloch action on density matrices.
    """
    m = np.asarray(m, dtype=complex)
    a = m.trace() / 2.0
    b = np.array([np.trace(s @ m) / 2.0 for s in PAULIS])
    out_b = ch.R @ b + a * ch.t
    return a * I2 + np.tensordot(out_b, PAULIS, axes=1)


def channel_to_choi(ch: QubitChannel) -> ChoiState:
    """Assemble (I (x) E)(|Phi><Phi|) by acting on the four basis operators."""
    c = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            basis_op = np.zeros((2, 2), dtype=complex)
            basis_op[i, j] = 1.0
            ref = np.zeros((2, 2), dtype=complex)
            ref[i, j] = 1.0
            c += 0.5 * np.kron(ref, apply_to_operator(ch, basis_op))
    return ChoiState(c)


def choi_to_kraus(c: ChoiState) -> KrausSet:
    """Kraus operators from the Choi eigendecomposition.

    Eigenvalues below KRAUS_CUTOFF are dropped; eigenvalues below -PSD_TOL are
    a hard complete-positivity failure.
    """
    vals, vecs = np.linalg.eigh(c.entries)
    vals = clipped_spectrum(vals)
    ops = []
    for lam, vec in zip(vals[::-1], vecs.T[::-1]):  # largest first
        if lam < KRAUS_CUTOFF:
            continue
        # Choi index layout is (2*i_ref + m_out), so K[m, i] = sqrt(2 lam) v[2i+m].
        ops.append(np.sqrt(2.0 * lam) * vec.reshape(2, 2).T)
    return KrausSet(tuple(ops))


def kraus_to_channel(k: KrausSet) -> QubitChannel:
    """Recover the affine (R, t) parameters from a Kraus set."""
    image_id = sum(op @ op.conj().T for op in k.operators)
    t = np.array([np.trace(s @ image_id).real / 2.0 for s in PAULIS])
    R = np.zeros((3, 3))
    for b, sig_b in enumerate(PAULIS):
        image = sum(op @ sig_b @ op.conj().T for op in k.operators)
        for a, sig_a in enumerate(PAULIS):
            R[a, b] = np.trace(sig_a @ image).real / 2.0
    return QubitChannel(R, t)


def _complementary_raw(ops, rho: np.ndarray) -> np.ndarray:
    """Environment output [E_E(rho)]_ij = tr(K_i rho K_j^dag), zero-padded to ENV_DIM."""
    n = len(ops)
    out = np.zeros((ENV_DIM, ENV_DIM), dtype=complex)
    for i in range(n):
        ki_rho = ops[i] @ rho
        for j in range(n):
            out[i, j] = np.trace(ki_rho @ ops[j].conj().T)
    return out


def complementary_channel(k: KrausSet, rho: DensityMatrix) -> DensityMatrix:
    if rho.dim != 2:
        raise NonPhysicalState("complementary channel expects a qubit input")
    return DensityMatrix(_complementary_raw(k.operators, rho.entries))


@dataclass(frozen=True)
class TpcpDiagnostics:
    valid: bool
    min_eigenvalue: float
    trace_defect: float


def is_tpcp(ch: QubitChannel, tol: float = PSD_TOL) -> TpcpDiagnostics:
    """Check complete positivity (Choi PSD) and trace preservation."""
    choi = channel_to_choi(ch)
    min_eig = choi.min_eigenvalue()
    defect = choi.trace_defect()
    return TpcpDiagnostics(min_eig >= -tol and defect <= tol, min_eig, defect)
