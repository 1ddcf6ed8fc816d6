"""Monte Carlo simulation of the modified BB84 quantum part, channel
estimation from matched and mismatched outcomes, and the end-to-end rate
pipeline.

Per shot: Alice draws a basis (z with probability basis_prob_z) and a bit
(0 with probability q, in either basis), prepares the corresponding Bloch
axis state, the channel maps it, Bob draws a basis the same way and obtains
outcome 0 with probability (1 + theta_out . axis)/2.  All sixteen
(alice basis, bit, bob basis, outcome) cells are tallied; the mismatched-basis
cells are what make the off-diagonal parameters R_zx and R_xz identifiable.

Runs are fully determined by the seed.  Shots may be split across partitions
only through per-partition seeds derived from (seed, partition index); the
merged counts then equal a sequential run over the same derived streams.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .channel import BlochVector, QubitChannel, apply_channel
from .entropy import JointDistribution, joint_distribution
from .errors import DomainError, Infeasible, InsufficientData
from .keyrate import KeyRateReport, OmegaParams, key_rate

BASIS_NAMES = "zx"
# Bloch axis unit vectors for (basis, bit): z0, z1, x0, x1.
_AXIS_SIGN = (1.0, -1.0)


@dataclass(frozen=True)
class ProtocolConfig:
    q: float
    shots: int
    seed: int
    basis_prob_z: float = 0.5  # applies to both Alice and Bob

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise DomainError(f"bias q={self.q} outside (0, 1)")
        if not 0.0 < self.basis_prob_z < 1.0:
            raise DomainError(f"basis_prob_z={self.basis_prob_z} outside (0, 1)")
        if self.shots < 1:
            raise DomainError(f"shots={self.shots} must be >= 1")


@dataclass(frozen=True)
class OutcomeCounts:
    """16-cell tally indexed [alice_basis][bit][bob_basis][outcome].

    Basis index 0 is z, 1 is x.  Entries are integers for sampled runs and
    expected (fractional) counts in exact-frequency mode.
    """

    counts: np.ndarray
    shots: float

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=float).reshape(2, 2, 2, 2)
        object.__setattr__(self, "counts", c)
        if c.min() < 0:
            raise DomainError("negative count")
        if abs(c.sum() - self.shots) > 1e-6 * max(self.shots, 1.0):
            raise DomainError(f"counts total {c.sum()} != shots {self.shots}")

    def to_dict(self) -> dict:
        out = {"shots": self.shots, "counts": {}}
        for a in range(2):
            for bit in range(2):
                for b in range(2):
                    key = f"{BASIS_NAMES[a]}{bit}{BASIS_NAMES[b]}"
                    cell = self.counts[a, bit, b]
                    vals = cell.tolist()
                    if float(cell.sum()) == int(cell.sum()) and np.all(cell == np.round(cell)):
                        vals = [int(v) for v in vals]
                    out["counts"][key] = vals
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "OutcomeCounts":
        c = np.zeros((2, 2, 2, 2))
        for key, pair in d["counts"].items():
            a = BASIS_NAMES.index(key[0])
            bit = int(key[1])
            b = BASIS_NAMES.index(key[2])
            c[a, bit, b] = pair
        return cls(c, d["shots"])

    @classmethod
    def from_json(cls, text: str) -> "OutcomeCounts":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class OmegaEstimate:
    omega: OmegaParams
    std_err: tuple  # per-parameter, same ordering as OmegaParams.as_array()

    def to_dict(self) -> dict:
        names = ("R_zz", "R_zx", "R_xz", "R_xx", "t_z", "t_x")
        values = self.omega.as_array()
        return {
            "omega": {n: float(v) for n, v in zip(names, values)},
            "std_err": {n: float(s) for n, s in zip(names, self.std_err)},
        }


def outcome_probabilities(ch: QubitChannel) -> np.ndarray:
    """P(outcome 0) per (alice_basis, bit, bob_basis) cell."""
    p0 = np.empty((2, 2, 2))
    for a in range(2):
        for bit in range(2):
            theta_in = [0.0, 0.0, 0.0]
            theta_in[a] = _AXIS_SIGN[bit]
            out = apply_channel(ch, BlochVector(*theta_in)).as_array()
            for b in range(2):
                p0[a, bit, b] = np.clip((1.0 + out[b]) / 2.0, 0.0, 1.0)
    return p0


def _draw_arrays(rng, n: int, cfg: ProtocolConfig):
    a_basis = (rng.random(n) >= cfg.basis_prob_z).astype(np.int64)
    bits = (rng.random(n) >= cfg.q).astype(np.int64)
    b_basis = (rng.random(n) >= cfg.basis_prob_z).astype(np.int64)
    u = rng.random(n)
    return a_basis, bits, b_basis, u


def simulate(ch: QubitChannel, cfg: ProtocolConfig, partitions: int = 1) -> OutcomeCounts:
    """Sample the protocol; deterministic for a given config and partitioning."""
    p0 = outcome_probabilities(ch)
    total = np.zeros((2, 2, 2, 2), dtype=np.int64)
    if partitions == 1:
        rng = np.random.default_rng(cfg.seed)
        total += _kernels.tally_counts(*_draw_arrays(rng, cfg.shots, cfg), p0)
    else:
        sizes = [cfg.shots // partitions] * partitions
        sizes[-1] += cfg.shots - sum(sizes)
        for i, n in enumerate(sizes):
            rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, i)))
            total += _kernels.tally_counts(*_draw_arrays(rng, n, cfg), p0)
    return OutcomeCounts(total, cfg.shots)


def exact_counts(ch: QubitChannel, cfg: ProtocolConfig) -> OutcomeCounts:
    """Infinite-shot limit: expected (fractional) counts, no sampling noise."""
    p0 = outcome_probabilities(ch)
    pa = np.array([cfg.basis_prob_z, 1.0 - cfg.basis_prob_z])
    pbit = np.array([cfg.q, 1.0 - cfg.q])
    weight = np.einsum("a,x,b->axb", pa, pbit, pa) * cfg.shots
    c = np.stack([weight * p0, weight * (1.0 - p0)], axis=-1)
    return OutcomeCounts(c, cfg.shots)


# Input Stokes rows [theta_z, theta_x, 1] per (alice_basis, bit) stratum:
# z0, z1, x0, x1.
_DESIGN = np.array(
    [
        [1.0, 0.0, 1.0],
        [-1.0, 0.0, 1.0],
        [0.0, 1.0, 1.0],
        [0.0, -1.0, 1.0],
    ]
)
_PINV = np.linalg.pinv(_DESIGN)


def estimate_omega(counts: OutcomeCounts) -> OmegaEstimate:
    """Least-squares channel estimate from all sixteen cells.

    Strata share the translation parameters t_z and t_x, so matched and
    mismatched statistics are combined coherently.  Standard errors follow
    from binomial variance propagation through the pseudoinverse.
    """
    n = counts.counts.sum(axis=-1)  # per (a, bit, b)
    if n.min() <= 0:
        raise InsufficientData("an (alice basis, bit, bob basis) stratum is empty")
    m = counts.counts[..., 0] / n
    stokes = 2.0 * m - 1.0  # E[sigma_b | stratum]
    var = 4.0 * m * (1.0 - m) / n

    params = np.empty((2, 3))
    errs = np.empty((2, 3))
    for b in range(2):
        y = stokes[:, :, b].reshape(4)  # ordering z0, z1, x0, x1
        params[b] = _PINV @ y
        cov = _PINV @ np.diag(var[:, :, b].reshape(4)) @ _PINV.T
        errs[b] = np.sqrt(np.clip(np.diag(cov), 0.0, None))

    omega = OmegaParams(
        r_zz=params[0, 0], r_zx=params[0, 1],
        r_xz=params[1, 0], r_xx=params[1, 1],
        t_z=params[0, 2], t_x=params[1, 2],
    )
    std_err = (errs[0, 0], errs[0, 1], errs[1, 0], errs[1, 1], errs[0, 2], errs[1, 2])
    return OmegaEstimate(omega, std_err)


def project_physical(omega: OmegaParams) -> tuple:
    """Smallest mixing with the completely depolarizing channel that makes a
    (possibly noise-perturbed) estimate physical.

    Returns (projected omega, mixing weight).  Estimates of boundary channels
    such as amplitude damping land outside the physical set about half the
    time; mixing weight stays on the order of the statistical error.
    """
    if omega.is_physical():
        return omega, 0.0
    arr = omega.as_array()

    def feasible(s):
        return OmegaParams(*(arr * (1.0 - s))).is_physical()

    hi = 1e-4
    while hi < 1.0 and not feasible(hi):
        hi *= 10.0
    hi = min(hi, 1.0)
    lo = 0.0
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-8:
            break
    return OmegaParams(*(arr * (1.0 - hi))), hi


@dataclass(frozen=True)
class EndToEndResult:
    counts: OutcomeCounts
    estimate: OmegaEstimate
    projection_weight: float
    report: KeyRateReport       # from the estimated channel
    true_report: KeyRateReport  # from the true channel, for comparison

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate.to_dict(),
            "projection_weight": self.projection_weight,
            "report": self.report.to_dict(),
            "true_report": self.true_report.to_dict(),
        }


def end_to_end_rate(ch: QubitChannel, cfg: ProtocolConfig, direction: str,
                    exact: bool = False) -> EndToEndResult:
    """simulate -> estimate -> worst-case completion -> key-rate report."""
    counts = exact_counts(ch, cfg) if exact else simulate(ch, cfg)
    estimate = estimate_omega(counts)
    omega_hat, weight = project_physical(estimate.omega)

    matched_z = counts.counts[0, :, 0, :]
    if matched_z.sum() <= 0:
        raise InsufficientData("no matched z-basis rounds")
    joint = JointDistribution(matched_z / matched_z.sum())

    report = key_rate(omega_hat, cfg.q, direction, joint)
    true_omega = OmegaParams.from_channel(ch)
    true_report = key_rate(true_omega, cfg.q, direction,
                           joint_distribution(ch, cfg.q))
    return EndToEndResult(counts, estimate, weight, report, true_report)
