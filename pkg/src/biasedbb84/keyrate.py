"""Key-rate evaluation: worst-case completion over the unobservable R_yy,
closed forms for the amplitude damping channel, and optimum-bias search.

Only six channel parameters omega = (R_zz, R_zx, R_xz, R_xx, t_z, t_x) are
observable from z/x-basis statistics.  Eve's ambiguity is convex in the
channel, so the worst case is attained with the five remaining off-axis
parameters at zero and a single free parameter R_yy, minimized over the set
where the completed channel is still completely positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .channel import QubitChannel, channel_to_choi
from .entropy import (
    JointDistribution,
    binary_entropy,
    conditional_shannon,
    h_x_given_e,
    h_y_given_e,
    joint_distribution,
)
from .errors import DomainError, Infeasible

DIRECT = "direct"
REVERSE = "reverse"

FEASIBILITY_TOL = 1e-10   # min Choi eigenvalue above -tol counts as valid
COLLAPSE_WIDTH = 1e-4     # narrower intervals are treated as a single point
ENDPOINT_BISECTIONS = 60
SCAN_POINTS = 200
RYY_XTOL = 1e-9
Q_XTOL = 1e-9

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _check_direction(direction: str) -> str:
    if direction not in (DIRECT, REVERSE):
        raise DomainError(f"direction must be 'direct' or 'reverse', got {direction!r}")
    return direction


@dataclass(frozen=True)
class OmegaParams:
    """The six channel parameters observable in the BB84 bases."""

    r_zz: float
    r_zx: float
    r_xz: float
    r_xx: float
    t_z: float
    t_x: float

    @classmethod
    def from_channel(cls, ch: QubitChannel) -> "OmegaParams":
        return cls(ch.R[0, 0], ch.R[0, 1], ch.R[1, 0], ch.R[1, 1], ch.t[0], ch.t[1])

    def to_channel(self, r_yy: float) -> QubitChannel:
        """Complete to a full channel with the five nuisance parameters at 0."""
        R = np.array(
            [
                [self.r_zz, self.r_zx, 0.0],
                [self.r_xz, self.r_xx, 0.0],
                [0.0, 0.0, r_yy],
            ]
        )
        return QubitChannel(R, np.array([self.t_z, self.t_x, 0.0]))

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.r_zz, self.r_zx, self.r_xz, self.r_xx, self.t_z, self.t_x]
        )

    def is_physical(self) -> bool:
        try:
            feasible_ryy_interval(self)
        except Infeasible:
            return False
        return True


@dataclass(frozen=True)
class KeyRateReport:
    q: float
    direction: str
    rate: float                # raw; may be negative (callers clamp for display)
    worst_case_r_yy: float
    eve_ambiguity: float       # minimized conditional entropy, bits
    classical_leak: float      # H(X|Y) or H(Y|X), bits

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "direction": self.direction,
            "rate": self.rate,
            "rate_clamped": max(self.rate, 0.0),
            "worst_case_R_yy": self.worst_case_r_yy,
            "eve_ambiguity": self.eve_ambiguity,
            "classical_leak": self.classical_leak,
        }


def _min_choi_eigenvalue(omega: OmegaParams, r_yy: float) -> float:
    return channel_to_choi(omega.to_channel(r_yy)).min_eigenvalue()


def _bisect_boundary(f, feasible: float, infeasible: float,
                     thresh: float = FEASIBILITY_TOL,
                     xtol: float = FEASIBILITY_TOL) -> float:
    """Point where f crosses -thresh between a feasible and an infeasible
    abscissa, bisected to xtol."""
    for _ in range(ENDPOINT_BISECTIONS):
        mid = 0.5 * (feasible + infeasible)
        if f(mid) >= -thresh:
            feasible = mid
        else:
            infeasible = mid
        if abs(feasible - infeasible) < xtol:
            break
    return feasible


def feasible_ryy_interval(omega: OmegaParams) -> tuple:
    """Interval of R_yy values completing omega to a valid channel.

    The minimum Choi eigenvalue is concave in R_yy (minimum of affine
    functions), so the feasible set is an interval; its interior point is
    located by maximizing the minimum eigenvalue over [-1, 1].
    """
    f = lambda r: _min_choi_eigenvalue(omega, r)
    res = optimize.minimize_scalar(
        lambda r: -f(r), bounds=(-1.0, 1.0), method="bounded",
        options={"xatol": 1e-13},
    )
    best = float(res.x)
    if f(best) < -FEASIBILITY_TOL:
        # The bounded search can stall on a flat region; fall back to a scan.
        grid = np.linspace(-1.0, 1.0, 401)
        vals = [f(r) for r in grid]
        best = float(grid[int(np.argmax(vals))])
        if max(vals) < -FEASIBILITY_TOL:
            raise Infeasible(
                "no R_yy completes the observed parameters to a valid channel "
                f"(best min eigenvalue {max(vals):.3e})"
            )
    lo = -1.0 if f(-1.0) >= -FEASIBILITY_TOL else _bisect_boundary(f, best, -1.0)
    hi = 1.0 if f(1.0) >= -FEASIBILITY_TOL else _bisect_boundary(f, best, 1.0)
    if hi - lo < COLLAPSE_WIDTH:
        r = _refine_collapse(f, best, lo, hi)
        return r, r
    return lo, hi


def _refine_collapse(f, best: float, lo: float, hi: float) -> float:
    """Locate a point-like feasible set precisely.

    Threshold bisection smears the point over ~sqrt(tol) wherever the binding
    eigenvalue branch is quadratic in R_yy.  Re-bisect both sides with a much
    tighter threshold and keep the boundary on the steeper side (the one that
    barely moved); if both sides are shallow, fit a parabola vertex instead.
    """
    eps = 1e-12
    center = best
    if f(center) < -eps:
        center = _parabola_vertex(f, 0.5 * (lo + hi), max(hi - lo, 1e-7))
        if f(center) < -eps:
            return min(max(center, -1.0), 1.0)
    lo_n = _bisect_boundary(f, center, center - COLLAPSE_WIDTH, eps, 1e-13)
    hi_n = _bisect_boundary(f, center, center + COLLAPSE_WIDTH, eps, 1e-13)
    gap_left = lo_n - lo
    gap_right = hi - hi_n
    if min(gap_left, gap_right) > 1e-8:
        r = _parabola_vertex(f, 0.5 * (lo_n + hi_n), max(hi_n - lo_n, 1e-7))
    elif gap_right <= gap_left:
        r = hi_n
    else:
        r = lo_n
    return min(max(r, -1.0), 1.0)


def _parabola_vertex(f, r: float, step: float) -> float:
    for _ in range(3):
        fa, fb, fc = f(r - step), f(r), f(r + step)
        curvature = fa - 2.0 * fb + fc
        if curvature >= 0.0:
            break
        shift = 0.5 * step * (fa - fc) / curvature
        r += min(max(shift, -step), step)
        step *= 0.1
    return r


def _golden_min(f, a: float, b: float, xtol: float) -> tuple:
    """Golden-section minimizer on [a, b]; returns (argmin, min)."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def ambiguity(omega: OmegaParams, r_yy: float, q: float, direction: str) -> float:
    """Eve's ambiguity H(X|E) or H(Y|E) for one completed channel."""
    ch = omega.to_channel(r_yy)
    if _check_direction(direction) == DIRECT:
        return h_x_given_e(ch, q)
    return h_y_given_e(ch, q)


def worst_case_ambiguity(omega: OmegaParams, q: float, direction: str,
                         interval: tuple | None = None) -> tuple:
    """Minimize Eve's ambiguity over the feasible R_yy interval.

    Returns (value, argmin_R_yy).  A 200-point scan brackets the minimum and
    golden-section refinement narrows it to RYY_XTOL in R_yy.
    """
    _check_direction(direction)
    lo, hi = feasible_ryy_interval(omega) if interval is None else interval
    f = lambda r: ambiguity(omega, r, q, direction)
    if hi - lo <= RYY_XTOL:
        mid = 0.5 * (lo + hi)
        return f(mid), mid
    grid = np.linspace(lo, hi, SCAN_POINTS)
    vals = [f(r) for r in grid]
    k = int(np.argmin(vals))
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, SCAN_POINTS - 1)]
    x, fx = _golden_min(f, a, b, RYY_XTOL)
    if vals[k] < fx:
        return vals[k], float(grid[k])
    return fx, x


def closed_form_rate(p: float, q: float, direction: str) -> float:
    """Amplitude damping key rates: h(q + p(1-q)) - h(p(1-q)) for direct
    reconciliation, h(q) - h(p(1-q)) for reverse."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"damping parameter p={p} outside [0, 1]")
    if not 0.0 < q < 1.0:
        raise DomainError(f"bias q={q} outside (0, 1)")
    u = p * (1.0 - q)
    if _check_direction(direction) == DIRECT:
        return binary_entropy(q + u) - binary_entropy(u)
    return binary_entropy(q) - binary_entropy(u)


def key_rate(omega: OmegaParams, q: float, direction: str,
             joint: JointDistribution | None = None) -> KeyRateReport:
    """Worst-case key rate: minimized Eve ambiguity minus the classical leak.

    If no empirical joint distribution is supplied, the joint is computed from
    omega's own z-basis action.
    """
    _check_direction(direction)
    value, argmin = worst_case_ambiguity(omega, q, direction)
    if joint is None:
        joint = joint_distribution(omega.to_channel(0.0), q)  # z action ignores R_yy
    leak_dir = "x_given_y" if direction == DIRECT else "y_given_x"
    leak = conditional_shannon(joint, leak_dir)
    return KeyRateReport(
        q=float(q),
        direction=direction,
        rate=value - leak,
        worst_case_r_yy=argmin,
        eve_ambiguity=value,
        classical_leak=leak,
    )


Q_MIN, Q_MAX = 1e-6, 1.0 - 1e-6


def _maximize_over_q(rate_fn, scan_step: float) -> tuple:
    qs = np.concatenate(([Q_MIN], np.arange(scan_step, 1.0, scan_step), [Q_MAX]))
    vals = [rate_fn(q) for q in qs]
    k = int(np.argmax(vals))
    a = qs[max(k - 1, 0)]
    b = qs[min(k + 1, len(qs) - 1)]
    x, neg = _golden_min(lambda q: -rate_fn(q), a, b, Q_XTOL)
    if -neg < vals[k]:
        x = float(qs[k])
    x = _newton_polish(rate_fn, float(x))
    return float(x), float(rate_fn(x))


def _newton_polish(rate_fn, q: float, h: float = 1e-5, iters: int = 2) -> float:
    """Sharpen the argmax beyond golden-section resolution.

    Near a flat maximum the rate varies below floating noise, so value-based
    search stalls around 1e-7 in q; two Newton steps on finite-difference
    derivatives recover the stationary point to ~1e-10.
    """
    for _ in range(iters):
        if not Q_MIN + h < q < Q_MAX - h:
            break
        f_minus, f_mid, f_plus = rate_fn(q - h), rate_fn(q), rate_fn(q + h)
        d2 = (f_plus - 2.0 * f_mid + f_minus) / h**2
        if d2 >= 0.0:
            break
        step = -(f_plus - f_minus) / (2.0 * h) / d2
        if abs(step) > 10.0 * h:
            break
        q += step
    return q


def optimize_bias(p_or_omega, direction: str, scan_step: float | None = None) -> tuple:
    """Maximize the key rate over the bias q; returns (q_hat, rate).

    Accepts either an amplitude-damping parameter p (closed forms) or an
    OmegaParams instance (full entropic path, coarser default scan because
    every evaluation runs a worst-case minimization).
    """
    _check_direction(direction)
    if isinstance(p_or_omega, OmegaParams):
        omega = p_or_omega
        interval = feasible_ryy_interval(omega)
        joint = joint_distribution(omega.to_channel(0.0), 0.5)  # leak recomputed per q
        leak_dir = "x_given_y" if direction == DIRECT else "y_given_x"

        def rate_fn(q):
            value, _ = worst_case_ambiguity(omega, q, direction, interval=interval)
            leak = conditional_shannon(joint_distribution(omega.to_channel(0.0), q), leak_dir)
            return value - leak

        return _maximize_over_q(rate_fn, scan_step or 0.02)
    p = float(p_or_omega)
    return _maximize_over_q(lambda q: closed_form_rate(p, q, direction), scan_step or 1e-3)


def stationarity_residual(p: float, q: float, condition: str) -> float:
    """LHS - RHS of one of the two printed optimality conditions.

    'eq16': (1-q)/q = (p(1-q) / (1 - p(1-q)))^p, valid for 0 <= p < 1.
    'eq17': (1 - p(1-q)) / (p(1-q)) = ((q + p(1-q)) / ((1-p)(1-q)))^((1-p)/p),
            valid for 0 < p < 1/2.

    Powers are evaluated in the log domain.  Numerically, eq16 is the
    stationarity condition of the reverse-reconciliation rate and eq17 of the
    direct one.
    """
    if not 0.0 < q < 1.0:
        raise DomainError(f"bias q={q} outside (0, 1)")
    u = p * (1.0 - q)
    if condition == "eq16":
        if not 0.0 <= p < 1.0:
            raise DomainError(f"eq16 requires 0 <= p < 1, got p={p}")
        rhs = 1.0 if p == 0.0 else math.exp(p * (math.log(u) - math.log1p(-u)))
        return (1.0 - q) / q - rhs
    if condition == "eq17":
        if not 0.0 < p < 0.5:
            raise DomainError(f"eq17 requires 0 < p < 1/2, got p={p}")
        rhs = math.exp(
            ((1.0 - p) / p)
            * (math.log(q + u) - math.log((1.0 - p) * (1.0 - q)))
        )
        return (1.0 - u) / u - rhs
    raise DomainError(f"condition must be 'eq16' or 'eq17', got {condition!r}")


SWEEP_COLUMNS = (
    "p",
    "q_conventional",
    "rate_direct_conv",
    "rate_reverse_conv",
    "q_hat_direct",
    "rate_direct_opt",
    "q_hat_reverse",
    "rate_reverse_opt",
)


def sweep(p_values) -> list:
    """Conventional (q = 1/2) versus optimum-bias rates on a grid of p.

    Each row carries the raw rates under 'raw'; the top-level rate fields are
    clamped at 0 for display, mirroring the nonnegative plot axis.
    """
    rows = []
    for p in p_values:
        p = float(p)
        conv_d = closed_form_rate(p, 0.5, DIRECT)
        conv_r = closed_form_rate(p, 0.5, REVERSE)
        qd, rd = optimize_bias(p, DIRECT)
        qr, rr = optimize_bias(p, REVERSE)
        rows.append(
            {
                "p": p,
                "q_conventional": 0.5,
                "rate_direct_conv": max(conv_d, 0.0),
                "rate_reverse_conv": max(conv_r, 0.0),
                "q_hat_direct": qd,
                "rate_direct_opt": max(rd, 0.0),
                "q_hat_reverse": qr,
                "rate_reverse_opt": max(rr, 0.0),
                "raw": {
                    "rate_direct_conv": conv_d,
                    "rate_reverse_conv": conv_r,
                    "rate_direct_opt": rd,
                    "rate_reverse_opt": rr,
                },
            }
        )
    return rows


def format_sweep_csv(rows) -> str:
    lines = [",".join(SWEEP_COLUMNS)]
    for row in rows:
        lines.append(",".join(f"{row[c]:.9g}" for c in SWEEP_COLUMNS))
    return "\n".join(lines) + "\n"
