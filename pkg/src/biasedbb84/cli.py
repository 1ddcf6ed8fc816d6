"""Command-line front end.

Subcommands: rate, optimize, sweep, validate, simulate, estimate.  Channels
are given either inline as ``amplitude_damping:<p>`` or as a path to a JSON
file ``{"R": [[...],[...],[...]], "t": [...]}`` (or
``{"amplitude_damping": {"p": ...}}``).  Domain errors exit with status 1 and
a single-line ``error: <kind>: <detail>`` message; flag errors exit with 2.
Output files are written to a temporary sibling and renamed, so failed runs
leave no partial files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from .channel import QubitChannel, is_tpcp
from .errors import BiasedBB84Error
from .keyrate import (
    OmegaParams,
    closed_form_rate,
    format_sweep_csv,
    key_rate,
    optimize_bias,
    sweep,
)
from .simulate import (
    OutcomeCounts,
    ProtocolConfig,
    end_to_end_rate,
    estimate_omega,
    exact_counts,
    simulate,
)


def _parse_channel(source: str) -> QubitChannel:
    if source.startswith("amplitude_damping:"):
        return QubitChannel.amplitude_damping(float(source.split(":", 1)[1]))
    with open(source) as fh:
        return QubitChannel.from_json(fh.read())


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cmd_rate(args) -> int:
    ch = _parse_channel(args.channel)
    report = key_rate(OmegaParams.from_channel(ch), args.q, args.direction)
    _emit(json.dumps(report.to_dict(), indent=2) + "\n", args.out)
    return 0


def _cmd_optimize(args) -> int:
    q_hat, rate = optimize_bias(args.p, args.direction)
    payload = {
        "p": args.p,
        "direction": args.direction,
        "q_hat": q_hat,
        "rate": rate,
        "rate_clamped": max(rate, 0.0),
        "rate_conventional": closed_form_rate(args.p, 0.5, args.direction),
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def _cmd_sweep(args) -> int:
    grid = np.linspace(args.p_min, args.p_max, args.steps)
    rows = sweep(grid)
    _emit(format_sweep_csv(rows), args.out)
    return 0


def _cmd_validate(args) -> int:
    diag = is_tpcp(_parse_channel(args.channel))
    payload = {
        "valid": diag.valid,
        "min_eigenvalue": diag.min_eigenvalue,
        "trace_defect": diag.trace_defect,
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def _cmd_simulate(args) -> int:
    ch = _parse_channel(args.channel)
    cfg = ProtocolConfig(q=args.q, shots=args.shots, seed=args.seed,
                         basis_prob_z=args.basis_prob_z)
    if args.exact:
        counts = exact_counts(ch, cfg)
    else:
        counts = simulate(ch, cfg)
    payload = counts.to_dict()
    payload["end_to_end"] = {
        direction: end_to_end_rate(ch, cfg, direction, exact=args.exact).to_dict()
        for direction in ("direct", "reverse")
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def _cmd_estimate(args) -> int:
    with open(args.counts) as fh:
        counts = OutcomeCounts.from_json(fh.read())
    estimate = estimate_omega(counts)
    _emit(json.dumps(estimate.to_dict(), indent=2) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biasedbb84",
        description="BB84 key rates with a biased bit-transmission probability",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_out(p):
        p.add_argument("--out", help="write output to this file instead of stdout")

    p = sub.add_parser("rate", help="worst-case key rate for a channel and bias")
    p.add_argument("--channel", required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--direction", choices=("direct", "reverse"), required=True)
    add_out(p)
    p.set_defaults(func=_cmd_rate)

    p = sub.add_parser("optimize", help="optimum bias for amplitude damping")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--direction", choices=("direct", "reverse"), required=True)
    add_out(p)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("sweep", help="conventional vs optimum-bias rate sweep (CSV)")
    p.add_argument("--p-min", type=float, required=True)
    p.add_argument("--p-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    add_out(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("validate", help="TPCP diagnostics for a channel")
    p.add_argument("--channel", required=True)
    add_out(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("simulate", help="Monte Carlo run with end-to-end reports")
    p.add_argument("--channel", required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--basis-prob-z", type=float, default=0.5)
    p.add_argument("--exact", action="store_true",
                   help="expected counts instead of sampling")
    add_out(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate", help="channel estimate from a counts JSON file")
    p.add_argument("--counts", required=True)
    add_out(p)
    p.set_defaults(func=_cmd_estimate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BiasedBB84Error as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
