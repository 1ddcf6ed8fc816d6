#!/usr/bin/env python3
"""Benchmark the numba tally kernel against the pure numpy fallback.

Both kernels consume identical pre-drawn random arrays and must return
identical counts.  Run: python3 benchmarks/bench_kernels.py [shots]
"""

import sys
import time

import numpy as np

from biasedbb84 import _kernels
from biasedbb84.channel import QubitChannel
from biasedbb84.simulate import ProtocolConfig, _draw_arrays, outcome_probabilities


def bench(fn, args, repeats=5):
    fn(*args)  # warm-up (numba compilation)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        times.append(time.perf_counter() - t0)
    return result, min(times)


def main():
    shots = int(sys.argv[1]) if len(sys.argv) > 1 else 5_000_000
    cfg = ProtocolConfig(q=0.4, shots=shots, seed=7)
    ch = QubitChannel.amplitude_damping(0.3)
    p0 = outcome_probabilities(ch)
    rng = np.random.default_rng(cfg.seed)
    arrays = _draw_arrays(rng, shots, cfg)

    counts_np, t_np = bench(_kernels.tally_counts_numpy, (*arrays, p0))
    print(f"numpy : {t_np * 1e3:8.2f} ms  ({shots / t_np / 1e6:7.1f} Mshots/s)")

    if _kernels.tally_counts_numba is None:
        print("numba : not available (install numba or unset BIASEDBB84_NO_NUMBA)")
        return
    counts_nb, t_nb = bench(_kernels.tally_counts_numba, (*arrays, p0))
    print(f"numba : {t_nb * 1e3:8.2f} ms  ({shots / t_nb / 1e6:7.1f} Mshots/s)")
    print(f"speedup: {t_np / t_nb:.2f}x")
    assert np.array_equal(counts_np, counts_nb), "kernels disagree"
    print("kernels agree bit-for-bit")


if __name__ == "__main__":
    main()
