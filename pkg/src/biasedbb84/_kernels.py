"""Hot tally kernel for the Monte Carlo protocol loop.

Two interchangeable implementations: a numba @njit per-shot loop and a pure
numpy vectorized path.  Both consume the same pre-drawn random arrays and the
same outcome rule (outcome 0 iff u < p0), so they produce bit-identical
counts.  Set BIASEDBB84_NO_NUMBA=1 to force the numpy path (also used
automatically when numba is not installed); benchmarks/bench_kernels.py
compares the two.
"""

import os

import numpy as np

USE_NUMBA = os.environ.get("BIASEDBB84_NO_NUMBA", "0") != "1"
if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False


def tally_counts_numpy(a_basis, bits, b_basis, u, p0):
    """Vectorized tally of (alice basis, bit, bob basis, outcome) cells."""
    outcome = (u >= p0[a_basis, bits, b_basis]).astype(np.int64)
    flat = ((a_basis * 2 + bits) * 2 + b_basis) * 2 + outcome
    return np.bincount(flat, minlength=16).reshape(2, 2, 2, 2)


def _tally_loop(a_basis, bits, b_basis, u, p0):
    counts = np.zeros((2, 2, 2, 2), dtype=np.int64)
    for i in range(a_basis.shape[0]):
        a = a_basis[i]
        x = bits[i]
        b = b_basis[i]
        outcome = 0 if u[i] < p0[a, x, b] else 1
        counts[a, x, b, outcome] += 1
    return counts


if USE_NUMBA:
    tally_counts_numba = njit(cache=True)(_tally_loop)
    tally_counts = tally_counts_numba
else:
    tally_counts_numba = None
    tally_counts = tally_counts_numpy
