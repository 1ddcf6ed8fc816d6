"""Shared fixtures and the acceptance-summary terminal hook."""

import numpy as np
import pytest

from biasedbb84.channel import KrausSet, QubitChannel, kraus_to_channel

# Results appended by tests/test_acceptance.py as (label, passed, notes).
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def random_channel(rng: np.random.Generator) -> QubitChannel:
    """Random valid qubit channel from a Haar-ish 8x2 isometry (4 Kraus ops)."""
    g = rng.normal(size=(8, 2)) + 1j * rng.normal(size=(8, 2))
    q, _ = np.linalg.qr(g)
    ops = tuple(q[2 * i : 2 * i + 2].copy() for i in range(4))
    return kraus_to_channel(KrausSet(ops))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240823)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, notes in ACCEPTANCE_RESULTS:
        status = "PASS" if passed else "FAIL"
        line = f"{status}  {label}"
        if notes:
            line += f"  ({notes})"
        terminalreporter.write_line(line)
