"""Seeded Monte Carlo protocol runs, estimation, and the tally kernels."""

import numpy as np
import pytest

from biasedbb84 import _kernels
from biasedbb84.channel import QubitChannel
from biasedbb84.errors import DomainError, InsufficientData
from biasedbb84.simulate import (
    OutcomeCounts,
    ProtocolConfig,
    _draw_arrays,
    end_to_end_rate,
    estimate_omega,
    exact_counts,
    outcome_probabilities,
    project_physical,
    simulate,
)

AD_OMEGA_03 = np.array([0.7, 0.0, 0.0, np.sqrt(0.7), 0.3, 0.0])


def test_protocol_config_validation():
    with pytest.raises(DomainError):
        ProtocolConfig(q=0.0, shots=10, seed=1)
    with pytest.raises(DomainError):
        ProtocolConfig(q=0.5, shots=0, seed=1)
    with pytest.raises(DomainError):
        ProtocolConfig(q=0.5, shots=10, seed=1, basis_prob_z=1.0)


def test_simulate_reproducible_and_conserves_shots():
    ch = QubitChannel.amplitude_damping(0.3)
    cfg = ProtocolConfig(q=0.4, shots=20_000, seed=11)
    a = simulate(ch, cfg)
    b = simulate(ch, cfg)
    assert np.array_equal(a.counts, b.counts)
    assert a.counts.sum() == cfg.shots
    c = simulate(ch, ProtocolConfig(q=0.4, shots=20_000, seed=12))
    assert not np.array_equal(a.counts, c.counts)


def test_counts_json_round_trip():
    ch = QubitChannel.amplitude_damping(0.2)
    counts = simulate(ch, ProtocolConfig(q=0.5, shots=5_000, seed=3))
    back = OutcomeCounts.from_json(counts.to_json())
    assert np.array_equal(back.counts, counts.counts)
    assert back.shots == counts.shots


def test_exact_counts_estimate_recovers_channel():
    ch = QubitChannel.amplitude_damping(0.3)
    counts = exact_counts(ch, ProtocolConfig(q=0.5, shots=10_000, seed=0))
    est = estimate_omega(counts)
    assert np.abs(est.omega.as_array() - AD_OMEGA_03).max() < 1e-12


def test_sampled_estimate_within_errors():
    ch = QubitChannel.amplitude_damping(0.3)
    counts = simulate(ch, ProtocolConfig(q=0.5, shots=200_000, seed=5))
    est = estimate_omega(counts)
    dev = np.abs(est.omega.as_array() - AD_OMEGA_03)
    assert (dev < 4.0 * np.asarray(est.std_err)).all()


def test_estimate_requires_every_stratum():
    ch = QubitChannel.amplitude_damping(0.3)
    cfg = ProtocolConfig(q=0.5, shots=1_000, seed=0, basis_prob_z=0.5)
    counts = simulate(ch, cfg)
    starved = counts.counts.copy()
    starved[0, :, :, :] = 0  # wipe rounds where Alice prepared in the z basis
    with pytest.raises(InsufficientData):
        estimate_omega(OutcomeCounts(starved, int(starved.sum())))


def test_project_physical_noop_on_valid():
    from biasedbb84.keyrate import OmegaParams

    om = OmegaParams.from_channel(QubitChannel.amplitude_damping(0.3))
    projected, weight = project_physical(om)
    assert weight == 0.0
    assert np.abs(projected.as_array() - om.as_array()).max() < 1e-12


def test_project_physical_restores_feasibility():
    from biasedbb84.keyrate import OmegaParams, feasible_ryy_interval

    bad = OmegaParams(1.02, 0.0, 0.0, 1.02, 0.0, 0.0)
    projected, weight = project_physical(bad)
    assert 0.0 < weight < 1.0
    feasible_ryy_interval(projected)  # must not raise


def test_end_to_end_exact_matches_closed_form():
    from biasedbb84.keyrate import closed_form_rate

    ch = QubitChannel.amplitude_damping(0.2)
    cfg = ProtocolConfig(q=0.5, shots=10_000, seed=0)
    result = end_to_end_rate(ch, cfg, "reverse", exact=True)
    assert abs(result.report.rate - closed_form_rate(0.2, 0.5, "reverse")) < 1e-6
    assert result.projection_weight == 0.0


def test_kernels_agree():
    ch = QubitChannel.amplitude_damping(0.3)
    cfg = ProtocolConfig(q=0.4, shots=50_000, seed=9)
    p0 = outcome_probabilities(ch)
    arrays = _draw_arrays(np.random.default_rng(cfg.seed), cfg.shots, cfg)
    counts_np = _kernels.tally_counts_numpy(*arrays, p0)
    assert counts_np.sum() == cfg.shots
    if _kernels.tally_counts_numba is not None:
        counts_nb = _kernels.tally_counts_numba(*arrays, p0)
        assert np.array_equal(counts_np, counts_nb)
