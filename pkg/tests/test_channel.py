"""Channel representations: affine, Choi, Kraus, complementary, validation."""

import numpy as np
import pytest

from biasedbb84.channel import (
    ENV_DIM,
    BlochVector,
    DensityMatrix,
    KrausSet,
    QubitChannel,
    apply_channel,
    bloch_to_density,
    channel_to_choi,
    choi_to_kraus,
    complementary_channel,
    density_to_bloch,
    is_tpcp,
    kraus_to_channel,
)
from biasedbb84.errors import InvalidChoi, NonPhysicalState

from conftest import random_channel


def test_bloch_density_round_trip():
    v = BlochVector(0.3, -0.5, 0.2)
    rho = bloch_to_density(v)
    back = density_to_bloch(rho)
    assert np.allclose(back.as_array(), v.as_array(), atol=1e-12)
    assert abs(np.trace(rho.entries) - 1.0) < 1e-12


def test_bloch_vector_rejects_outside_ball():
    with pytest.raises(NonPhysicalState):
        bloch_to_density(BlochVector(1.0, 1.0, 0.0))


def test_density_matrix_validation():
    with pytest.raises(NonPhysicalState):
        DensityMatrix(np.array([[0.5, 0.3], [0.1, 0.5]]))  # not Hermitian
    with pytest.raises(NonPhysicalState):
        DensityMatrix(np.array([[0.7, 0.0], [0.0, 0.7]]))  # trace != 1
    with pytest.raises(NonPhysicalState):
        DensityMatrix(np.array([[1.2, 0.0], [0.0, -0.2]]))  # negative eigenvalue


def test_identity_channel_is_identity():
    ch = QubitChannel.identity()
    v = BlochVector(0.2, 0.4, -0.1)
    out = apply_channel(ch, v)
    assert np.allclose(out.as_array(), v.as_array(), atol=1e-15)


def test_amplitude_damping_action():
    # Decay probability p: the excited state's z component moves to 2p - 1.
    p = 0.3
    ch = QubitChannel.amplitude_damping(p)
    excited = apply_channel(ch, BlochVector(-1.0, 0.0, 0.0))
    assert abs(excited.theta_z - (2 * p - 1)) < 1e-12
    ground = apply_channel(ch, BlochVector(1.0, 0.0, 0.0))
    assert abs(ground.theta_z - 1.0) < 1e-12
    # Coherences shrink by sqrt(1 - p).
    coh = apply_channel(ch, BlochVector(0.0, 1.0, 0.0))
    assert abs(coh.theta_x - np.sqrt(1 - p)) < 1e-12


def test_choi_of_identity_is_maximally_entangled():
    choi = channel_to_choi(QubitChannel.identity())
    phi = np.zeros(4)
    phi[0] = phi[3] = 1 / np.sqrt(2)
    assert np.allclose(choi.entries, np.outer(phi, phi), atol=1e-12)
    assert abs(np.trace(choi.entries) - 1.0) < 1e-12
    assert choi.trace_defect() < 1e-12


def test_choi_kraus_channel_round_trip(rng):
    for _ in range(20):
        ch = random_channel(rng)
        kraus = choi_to_kraus(channel_to_choi(ch))
        back = kraus_to_channel(kraus)
        assert np.abs(back.R - ch.R).max() < 1e-9
        assert np.abs(back.t - ch.t).max() < 1e-9


def test_kraus_completeness_enforced():
    with pytest.raises(InvalidChoi):
        KrausSet((np.eye(2) * 0.5,))


def test_is_tpcp_accepts_valid_and_rejects_scaled():
    assert is_tpcp(QubitChannel.amplitude_damping(0.3)).valid
    bad = QubitChannel(R=1.2 * np.eye(3), t=np.zeros(3))
    diag = is_tpcp(bad)
    assert not diag.valid
    assert diag.min_eigenvalue < -1e-6


def test_complementary_channel_trace_preserving(rng):
    ch = random_channel(rng)
    kraus = choi_to_kraus(channel_to_choi(ch))
    rho = bloch_to_density(BlochVector(0.1, -0.2, 0.3))
    env = complementary_channel(kraus, rho)
    assert env.entries.shape == (ENV_DIM, ENV_DIM)
    assert abs(np.trace(env.entries) - 1.0) < 1e-10
    assert np.linalg.eigvalsh(env.entries).min() > -1e-10


def test_channel_json_round_trip(tmp_path):
    ch = QubitChannel.amplitude_damping(0.25)
    loaded = QubitChannel.from_json(
        '{"amplitude_damping": {"p": 0.25}}'
    )
    assert np.allclose(loaded.R, ch.R) and np.allclose(loaded.t, ch.t)
    generic = QubitChannel.from_json(
        '{"R": [[0.8,0,0],[0,0.8,0],[0,0,0.8]], "t": [0,0,0]}'
    )
    assert np.allclose(generic.R, 0.8 * np.eye(3))
