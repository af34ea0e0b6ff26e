import numpy as np
import pytest

from sitobi.audio import AudioBuffer, FrameSpec, frame_signal
from sitobi.errors import AudioError
from sitobi.features import (
    FeatureConfig, compute_features, energy_track, frame_energies,
    mel_filterbank, normalize_energy, short_term_energy, spectral_flatness,
)


def test_short_term_energy_is_mean_square():
    frame = np.array([3.0, -4.0])
    assert short_term_energy(frame) == pytest.approx(12.5)
    assert short_term_energy(np.zeros(320)) == 0.0


def test_frame_energies_shape():
    audio = AudioBuffer(np.random.default_rng(0).standard_normal(8000))
    frames = frame_signal(audio)
    e = frame_energies(frames)
    assert e.shape == (len(frames),)
    assert np.all(e >= 0)


def test_flatness_unit_impulse_is_one():
    frame = np.zeros(320)
    frame[0] = 1.0
    assert spectral_flatness(frame) == pytest.approx(1.0, abs=1e-6)


def test_flatness_sinusoid_is_low():
    t = np.arange(320) / 16000.0
    frame = np.sin(2 * np.pi * 1000.0 * t)
    assert spectral_flatness(frame) < 0.1


def test_flatness_scale_invariant():
    rng = np.random.default_rng(1)
    for _ in range(50):
        frame = rng.standard_normal(320)
        scale = float(10.0 ** rng.uniform(-3, 3))
        assert spectral_flatness(frame * scale) == pytest.approx(
            spectral_flatness(frame), abs=1e-9
        )


def test_flatness_constant_frame_is_flat():
    # All-zero and all-constant frames have no spectral shape to rate;
    # both must count as maximally flat.
    assert spectral_flatness(np.zeros(320)) == 1.0
    assert spectral_flatness(np.full(320, 0.25)) == pytest.approx(1.0, abs=1e-6)


def test_flatness_bounded():
    rng = np.random.default_rng(2)
    for _ in range(100):
        sf = spectral_flatness(rng.standard_normal(320))
        assert 0.0 <= sf <= 1.0 + 1e-12


def test_mel_filterbank_shape_and_coverage():
    config = FeatureConfig()
    fb = mel_filterbank(config)
    assert fb.shape == (config.n_mels, config.frame.nfft // 2 + 1)
    assert np.all(fb >= 0)
    # Every filter must have some mass.
    assert np.all(fb.sum(axis=1) > 0)


def test_compute_features_shape_and_cms():
    rng = np.random.default_rng(3)
    audio = AudioBuffer(rng.standard_normal(16000) * 0.1)
    frames = frame_signal(audio)
    config = FeatureConfig()
    feats = compute_features(frames, config)
    assert feats.shape == (len(frames), config.dim)
    # Cepstral mean subtraction: static coefficients average to zero.
    np.testing.assert_allclose(feats[:, : config.n_ceps].mean(axis=0), 0.0, atol=1e-9)


def test_compute_features_deterministic():
    audio = AudioBuffer(np.sin(np.arange(4800) * 0.01))
    frames = frame_signal(audio)
    a = compute_features(frames)
    b = compute_features(frames)
    np.testing.assert_array_equal(a, b)


def test_feature_config_dim_and_round_trip():
    config = FeatureConfig()
    assert config.dim == 3 * config.n_ceps
    again = FeatureConfig.from_dict(config.to_dict())
    assert again == config


def test_compute_features_input_validation():
    audio = AudioBuffer(np.zeros(16000))
    frames = frame_signal(audio)
    with pytest.raises(AudioError, match="at least 3 frames"):
        compute_features(frame_signal(AudioBuffer(np.zeros(400))))
    mismatched = FeatureConfig(frame=FrameSpec(frame_len=0.025, hop=0.010))
    with pytest.raises(AudioError, match="frame length"):
        compute_features(frames, mismatched)


def test_normalize_energy_peak_is_one():
    e = np.array([1.0, 4.0, 2.0])
    track = normalize_energy(e)
    np.testing.assert_allclose(track.normalized, [0.25, 1.0, 0.5])
    # Common scaling cannot change the normalized track.
    np.testing.assert_allclose(normalize_energy(e * 37.5).normalized, track.normalized)


def test_normalize_energy_all_zero():
    np.testing.assert_array_equal(normalize_energy(np.zeros(4)).normalized, np.zeros(4))


def test_energy_track_carries_frame_times():
    audio = AudioBuffer(np.random.default_rng(4).standard_normal(8000))
    frames = frame_signal(audio)
    track = energy_track(frames)
    assert track.energy.shape == (len(frames),)
    np.testing.assert_array_equal(track.times, frames.frame_times)
    assert track.frame_len == pytest.approx(0.020)
    assert np.max(track.normalized) == pytest.approx(1.0)
