"""Frame-level measurements: energy, spectral flatness, cepstral features."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.fft import rfft
from scipy.fftpack import dct

from .audio import FrameSequence, FrameSpec, TARGET_RATE
from .errors import AudioError, ProsodyError

# Floor applied to spectral magnitudes before the log in the flatness ratio.
MAGNITUDE_FLOOR = 1e-10
# Floor applied to mel filterbank energies before the log.
MEL_FLOOR = 1e-12


def short_term_energy(frame: np.ndarray) -> float:
    """Mean of squared samples of one frame."""
    frame = np.asarray(frame, dtype=np.float64)
    if frame.size == 0:
        raise ProsodyError("cannot compute energy of an empty frame")
    return float(np.mean(frame * frame))


def frame_energies(frames: FrameSequence) -> np.ndarray:
    """Short-term energy of every frame in a sequence."""
    return np.mean(frames.frames * frames.frames, axis=1)


@dataclass
class EnergyTrack:
    """Per-frame energies plus the utterance-max normalized version.

    times and frame_len are optional plumbing used when the track must be
    related back to time spans (syllable statistics).
    """

    energy: np.ndarray
    normalized: np.ndarray
    times: np.ndarray | None = None
    frame_len: float | None = None


def normalize_energy(
    energies: np.ndarray,
    times: np.ndarray | None = None,
    frame_len: float | None = None,
) -> EnergyTrack:
    """Normalize energies by the utterance maximum.

    An all-zero utterance stays all-zero rather than dividing by zero.
    """
    e = np.asarray(energies, dtype=np.float64)
    if e.ndim != 1:
        raise ProsodyError("energies must be a one-dimensional array")
    peak = e.max() if e.size else 0.0
    norm = e / peak if peak > 0 else np.zeros_like(e)
    return EnergyTrack(e, norm, None if times is None else np.asarray(times), frame_len)


def energy_track(frames: FrameSequence) -> EnergyTrack:
    """Energies of a frame sequence, normalized, with time metadata attached."""
    return normalize_energy(frame_energies(frames), frames.frame_times, frames.frame_len)


def magnitude_spectrum(frame: np.ndarray, spec: FrameSpec | None = None) -> np.ndarray:
    """Magnitudes |S_k| for k = 1..nfft/2 of a rectangular-windowed frame."""
    spec = spec or FrameSpec()
    frame = np.asarray(frame, dtype=np.float64)
    if frame.size > spec.nfft:
        raise AudioError("frame of %d samples exceeds nfft %d" % (frame.size, spec.nfft))
    s = np.abs(rfft(frame, spec.nfft))
    return s[1 : spec.nfft // 2 + 1]


def spectral_flatness(frame: np.ndarray, spec: FrameSpec | None = None) -> float:
    """Geometric over arithmetic mean of the magnitude spectrum.

    Magnitudes are floored at MAGNITUDE_FLOOR before the log. Constant
    frames (digital silence, with or without a DC offset) are defined as
    maximally flat and return 1.0 exactly.
    """
    frame = np.asarray(frame, dtype=np.float64)
    if frame.size == 0:
        raise AudioError("cannot compute spectral flatness of an empty frame")
    if frame.max() == frame.min():
        return 1.0
    mags = np.maximum(magnitude_spectrum(frame, spec), MAGNITUDE_FLOOR)
    sf = float(np.exp(np.mean(np.log(mags))) / np.mean(mags))
    return min(sf, 1.0)


@dataclass(frozen=True)
class FeatureConfig:
    """Geometry and filterbank layout behind the 39-dim feature vectors."""

    frame: FrameSpec = field(default_factory=FrameSpec)
    sample_rate: int = TARGET_RATE
    n_mels: int = 26
    n_ceps: int = 13
    mel_low_hz: float = 0.0
    mel_high_hz: float = 8000.0
    delta_window: int = 2

    @property
    def dim(self) -> int:
        return 3 * self.n_ceps

    def to_dict(self) -> dict:
        return {
            "frame_len": self.frame.frame_len,
            "hop": self.frame.hop,
            "nfft": self.frame.nfft,
            "sample_rate": self.sample_rate,
            "n_mels": self.n_mels,
            "n_ceps": self.n_ceps,
            "mel_low_hz": self.mel_low_hz,
            "mel_high_hz": self.mel_high_hz,
            "delta_window": self.delta_window,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureConfig":
        return cls(
            frame=FrameSpec(d["frame_len"], d["hop"], int(d["nfft"])),
            sample_rate=int(d["sample_rate"]),
            n_mels=int(d["n_mels"]),
            n_ceps=int(d["n_ceps"]),
            mel_low_hz=float(d["mel_low_hz"]),
            mel_high_hz=float(d["mel_high_hz"]),
            delta_window=int(d["delta_window"]),
        )


def _hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def _mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(config: FeatureConfig) -> np.ndarray:
    """Triangular mel filters over the rfft bins, shape (n_mels, nfft//2 + 1)."""
    nfft = config.frame.nfft
    n_bins = nfft // 2 + 1
    mel_pts = np.linspace(
        _hz_to_mel(config.mel_low_hz), _hz_to_mel(config.mel_high_hz), config.n_mels + 2
    )
    hz_pts = _mel_to_hz(mel_pts)
    bin_freqs = np.arange(n_bins) * config.sample_rate / nfft
    bank = np.zeros((config.n_mels, n_bins))
    for i in range(config.n_mels):
        lo, mid, hi = hz_pts[i], hz_pts[i + 1], hz_pts[i + 2]
        up = (bin_freqs - lo) / (mid - lo)
        down = (hi - bin_freqs) / (hi - mid)
        bank[i] = np.maximum(0.0, np.minimum(up, down))
    return bank


def _delta(c: np.ndarray, n: int) -> np.ndarray:
    """Regression deltas over +-n frames with edge replication."""
    padded = np.pad(c, ((n, n), (0, 0)), mode="edge")
    num = np.zeros_like(c)
    for k in range(1, n + 1):
        num += k * (padded[n + k : n + k + len(c)] - padded[n - k : n - k + len(c)])
    return num / (2.0 * sum(k * k for k in range(1, n + 1)))


def compute_features(frames: FrameSequence, config: FeatureConfig | None = None) -> np.ndarray:
    """Mel-cepstra (including the 0th) with deltas and delta-deltas.

    Output shape is (n_frames, 39) for the default layout: 13 static
    coefficients after per-utterance cepstral mean subtraction, then the
    two regression derivative blocks computed over +-2 frames.

    Parameters
    ----------
    frames : FrameSequence
        At least 3 raw frames from one utterance.
    config : FeatureConfig, optional
        Filterbank and frame geometry; must match the frame slicing.
    """
    config = config or FeatureConfig()
    if len(frames) < 3:
        raise AudioError(
            "feature extraction requires at least 3 frames, got %d" % len(frames)
        )
    if frames.frames.shape[1] != config.frame.frame_samples(config.sample_rate):
        raise AudioError("frame length does not match the feature configuration")
    window = np.hamming(frames.frames.shape[1])
    spectra = np.abs(rfft(frames.frames * window, config.frame.nfft, axis=1))
    power = spectra * spectra
    mel_e = np.maximum(power @ mel_filterbank(config).T, MEL_FLOOR)
    ceps = dct(np.log(mel_e), type=2, norm="ortho", axis=1)[:, : config.n_ceps]
    ceps = ceps - ceps.mean(axis=0)
    d1 = _delta(ceps, config.delta_window)
    d2 = _delta(d1, config.delta_window)
    return np.hstack([ceps, d1, d2])
