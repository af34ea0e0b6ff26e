"""WAV loading and frame extraction for 16 kHz mono analysis.

All downstream processing assumes the canonical buffer produced by
:func:`load_audio`: 16 kHz, single channel, float samples. Framing is
rectangular slicing only; windowing belongs to the spectral operations.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy.io import wavfile
from scipy.signal import resample_poly

from .errors import AudioError

TARGET_RATE = 16000
# Kaiser beta for the polyphase anti-alias filter; beta 9.0 gives a stopband
# attenuation of roughly 90 dB.
RESAMPLE_KAISER_BETA = 9.0


@dataclass
class AudioBuffer:
    """A mono utterance at the canonical sample rate."""

    samples: np.ndarray
    sample_rate: int = TARGET_RATE

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise AudioError("AudioBuffer requires a one-dimensional sample array")
        if not np.all(np.isfinite(self.samples)):
            raise AudioError("AudioBuffer samples must be finite")

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class FrameSpec:
    """Analysis frame geometry in seconds plus the FFT size used on frames."""

    frame_len: float = 0.020
    hop: float = 0.010
    nfft: int = 512

    def __post_init__(self):
        if self.frame_len <= 0 or self.hop <= 0:
            raise AudioError("frame_len and hop must be positive")
        if self.hop > self.frame_len:
            raise AudioError("hop must not exceed frame_len")

    def frame_samples(self, sample_rate: int = TARGET_RATE) -> int:
        return int(round(self.frame_len * sample_rate))

    def hop_samples(self, sample_rate: int = TARGET_RATE) -> int:
        return int(round(self.hop * sample_rate))

    def validate(self, sample_rate: int = TARGET_RATE) -> None:
        if self.nfft < self.frame_samples(sample_rate):
            raise AudioError(
                "nfft %d is smaller than the %d-sample frame"
                % (self.nfft, self.frame_samples(sample_rate))
            )


@dataclass
class FrameSequence:
    """Raw (unwindowed) frames sliced from one utterance.

    frames has shape (n_frames, frame_samples); frame_times holds each
    frame's start in seconds and advances by exactly one hop.
    """

    frames: np.ndarray
    frame_times: np.ndarray
    sample_rate: int
    hop: float

    def __len__(self) -> int:
        return self.frames.shape[0]

    @property
    def frame_len(self) -> float:
        return self.frames.shape[1] / self.sample_rate


def _to_float(data: np.ndarray, path: str) -> np.ndarray:
    """Scale integer PCM to [-1, 1] floats."""
    if data.dtype == np.uint8:
        return (data.astype(np.float64) - 128.0) / 128.0
    if data.dtype == np.int16:
        return data.astype(np.float64) / 32768.0
    if data.dtype == np.int32:
        # 24-bit PCM arrives as int32 with the low byte zeroed.
        return data.astype(np.float64) / 2147483648.0
    raise AudioError(
        "%s: unsupported sample encoding %s (integer PCM required)" % (path, data.dtype)
    )


def load_audio(path: str | os.PathLike) -> AudioBuffer:
    """Read a PCM WAV file into the canonical 16 kHz mono buffer.

    Multi-channel input is averaged down to one channel, other sample
    rates are resampled with a polyphase windowed-sinc filter, and the
    per-utterance DC mean is removed. No peak normalization is applied.
    """
    path = os.fspath(path)
    try:
        rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise AudioError("%s: file not found" % path) from None
    except (ValueError, EOFError) as e:
        raise AudioError("%s: unsupported or corrupt WAV (%s)" % (path, e)) from None
    except OSError as e:
        raise AudioError("%s: unreadable (%s)" % (path, e)) from None

    x = _to_float(np.asarray(data), path)
    if x.ndim == 2:
        if x.shape[1] > 2:
            raise AudioError(
                "%s: %d channels unsupported (mono or stereo only)" % (path, x.shape[1])
            )
        x = x.mean(axis=1)
    elif x.ndim != 1:
        raise AudioError("%s: unexpected sample layout" % path)
    if x.size == 0:
        raise AudioError("%s: empty audio" % path)

    if rate != TARGET_RATE:
        if rate <= 0:
            raise AudioError("%s: invalid sample rate %r" % (path, rate))
        g = np.gcd(int(rate), TARGET_RATE)
        x = resample_poly(
            x, TARGET_RATE // g, int(rate) // g, window=("kaiser", RESAMPLE_KAISER_BETA)
        )
    x = x - x.mean()
    return AudioBuffer(x, TARGET_RATE)


def frame_signal(audio: AudioBuffer, spec: FrameSpec | None = None) -> FrameSequence:
    """Slice an utterance into overlapping raw frames.

    The frame count is floor((n - frame_samples) / hop_samples) + 1; an
    utterance shorter than one frame is an error.
    """
    spec = spec or FrameSpec()
    spec.validate(audio.sample_rate)
    flen = spec.frame_samples(audio.sample_rate)
    hopn = spec.hop_samples(audio.sample_rate)
    n = audio.samples.size
    if n < flen:
        raise AudioError(
            "utterance of %d samples is shorter than one %d-sample frame" % (n, flen)
        )
    count = (n - flen) // hopn + 1
    frames = np.lib.stride_tricks.sliding_window_view(audio.samples, flen)[::hopn]
    frames = frames[:count].copy()
    times = np.arange(count) * spec.hop
    return FrameSequence(frames, times, audio.sample_rate, spec.hop)
