"""Syllable intensity indices and silence-driven break indices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ProsodyError
from .features import EnergyTrack
from .segments import BreakIndex, SyllableSegment

SF_SILENCE_THRESHOLD = 0.75
BREAK_SHORT_MS = 80.0
BREAK_LONG_MS = 290.0


@dataclass
class SilenceRun:
    """A maximal run of silence-classified frames."""

    start_frame: int
    n_frames: int
    hop: float

    @property
    def start(self) -> float:
        return self.start_frame * self.hop

    @property
    def length_ms(self) -> float:
        return self.n_frames * self.hop * 1000.0

    @property
    def end(self) -> float:
        return (self.start_frame + self.n_frames) * self.hop


def rii_bin(e_n: float) -> int:
    """Map a normalized syllable energy in [0, 1] to an index 1..5.

    Bin edges are 0.2/0.4/0.6/0.8; the top bin is closed at 1.0.
    """
    if not 0.0 <= e_n <= 1.0:
        raise ProsodyError("normalized energy %r outside [0, 1]" % e_n)
    if e_n < 0.2:
        return 1
    if e_n < 0.4:
        return 2
    if e_n < 0.6:
        return 3
    if e_n < 0.8:
        return 4
    return 5


def compute_rii(syllables: list[SyllableSegment], energy: EnergyTrack) -> list[int]:
    """Relative intensity index per syllable, written back onto each one.

    A frame belongs to a syllable when its window center lies inside the
    syllable span. Each syllable's mean frame energy is normalized by
    the loudest syllable's mean, then binned. Scaling all energies by a
    common factor cannot change the result.
    """
    if energy.times is None or energy.frame_len is None:
        raise ProsodyError("energy track lacks frame time metadata")
    if not syllables:
        return []
    centers = np.asarray(energy.times) + energy.frame_len / 2.0
    e = np.asarray(energy.energy, dtype=np.float64)
    means = []
    for syl in syllables:
        inside = (centers >= syl.start) & (centers < syl.end)
        if not np.any(inside):
            raise ProsodyError(
                "syllable %r [%g, %g] contains no frames" % (syl.label, syl.start, syl.end)
            )
        means.append(float(e[inside].mean()))
    peak = max(means)
    out = []
    for syl, m in zip(syllables, means):
        e_n = m / peak if peak > 0 else 0.0
        idx = rii_bin(min(e_n, 1.0))
        syl.rii = idx
        out.append(idx)
    return out


def detect_silences(
    flatness: np.ndarray,
    threshold: float = SF_SILENCE_THRESHOLD,
    hop: float = 0.010,
) -> list[SilenceRun]:
    """Maximal runs of frames whose spectral flatness reaches the threshold."""
    sf = np.asarray(flatness, dtype=np.float64)
    if sf.ndim != 1:
        raise ProsodyError("flatness must be a one-dimensional array")
    silent = sf >= threshold
    runs = []
    i = 0
    n = sf.size
    while i < n:
        if silent[i]:
            j = i
            while j < n and silent[j]:
                j += 1
            runs.append(SilenceRun(i, j - i, hop))
            i = j
        else:
            i += 1
    return runs


def assign_break_indices(
    runs: list[SilenceRun],
    word_boundaries: list[float],
    short_ms: float = BREAK_SHORT_MS,
    long_ms: float = BREAK_LONG_MS,
) -> list[BreakIndex]:
    """Break index per word boundary from the adjoining silence length.

    A boundary matches a silence run when its time falls inside the
    run's closed [start, end] interval; an unmatched boundary counts as
    zero silence. Lengths below short_ms give index 1, lengths from
    short_ms up to (but excluding) long_ms give 2, longer gives 3. The
    utterance-final boundary is treated like any other, so trailing
    silence decides its index.
    """
    eps = 1e-9
    out = []
    for b in word_boundaries:
        length = 0.0
        for run in runs:
            if run.start - eps <= b <= run.end + eps:
                length = run.length_ms
                break
        if length < short_ms:
            value = 1
        elif length < long_ms:
            value = 2
        else:
            value = 3
        out.append(BreakIndex(b, value))
    return out
