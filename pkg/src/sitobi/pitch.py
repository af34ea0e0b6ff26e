"""Pitch extraction from glottal closure instants and contour labeling.

The detector inverse-filters the signal with frame-wise linear
prediction, slides an energy phase-slope window of about 1.5 median
pitch periods over the residual, and takes negative-going zero
crossings as closure candidates. Each candidate must be backed by a
genuine residual peak within 1 ms or it is dropped as spurious; the
survivors are spacing-filtered to the 50..500 Hz band within voiced
spans.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_toeplitz
from scipy.ndimage import correlate1d
from scipy.signal import lfilter

from .audio import AudioBuffer, FrameSequence
from .errors import PitchError
from .segments import PhonemeSegment, SyllableSegment

LPC_ORDER = 13
LPC_WINDOW = 0.030
LPC_HOP = 0.010
F0_MIN = 50.0
F0_MAX = 500.0
# Window length as a multiple of the running median pitch period.
PS_WINDOW_PERIODS = 1.5
DEFAULT_PERIOD = 0.008
REFINE_RADIUS = 0.001
# A candidate whose +-1 ms residual peak is below this fraction of the
# strongest residual sample in its analysis window has no excitation
# impulse behind it and is discarded.
PEAK_GATE = 0.05
# Block size for the running median period tracking.
ADAPT_BLOCK = 0.100
# Suppression radius around an accepted instant, in local periods. Must
# stay above 0.5 so no gap is left mid-cycle, and below 1.0 so true
# neighbors survive.
NMS_PERIODS = 0.6
# Submultiples of the autocorrelation argmax compete on comb score: the
# shortest lag reaching this fraction of the best score wins. A
# fractional true period spreads its own peak over adjacent lags while
# pairs of periods still sum to a whole lag, which can bias a bare
# argmax to a multiple of the period; the true period's comb stays
# strong at every multiple, a spurious submultiple's does not.
SUBHARMONIC_BIAS = 0.75
COMB_TEETH = 4

FLAT_MAX_HZ = 10.0
SMALL_MAX_HZ = 60.0
MEDIUM_MAX_HZ = 100.0
CHORD_TOLERANCE = 0.15
ENDPOINT_TOLERANCE = 0.2

SHAPES = ("L", "H", "HLL", "HHL", "LLH", "LHH", "HLH", "LHL", "hat", "bucket")
PREFIXES = ("S", "M", "B")
FLAT = "flat"


@dataclass(frozen=True)
class ContourLabel:
    """One of the 31 contour classes: 10 shapes x 3 ranges, plus flat."""

    shape: str
    prefix: str = ""

    def __post_init__(self):
        if self.shape == FLAT:
            if self.prefix:
                raise PitchError("flat takes no range prefix")
        elif self.shape not in SHAPES or self.prefix not in PREFIXES:
            raise PitchError(
                "bad contour label %r/%r" % (self.prefix, self.shape)
            )

    def __str__(self) -> str:
        return self.shape if self.shape == FLAT else "%s-%s" % (self.prefix, self.shape)

    @classmethod
    def parse(cls, text: str) -> "ContourLabel":
        if text == FLAT:
            return cls(FLAT)
        if "-" in text:
            prefix, shape = text.split("-", 1)
            if prefix in PREFIXES and shape in SHAPES:
                return cls(shape, prefix)
        raise PitchError("unknown contour label %r" % text)


ALL_LABELS = frozenset(
    [str(ContourLabel(FLAT))]
    + [str(ContourLabel(s, p)) for s in SHAPES for p in PREFIXES]
)
N_LABELS = len(ALL_LABELS)  # 31


@dataclass
class GciSequence:
    """Strictly increasing glottal closure instants in seconds."""

    times: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        if self.times.ndim != 1:
            raise PitchError("GCI times must be one-dimensional")
        if self.times.size and np.any(np.diff(self.times) <= 0):
            raise PitchError("GCI times must be strictly increasing")

    def __len__(self) -> int:
        return self.times.size


@dataclass
class PitchTrack:
    """Per-frame fundamental frequency; NaN marks unvoiced frames."""

    times: np.ndarray
    f0: np.ndarray
    hop: float

    @property
    def voiced(self) -> np.ndarray:
        return np.isfinite(self.f0)


def lp_residual(
    x: np.ndarray,
    sample_rate: int,
    order: int = LPC_ORDER,
    window: float = LPC_WINDOW,
    hop: float = LPC_HOP,
) -> np.ndarray:
    """Linear prediction residual via frame-wise inverse filtering."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    win = int(round(window * sample_rate))
    hopn = int(round(hop * sample_rate))
    if n == 0:
        return np.zeros(0)
    resid = np.empty(n)
    ham = np.hamming(win)
    padded = np.concatenate([np.zeros(order), x])
    for s in range(0, n, hopn):
        seg = x[s : s + win]
        if seg.size < win:
            seg = np.concatenate([seg, np.zeros(win - seg.size)])
        w = seg * ham
        r = np.correlate(w, w, mode="full")[win - 1 : win + order]
        e = s + hopn if s + hopn < n else n
        if r[0] <= 0:
            resid[s:e] = x[s:e]
            continue
        r = r / r[0]
        r[0] *= 1.0 + 1e-9
        try:
            a = solve_toeplitz((r[:order], r[:order]), r[1 : order + 1])
        except np.linalg.LinAlgError:
            resid[s:e] = x[s:e]
            continue
        b = np.concatenate([[1.0], -a])
        chunk = padded[s : e + order]
        resid[s:e] = lfilter(b, [1.0], chunk)[order:]
    return resid


def _phase_slope(e2: np.ndarray, half: int) -> np.ndarray:
    """Energy-weighted offset of the sliding window, zero at an impulse."""
    ramp = np.arange(-half, half + 1, dtype=np.float64)
    ones = np.ones(2 * half + 1)
    num = correlate1d(e2, ramp, mode="constant")
    den = correlate1d(e2, ones, mode="constant")
    return num / np.maximum(den, 1e-300)


def _window_max(e2: np.ndarray, half: int) -> np.ndarray:
    from scipy.ndimage import maximum_filter1d

    return maximum_filter1d(e2, 2 * half + 1, mode="constant")


def _candidates(e2: np.ndarray, half: int, sample_rate: int) -> np.ndarray:
    """Gated negative-going zero crossings, refined to residual peaks."""
    ps = _phase_slope(e2, half)
    cross = np.nonzero((ps[:-1] >= 0) & (ps[1:] < 0))[0]
    if cross.size == 0:
        return np.zeros(0, dtype=np.intp)
    wmax = _window_max(e2, half)
    radius = int(round(REFINE_RADIUS * sample_rate))
    picked = []
    for c in cross:
        lo = max(c - radius, 0)
        hi = min(c + radius + 2, e2.size)
        peak = int(lo + np.argmax(e2[lo:hi]))
        if e2[peak] >= PEAK_GATE * wmax[c]:
            picked.append(peak)
    return np.asarray(sorted(set(picked)), dtype=np.intp)


def _comb_score(ac: np.ndarray, lag: float) -> float:
    """Mean autocorrelation peak over the first few multiples of a lag,
    each refined within +-2 samples to absorb fractional periods."""
    peaks = []
    for k in range(1, COMB_TEETH + 1):
        center = int(round(k * lag))
        lo = max(center - 2, 1)
        hi = min(center + 3, ac.size)
        if lo >= hi:
            break
        peaks.append(float(ac[lo:hi].max()))
    return float(np.mean(peaks)) if peaks else 0.0


def _comb_period(ac: np.ndarray, best: int, lo_lag: int) -> float:
    """The shortest submultiple of the argmax lag with a competitive comb."""
    candidates = [float(best)]
    for m in range(2, 11):
        lag = best / m
        if lag < lo_lag:
            break
        candidates.append(lag)
    scores = [_comb_score(ac, lag) for lag in candidates]
    top = max(scores)
    for lag, score in zip(reversed(candidates), reversed(scores)):
        if score >= SUBHARMONIC_BIAS * top:
            return lag
    return float(best)


def _block_periods(e2: np.ndarray, fs: int, f0_min: float, f0_max: float) -> np.ndarray:
    """Pitch period per 100 ms block from residual-energy autocorrelation.

    Estimated independently of the zero-crossing candidates so spurious
    crossings cannot bias it, then smoothed with a running 3-block
    median. Blocks with no usable periodicity inherit the global median,
    or the default period when nothing is periodic anywhere.
    """
    from scipy.signal import correlate

    lo_lag = int(round(fs / f0_max))
    hi_lag = int(round(fs / f0_min))
    context = int(round(0.05 * fs))
    block = int(round(ADAPT_BLOCK * fs))
    n_blocks = max(int(np.ceil(e2.size / block)), 1)
    periods = np.full(n_blocks, np.nan)
    for b in range(n_blocks):
        lo = max(b * block - context, 0)
        hi = min((b + 1) * block + context, e2.size)
        seg = e2[lo:hi]
        if seg.size <= lo_lag + 1 or seg.max() <= 0:
            continue
        ac = correlate(seg, seg, mode="full", method="fft")[seg.size - 1 :]
        search = ac[lo_lag : min(hi_lag + 1, ac.size)]
        if search.size == 0 or search.max() <= 0:
            continue
        best = lo_lag + int(np.argmax(search))
        periods[b] = _comb_period(ac, best, lo_lag) / fs
    usable = periods[np.isfinite(periods)]
    fallback = float(np.median(usable)) if usable.size else DEFAULT_PERIOD
    periods[~np.isfinite(periods)] = fallback
    if n_blocks >= 3:
        padded = np.concatenate([periods[:1], periods, periods[-1:]])
        periods = np.array(
            [np.median(padded[i : i + 3]) for i in range(n_blocks)]
        )
    return periods


def _suppress_weaker(idx: np.ndarray, e2: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """Greedy strongest-first suppression of nearby weaker candidates."""
    order = sorted(range(idx.size), key=lambda i: (-e2[idx[i]], idx[i]))
    accepted: list[int] = []
    for i in order:
        pos, radius = idx[i], radii[i]
        if all(abs(pos - a) >= radius for a in accepted):
            accepted.append(pos)
    return np.asarray(sorted(accepted), dtype=np.intp)


def _voiced_spans(segments) -> list[tuple[float, float]]:
    spans = []
    for seg in segments:
        if seg.phone.is_voiced and not seg.phone.is_silence and seg.end > seg.start:
            if spans and abs(spans[-1][1] - seg.start) < 1e-9:
                spans[-1] = (spans[-1][0], seg.end)
            else:
                spans.append((seg.start, seg.end))
    return spans


def detect_gcis(
    audio: AudioBuffer,
    segments: list[PhonemeSegment] | None = None,
    *,
    lpc_order: int = LPC_ORDER,
    f0_min: float = F0_MIN,
    f0_max: float = F0_MAX,
) -> GciSequence:
    """Locate glottal closure instants inside voiced phone spans.

    With segments=None the whole utterance is treated as voiced. Runs
    two passes: the first with a default-period window, the second with
    the window set per 100 ms block from the running median of the
    first pass's periods.
    """
    fs = audio.sample_rate
    e = lp_residual(audio.samples, fs, lpc_order)
    e2 = e * e
    min_gap = int(round(fs / f0_max))
    block = int(round(ADAPT_BLOCK * fs))

    periods = _block_periods(e2, fs, f0_min, f0_max)
    collected = []
    for half in np.unique(
        np.maximum((PS_WINDOW_PERIODS * periods * fs / 2).round().astype(int), min_gap)
    ):
        cand = _candidates(e2, int(half), fs)
        blocks = np.minimum(cand // block, periods.size - 1)
        half_of_block = np.maximum(
            (PS_WINDOW_PERIODS * periods * fs / 2).round().astype(int), min_gap
        )
        collected.append(cand[half_of_block[blocks] == half])
    idx = np.asarray(sorted(set(np.concatenate(collected).tolist())), dtype=np.intp)

    if segments is not None:
        spans = _voiced_spans(segments)
        times = idx / fs
        keep = np.zeros(idx.size, dtype=bool)
        for lo, hi in spans:
            keep |= (times >= lo) & (times < hi)
        idx = idx[keep]

    blocks = np.minimum(idx // block, periods.size - 1)
    radii = np.maximum(NMS_PERIODS * periods[blocks] * fs, min_gap)
    idx = _suppress_weaker(idx, e2, radii)
    return GciSequence(idx / fs)


def f0_from_gcis(
    gcis: GciSequence | np.ndarray,
    frames: FrameSequence,
    f0_min: float = F0_MIN,
    f0_max: float = F0_MAX,
) -> PitchTrack:
    """Per-frame fundamental frequency from closure spacings.

    Each legal pair of consecutive instants defines one period sample at
    the pair midpoint; a frame's period is the mean of the samples whose
    midpoint falls in its hop span. Frames with no samples in reach are
    unvoiced (NaN). Pairs wider than one minimum-rate period are voicing
    gaps, not periods.
    """
    times = gcis.times if isinstance(gcis, GciSequence) else np.asarray(gcis, float)
    T = len(frames)
    f0 = np.full(T, np.nan)
    hop = frames.hop
    if times.size >= 2:
        spacing = np.diff(times)
        mid = (times[1:] + times[:-1]) / 2.0
        legal = (spacing >= 1.0 / f0_max) & (spacing <= 1.0 / f0_min)
        sums = np.zeros(T)
        counts = np.zeros(T)
        for m, s in zip(mid[legal], spacing[legal]):
            k = int(np.floor(m / hop))
            if 0 <= k < T:
                sums[k] += s
                counts[k] += 1
        voiced = counts > 0
        f0[voiced] = counts[voiced] / sums[voiced]
    return PitchTrack(frames.frame_times.copy(), f0, hop)


# The dynamic range of a contour is measured on this sampling grid.
CONTOUR_GRID = np.linspace(0.0, 1.0, 100)


@dataclass
class SmoothedContour:
    """Least-squares cubic fit of one syllable's pitch, on [0, 1] time."""

    coeffs: np.ndarray  # ascending powers, length 4
    dynamic_range: float
    voiced: bool = True

    def __call__(self, t) -> np.ndarray:
        return np.polynomial.polynomial.polyval(t, self.coeffs)


def smooth_syllable_contour(track: PitchTrack, syllable: SyllableSegment) -> SmoothedContour:
    """Fit a cubic to the voiced pitch samples inside one syllable.

    Sample times are hop-span centers normalized to [0, 1] across the
    syllable. Degree degrades with sample count: 2 or 3 samples give a
    line, one gives a constant, none gives an unvoiced contour with
    zero dynamic range.
    """
    rep = track.times + track.hop / 2.0
    sel = track.voiced & (rep >= syllable.start) & (rep < syllable.end)
    t = (rep[sel] - syllable.start) / (syllable.end - syllable.start)
    y = track.f0[sel]
    if t.size == 0:
        return SmoothedContour(np.zeros(4), 0.0, voiced=False)
    if t.size == 1:
        coeffs = np.array([y[0], 0.0, 0.0, 0.0])
    else:
        deg = 3 if t.size >= 4 else 1
        c = np.polynomial.polynomial.polyfit(t, y, deg)
        coeffs = np.zeros(4)
        coeffs[: c.size] = c
    samples = np.polynomial.polynomial.polyval(CONTOUR_GRID, coeffs)
    return SmoothedContour(coeffs, float(samples.max() - samples.min()), voiced=True)


def _interior_extrema(coeffs: np.ndarray) -> list[tuple[float, str]]:
    """Genuine extrema of the cubic strictly inside (0, 1)."""
    c1, c2, c3 = coeffs[1], coeffs[2], coeffs[3]
    scale = max(abs(c1), abs(c2), abs(c3), 1.0)
    eps = 1e-12 * scale
    roots = []
    if abs(c3) <= eps:
        if abs(c2) > eps:
            roots.append(-c1 / (2.0 * c2))
    else:
        disc = 4.0 * c2 * c2 - 12.0 * c3 * c1
        if disc > 0:
            sq = np.sqrt(disc)
            roots.extend([(-2.0 * c2 - sq) / (6.0 * c3), (-2.0 * c2 + sq) / (6.0 * c3)])
    out = []
    tol = 1e-9
    for r in roots:
        if not tol < r < 1.0 - tol:
            continue
        second = 2.0 * c2 + 6.0 * c3 * r
        if second < 0:
            out.append((r, "max"))
        elif second > 0:
            out.append((r, "min"))
    out.sort()
    return out


def classify_contour(
    contour: SmoothedContour,
    *,
    flat_max_hz: float = FLAT_MAX_HZ,
    small_max_hz: float = SMALL_MAX_HZ,
    medium_max_hz: float = MEDIUM_MAX_HZ,
    chord_tolerance: float = CHORD_TOLERANCE,
    endpoint_tolerance: float = ENDPOINT_TOLERANCE,
) -> ContourLabel:
    """Label a smoothed contour with one of the 31 classes.

    Unvoiced contours and dynamic ranges under flat_max_hz are flat.
    Otherwise the range prefix is S below small_max_hz, M up to and
    including medium_max_hz, else B, and the shape comes from the
    interior extrema of the cubic: none gives the monotone family (L/H
    when the midpoint hugs the chord, else a three-point pattern), one
    maximum gives hat or LHL, one minimum gives bucket or HLH, and with
    two extrema the larger-amplitude one decides.
    """
    D = contour.dynamic_range
    if not contour.voiced or D < flat_max_hz:
        return ContourLabel(FLAT)
    if D < small_max_hz:
        prefix = "S"
    elif D <= medium_max_hz:
        prefix = "M"
    else:
        prefix = "B"

    samples = contour(CONTOUR_GRID)
    midline = (samples.max() + samples.min()) / 2.0
    v0, vm, v1 = contour(0.0), contour(0.5), contour(1.0)
    above = lambda v: v > midline  # noqa: E731

    extrema = _interior_extrema(contour.coeffs)
    if not extrema:
        chord_mid = (v0 + v1) / 2.0
        if abs(vm - chord_mid) <= chord_tolerance * D:
            return ContourLabel("H" if v1 > v0 else "L", prefix)
        pattern = "".join("H" if above(v) else "L" for v in (v0, vm, v1))
        return ContourLabel(pattern, prefix)

    if len(extrema) == 1:
        kind = extrema[0][1]
    else:
        amps = [abs(contour(t) - midline) for t, _ in extrema]
        kind = extrema[0][1] if amps[0] >= amps[1] else extrema[1][1]
    endpoints_close = abs(v0 - v1) <= endpoint_tolerance * D
    if kind == "max":
        if not above(v0) and not above(v1) and endpoints_close:
            return ContourLabel("hat", prefix)
        return ContourLabel("LHL", prefix)
    if above(v0) and above(v1) and endpoints_close:
        return ContourLabel("bucket", prefix)
    return ContourLabel("HLH", prefix)


def label_syllables(
    track: PitchTrack,
    syllables: list[SyllableSegment],
    **thresholds,
) -> list[ContourLabel]:
    """Fit, classify, and attach a contour label to every syllable."""
    labels = []
    for syl in syllables:
        contour = smooth_syllable_contour(track, syl)
        label = classify_contour(contour, **thresholds)
        syl.contour = label
        syl.voiced = contour.voiced
        labels.append(label)
    return labels
