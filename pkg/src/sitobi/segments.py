"""Time-aligned tier records shared across the annotation pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional

from .errors import DocumentError
from .phones import Phone

if TYPE_CHECKING:
    from .pitch import ContourLabel

# All document times live on a 1 microsecond grid so that the text formats
# (6 fractional digits) round-trip exactly.
TIME_QUANTUM = 1e-6


def quantize_time(t: float) -> float:
    """Snap a time in seconds to the microsecond grid."""
    return round(t * 1e6) / 1e6


@dataclass
class PhonemeSegment:
    """One aligned phone span. Zero length is allowed for silence only."""

    phone: Phone
    start: float
    end: float

    def __post_init__(self):
        if self.start < 0 or self.end < self.start:
            raise DocumentError(
                "bad phone span [%r, %r] for %r" % (self.start, self.end, self.phone.label)
            )
        if self.end == self.start and not self.phone.is_silence:
            raise DocumentError(
                "zero-length span only allowed for silence, got %r" % self.phone.label
            )

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass
class SyllableSegment:
    """One syllable span with its intensity index and contour label.

    voiced is in-memory provenance for the contour label (False when the
    syllable had no voiced pitch samples); serialized tiers do not carry
    it, so it is excluded from equality.
    """

    label: str
    start: float
    end: float
    phones: list[PhonemeSegment] = field(default_factory=list)
    rii: Optional[int] = None
    contour: Optional["ContourLabel"] = None
    voiced: bool = field(default=True, compare=False)

    def __post_init__(self):
        if self.start < 0 or self.end <= self.start:
            raise DocumentError(
                "bad syllable span [%r, %r] for %r" % (self.start, self.end, self.label)
            )
        if self.rii is not None and not 1 <= int(self.rii) <= 5:
            raise DocumentError("RII must be in 1..5, got %r" % (self.rii,))

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass
class WordSegment:
    """One word span; covers its first phone start to last phone end."""

    text: str
    start: float
    end: float
    phones: list[PhonemeSegment] = field(default_factory=list)
    syllables: list[SyllableSegment] = field(default_factory=list)

    def __post_init__(self):
        if self.start < 0 or self.end <= self.start:
            raise DocumentError(
                "bad word span [%r, %r] for %r" % (self.start, self.end, self.text)
            )

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass
class BreakIndex:
    """A break strength mark attached to one word boundary time."""

    time: float
    value: int

    def __post_init__(self):
        if not 1 <= self.value <= 3:
            raise DocumentError("break index must be 1..3, got %r" % (self.value,))
        if self.time < 0:
            raise DocumentError("break time must be nonnegative")
