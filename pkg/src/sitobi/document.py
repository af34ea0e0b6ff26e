"""The four-tier annotation record produced by the pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DocumentError
from .segments import BreakIndex, PhonemeSegment, SyllableSegment, WordSegment

TIME_EPS = 1e-9


@dataclass
class AnnotationDocument:
    """Phone, syllable, word, and break tiers over one utterance.

    The phone tier tiles [0, duration] including silences; syllables
    nest inside words; every tier boundary is a phone boundary. The
    audio reference and collected warnings are bookkeeping and do not
    take part in equality, so a serialized round trip compares equal.
    """

    duration: float
    phones: list[PhonemeSegment] = field(default_factory=list)
    syllables: list[SyllableSegment] = field(default_factory=list)
    words: list[WordSegment] = field(default_factory=list)
    breaks: list[BreakIndex] = field(default_factory=list)
    audio_ref: str = field(default="", compare=False)
    warnings: list[str] = field(default_factory=list, compare=False)

    def validate(self) -> None:
        if self.duration <= 0:
            raise DocumentError("document duration must be positive")
        self._check_phone_tiling()
        self._check_nesting()
        self._check_breaks()

    def _check_phone_tiling(self) -> None:
        cursor = 0.0
        for seg in self.phones:
            if abs(seg.start - cursor) > TIME_EPS:
                raise DocumentError(
                    "phone tier gap at %.6f (next starts at %.6f)" % (cursor, seg.start)
                )
            cursor = seg.end
        if self.phones and abs(cursor - self.duration) > TIME_EPS:
            raise DocumentError(
                "phone tier ends at %.6f, not at the duration %.6f"
                % (cursor, self.duration)
            )

    def _phone_boundaries(self) -> set:
        marks = set()
        for seg in self.phones:
            marks.add(seg.start)
            marks.add(seg.end)
        return marks

    def _check_nesting(self) -> None:
        marks = self._phone_boundaries()

        def on_grid(t, what):
            if self.phones and t not in marks:
                raise DocumentError("%s boundary %.6f is not a phone boundary" % (what, t))

        prev_end = 0.0
        for syl in self.syllables:
            if syl.start < prev_end - TIME_EPS:
                raise DocumentError("overlapping syllables at %.6f" % syl.start)
            prev_end = syl.end
            on_grid(syl.start, "syllable")
            on_grid(syl.end, "syllable")
            if not any(
                w.start - TIME_EPS <= syl.start and syl.end <= w.end + TIME_EPS
                for w in self.words
            ):
                raise DocumentError(
                    "syllable [%.6f, %.6f] lies outside every word" % (syl.start, syl.end)
                )
        prev_end = 0.0
        for word in self.words:
            if word.start < prev_end - TIME_EPS:
                raise DocumentError("overlapping words at %.6f" % word.start)
            prev_end = word.end
            on_grid(word.start, "word")
            on_grid(word.end, "word")
            if word.end > self.duration + TIME_EPS:
                raise DocumentError("word %r extends past the duration" % word.text)

    def _check_breaks(self) -> None:
        ends = {w.end for w in self.words}
        for brk in self.breaks:
            if brk.time > self.duration + TIME_EPS:
                raise DocumentError("break at %.6f past the duration" % brk.time)
            if self.words and brk.time not in ends:
                raise DocumentError(
                    "break at %.6f is not at a word boundary" % brk.time
                )

    def syllable_labels(self) -> list[list[str]]:
        """Per-word contour label strings, for language identification."""
        out = []
        for word in self.words:
            out.append([str(s.contour) for s in word.syllables if s.contour is not None])
        return out
