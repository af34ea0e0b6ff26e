"""Long-format TextGrid serialization of annotation documents.

Four tiers are written: interval tiers "phones", "syllables", "words"
and the point tier "breaks". Syllable interval text packs the label,
intensity index, and contour class as `text|RII|label`. Gaps between
intervals are padded with empty-text fillers so every interval tier
tiles the document span; fillers and zero-length segments vanish again
on read, and all remaining fields survive a round trip exactly.
"""

from __future__ import annotations

import os
import re

from .document import AnnotationDocument
from .errors import FormatError
from .phones import Phone, SILENCE_LABEL
from .pitch import ContourLabel
from .segments import (
    BreakIndex,
    PhonemeSegment,
    SyllableSegment,
    WordSegment,
    quantize_time,
)

HEADER_LINE = 'File type = "ooTextFile"'
CLASS_LINE = 'Object class = "TextGrid"'
TIER_NAMES = ("phones", "syllables", "words", "breaks")
TIME_EPS = 1e-9


def _t(value: float) -> str:
    return "%.6f" % value


def _quote(text: str) -> str:
    return '"%s"' % text.replace('"', '""')


def _syllable_text(syl: SyllableSegment) -> str:
    rii = "" if syl.rii is None else str(syl.rii)
    contour = "" if syl.contour is None else str(syl.contour)
    return "%s|%s|%s" % (syl.label, rii, contour)


def _fill_gaps(entries, duration):
    """Pad with empty-text intervals so the tier tiles [0, duration]."""
    out = []
    cursor = 0.0
    for start, end, text in entries:
        if start > cursor + TIME_EPS:
            out.append((cursor, start, ""))
        out.append((start, end, text))
        cursor = max(cursor, end)
    if duration > cursor + TIME_EPS or not out:
        out.append((cursor, duration, ""))
    return out


def format_textgrid(doc: AnnotationDocument) -> str:
    lines = [HEADER_LINE, CLASS_LINE, ""]
    lines += [
        "xmin = %s" % _t(0.0),
        "xmax = %s" % _t(doc.duration),
        "tiers? <exists>",
        "size = 4",
        "item []:",
    ]
    interval_tiers = [
        ("phones", [(p.start, p.end, p.phone.label) for p in doc.phones if p.end > p.start]),
        ("syllables", [(s.start, s.end, _syllable_text(s)) for s in doc.syllables]),
        ("words", [(w.start, w.end, w.text) for w in doc.words]),
    ]
    item = 0
    for name, entries in interval_tiers:
        item += 1
        entries = _fill_gaps(entries, doc.duration)
        lines += [
            "    item [%d]:" % item,
            '        class = "IntervalTier"',
            "        name = %s" % _quote(name),
            "        xmin = %s" % _t(0.0),
            "        xmax = %s" % _t(doc.duration),
            "        intervals: size = %d" % len(entries),
        ]
        for i, (start, end, text) in enumerate(entries, 1):
            lines += [
                "        intervals [%d]:" % i,
                "            xmin = %s" % _t(start),
                "            xmax = %s" % _t(end),
                "            text = %s" % _quote(text),
            ]
    lines += [
        "    item [4]:",
        '        class = "TextTier"',
        "        name = %s" % _quote("breaks"),
        "        xmin = %s" % _t(0.0),
        "        xmax = %s" % _t(doc.duration),
        "        points: size = %d" % len(doc.breaks),
    ]
    for i, brk in enumerate(doc.breaks, 1):
        lines += [
            "        points [%d]:" % i,
            "            number = %s" % _t(brk.time),
            "            mark = %s" % _quote(str(brk.value)),
        ]
    return "\n".join(lines) + "\n"


def write_textgrid(doc: AnnotationDocument, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_textgrid(doc))


_KV = re.compile(r"^\s*([A-Za-z?][A-Za-z?: ]*?)\s*=\s*(.*?)\s*$")


class _Scanner:
    """Sequential key = value reader with line-numbered errors."""

    def __init__(self, path, lines):
        self.path = str(path)
        self.pairs = []
        for lineno, raw in enumerate(lines, 1):
            m = _KV.match(raw)
            if m:
                key = m.group(1).strip().lower()
                key = key.replace("intervals: size", "size").replace("points: size", "size")
                self.pairs.append((lineno, key, m.group(2)))
        self.pos = 0

    def fail(self, lineno, message):
        raise FormatError("%s:%d: %s" % (self.path, lineno, message))

    def expect(self, key):
        if self.pos >= len(self.pairs):
            raise FormatError("%s: unexpected end of file, expected %s" % (self.path, key))
        lineno, found, value = self.pairs[self.pos]
        if found != key:
            self.fail(lineno, "expected %s, found %s" % (key, found))
        self.pos += 1
        return lineno, value

    def number(self, key):
        lineno, value = self.expect(key)
        try:
            return lineno, float(value)
        except ValueError:
            self.fail(lineno, "bad number %r for %s" % (value, key))

    def integer(self, key):
        lineno, value = self.number(key)
        return lineno, int(value)

    def string(self, key):
        lineno, value = self.expect(key)
        if len(value) < 2 or not value.startswith('"') or not value.endswith('"'):
            self.fail(lineno, "expected a quoted string for %s" % key)
        return lineno, value[1:-1].replace('""', '"')


def _parse_syllable(text, lineno, scanner):
    parts = text.split("|")
    if len(parts) != 3:
        scanner.fail(lineno, "syllable text %r is not label|RII|contour" % text)
    label, rii_text, contour_text = parts
    rii = None
    if rii_text:
        try:
            rii = int(rii_text)
        except ValueError:
            scanner.fail(lineno, "bad RII %r" % rii_text)
    contour = None
    if contour_text:
        try:
            contour = ContourLabel.parse(contour_text)
        except Exception:
            scanner.fail(lineno, "bad contour label %r" % contour_text)
    return label, rii, contour


def read_textgrid(path: str | os.PathLike) -> AnnotationDocument:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise FormatError("cannot read %s: %s" % (path, exc)) from exc
    if not lines or lines[0] != HEADER_LINE:
        raise FormatError("%s:1: not an ooTextFile TextGrid" % path)
    if len(lines) < 2 or lines[1] != CLASS_LINE:
        raise FormatError("%s:2: not a TextGrid object" % path)

    sc = _Scanner(path, lines)
    sc.expect("file type")
    sc.expect("object class")
    sc.number("xmin")
    _, duration = sc.number("xmax")
    _, n_tiers = sc.integer("size")

    tiers = {}
    for _ in range(n_tiers):
        _, klass = sc.string("class")
        name_lineno, name = sc.string("name")
        sc.number("xmin")
        sc.number("xmax")
        _, count = sc.integer("size")
        entries = []
        if klass == "IntervalTier":
            for _ in range(count):
                _, lo = sc.number("xmin")
                _, hi = sc.number("xmax")
                text_lineno, text = sc.string("text")
                entries.append((text_lineno, quantize_time(lo), quantize_time(hi), text))
        elif klass == "TextTier":
            for _ in range(count):
                _, when = sc.number("number")
                mark_lineno, mark = sc.string("mark")
                entries.append((mark_lineno, quantize_time(when), mark))
        else:
            sc.fail(name_lineno, "unsupported tier class %r" % klass)
        tiers[name] = (name_lineno, klass, entries)

    for name in TIER_NAMES:
        if name not in tiers:
            raise FormatError('%s: missing tier "%s"' % (path, name))
    for name, klass in (("phones", "IntervalTier"), ("syllables", "IntervalTier"),
                        ("words", "IntervalTier"), ("breaks", "TextTier")):
        lineno, found, _ = tiers[name]
        if found != klass:
            sc.fail(lineno, 'tier "%s" must be a %s' % (name, klass))

    phones = []
    for lineno, lo, hi, text in tiers["phones"][2]:
        if not text:
            continue
        phone = Phone(
            text,
            is_silence=text == SILENCE_LABEL,
            is_voiced=text != SILENCE_LABEL,
        )
        try:
            phones.append(PhonemeSegment(phone, lo, hi))
        except Exception as exc:
            sc.fail(lineno, str(exc))

    def members(lo, hi):
        return [
            p for p in phones
            if not p.phone.is_silence and p.start >= lo - TIME_EPS and p.end <= hi + TIME_EPS
        ]

    syllables = []
    for lineno, lo, hi, text in tiers["syllables"][2]:
        if not text:
            continue
        label, rii, contour = _parse_syllable(text, lineno, sc)
        try:
            syllables.append(
                SyllableSegment(label, lo, hi, members(lo, hi), rii, contour)
            )
        except Exception as exc:
            sc.fail(lineno, str(exc))

    words = []
    for lineno, lo, hi, text in tiers["words"][2]:
        if not text:
            continue
        inside = [s for s in syllables if s.start >= lo - TIME_EPS and s.end <= hi + TIME_EPS]
        try:
            words.append(WordSegment(text, lo, hi, members(lo, hi), inside))
        except Exception as exc:
            sc.fail(lineno, str(exc))

    breaks = []
    for lineno, when, mark in tiers["breaks"][2]:
        try:
            breaks.append(BreakIndex(when, int(mark)))
        except Exception as exc:
            sc.fail(lineno, str(exc))

    doc = AnnotationDocument(
        duration=quantize_time(duration),
        phones=phones,
        syllables=syllables,
        words=words,
        breaks=breaks,
        audio_ref=os.fspath(path),
    )
    doc.validate()
    return doc
