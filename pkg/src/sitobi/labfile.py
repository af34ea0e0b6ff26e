"""Plain-text label files: `start end label`, times in 100 ns units."""

from __future__ import annotations

import os

from .errors import FormatError
from .phones import Phone, PhoneInventory, SILENCE_LABEL
from .segments import PhonemeSegment

TICKS_PER_SECOND = 10_000_000


def to_ticks(seconds: float) -> int:
    return int(round(seconds * TICKS_PER_SECOND))


def write_lab(segments: list[PhonemeSegment], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for seg in segments:
            fh.write("%d %d %s\n" % (to_ticks(seg.start), to_ticks(seg.end), seg.phone.label))


def read_lab(
    path: str | os.PathLike, inventory: PhoneInventory | None = None
) -> list[PhonemeSegment]:
    """Parse a label file; with an inventory, labels must resolve in it."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise FormatError("cannot read %s: %s" % (path, exc)) from exc

    segments = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise FormatError(
                "%s:%d: expected `start end label`, got %r" % (path, lineno, raw)
            )
        try:
            start, end = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError("%s:%d: non-integer time in %r" % (path, lineno, raw))
        label = parts[2]
        if inventory is not None:
            try:
                phone = inventory.get(label)
            except Exception as exc:
                raise FormatError("%s:%d: %s" % (path, lineno, exc))
        else:
            phone = Phone(
                label,
                is_silence=label == SILENCE_LABEL,
                is_voiced=label != SILENCE_LABEL,
            )
        try:
            segments.append(
                PhonemeSegment(phone, start / TICKS_PER_SECOND, end / TICKS_PER_SECOND)
            )
        except Exception as exc:
            raise FormatError("%s:%d: %s" % (path, lineno, exc))
    return segments
