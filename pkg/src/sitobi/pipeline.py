"""End-to-end annotation: audio plus transcription in, document out.

Stage order: feature extraction, forced alignment, word boundary
derivation, syllabification, intensity indexing, silence-driven break
indices, pitch extraction and contour labeling. Any stage failure is
re-raised with the stage name attached.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .aligner import force_align
from .audio import AudioBuffer, frame_signal, load_audio
from .config import Config
from .document import AnnotationDocument
from .errors import FormatError, PipelineError, SitobiError
from .features import compute_features, energy_track, spectral_flatness
from .hmm import ModelSet
from .labfile import write_lab
from .phones import Phone, PhoneInventory, SILENCE_LABEL
from .pitch import detect_gcis, f0_from_gcis, label_syllables
from .prosody import assign_break_indices, compute_rii, detect_silences
from .segments import SyllableSegment, quantize_time
from .syllabify import derive_word_boundaries, syllabify
from .textgrid import write_textgrid


@dataclass
class Transcription:
    """Ordered words of one utterance, each with its phone expansion."""

    words: list[tuple[str, list[Phone]]]
    language: str | None = None


def load_transcription(
    path: str | os.PathLike,
    inventory: PhoneInventory,
    language: str | None = None,
) -> Transcription:
    """Read `word<TAB>phone phone ...` lines against an inventory."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise FormatError("cannot read transcription %s: %s" % (path, exc)) from exc

    words = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise FormatError(
                "%s:%d: expected `word<TAB>phones`, got %r" % (path, lineno, raw)
            )
        text, phone_part = parts[0].strip(), parts[1].strip()
        labels = phone_part.split()
        if not text or not labels:
            raise FormatError("%s:%d: empty word or phone list" % (path, lineno))
        phones = []
        for label in labels:
            try:
                phone = inventory.get(label)
            except SitobiError as exc:
                raise FormatError("%s:%d: %s" % (path, lineno, exc)) from exc
            if phone.is_silence:
                raise FormatError(
                    "%s:%d: silence %r cannot appear inside a word" % (path, lineno, label)
                )
            phones.append(phone)
        words.append((text, phones))
    return Transcription(words, language)


@contextmanager
def _stage(name: str):
    try:
        yield
    except PipelineError:
        raise
    except SitobiError as exc:
        raise PipelineError("%s: %s" % (name, exc)) from exc


def _merge_vowelless(words, warnings) -> list[tuple[str, list[Phone]]]:
    """Fold words without a vowel into a neighbor so they syllabify."""
    merged: list[tuple[str, list[Phone]]] = []
    pending: list[tuple[str, list[Phone]]] = []
    for text, phones in words:
        if not any(p.is_vowel for p in phones) and len(words) > 1:
            if merged:
                prev_text, prev_phones = merged[-1]
                warnings.append(
                    "word %r has no vowel; merged into %r" % (text, prev_text)
                )
                merged[-1] = (prev_text + "+" + text, prev_phones + phones)
            else:
                pending.append((text, phones))
            continue
        if pending:
            for p_text, p_phones in reversed(pending):
                warnings.append("word %r has no vowel; merged into %r" % (p_text, text))
                text, phones = p_text + "+" + text, p_phones + phones
            pending = []
        merged.append((text, phones))
    if pending:
        merged.extend(pending)
    return merged


def annotate(
    audio: AudioBuffer,
    transcription: Transcription,
    models: ModelSet,
    config: Config | None = None,
) -> AnnotationDocument:
    config = config or Config()
    warnings: list[str] = []
    language = transcription.language
    spec = models.features.frame

    with _stage("features"):
        if audio.sample_rate != models.features.sample_rate:
            raise PipelineError(
                "features: audio at %d Hz but models expect %d Hz"
                % (audio.sample_rate, models.features.sample_rate)
            )
        frames = frame_signal(audio, spec)
        feats = compute_features(frames, models.features)
        energy = energy_track(frames)
        flatness = np.array([spectral_flatness(f, spec) for f in frames.frames])

    words = _merge_vowelless(transcription.words, warnings)
    silence = Phone(SILENCE_LABEL, is_silence=True)
    phone_seq: list[Phone] = []
    if words:
        phone_seq.append(silence)
        for _, phones in words:
            phone_seq.extend(phones)
            phone_seq.append(silence)

    with _stage("alignment"):
        result = force_align(
            models,
            phone_seq,
            feats,
            duration=quantize_time(audio.duration),
            language=language,
        )

    with _stage("words"):
        counts = [(text, len(phones)) for text, phones in words]
        word_segments = derive_word_boundaries(result.segments, counts)

    all_syllables: list[SyllableSegment] = []
    with _stage("syllables"):
        for word in word_segments:
            groups = syllabify([s.phone for s in word.phones], language)
            cursor = 0
            for group in groups:
                span = word.phones[cursor : cursor + len(group)]
                cursor += len(group)
                word.syllables.append(
                    SyllableSegment(
                        "".join(p.label for p in group),
                        span[0].start,
                        span[-1].end,
                        phones=span,
                    )
                )
            all_syllables.extend(word.syllables)

    with _stage("intensity"):
        compute_rii(all_syllables, energy)

    with _stage("breaks"):
        runs = detect_silences(flatness, config.sf_threshold, spec.hop)
        boundaries = [w.end for w in word_segments]
        breaks = assign_break_indices(
            runs, boundaries, config.break_short_ms, config.break_long_ms
        )

    with _stage("pitch"):
        gcis = detect_gcis(
            audio,
            result.segments,
            lpc_order=config.lpc_order,
            f0_min=config.f0_min,
            f0_max=config.f0_max,
        )
        track = f0_from_gcis(gcis, frames, config.f0_min, config.f0_max)
        label_syllables(track, all_syllables, **config.contour_thresholds())

    with _stage("document"):
        doc = AnnotationDocument(
            duration=quantize_time(audio.duration),
            phones=result.segments,
            syllables=all_syllables,
            words=word_segments,
            breaks=breaks,
            warnings=warnings,
        )
        doc.validate()
    return doc


def annotate_file(
    wav_path,
    text_path,
    models: ModelSet,
    inventory: PhoneInventory,
    language: str | None,
    out_dir,
    config: Config | None = None,
    formats: tuple[str, ...] = ("textgrid",),
) -> list[str]:
    """Annotate one utterance and serialize the requested formats."""
    audio = load_audio(wav_path)
    transcription = load_transcription(text_path, inventory, language)
    doc = annotate(audio, transcription, models, config)
    doc.audio_ref = os.fspath(wav_path)

    stem = os.path.splitext(os.path.basename(os.fspath(wav_path)))[0]
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if "textgrid" in formats:
        out = os.path.join(os.fspath(out_dir), stem + ".TextGrid")
        write_textgrid(doc, out)
        written.append(out)
    if "lab" in formats:
        out = os.path.join(os.fspath(out_dir), stem + ".lab")
        write_lab(doc.phones, out)
        written.append(out)
    return written
