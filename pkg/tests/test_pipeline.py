import numpy as np
import pytest

from sitobi.audio import AudioBuffer
from sitobi.errors import FormatError, PipelineError
from sitobi.labfile import read_lab
from sitobi.pipeline import Transcription, annotate, annotate_file, load_transcription
from sitobi.textgrid import format_textgrid, read_textgrid

import synth


@pytest.fixture(scope="module")
def utterance(inventory):
    words = [("kati", ["k", "a", "t", "i"]), ("suna", ["s", "u", "n", "a"])]
    samples, segments, word_phones = synth.build_utterance(
        words, inventory=inventory, gaps=(0.15,), seed=31
    )
    audio = AudioBuffer(samples / 32768.0, synth.RATE)
    return audio, Transcription(word_phones), segments


@pytest.fixture(scope="module")
def annotated(utterance, seed_models):
    audio, transcription, _ = utterance
    return annotate(audio, transcription, seed_models)


# --------------------------------------------------------- transcription


def test_load_transcription(tmp_path, inventory):
    path = tmp_path / "u.txt"
    path.write_text("# two words\nkati\tk a t i\n\nsuna\ts u n a\n")
    tr = load_transcription(path, inventory, language="ta")
    assert tr.language == "ta"
    assert [w for w, _ in tr.words] == ["kati", "suna"]
    assert [p.label for p in tr.words[0][1]] == ["k", "a", "t", "i"]
    assert tr.words[0][1][1].is_vowel


def test_load_transcription_errors(tmp_path, inventory):
    path = tmp_path / "bad.txt"
    path.write_text("kati k a t i\n")
    with pytest.raises(FormatError, match=r"bad\.txt:1: expected"):
        load_transcription(path, inventory)
    path.write_text("kati\tk a q\n")
    with pytest.raises(FormatError, match=r"bad\.txt:1.*'q'"):
        load_transcription(path, inventory)
    path.write_text("kati\tk a sil\n")
    with pytest.raises(FormatError, match="silence.*inside a word"):
        load_transcription(path, inventory)
    with pytest.raises(FormatError, match="cannot read"):
        load_transcription(tmp_path / "none.txt", inventory)


# --------------------------------------------------------------- annotate


def test_annotate_structure(annotated, utterance):
    audio, _, _ = utterance
    doc = annotated
    doc.validate()
    assert doc.duration == pytest.approx(audio.duration, abs=1e-6)
    assert [w.text for w in doc.words] == ["kati", "suna"]
    assert [p.label for s in doc.words[0].syllables for p in
            (q.phone for q in s.phones)] == ["k", "a", "t", "i"]
    assert [s.label for s in doc.words[0].syllables] == ["ka", "ti"]
    assert [s.label for s in doc.words[1].syllables] == ["su", "na"]


def test_annotate_prosody_populated(annotated):
    doc = annotated
    assert len(doc.breaks) == len(doc.words)
    for brk, word in zip(doc.breaks, doc.words):
        assert brk.time == pytest.approx(word.end, abs=1e-6)
        assert brk.value in (1, 2, 3)
    for syl in doc.syllables:
        assert syl.rii in (1, 2, 3, 4, 5)
        assert syl.contour is not None
    assert doc.warnings == []


def test_annotate_boundaries_near_truth(annotated, utterance):
    _, _, true_segments = utterance
    doc = annotated
    hyp = [p for p in doc.phones if not p.phone.is_silence]
    ref = [p for p in true_segments if not p.phone.is_silence]
    assert [h.phone.label for h in hyp] == [r.phone.label for r in ref]
    worst = max(abs(h.end - r.end) for h, r in zip(hyp, ref))
    assert worst < 0.06


def test_annotate_deterministic(utterance, seed_models):
    audio, transcription, _ = utterance
    first = annotate(audio, transcription, seed_models)
    second = annotate(audio, transcription, seed_models)
    assert first == second
    assert format_textgrid(first) == format_textgrid(second)


def test_vowelless_word_merged(inventory, seed_models):
    words = [("t", ["t"]), ("aka", ["a", "k", "a"])]
    samples, _, word_phones = synth.build_utterance(
        words, inventory=inventory, gaps=(0.0,), seed=7
    )
    audio = AudioBuffer(samples / 32768.0, synth.RATE)
    doc = annotate(audio, Transcription(word_phones), seed_models)
    assert [w.text for w in doc.words] == ["t+aka"]
    assert any("no vowel" in w for w in doc.warnings)
    doc.validate()


def test_sample_rate_mismatch(seed_models):
    audio = AudioBuffer(np.zeros(8000), 8000)
    with pytest.raises(PipelineError, match="features:.*8000 Hz"):
        annotate(audio, Transcription([("a", [])]), seed_models)


def test_empty_transcription(seed_models):
    audio = AudioBuffer(np.zeros(16000), 16000)
    with pytest.raises(PipelineError, match="alignment:"):
        annotate(audio, Transcription([]), seed_models)


# ----------------------------------------------------------- file runner


def test_annotate_file_outputs(tmp_path, inventory, seed_models, utterance):
    audio, transcription, _ = utterance
    wav = tmp_path / "utt1.wav"
    synth.write_wav(wav, (audio.samples * 32768.0).astype(np.int16))
    text = tmp_path / "utt1.txt"
    text.write_text(
        "".join("%s\t%s\n" % (w, " ".join(p.label for p in ps))
                for w, ps in transcription.words)
    )
    out_dir = tmp_path / "out"
    written = annotate_file(
        wav, text, seed_models, inventory, None, out_dir,
        formats=("textgrid", "lab"),
    )
    assert written == [str(out_dir / "utt1.TextGrid"), str(out_dir / "utt1.lab")]
    doc = read_textgrid(written[0])
    doc.validate()
    assert [w.text for w in doc.words] == ["kati", "suna"]
    segs = read_lab(written[1], inventory)
    assert [s.phone.label for s in segs if not s.phone.is_silence] == [
        "k", "a", "t", "i", "s", "u", "n", "a",
    ]
