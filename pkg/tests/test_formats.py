import numpy as np
import pytest

from sitobi.config import Config, load_config, save_config
from sitobi.document import AnnotationDocument
from sitobi.errors import ConfigError, FormatError
from sitobi.labfile import TICKS_PER_SECOND, read_lab, to_ticks, write_lab
from sitobi.phones import Phone
from sitobi.segments import PhonemeSegment
from sitobi.textgrid import (
    HEADER_LINE, format_textgrid, read_textgrid, write_textgrid,
)

from synth import random_document
from synth import test_inventory as make_inventory

SIL = Phone("sil", is_silence=True)
A = Phone("a", is_vowel=True, is_voiced=True)


# -------------------------------------------------------------- TextGrid


def test_header_bytes_exact(tmp_path):
    doc = random_document(np.random.default_rng(0))
    path = tmp_path / "d.TextGrid"
    write_textgrid(doc, path)
    raw = path.read_bytes()
    assert raw.startswith(b'File type = "ooTextFile"\n')
    assert HEADER_LINE == 'File type = "ooTextFile"'


def test_textgrid_round_trip_randomized(tmp_path):
    for s in range(100):
        doc = random_document(np.random.default_rng(s))
        path = tmp_path / ("rt%03d.TextGrid" % s)
        write_textgrid(doc, path)
        again = read_textgrid(path)
        assert again == doc, s
        again.validate()


def test_textgrid_round_trip_no_words(tmp_path):
    doc = AnnotationDocument(duration=0.5, phones=[PhonemeSegment(SIL, 0.0, 0.5)])
    path = tmp_path / "empty.TextGrid"
    write_textgrid(doc, path)
    assert read_textgrid(path) == doc


def test_textgrid_formatting_deterministic():
    doc = random_document(np.random.default_rng(1))
    assert format_textgrid(doc) == format_textgrid(doc)


def test_zero_length_phones_dropped_on_write(tmp_path):
    phones = [
        PhonemeSegment(SIL, 0.0, 0.1),
        PhonemeSegment(A, 0.1, 0.3),
        PhonemeSegment(SIL, 0.3, 0.3),  # skipped silence
        PhonemeSegment(A, 0.3, 0.5),
    ]
    doc = AnnotationDocument(duration=0.5, phones=phones)
    path = tmp_path / "z.TextGrid"
    write_textgrid(doc, path)
    again = read_textgrid(path)
    assert [p.phone.label for p in again.phones] == ["sil", "a", "a"]
    again.validate()


def test_textgrid_missing_tier(tmp_path):
    doc = random_document(np.random.default_rng(2))
    text = format_textgrid(doc)
    # Rename the breaks tier so it cannot be found.
    broken = text.replace('name = "breaks"', 'name = "marks"')
    path = tmp_path / "m.TextGrid"
    path.write_text(broken)
    with pytest.raises(FormatError, match='missing tier "breaks"'):
        read_textgrid(path)


def test_textgrid_bad_header(tmp_path):
    path = tmp_path / "h.TextGrid"
    path.write_text("File type = nonsense\n")
    with pytest.raises(FormatError, match=r"h\.TextGrid:1"):
        read_textgrid(path)


def test_textgrid_malformed_number(tmp_path):
    doc = random_document(np.random.default_rng(3))
    text = format_textgrid(doc)
    lines = text.splitlines()
    idx = next(i for i, l in enumerate(lines) if l.strip().startswith("xmax"))
    lines[idx] = lines[idx].split("=")[0] + "= zebra"
    path = tmp_path / "n.TextGrid"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(FormatError, match=r"n\.TextGrid:%d" % (idx + 1)):
        read_textgrid(path)


def test_textgrid_truncated(tmp_path):
    doc = random_document(np.random.default_rng(4))
    text = format_textgrid(doc)
    path = tmp_path / "t.TextGrid"
    path.write_text("\n".join(text.splitlines()[:12]) + "\n")
    with pytest.raises(FormatError):
        read_textgrid(path)


def test_textgrid_unreadable():
    with pytest.raises(FormatError, match="cannot read"):
        read_textgrid("/no/such/file.TextGrid")


# ------------------------------------------------------------------ .lab


def test_lab_round_trip_randomized(tmp_path):
    inv = make_inventory()
    for s in range(100):
        doc = random_document(np.random.default_rng(1000 + s), inventory=inv)
        path = tmp_path / ("rt%03d.lab" % s)
        write_lab(doc.phones, path)
        again = read_lab(path, inv)
        assert again == doc.phones, s


def test_lab_tick_arithmetic(tmp_path):
    assert TICKS_PER_SECOND == 10_000_000
    assert to_ticks(1.0) == 10_000_000
    assert to_ticks(0.123456) == 1_234_560
    path = tmp_path / "t.lab"
    write_lab([PhonemeSegment(A, 0.25, 0.5)], path)
    assert path.read_text() == "2500000 5000000 a\n"


def test_lab_sub_microsecond_times_survive(tmp_path):
    # .lab carries 100 ns resolution; reading must not round to the
    # microsecond grid.
    path = tmp_path / "p.lab"
    path.write_text("0 3 sil\n3 10000001 a\n")
    segs = read_lab(path)
    assert segs[0].end == pytest.approx(3e-7)
    assert segs[1].end == pytest.approx(1.0000001)


def test_lab_inventory_resolution(tmp_path):
    inv = make_inventory()
    path = tmp_path / "i.lab"
    path.write_text("0 1000000 a\n1000000 2000000 zz\n")
    with pytest.raises(FormatError, match=r"i\.lab:2"):
        read_lab(path, inv)
    # Without an inventory unknown labels pass through.
    segs = read_lab(path)
    assert segs[1].phone.label == "zz"


def test_lab_malformed_lines(tmp_path):
    path = tmp_path / "b.lab"
    path.write_text("0 100\n")
    with pytest.raises(FormatError, match=r"b\.lab:1"):
        read_lab(path)
    path.write_text("0 x a\n")
    with pytest.raises(FormatError, match="non-integer"):
        read_lab(path)
    with pytest.raises(FormatError, match="cannot read"):
        read_lab(tmp_path / "missing.lab")


def test_lab_blank_lines_skipped(tmp_path):
    path = tmp_path / "s.lab"
    path.write_text("\n0 1000000 sil\n\n1000000 2000000 a\n")
    assert len(read_lab(path)) == 2


# ---------------------------------------------------------------- config


def test_config_round_trip(tmp_path):
    config = Config(hop=0.005, n_ceps=10, iterations=7, sf_threshold=0.8)
    path = tmp_path / "c.cfg"
    save_config(config, path)
    assert load_config(path) == config


def test_config_defaults_round_trip(tmp_path):
    path = tmp_path / "d.cfg"
    save_config(Config(), path)
    assert load_config(path) == Config()


def test_config_comments_and_partial(tmp_path):
    path = tmp_path / "p.cfg"
    path.write_text("# tweaked\nhop = 0.005\n\niterations = 3  # more passes\n")
    config = load_config(path)
    assert config.hop == 0.005
    assert config.iterations == 3
    assert config.n_ceps == Config().n_ceps


def test_config_unknown_key(tmp_path):
    path = tmp_path / "u.cfg"
    path.write_text("hop = 0.005\nhops = 0.004\n")
    with pytest.raises(ConfigError, match=r"u\.cfg:2: unknown setting"):
        load_config(path)


def test_config_bad_value(tmp_path):
    path = tmp_path / "v.cfg"
    path.write_text("n_ceps = twelve\n")
    with pytest.raises(ConfigError, match=r"v\.cfg:1"):
        load_config(path)
    path.write_text("hop 0.005\n")
    with pytest.raises(ConfigError, match="key = value"):
        load_config(path)
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.cfg")


def test_config_type_fidelity(tmp_path):
    path = tmp_path / "t.cfg"
    path.write_text("iterations = 4\nhop = 0.02\n")
    config = load_config(path)
    assert isinstance(config.iterations, int)
    assert isinstance(config.hop, float)
