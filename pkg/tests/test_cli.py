import shutil

import pytest

from sitobi.cli import main
from sitobi.labfile import write_lab
from sitobi.phones import save_inventory
from sitobi.textgrid import read_textgrid

import synth

UTTERANCES = [
    ("utt0", [("kati", ["k", "a", "t", "i"]), ("suna", ["s", "u", "n", "a"])], (0.15,)),
    ("utt1", [("nita", ["n", "i", "t", "a"])], ()),
    ("utt2", [("asu", ["a", "s", "u"]), ("kina", ["k", "i", "n", "a"])], (0.05,)),
]


@pytest.fixture(scope="module")
def workdir(tmp_path_factory, inventory):
    root = tmp_path_factory.mktemp("cli")
    corpus = root / "corpus"
    labs = root / "labs"
    corpus.mkdir()
    labs.mkdir()
    for i, (name, words, gaps) in enumerate(UTTERANCES):
        samples, segments, _ = synth.build_utterance(
            words, inventory=inventory, gaps=gaps, seed=500 + i
        )
        synth.write_wav(corpus / (name + ".wav"), samples)
        write_lab(segments, labs / (name + ".lab"))
    save_inventory(inventory, root / "inventory.tsv")
    for name, words, _ in UTTERANCES:
        (root / (name + ".txt")).write_text(
            "".join("%s\t%s\n" % (w, " ".join(ls)) for w, ls in words)
        )
    return root


@pytest.fixture(scope="module")
def models_dir(workdir):
    out = workdir / "models"
    rc = main([
        "train",
        "--corpus", str(workdir / "corpus"),
        "--seed-labels", str(workdir / "labs"),
        "--inventory", str(workdir / "inventory.tsv"),
        "--iterations", "2",
        "--out", str(out),
    ])
    assert rc == 0
    return out


@pytest.fixture(scope="module")
def annotated_dir(workdir, models_dir):
    out = workdir / "annotated"
    rc = main([
        "annotate",
        "--wav", str(workdir / "corpus" / "utt0.wav"),
        "--text", str(workdir / "utt0.txt"),
        "--lang", "ta",
        "--models", str(models_dir),
        "--out", str(out),
        "--textgrid", "--lab",
    ])
    assert rc == 0
    return out


def test_train_outputs(models_dir):
    for name in ("models.json", "inventory.tsv", "refine_log.tsv"):
        assert (models_dir / name).is_file()
    lines = (models_dir / "refine_log.tsv").read_text().splitlines()
    assert lines[0] == "pass\tcorpus_log_likelihood"
    lls = [float(l.split("\t")[1]) for l in lines[1:]]
    assert len(lls) == 3  # seed pass plus two refinements
    assert all(b >= a - 1e-6 for a, b in zip(lls, lls[1:]))


def test_annotate_outputs(annotated_dir, capsys):
    grid = annotated_dir / "utt0.TextGrid"
    lab = annotated_dir / "utt0.lab"
    assert grid.is_file() and lab.is_file()
    doc = read_textgrid(grid)
    doc.validate()
    assert [w.text for w in doc.words] == ["kati", "suna"]


def test_annotate_prints_written_paths(workdir, models_dir, capsys):
    out = workdir / "printed"
    rc = main([
        "annotate",
        "--wav", str(workdir / "corpus" / "utt1.wav"),
        "--text", str(workdir / "utt1.txt"),
        "--lang", "ta",
        "--models", str(models_dir),
        "--out", str(out),
    ])
    assert rc == 0
    stdout = capsys.readouterr().out.splitlines()
    # default format is TextGrid only
    assert stdout == [str(out / "utt1.TextGrid")]
    assert not (out / "utt1.lab").exists()


def test_annotate_input_errors(workdir, models_dir, capsys):
    base = [
        "annotate", "--lang", "ta",
        "--models", str(models_dir), "--out", str(workdir / "x"),
    ]
    txt = str(workdir / "utt0.txt")
    wav = str(workdir / "corpus" / "utt0.wav")
    assert main(base + ["--wav", wav, "--text", txt, "--text", txt]) == 1
    assert main(base + ["--wav", str(workdir / "missing.wav"), "--text", txt]) == 1
    bad_models = [
        "annotate", "--lang", "ta", "--models", str(workdir / "nowhere"),
        "--out", str(workdir / "x"), "--wav", wav, "--text", txt,
    ]
    assert main(bad_models) == 1
    capsys.readouterr()


def test_evaluate_phones_perfect(workdir, annotated_dir, capsys):
    ref = workdir / "ref"
    ref.mkdir(exist_ok=True)
    shutil.copy(annotated_dir / "utt0.TextGrid", ref / "utt0.TextGrid")
    report = workdir / "reports" / "seg.tsv"
    rc = main([
        "evaluate", "--tier", "phones",
        "--hyp", str(annotated_dir), "--ref", str(ref),
        "--report", str(report),
    ])
    assert rc == 0
    stdout = capsys.readouterr().out.splitlines()
    assert stdout[0] == str(report)
    assert stdout[1].endswith("seg_histogram.png")
    text = report.read_text()
    assert "kind\tsegmentation" in text
    assert "pct_within_10ms\t100.0000" in text
    assert (workdir / "reports" / "seg_histogram.png").is_file()


def test_evaluate_breaks_figure(workdir, annotated_dir, capsys):
    report = workdir / "reports" / "brk.tsv"
    rc = main([
        "evaluate", "--tier", "breaks",
        "--hyp", str(annotated_dir), "--ref", str(workdir / "ref"),
        "--report", str(report),
    ])
    assert rc == 0
    assert "accuracy_pct\t100.0000" in report.read_text()
    assert (workdir / "reports" / "brk_confusion.png").is_file()
    capsys.readouterr()


def test_evaluate_mismatched_directories(workdir, annotated_dir, capsys):
    empty = workdir / "empty_ref"
    empty.mkdir(exist_ok=True)
    rc = main([
        "evaluate", "--tier", "phones",
        "--hyp", str(annotated_dir), "--ref", str(empty),
        "--report", str(workdir / "r.tsv"),
    ])
    assert rc == 1
    capsys.readouterr()


def test_langid_round_trip(workdir, annotated_dir, capsys):
    # the output directory does not exist yet; build-table must create it
    tables = workdir / "tables"
    rc = main([
        "langid", "build-table",
        "--corpus", str(annotated_dir),
        "--lang", "ta",
        "--out", str(tables / "ta.json"),
    ])
    assert rc == 0
    doc = read_textgrid(annotated_dir / "utt0.TextGrid")
    labels = [str(s.contour) for s in doc.words[0].syllables]
    words_file = workdir / "words.txt"
    words_file.write_text(" ".join(labels) + "\n\n")
    capsys.readouterr()

    rc = main([
        "langid", "classify",
        "--tables", str(tables),
        "--word-labels", str(words_file),
    ])
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 1
    lang, score, tie = lines[0].split("\t")
    assert lang == "ta"
    assert float(score) > 0.0
    assert tie == "-"


def test_langid_tie_between_identical_tables(workdir, annotated_dir, capsys):
    tables = workdir / "tables2"
    tables.mkdir(exist_ok=True)
    for lang in ("hi", "ta"):
        rc = main([
            "langid", "build-table",
            "--corpus", str(annotated_dir),
            "--lang", lang,
            "--out", str(tables / (lang + ".json")),
        ])
        assert rc == 0
    capsys.readouterr()
    rc = main([
        "langid", "classify",
        "--tables", str(tables),
        "--word-labels", str(workdir / "words.txt"),
    ])
    assert rc == 0
    line = capsys.readouterr().out.splitlines()[0]
    lang, _, tie = line.split("\t")
    # identical tables tie; the lexicographically first id wins
    assert lang == "hi"
    assert tie == "tie"


def test_langid_missing_inputs(workdir, capsys):
    rc = main([
        "langid", "build-table",
        "--corpus", str(workdir / "empty_ref"),
        "--lang", "ta",
        "--out", str(workdir / "t.json"),
    ])
    assert rc == 1
    rc = main([
        "langid", "classify",
        "--tables", str(workdir / "empty_ref"),
        "--word-labels", str(workdir / "words.txt"),
    ])
    assert rc == 1
    capsys.readouterr()


def test_bad_arguments_exit_one(workdir, capsys):
    assert main(["annotate", "--nope"]) == 1
    assert main([]) == 1
    assert main(["evaluate", "--tier", "sentences"]) == 1
    capsys.readouterr()


def test_train_requires_wavs(workdir, capsys):
    empty = workdir / "no_corpus"
    empty.mkdir(exist_ok=True)
    rc = main([
        "train",
        "--corpus", str(empty),
        "--seed-labels", str(workdir / "labs"),
        "--inventory", str(workdir / "inventory.tsv"),
        "--out", str(workdir / "m2"),
    ])
    assert rc == 1
    capsys.readouterr()
