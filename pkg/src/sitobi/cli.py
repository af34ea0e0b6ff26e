"""Command line front end.

Subcommands: annotate, train, evaluate, and the langid pair
(build-table, classify). Results go to stdout, diagnostics to stderr.
Exit codes: 0 success, 1 bad input, 2 internal failure.
"""

from __future__ import annotations

import argparse
import glob
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .aligner import CorpusUtterance, SeedUtterance, iterative_refine, train_seed_models
from .audio import load_audio, frame_signal
from .config import Config, load_config
from .errors import SitobiError
from .evaluate import (
    evaluate_breaks,
    evaluate_pitch_labels,
    evaluate_segmentation,
    write_report,
)
from .features import compute_features
from .figures import render_report_figures
from .hmm import (
    LANGUAGE_DEPENDENT,
    LANGUAGE_INDEPENDENT,
    load_model_set,
    save_model_set,
)
from .labfile import read_lab
from .langid import build_frequency_table, identify, load_table, save_table, score_word
from .phones import load_inventory, load_mapping, save_inventory
from .pipeline import annotate_file
from .segments import PhonemeSegment
from .textgrid import read_textgrid

log = logging.getLogger("sitobi")

LANGUAGES = ("ta", "hi", "en")


class InputError(SitobiError):
    """A problem in what the user handed us, not in the toolkit."""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sitobi",
        description="Batch prosody annotation: phone alignment, break indices, "
        "intensity indices, and pitch contour labels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("annotate", help="annotate one or more utterances")
    p.add_argument("--wav", action="append", required=True, help="input WAV file")
    p.add_argument("--text", action="append", required=True,
                   help="transcription file (word<TAB>phones per line)")
    p.add_argument("--lang", choices=LANGUAGES, required=True)
    p.add_argument("--models", required=True, help="trained model directory")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--textgrid", action="store_true", help="write TextGrid output")
    p.add_argument("--lab", action="store_true", help="write .lab output")
    p.add_argument("--config", help="key = value settings file")

    p = sub.add_parser("train", help="train alignment models from seed labels")
    p.add_argument("--corpus", required=True, help="directory of WAV files")
    p.add_argument("--seed-labels", required=True, help="directory of .lab files")
    p.add_argument("--inventory", required=True, help="phone inventory TSV")
    p.add_argument("--mapping", help="phone mapping TSV for shared models")
    p.add_argument("--iterations", type=int, default=5)
    p.add_argument("--out", required=True, help="output model directory")

    p = sub.add_parser("evaluate", help="score hypothesis against reference")
    p.add_argument("--tier", choices=("phones", "breaks", "pitch"), required=True)
    p.add_argument("--hyp", required=True, help="directory of hypothesis TextGrids")
    p.add_argument("--ref", required=True, help="directory of reference TextGrids")
    p.add_argument("--report", required=True, help="TSV report path")

    p = sub.add_parser("langid", help="contour-statistics language identification")
    lsub = p.add_subparsers(dest="langid_command", required=True)
    b = lsub.add_parser("build-table", help="build a contour frequency table")
    b.add_argument("--corpus", required=True, help="directory of annotated TextGrids")
    b.add_argument("--lang", required=True, help="language id for the table")
    b.add_argument("--out", required=True, help="output JSON table")
    c = lsub.add_parser("classify", help="classify words against tables")
    c.add_argument("--tables", required=True, help="directory of table JSON files")
    c.add_argument("--word-labels", required=True,
                   help="file with one word per line: space-separated contour labels")
    return parser


def _load_models_dir(models_dir: str, language: str):
    model_path = os.path.join(models_dir, "models.json")
    if not os.path.isfile(model_path):
        raise InputError("no models.json in %s" % models_dir)
    models = load_model_set(model_path)
    for name in ("inventory.%s.tsv" % language, "inventory.tsv"):
        inv_path = os.path.join(models_dir, name)
        if os.path.isfile(inv_path):
            return models, load_inventory(inv_path)
    raise InputError(
        "no inventory.%s.tsv or inventory.tsv in %s" % (language, models_dir)
    )


def _cmd_annotate(args) -> int:
    config = load_config(args.config) if args.config else Config()
    if len(args.wav) != len(args.text):
        raise InputError(
            "%d --wav but %d --text arguments" % (len(args.wav), len(args.text))
        )
    models, inventory = _load_models_dir(args.models, args.lang)
    formats = []
    if args.textgrid:
        formats.append("textgrid")
    if args.lab:
        formats.append("lab")
    if not formats:
        formats = ["textgrid"]

    def run(pair):
        wav, text = pair
        return annotate_file(
            wav, text, models, inventory, args.lang, args.out, config, tuple(formats)
        )

    pairs = list(zip(args.wav, args.text))
    with ThreadPoolExecutor(max_workers=max(config.workers, 1)) as pool:
        results = list(pool.map(run, pairs))
    for (wav, _), written in zip(pairs, results):
        log.info("annotated %s", wav)
        for path in written:
            print(path)
    return 0


def _train_utterances(args, inventory, mapping):
    """Load (utt_id, features, seed segments, phone sequence) records."""
    spec = Config().frame_spec()
    records = []

    def add(wav_path, lab_path, language):
        utt_id = os.path.splitext(os.path.basename(wav_path))[0]
        if not os.path.isfile(lab_path):
            raise InputError("no seed labels for %s (expected %s)" % (wav_path, lab_path))
        audio = load_audio(wav_path)
        frames = frame_signal(audio, spec)
        feats = compute_features(frames, Config().feature_config(audio.sample_rate))
        if mapping is None:
            segments = read_lab(lab_path, inventory)
        else:
            segments = [
                PhonemeSegment(
                    inventory.get(mapping.lookup(language, seg.phone.label)),
                    seg.start,
                    seg.end,
                )
                for seg in read_lab(lab_path, None)
            ]
        records.append((utt_id, feats, segments))

    if mapping is None:
        wavs = sorted(glob.glob(os.path.join(args.corpus, "*.wav")))
        if not wavs:
            raise InputError("no WAV files in %s" % args.corpus)
        for wav in wavs:
            stem = os.path.splitext(os.path.basename(wav))[0]
            add(wav, os.path.join(args.seed_labels, stem + ".lab"), None)
    else:
        langs = sorted(
            d for d in os.listdir(args.corpus)
            if os.path.isdir(os.path.join(args.corpus, d))
        )
        if not langs:
            raise InputError("no per-language subdirectories in %s" % args.corpus)
        for lang in langs:
            wavs = sorted(glob.glob(os.path.join(args.corpus, lang, "*.wav")))
            for wav in wavs:
                stem = os.path.splitext(os.path.basename(wav))[0]
                add(wav, os.path.join(args.seed_labels, lang, stem + ".lab"), lang)
    return records


def _cmd_train(args) -> int:
    inventory = load_inventory(args.inventory)
    mapping = load_mapping(args.mapping) if args.mapping else None
    mode = LANGUAGE_DEPENDENT if mapping is None else LANGUAGE_INDEPENDENT
    records = _train_utterances(args, inventory, mapping)

    seed = [SeedUtterance(feats, segments) for _, feats, segments in records]
    features = Config().feature_config(16000)
    log.info("seed training on %d utterances", len(seed))
    models = train_seed_models(
        seed, inventory, features, mode=mode, mapping=mapping
    )
    corpus = [
        CorpusUtterance(utt_id, feats, [seg.phone for seg in segments])
        for utt_id, feats, segments in records
    ]
    log.info("refining for %d iterations", args.iterations)
    refined = iterative_refine(models, corpus, n_iterations=args.iterations)
    for i, ll in enumerate(refined.log_likelihoods):
        log.info("alignment pass %d corpus log-likelihood %.3f", i, ll)

    os.makedirs(args.out, exist_ok=True)
    model_path = os.path.join(args.out, "models.json")
    save_model_set(refined.models, model_path)
    save_inventory(inventory, os.path.join(args.out, "inventory.tsv"))
    with open(os.path.join(args.out, "refine_log.tsv"), "w", encoding="utf-8") as fh:
        fh.write("pass\tcorpus_log_likelihood\n")
        for i, ll in enumerate(refined.log_likelihoods):
            fh.write("%d\t%.6f\n" % (i, ll))
    print(model_path)
    return 0


def _matched_documents(hyp_dir, ref_dir):
    hyp_names = {os.path.basename(p) for p in glob.glob(os.path.join(hyp_dir, "*.TextGrid"))}
    ref_names = {os.path.basename(p) for p in glob.glob(os.path.join(ref_dir, "*.TextGrid"))}
    if hyp_names != ref_names:
        odd = sorted(hyp_names.symmetric_difference(ref_names))
        raise InputError("hypothesis/reference files do not match: %s" % ", ".join(odd))
    if not hyp_names:
        raise InputError("no TextGrid files to evaluate")
    for name in sorted(hyp_names):
        yield (
            name,
            read_textgrid(os.path.join(hyp_dir, name)),
            read_textgrid(os.path.join(ref_dir, name)),
        )


def _cmd_evaluate(args) -> int:
    hyp_pool, ref_pool = [], []
    for name, hyp_doc, ref_doc in _matched_documents(args.hyp, args.ref):
        if args.tier == "phones":
            hyp_items, ref_items = hyp_doc.phones, ref_doc.phones
        elif args.tier == "breaks":
            hyp_items, ref_items = hyp_doc.breaks, ref_doc.breaks
        else:
            hyp_items = [s.contour for s in hyp_doc.syllables]
            ref_items = [s.contour for s in ref_doc.syllables]
            if any(c is None for c in hyp_items + ref_items):
                raise InputError("%s: unlabeled syllable in pitch evaluation" % name)
        if len(hyp_items) != len(ref_items):
            raise InputError(
                "%s: %d hypothesis items vs %d reference items"
                % (name, len(hyp_items), len(ref_items))
            )
        hyp_pool.extend(hyp_items)
        ref_pool.extend(ref_items)

    if args.tier == "phones":
        report = evaluate_segmentation(hyp_pool, ref_pool)
    elif args.tier == "breaks":
        report = evaluate_breaks(hyp_pool, ref_pool)
    else:
        report = evaluate_pitch_labels(hyp_pool, ref_pool)

    report_dir = os.path.dirname(os.path.abspath(args.report))
    os.makedirs(report_dir, exist_ok=True)
    write_report(report, args.report)
    print(args.report)
    for figure in render_report_figures(report, args.report):
        print(figure)
    return 0


def _cmd_langid(args) -> int:
    if args.langid_command == "build-table":
        grids = sorted(glob.glob(os.path.join(args.corpus, "*.TextGrid")))
        if not grids:
            raise InputError("no TextGrid files in %s" % args.corpus)
        corpus = []
        for grid in grids:
            doc = read_textgrid(grid)
            for word in doc.words:
                labels = [s.contour for s in word.syllables]
                if not labels or any(c is None for c in labels):
                    log.warning("skipping word %r in %s: unlabeled syllables",
                                word.text, grid)
                    continue
                if len(labels) > 5:
                    log.warning("skipping word %r in %s: %d syllables",
                                word.text, grid, len(labels))
                    continue
                corpus.append([str(c) for c in labels])
        table = build_frequency_table(corpus, args.lang)
        os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
        save_table(table, args.out)
        print(args.out)
        return 0

    tables = [load_table(p) for p in sorted(glob.glob(os.path.join(args.tables, "*.json")))]
    if not tables:
        raise InputError("no table JSON files in %s" % args.tables)
    try:
        with open(args.word_labels, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (args.word_labels, exc))
    for raw in lines:
        labels = raw.split()
        if not labels:
            continue
        scores = score_word(tables, labels)
        language, tie = identify(tables, labels)
        best = max(s.score for s in scores)
        print("%s\t%.6f\t%s" % (language, best, "tie" if tie else "-"))
    return 0


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1

    handlers = {
        "annotate": _cmd_annotate,
        "train": _cmd_train,
        "evaluate": _cmd_evaluate,
        "langid": _cmd_langid,
    }
    try:
        return handlers[args.command](args)
    except (SitobiError, FileNotFoundError, NotADirectoryError) as exc:
        log.error("%s", exc)
        return 1
    except Exception as exc:  # internal failure
        log.error("internal failure: %r", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
