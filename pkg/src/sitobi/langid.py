"""Language identification from syllable contour-label statistics.

Each language gets one frequency table per word length (1 to 5
syllables). A word is scored against a table by summing the
frequencies of its syllable labels; the language with the highest
cumulative score wins.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import LangIdError
from .pitch import ALL_LABELS, ContourLabel

SMOOTHING_EPSILON = 1e-4
MIN_CATEGORY = 1
MAX_CATEGORY = 5
N_LABELS = len(ALL_LABELS)

# Fixed seed for the reproducible 90/10 train/test split.
SPLIT_SEED = 20260821
TEST_FRACTION = 0.1


def _as_label(label) -> str:
    if isinstance(label, ContourLabel):
        return str(label)
    text = str(label)
    ContourLabel.parse(text)  # validates
    return text


def _category(n: int) -> int:
    if not MIN_CATEGORY <= n <= MAX_CATEGORY:
        raise LangIdError(
            "syllable count %d outside the supported range %d..%d"
            % (n, MIN_CATEGORY, MAX_CATEGORY)
        )
    return n


@dataclass
class ContourFrequencyTable:
    """Smoothed per-category label frequencies for one language."""

    language: str
    frequencies: dict[int, dict[str, float]]
    epsilon: float = SMOOTHING_EPSILON
    uniform_categories: frozenset[int] = frozenset()

    def validate(self):
        for cat in range(MIN_CATEGORY, MAX_CATEGORY + 1):
            if cat not in self.frequencies:
                raise LangIdError(
                    "table for %r lacks category %d" % (self.language, cat)
                )
            freqs = self.frequencies[cat]
            if set(freqs) != ALL_LABELS:
                raise LangIdError(
                    "table for %r category %d does not cover all %d labels"
                    % (self.language, cat, N_LABELS)
                )
            total = sum(freqs.values())
            if abs(total - 1.0) > 1e-9:
                raise LangIdError(
                    "table for %r category %d sums to %.12f, not 1"
                    % (self.language, cat, total)
                )

    def lookup(self, category: int, label) -> float:
        return self.frequencies[_category(category)][_as_label(label)]


@dataclass
class LanguageScore:
    language: str
    score: float

    def __post_init__(self):
        if self.score < 0:
            raise LangIdError("negative language score")


def build_frequency_table(
    corpus: list[list],
    language: str,
    epsilon: float = SMOOTHING_EPSILON,
) -> ContourFrequencyTable:
    """Count labels per word-length category and smooth-normalize.

    Raw frequencies are count/total per category; ε is then added to
    every label and the category renormalized, so unseen labels keep a
    nonzero score. A category with no words at all falls back to the
    uniform distribution and is flagged.
    """
    counts: dict[int, dict[str, int]] = {
        cat: {} for cat in range(MIN_CATEGORY, MAX_CATEGORY + 1)
    }
    for word in corpus:
        labels = [_as_label(l) for l in word]
        cat = _category(len(labels))
        for label in labels:
            counts[cat][label] = counts[cat].get(label, 0) + 1

    frequencies = {}
    uniform = set()
    denom = 1.0 + N_LABELS * epsilon
    for cat, bucket in counts.items():
        total = sum(bucket.values())
        if total == 0:
            frequencies[cat] = {label: 1.0 / N_LABELS for label in ALL_LABELS}
            uniform.add(cat)
            continue
        frequencies[cat] = {
            label: (bucket.get(label, 0) / total + epsilon) / denom
            for label in ALL_LABELS
        }
    table = ContourFrequencyTable(language, frequencies, epsilon, frozenset(uniform))
    table.validate()
    return table


def score_word(tables: list[ContourFrequencyTable], labels: list) -> list[LanguageScore]:
    """Cumulative per-language score: sum of label frequencies."""
    names = [t.language for t in tables]
    if len(set(names)) != len(names):
        raise LangIdError("duplicate language in table list")
    text_labels = [_as_label(l) for l in labels]
    cat = _category(len(text_labels))
    return [
        LanguageScore(t.language, sum(t.lookup(cat, l) for l in text_labels))
        for t in tables
    ]


def classify_word(scores: list[LanguageScore]) -> tuple[str, bool]:
    """Best-scoring language; exact ties go lexicographic, flagged."""
    if not scores:
        raise LangIdError("no language scores to classify")
    best = max(s.score for s in scores)
    winners = sorted(s.language for s in scores if s.score == best)
    return winners[0], len(winners) > 1


def identify(tables: list[ContourFrequencyTable], labels: list) -> tuple[str, bool]:
    return classify_word(score_word(tables, labels))


def split_corpus(corpus: list, *, test_fraction: float = TEST_FRACTION, seed: int = SPLIT_SEED):
    """Deterministic train/test split (90/10 by default)."""
    import random

    order = list(range(len(corpus)))
    random.Random(seed).shuffle(order)
    n_test = int(round(len(corpus) * test_fraction))
    test_idx = set(order[:n_test])
    train = [corpus[i] for i in range(len(corpus)) if i not in test_idx]
    test = [corpus[i] for i in range(len(corpus)) if i in test_idx]
    return train, test


def save_table(table: ContourFrequencyTable, path):
    table.validate()
    payload = {
        "language": table.language,
        "epsilon": table.epsilon,
        "uniform_categories": sorted(table.uniform_categories),
        "frequencies": {
            str(cat): dict(sorted(freqs.items()))
            for cat, freqs in sorted(table.frequencies.items())
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_table(path) -> ContourFrequencyTable:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        table = ContourFrequencyTable(
            language=payload["language"],
            frequencies={
                int(cat): dict(freqs)
                for cat, freqs in payload["frequencies"].items()
            },
            epsilon=float(payload["epsilon"]),
            uniform_categories=frozenset(payload.get("uniform_categories", ())),
        )
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise LangIdError("cannot read contour table %s: %s" % (path, exc)) from exc
    table.validate()
    return table
