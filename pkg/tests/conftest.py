"""Shared fixtures: synthetic audio corpus and a trained tiny model set."""

import numpy as np
import pytest

from sitobi.aligner import SeedUtterance, train_seed_models
from sitobi.audio import AudioBuffer, frame_signal
from sitobi.features import FeatureConfig, compute_features
from sitobi.segments import PhonemeSegment

import synth

# Word sequences that jointly cover every phone of the test inventory.
SEED_WORDS = [
    [("ka", ["k", "a"]), ("ti", ["t", "i"])],
    [("su", ["s", "u"]), ("na", ["n", "a"])],
    [("it", ["i", "t"]), ("ku", ["k", "u"])],
    [("asi", ["a", "s", "i"]), ("nu", ["n", "u"])],
    [("tu", ["t", "u"]), ("ni", ["n", "i"]), ("sa", ["s", "a"])],
    [("ak", ["a", "k"]), ("is", ["i", "s"])],
]


@pytest.fixture(scope="session")
def inventory():
    return synth.test_inventory()


def seed_utterance(words, inventory, seed):
    samples, segments, word_phones = synth.build_utterance(
        words, inventory=inventory, seed=seed
    )
    audio = AudioBuffer(samples.astype(np.float64) / 32768.0)
    feats = compute_features(frame_signal(audio))
    return SeedUtterance(feats, segments), word_phones


@pytest.fixture(scope="session")
def seed_models(inventory):
    """Monophone models trained on six short synthetic utterances."""
    seed = [seed_utterance(w, inventory, 100 + i)[0] for i, w in enumerate(SEED_WORDS)]
    return train_seed_models(seed, inventory, FeatureConfig())
