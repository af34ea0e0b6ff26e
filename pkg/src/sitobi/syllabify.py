"""Syllabification and word boundary derivation.

Syllables take one of the forms V, C*V, VC*, C*VC*. Intervocalic
consonant clusters are split by the maximal legal onset rule: the
longest cluster suffix found in the language's onset table becomes the
next syllable's onset. Singleton consonants are always legal onsets;
clusters are illegal unless listed, so the default split sends all but
the last consonant to the coda.
"""

from __future__ import annotations

from .errors import AlignmentError, SyllabificationError, VowellessWordError
from .phones import Phone
from .segments import PhonemeSegment, WordSegment

# Legal onset clusters per language, each cluster a tuple of phone labels.
# Singletons are implicitly legal and never listed. Unlisted languages get
# no cluster onsets.
DEFAULT_ONSETS: dict[str, frozenset[tuple[str, ...]]] = {
    "ta": frozenset(),
    "hi": frozenset(),
    "en": frozenset(
        {
            ("p", "l"), ("p", "r"), ("b", "l"), ("b", "r"), ("t", "r"),
            ("d", "r"), ("k", "l"), ("k", "r"), ("g", "l"), ("g", "r"),
            ("f", "l"), ("f", "r"), ("th", "r"), ("sh", "r"),
            ("s", "p"), ("s", "t"), ("s", "k"), ("s", "m"), ("s", "n"),
            ("s", "l"), ("s", "w"), ("t", "w"), ("k", "w"), ("d", "w"),
            ("s", "p", "l"), ("s", "p", "r"), ("s", "t", "r"), ("s", "k", "r"),
            ("s", "k", "w"),
        }
    ),
}


def onset_table(language: str | None) -> frozenset[tuple[str, ...]]:
    return DEFAULT_ONSETS.get(language or "", frozenset())


def _split_cluster(cluster, onsets) -> int:
    """Index splitting an intervocalic cluster into coda | onset."""
    n = len(cluster)
    if n == 0:
        return 0
    for k in range(n, 1, -1):
        if tuple(p.label for p in cluster[n - k :]) in onsets:
            return n - k
    # Singleton onsets are always legal.
    return n - 1


def syllabify(
    phones, language: str | None = None, onsets: frozenset | None = None
) -> list[list[Phone]]:
    """Group one word's phones into syllables.

    Parameters
    ----------
    phones : sequence of Phone
        The word's phones, silence excluded.
    language : str, optional
        Selects the shipped onset cluster table.
    onsets : frozenset of label tuples, optional
        Explicit onset table overriding the language default.

    Returns the syllables in order; their concatenation equals the
    input. A word without a vowel raises VowellessWordError.
    """
    phones = list(phones)
    if onsets is None:
        onsets = onset_table(language)
    for p in phones:
        if p.is_silence:
            raise SyllabificationError("silence phone %r inside a word" % p.label)
    vowel_at = [i for i, p in enumerate(phones) if p.is_vowel]
    if not vowel_at:
        raise VowellessWordError(
            "word %r has no vowel phone" % "".join(p.label for p in phones)
        )
    syllables = []
    # Start of the syllable under construction.
    begin = 0
    for vi, v in enumerate(vowel_at[:-1]):
        cluster = phones[v + 1 : vowel_at[vi + 1]]
        cut = v + 1 + _split_cluster(cluster, onsets)
        syllables.append(phones[begin:cut])
        begin = cut
    syllables.append(phones[begin:])
    return syllables


def derive_word_boundaries(
    segments: list[PhonemeSegment], words: list[tuple[str, int]]
) -> list[WordSegment]:
    """Attach aligned phone segments to words.

    segments is the aligned tier: an optional leading silence, then each
    word's phones followed by a word-final silence marker whose duration
    may be zero. words lists (text, phone count) pairs. Each word spans
    its first phone's start to its last phone's end; silences belong to
    no word.
    """
    out = []
    i = 0
    n = len(segments)
    while i < n and segments[i].phone.is_silence:
        i += 1
    for text, count in words:
        if count < 1:
            raise AlignmentError("word %r has no phones" % text)
        span = segments[i : i + count]
        if len(span) < count or any(s.phone.is_silence for s in span):
            raise AlignmentError(
                "segment sequence does not match the %d phones of word %r"
                % (count, text)
            )
        out.append(
            WordSegment(text, span[0].start, span[-1].end, phones=list(span))
        )
        i += count
        while i < n and segments[i].phone.is_silence:
            i += 1
    if i != n:
        raise AlignmentError(
            "%d trailing segments beyond the last word" % (n - i)
        )
    return out
