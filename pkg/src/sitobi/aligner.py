"""Forced-Viterbi alignment and segmental k-means model training.

A phone sequence expands into a linear token graph. Silence tokens are
traversable in zero frames through skip arcs; interior (word-final)
silences decode through a single-state variant tied to the middle state
of the 3-state silence model, so one- and two-frame pauses remain
alignable. Skip and entry probabilities are fixed constants and are not
re-estimated, which keeps retraining a true segmental k-means step:
corpus Viterbi log-likelihood never decreases from one pass to the next.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AlignmentError, ModelError
from .features import FeatureConfig
from .hmm import (
    DiagonalGmm,
    LANGUAGE_DEPENDENT,
    MIXTURE_SCHEDULE,
    ModelSet,
    MonophoneModel,
    N_STATES,
    VAR_FLOOR,
    fit_gmm,
    mixtures_for_frames,
)
from .phones import Phone, PhoneInventory
from .segments import PhonemeSegment, quantize_time

NEG_INF = -np.inf
# Probability of bypassing a skippable silence token entirely.
SKIP_P = 0.5
# Fixed self-loop probability of the single-state short-pause variant.
SHORT_PAUSE_LOOP = 0.5
LOOP_FLOOR = 1e-4
LOOP_CEIL = 1.0 - 1e-4

LOG_SKIP = float(np.log(SKIP_P))
LOG_ENTER = float(np.log(1.0 - SKIP_P))


@dataclass
class AlignToken:
    """One decodable unit of the alignment graph."""

    phone: Phone
    model_key: str
    skippable: bool = False
    short: bool = False  # decode through the tied 1-state silence variant

    def state_ids(self, model: MonophoneModel) -> tuple[int, ...]:
        if self.short:
            return (model.n_states // 2,)
        return tuple(range(model.n_states))


def build_tokens(
    models: ModelSet, phones, language: str | None = None
) -> list[AlignToken]:
    """Expand a phone sequence into alignment tokens.

    Silence phones become skippable; silences that are neither
    utterance-initial nor utterance-final use the short-pause variant.
    """
    phones = list(phones)
    if not phones:
        raise AlignmentError("no phones to align")
    tokens = []
    last = len(phones) - 1
    for i, phone in enumerate(phones):
        key = models.resolve_key(phone.label, language)
        if phone.is_silence:
            tokens.append(AlignToken(phone, key, skippable=True, short=0 < i < last))
        else:
            tokens.append(AlignToken(phone, key))
    return tokens


class _Graph:
    """Flattened state graph with skip closure precomputed."""

    def __init__(self, models: ModelSet, tokens: list[AlignToken], language=None):
        self.tokens = tokens
        gmms: list[DiagonalGmm] = []
        gmm_col: dict[int, int] = {}
        state_col = []
        state_token = []
        state_local = []
        loop_logp = []
        first_state = []
        last_state = []
        for ti, tok in enumerate(tokens):
            model = models.models.get(tok.model_key)
            if model is None:
                raise ModelError("no model for phone %r" % tok.phone.label)
            first_state.append(len(state_col))
            for s in tok.state_ids(model):
                gmm = model.states[s]
                col = gmm_col.get(id(gmm))
                if col is None:
                    col = len(gmms)
                    gmm_col[id(gmm)] = col
                    gmms.append(gmm)
                state_col.append(col)
                state_token.append(ti)
                state_local.append(s)
                p = SHORT_PAUSE_LOOP if tok.short else float(model.loop[s])
                p = min(max(p, 0.0), LOOP_CEIL)
                loop_logp.append(np.log(p) if p > 0 else NEG_INF)
            last_state.append(len(state_col) - 1)

        self.n_states = len(state_col)
        self.gmms = gmms
        self.state_col = np.asarray(state_col, dtype=np.intp)
        self.state_token = np.asarray(state_token, dtype=np.intp)
        self.state_local = np.asarray(state_local, dtype=np.intp)
        self.first_state = first_state
        self.last_state = last_state
        loop_logp = np.asarray(loop_logp, dtype=np.float64)
        with np.errstate(divide="ignore"):
            exit_logp = np.log1p(-np.exp(loop_logp))
        exit_logp[loop_logp == NEG_INF] = 0.0
        self.exit_logp = exit_logp

        def entry_logp(ti):
            return LOG_ENTER if tokens[ti].skippable else 0.0

        src, dst, logp = [], [], []
        for i in range(self.n_states):
            if np.isfinite(loop_logp[i]):
                src.append(i)
                dst.append(i)
                logp.append(loop_logp[i])
            ti = int(self.state_token[i])
            if i < self.n_states - 1 and self.state_token[i + 1] == ti:
                src.append(i)
                dst.append(i + 1)
                logp.append(exit_logp[i])
            elif i == last_state[ti]:
                acc = exit_logp[i]
                tj = ti + 1
                while tj < len(tokens):
                    src.append(i)
                    dst.append(first_state[tj])
                    logp.append(acc + entry_logp(tj))
                    if not tokens[tj].skippable:
                        break
                    acc += LOG_SKIP
                    tj += 1
        self.arc_src = np.asarray(src, dtype=np.intp)
        self.arc_dst = np.asarray(dst, dtype=np.intp)
        self.arc_logp = np.asarray(logp, dtype=np.float64)

        init = np.full(self.n_states, NEG_INF)
        acc = 0.0
        for ti in range(len(tokens)):
            init[first_state[ti]] = acc + entry_logp(ti)
            if not tokens[ti].skippable:
                break
            acc += LOG_SKIP
        self.init_logp = init

        final = np.full(self.n_states, NEG_INF)
        suffix = 0.0  # log prob of skipping every token after ti
        for ti in range(len(tokens) - 1, -1, -1):
            final[last_state[ti]] = exit_logp[last_state[ti]] + suffix
            if tokens[ti].skippable:
                suffix += LOG_SKIP
            else:
                suffix = NEG_INF
        self.final_logp = final

    def mandatory_frames(self) -> int:
        return sum(
            0 if tok.skippable else (1 if tok.short else N_STATES)
            for tok in self.tokens
        )

    def emissions(self, features: np.ndarray) -> np.ndarray:
        cols = np.column_stack([g.log_likelihood(features) for g in self.gmms])
        return cols[:, self.state_col]


@dataclass
class AlignmentResult:
    """Alignment of one utterance: segments plus the decode internals."""

    segments: list[PhonemeSegment]
    score: float
    tokens: list[AlignToken]
    frame_tokens: np.ndarray  # token index per frame
    frame_states: list[tuple[str, int]]  # (model key, state index) per frame


def _viterbi(graph: _Graph, emis: np.ndarray):
    T, S = emis.shape
    delta = graph.init_logp + emis[0]
    bps = np.zeros((T, S), dtype=np.int32)
    src, dst, logp = graph.arc_src, graph.arc_dst, graph.arc_logp
    for t in range(1, T):
        cand = delta[src] + logp
        new = np.full(S, NEG_INF)
        np.maximum.at(new, dst, cand)
        win = cand == new[dst]
        bps[t, dst[win]] = src[win]
        delta = new + emis[t]
    total = delta + graph.final_logp
    best = int(np.argmax(total))
    score = float(total[best])
    if not np.isfinite(score):
        raise AlignmentError("no feasible alignment path")
    path = np.empty(T, dtype=np.intp)
    path[T - 1] = best
    for t in range(T - 1, 0, -1):
        path[t - 1] = bps[t, path[t]]
    return score, path


def force_align(
    models: ModelSet,
    phones,
    features: np.ndarray,
    *,
    hop: float | None = None,
    duration: float | None = None,
    language: str | None = None,
) -> AlignmentResult:
    """Viterbi-align a known phone sequence to feature frames.

    phones may be Phone objects or prebuilt AlignTokens. Returned
    segment boundaries land on the hop grid (microsecond-quantized); the
    last emitting segment is extended to the utterance duration so the
    segments tile [0, duration] exactly. Skipped silences come back as
    zero-length segments.
    """
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if hop is None:
        hop = models.features.frame.hop
    if phones and isinstance(phones[0], AlignToken):
        tokens = list(phones)
    else:
        tokens = build_tokens(models, phones, language)
    graph = _Graph(models, tokens, language)
    T = features.shape[0]
    if T < 1:
        raise AlignmentError("no feature frames to align")
    need = graph.mandatory_frames()
    if T < need:
        raise AlignmentError(
            "infeasible frame budget: %d frames for %d mandatory states" % (T, need)
        )
    if duration is None:
        duration = T * hop
    duration = quantize_time(duration)
    emis = graph.emissions(features)
    score, path = _viterbi(graph, emis)

    frame_tokens = graph.state_token[path]
    frame_states = [
        (tokens[int(frame_tokens[t])].model_key, int(graph.state_local[path[t]]))
        for t in range(T)
    ]

    segments = []
    bound = 0.0
    visited = np.unique(frame_tokens)
    last_visited = int(visited.max())
    for ti, tok in enumerate(tokens):
        idx = np.nonzero(frame_tokens == ti)[0]
        if idx.size == 0:
            segments.append(PhonemeSegment(tok.phone, bound, bound))
            continue
        start = quantize_time(idx[0] * hop)
        end = duration if ti == last_visited else quantize_time((idx[-1] + 1) * hop)
        segments.append(PhonemeSegment(tok.phone, start, end))
        bound = end
    return AlignmentResult(segments, score, tokens, frame_tokens, frame_states)


@dataclass
class SeedUtterance:
    """Features of one utterance plus its manual phone segmentation."""

    features: np.ndarray
    segments: list[PhonemeSegment]


@dataclass
class CorpusUtterance:
    """Features of one utterance plus its phone transcription."""

    utt_id: str
    features: np.ndarray
    phones: list[Phone]
    language: str | None = None


def _segment_frames(seg: PhonemeSegment, hop: float, n_frames: int) -> range:
    lo = min(max(int(round(seg.start / hop)), 0), n_frames)
    hi = min(max(int(round(seg.end / hop)), lo), n_frames)
    return range(lo, hi)


def _clamp_loop(p: float) -> float:
    return min(max(p, LOOP_FLOOR), LOOP_CEIL)


def train_seed_models(
    seed: list[SeedUtterance],
    inventory: PhoneInventory,
    features: FeatureConfig | None = None,
    *,
    mode: str | None = None,
    mapping=None,
    var_floor: float = VAR_FLOOR,
) -> ModelSet:
    """Estimate 3-state monophone models from manually segmented data.

    Each labeled span is split evenly across the three states. A state
    that receives no frames anywhere falls back to the pooled frames of
    its phone. Mixture counts follow the per-state frame schedule
    (%s). Self-loop probabilities come from span/frame counts.
    """ % (MIXTURE_SCHEDULE,)
    features = features or FeatureConfig()
    if not seed:
        raise AlignmentError("seed training needs at least one utterance")
    hop = features.frame.hop
    pools: dict[tuple[str, int], list[np.ndarray]] = {}
    frames_count: dict[tuple[str, int], int] = {}
    entries_count: dict[tuple[str, int], int] = {}
    seen: dict[str, int] = {}

    for utt in seed:
        segs = utt.segments
        if not segs:
            raise AlignmentError("seed utterance with no segments")
        for a, b in zip(segs, segs[1:]):
            if abs(a.end - b.start) > 1e-9:
                raise AlignmentError(
                    "non-tiling seed segments at %r -> %r" % (a.end, b.start)
                )
        if abs(segs[0].start) > 1e-9:
            raise AlignmentError("seed segments must start at time 0")
        T = utt.features.shape[0]
        for seg in segs:
            label = seg.phone.label
            if label not in inventory:
                raise AlignmentError("seed phone %r is not in the inventory" % label)
            rng = _segment_frames(seg, hop, T)
            seen[label] = seen.get(label, 0) + len(rng)
            if len(rng) == 0:
                continue
            parts = np.array_split(np.arange(rng.start, rng.stop), N_STATES)
            for s, part in enumerate(parts):
                if part.size == 0:
                    continue
                pools.setdefault((label, s), []).append(utt.features[part])
                frames_count[(label, s)] = frames_count.get((label, s), 0) + part.size
                entries_count[(label, s)] = entries_count.get((label, s), 0) + 1

    models = {}
    for phone in inventory:
        label = phone.label
        if seen.get(label, 0) == 0:
            raise AlignmentError("phone %r has zero seed examples" % label)
        phone_frames = np.vstack(
            [f for s in range(N_STATES) for f in pools.get((label, s), [])]
        )
        states = []
        loops = []
        for s in range(N_STATES):
            chunks = pools.get((label, s), [])
            data = np.vstack(chunks) if chunks else phone_frames
            m = mixtures_for_frames(data.shape[0])
            states.append(fit_gmm(data, m, var_floor=var_floor))
            n = frames_count.get((label, s), 0)
            e = entries_count.get((label, s), 0)
            loops.append(_clamp_loop((n - e) / n if n > 0 else 0.5))
        models[label] = MonophoneModel(label, states, np.asarray(loops))

    model_set = ModelSet(models, features, mode or LANGUAGE_DEPENDENT, mapping)
    model_set.validate()
    return model_set


@dataclass
class RefineResult:
    """Outcome of iterative alignment refinement."""

    models: ModelSet
    alignments: dict[str, AlignmentResult]
    log_likelihoods: list[float]  # corpus Viterbi LL of every alignment pass


def _align_corpus(models: ModelSet, corpus: list[CorpusUtterance]):
    results = {}
    total = 0.0
    for utt in corpus:
        try:
            res = force_align(
                models, utt.phones, utt.features, language=utt.language
            )
        except (AlignmentError, ModelError) as e:
            raise AlignmentError("utterance %r: %s" % (utt.utt_id, e)) from None
        results[utt.utt_id] = res
        total += res.score
    return results, total


def _retrain(models: ModelSet, results: dict[str, AlignmentResult], corpus) -> ModelSet:
    """Refit emissions and self-loops from the current Viterbi alignments.

    States are warm-started from their previous parameters, so the
    likelihood of the fixed alignments cannot decrease. Short-pause
    frames feed the tied middle silence state; short-pause loop counts
    are ignored because that variant's transitions are fixed.
    """
    pools: dict[tuple[str, int], list[np.ndarray]] = {}
    frames_count: dict[tuple[str, int], int] = {}
    entries_count: dict[tuple[str, int], int] = {}
    by_id = {u.utt_id: u for u in corpus}
    for utt_id, res in results.items():
        feats = by_id[utt_id].features
        prev_run = None  # (token index, state index) of the previous frame
        for t, key_state in enumerate(res.frame_states):
            pools.setdefault(key_state, []).append(feats[t])
            ti = int(res.frame_tokens[t])
            run = (ti, key_state[1])
            if not res.tokens[ti].short:
                frames_count[key_state] = frames_count.get(key_state, 0) + 1
                if run != prev_run:
                    entries_count[key_state] = entries_count.get(key_state, 0) + 1
            prev_run = run

    new_models = {}
    for label, model in models.models.items():
        states = []
        loops = []
        for s, gmm in enumerate(model.states):
            chunks = pools.get((label, s))
            if chunks:
                data = np.vstack(chunks)
                target = max(gmm.n_components, mixtures_for_frames(data.shape[0]))
                states.append(fit_gmm(data, target, init=gmm))
            else:
                states.append(gmm.copy())
            n = frames_count.get((label, s), 0)
            e = entries_count.get((label, s), 0)
            loops.append(_clamp_loop((n - e) / n) if n > 0 else float(model.loop[s]))
        new_models[label] = MonophoneModel(label, states, np.asarray(loops))
    return ModelSet(new_models, models.features, models.mode, models.mapping)


def iterative_refine(
    models: ModelSet, corpus: list[CorpusUtterance], n_iterations: int = 5
) -> RefineResult:
    """Alternate forced alignment and retraining over a corpus.

    Runs n_iterations align/retrain rounds and then one final alignment
    pass, whose output is returned. With n_iterations=0 the models are
    untouched and the result is a single alignment with the input
    models. log_likelihoods holds the corpus Viterbi log-likelihood of
    every alignment pass; the sequence is non-decreasing.
    """
    if n_iterations < 0:
        raise AlignmentError("n_iterations must be nonnegative")
    lls = []
    for _ in range(n_iterations):
        results, total = _align_corpus(models, corpus)
        lls.append(total)
        models = _retrain(models, results, corpus)
    results, total = _align_corpus(models, corpus)
    lls.append(total)
    return RefineResult(models, results, lls)
