"""Independent reference implementations the tests compare against.

Everything here is written from the definitions, by a different route
than the package takes: exhaustive enumeration instead of dynamic
programming, digitize instead of cascaded comparisons. Slow is fine.
"""

from itertools import combinations

import numpy as np

from sitobi.aligner import LOG_ENTER, LOG_SKIP, SHORT_PAUSE_LOOP, build_tokens


def brute_force_alignment(models, phones, feats, language=None):
    """Best path log-probability by enumerating every legal path.

    A path = a choice of skipped optional silences plus a composition of
    the T frames over the remaining states (every state occupied at
    least once, in order). Returns -inf when no legal path exists.
    """
    tokens = build_tokens(models, phones, language)
    feats = np.atleast_2d(np.asarray(feats, dtype=np.float64))
    T = feats.shape[0]

    # Per-token state list: (cumulative frame LLs, self-loop prob).
    token_states = []
    for tok in tokens:
        model = models.models[tok.model_key]
        states = []
        for s in tok.state_ids(model):
            loop = SHORT_PAUSE_LOOP if tok.short else float(model.loop[s])
            ll = model.states[s].log_likelihood(feats)
            states.append((np.concatenate([[0.0], np.cumsum(ll)]), loop))
        token_states.append(states)

    best = -np.inf
    optional = [i for i, tok in enumerate(tokens) if tok.skippable]
    for r in range(len(optional) + 1):
        for dropped in combinations(optional, r):
            kept = [i for i in range(len(tokens)) if i not in dropped]
            if not kept:
                continue
            states = [st for i in kept for st in token_states[i]]
            k = len(states)
            if k > T:
                continue
            base = r * LOG_SKIP
            base += sum(1 for i in kept if tokens[i].skippable) * LOG_ENTER

            if k == 1:
                cum, loop = states[0]
                total = base + cum[T] + (T - 1) * np.log(loop) + np.log1p(-loop)
                best = max(best, float(total))
                continue

            splits = np.array(list(combinations(range(1, T), k - 1)), dtype=np.intp)
            bounds = np.hstack([
                np.zeros((splits.shape[0], 1), dtype=np.intp),
                splits,
                np.full((splits.shape[0], 1), T, dtype=np.intp),
            ])
            occupancy = bounds[:, 1:] - bounds[:, :-1]
            total = np.full(splits.shape[0], base)
            for si, (cum, loop) in enumerate(states):
                total += cum[bounds[:, si + 1]] - cum[bounds[:, si]]
                total += (occupancy[:, si] - 1) * np.log(loop) + np.log1p(-loop)
            best = max(best, float(total.max()))
    return best


def rii_reference(e_n):
    """Intensity index via digitize over the published bin edges."""
    return int(np.digitize(e_n, [0.2, 0.4, 0.6, 0.8], right=False)) + 1


def break_reference(silence_ms):
    """Break index via digitize over the published duration edges."""
    return int(np.digitize(silence_ms, [80.0, 290.0], right=False)) + 1
