"""Diagonal-covariance GMM states and monophone model sets.

Models are 3-state left-to-right with self-loop and forward transitions
only. Mixture fitting is plain EM with perturbation splitting; nothing
here knows about alignment, which lives in the aligner module.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import ModelError
from .features import FeatureConfig
from .phones import PhoneMapping

VAR_FLOOR = 1e-6
WEIGHT_FLOOR = 1e-8
MODEL_FILE_VERSION = "sitobi-models-1"
N_STATES = 3
# Mixture count by available training frames per state: grow toward 5
# components as data allows.
MIXTURE_SCHEDULE = ((600, 5), (300, 4), (100, 3), (20, 2))
EM_ITERATIONS = 10
SPLIT_PERTURBATION = 0.2

LANGUAGE_DEPENDENT = "language-dependent"
LANGUAGE_INDEPENDENT = "language-independent"


def mixtures_for_frames(n_frames: int) -> int:
    for threshold, m in MIXTURE_SCHEDULE:
        if n_frames >= threshold:
            return m
    return 1


@dataclass
class DiagonalGmm:
    """A weighted mixture of axis-aligned Gaussians."""

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.means = np.asarray(self.means, dtype=np.float64)
        self.variances = np.asarray(self.variances, dtype=np.float64)

    @property
    def n_components(self) -> int:
        return self.weights.size

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def validate(self) -> None:
        if self.means.shape != self.variances.shape:
            raise ModelError("mean/variance shape mismatch")
        if self.weights.shape != (self.means.shape[0],):
            raise ModelError("weight count does not match component count")
        if abs(self.weights.sum() - 1.0) > 1e-9:
            raise ModelError("mixture weights must sum to 1, got %r" % self.weights.sum())
        if np.any(self.weights < 0):
            raise ModelError("mixture weights must be nonnegative")
        if np.any(self.variances < VAR_FLOOR * (1 - 1e-12)):
            raise ModelError("variance below floor %g" % VAR_FLOOR)

    def component_log_likelihood(self, x: np.ndarray) -> np.ndarray:
        """Per-component log density, shape (n_frames, n_components)."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        diff = x[:, None, :] - self.means[None, :, :]
        quad = np.sum(diff * diff / self.variances[None, :, :], axis=2)
        logdet = np.sum(np.log(self.variances), axis=1)
        return -0.5 * (self.dim * np.log(2.0 * np.pi) + logdet[None, :] + quad)

    def log_likelihood(self, x: np.ndarray) -> np.ndarray:
        """Mixture log density per frame."""
        comp = self.component_log_likelihood(x)
        with np.errstate(divide="ignore"):
            logw = np.log(self.weights)
        return logsumexp(comp + logw[None, :], axis=1)

    def total_log_likelihood(self, x: np.ndarray) -> float:
        return float(np.sum(self.log_likelihood(x)))

    def copy(self) -> "DiagonalGmm":
        return DiagonalGmm(self.weights.copy(), self.means.copy(), self.variances.copy())


def fit_single_gaussian(x: np.ndarray, var_floor: float = VAR_FLOOR) -> DiagonalGmm:
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    mean = x.mean(axis=0)
    var = np.maximum(x.var(axis=0), var_floor)
    return DiagonalGmm(np.ones(1), mean[None, :], var[None, :])


def run_em(
    x: np.ndarray,
    gmm: DiagonalGmm,
    n_iter: int = EM_ITERATIONS,
    var_floor: float = VAR_FLOOR,
) -> DiagonalGmm:
    """A few EM passes starting from the given mixture.

    Components that collapse keep their previous parameters with a
    floored weight so the mixture stays valid.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    gmm = gmm.copy()
    for _ in range(n_iter):
        with np.errstate(divide="ignore"):
            logw = np.log(np.maximum(gmm.weights, WEIGHT_FLOOR))
        joint = gmm.component_log_likelihood(x) + logw[None, :]
        norm = logsumexp(joint, axis=1, keepdims=True)
        resp = np.exp(joint - norm)
        nk = resp.sum(axis=0)
        weights = np.maximum(nk / x.shape[0], WEIGHT_FLOOR)
        weights = weights / weights.sum()
        alive = nk > 1e-8
        means = gmm.means.copy()
        variances = gmm.variances.copy()
        means[alive] = (resp.T[alive] @ x) / nk[alive, None]
        ex2 = (resp.T[alive] @ (x * x)) / nk[alive, None]
        variances[alive] = np.maximum(ex2 - means[alive] ** 2, var_floor)
        gmm = DiagonalGmm(weights, means, variances)
    return gmm


def split_heaviest(gmm: DiagonalGmm, perturbation: float = SPLIT_PERTURBATION) -> DiagonalGmm:
    """Split the heaviest component into a +- perturbation pair.

    Components whose variance sits entirely at the floor carry no spread
    worth splitting; the mixture is returned unchanged in that case.
    """
    j = int(np.argmax(gmm.weights))
    if np.all(gmm.variances[j] <= VAR_FLOOR * (1 + 1e-9)):
        return gmm
    offset = perturbation * np.sqrt(gmm.variances[j])
    weights = np.concatenate([gmm.weights, [gmm.weights[j] / 2.0]])
    weights[j] /= 2.0
    means = np.vstack([gmm.means, gmm.means[j] + offset])
    means[j] = means[j] - offset
    variances = np.vstack([gmm.variances, gmm.variances[j]])
    return DiagonalGmm(weights, means, variances)


def fit_gmm(
    x: np.ndarray,
    target_components: int,
    init: DiagonalGmm | None = None,
    n_iter: int = EM_ITERATIONS,
    var_floor: float = VAR_FLOOR,
) -> DiagonalGmm:
    """Fit a mixture by EM, growing toward the target component count.

    A warm start (init) is refined first, which never lowers the data
    log-likelihood; each split is kept only if EM on the grown mixture
    did not lower it either. Growth may therefore stop short of the
    target on degenerate data.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[0] == 0:
        raise ModelError("cannot fit a mixture to zero frames")
    if init is None:
        best = fit_single_gaussian(x, var_floor)
        if best.n_components < target_components:
            best = run_em(x, best, n_iter, var_floor)
    else:
        best = run_em(x, init, n_iter, var_floor)
    best_ll = best.total_log_likelihood(x)
    while best.n_components < target_components:
        grown = split_heaviest(best)
        if grown.n_components == best.n_components:
            break
        cand = run_em(x, grown, n_iter, var_floor)
        cand_ll = cand.total_log_likelihood(x)
        if cand_ll < best_ll:
            break
        best, best_ll = cand, cand_ll
    return best


@dataclass
class MonophoneModel:
    """A left-to-right phone model of emitting GMM states.

    loop[i] is the self-loop probability of state i; the forward
    probability is its complement, so each state's outgoing mass sums
    to 1 by construction.
    """

    label: str
    states: list[DiagonalGmm]
    loop: np.ndarray

    def __post_init__(self):
        self.loop = np.asarray(self.loop, dtype=np.float64)

    @property
    def n_states(self) -> int:
        return len(self.states)

    def validate(self, dim: int | None = None) -> None:
        if self.n_states < 1:
            raise ModelError("%s: a model needs at least one state" % self.label)
        if self.loop.shape != (self.n_states,):
            raise ModelError("%s: loop probability count mismatch" % self.label)
        if np.any(self.loop < 0) or np.any(self.loop >= 1):
            raise ModelError("%s: self-loop probabilities must be in [0, 1)" % self.label)
        for s in self.states:
            s.validate()
            if dim is not None and s.dim != dim:
                raise ModelError(
                    "%s: state dimension %d does not match features (%d)"
                    % (self.label, s.dim, dim)
                )

    def copy(self) -> "MonophoneModel":
        return MonophoneModel(self.label, [s.copy() for s in self.states], self.loop.copy())


@dataclass
class ModelSet:
    """All monophone models plus the feature configuration they expect."""

    models: dict[str, MonophoneModel]
    features: FeatureConfig = field(default_factory=FeatureConfig)
    mode: str = LANGUAGE_DEPENDENT
    mapping: PhoneMapping | None = None

    def validate(self) -> None:
        if self.mode not in (LANGUAGE_DEPENDENT, LANGUAGE_INDEPENDENT):
            raise ModelError("unknown model-set mode %r" % self.mode)
        if self.mode == LANGUAGE_INDEPENDENT and self.mapping is None:
            raise ModelError("language-independent model sets need a phone mapping")
        for label, model in self.models.items():
            if label != model.label:
                raise ModelError("model keyed %r carries label %r" % (label, model.label))
            model.validate(self.features.dim)

    def resolve_key(self, label: str, language: str | None = None) -> str:
        """Model key for a phone label, through the mapping when one applies."""
        if self.mapping is not None and language is not None and label not in self.models:
            return self.mapping.lookup(language, label)
        return label

    def model_for(self, label: str, language: str | None = None) -> MonophoneModel:
        key = self.resolve_key(label, language)
        try:
            return self.models[key]
        except KeyError:
            raise ModelError("no model for phone %r" % label) from None


def _gmm_to_dict(g: DiagonalGmm) -> dict:
    return {
        "weights": g.weights.tolist(),
        "means": g.means.tolist(),
        "variances": g.variances.tolist(),
    }


def _gmm_from_dict(d: dict) -> DiagonalGmm:
    return DiagonalGmm(
        np.asarray(d["weights"], dtype=np.float64),
        np.asarray(d["means"], dtype=np.float64),
        np.asarray(d["variances"], dtype=np.float64),
    )


def save_model_set(model_set: ModelSet, path: str | os.PathLike) -> None:
    """Serialize a model set to JSON."""
    model_set.validate()
    payload = {
        "version": MODEL_FILE_VERSION,
        "features": model_set.features.to_dict(),
        "mode": model_set.mode,
        "mapping": None if model_set.mapping is None else model_set.mapping.to_dict(),
        "phones": {
            label: {
                "states": [_gmm_to_dict(s) for s in model.states],
                "loop": model.loop.tolist(),
            }
            for label, model in sorted(model_set.models.items())
        },
    }
    with open(os.fspath(path), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_model_set(path: str | os.PathLike) -> ModelSet:
    """Load and validate a JSON model set."""
    path = os.fspath(path)
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as e:
        raise ModelError("%s: unreadable (%s)" % (path, e)) from None
    except json.JSONDecodeError as e:
        raise ModelError("%s: not valid JSON (%s)" % (path, e)) from None
    version = payload.get("version")
    if version != MODEL_FILE_VERSION:
        raise ModelError(
            "%s: unsupported model file version %r (expected %r)"
            % (path, version, MODEL_FILE_VERSION)
        )
    try:
        models = {
            label: MonophoneModel(
                label,
                [_gmm_from_dict(s) for s in entry["states"]],
                np.asarray(entry["loop"], dtype=np.float64),
            )
            for label, entry in payload["phones"].items()
        }
        model_set = ModelSet(
            models,
            FeatureConfig.from_dict(payload["features"]),
            payload["mode"],
            None if payload.get("mapping") is None else PhoneMapping.from_dict(payload["mapping"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ModelError("%s: malformed model entry (%s)" % (path, e)) from None
    model_set.validate()
    return model_set
