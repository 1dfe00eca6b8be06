"""Confidence calibration over sampled candidates.

The generator's own token probability p is a poor ranking signal on its
own. Calibration maps each candidate's feature vector
``f = [p, pe_1, ..., pe_m]`` (p plus the per-class error probabilities)
through a learned diagonal affine layer to a scalar logit
``z = w . f + b`` and softmaxes the logits across the n candidates of a
set. Training fits the same logit as a per-sample logistic regression
against expert verdicts with cross-entropy loss.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .classifiers import ErrorClassifier
from .types import (
    ERROR_CLASSES,
    CandidateSet,
    CandidateSimplification,
    ErrorClass,
    error_registry_hash,
)

__all__ = [
    "GoldSource",
    "GoldSample",
    "GoldDataset",
    "CalibrationModel",
    "TrainConfig",
    "MissingErrorProbs",
    "DimensionMismatch",
    "UncalibratedSet",
    "RegistryMismatch",
    "DegenerateDatasetWarning",
    "feature_vector",
    "softmax",
    "calibrate",
    "select",
    "predict_verdict",
    "batch_loss",
    "batch_grad",
    "fit",
    "train",
    "default_featurizer",
    "save_model",
    "load_model",
]

FEATURE_DIM = 1 + len(ERROR_CLASSES)

_PROB_FLOOR = 1e-12


class MissingErrorProbs(ValueError):
    """A candidate reached calibration without classifier output."""


class DimensionMismatch(ValueError):
    """Feature vector and weight vector disagree on length."""


class UncalibratedSet(ValueError):
    """select() was called before calibrate() filled in q."""


class RegistryMismatch(ValueError):
    """A persisted model was trained under a different error registry."""


class DegenerateDatasetWarning(UserWarning):
    """The gold dataset contains a single verdict class."""


class GoldSource(Enum):
    EXPERT_REVIEW = "expert_review"
    SEEDED = "seeded"


@dataclass(frozen=True)
class GoldSample:
    """One expert-labeled (original, simplified) pair.

    ``verdict`` is 1 for accepted, 0 for rejected; a rejection carries
    the error class it was rejected for. ``raw_probability`` records the
    generator probability of the reviewed candidate when known, so
    training sees the same p the calibrator will see at inference.
    """

    original_text: str
    simplified_text: str
    verdict: int
    source: GoldSource
    error_label: ErrorClass | None = None
    raw_probability: float | None = None

    def __post_init__(self) -> None:
        if self.verdict not in (0, 1):
            raise ValueError(f"verdict must be 0 or 1, got {self.verdict!r}")
        if not self.original_text.strip():
            raise ValueError("original_text must be nonempty")
        if self.verdict == 0 and self.error_label is None:
            raise ValueError("rejected samples need an error_label")
        if self.verdict == 1 and self.error_label is not None:
            raise ValueError("accepted samples must not carry an error_label")
        if self.raw_probability is not None and not 0.0 < self.raw_probability <= 1.0:
            raise ValueError("raw_probability outside (0, 1]")

    def to_dict(self) -> dict[str, Any]:
        return {
            "original_text": self.original_text,
            "simplified_text": self.simplified_text,
            "verdict": self.verdict,
            "error_label": None if self.error_label is None else self.error_label.value,
            "source": self.source.value,
            "raw_probability": self.raw_probability,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "GoldSample":
        label = data.get("error_label")
        return cls(
            original_text=data["original_text"],
            simplified_text=data["simplified_text"],
            verdict=int(data["verdict"]),
            source=GoldSource(data["source"]),
            error_label=None if label is None else ErrorClass(label),
            raw_probability=(
                None if data.get("raw_probability") is None else float(data["raw_probability"])
            ),
        )


@dataclass(frozen=True)
class GoldDataset:
    samples: tuple[GoldSample, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", tuple(self.samples))
        if not self.samples:
            raise ValueError("gold dataset needs at least one sample")

    @property
    def k(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class CalibrationModel:
    """Diagonal affine calibrator, persisted together with the registry
    fingerprint it was trained under."""

    w_diag: tuple[float, ...]
    b: float
    error_registry_hash: str
    trained_on: int
    version: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "w_diag", tuple(float(w) for w in self.w_diag))
        if len(self.w_diag) != FEATURE_DIM:
            raise ValueError(f"w_diag must have length {FEATURE_DIM}, got {len(self.w_diag)}")
        if not self.error_registry_hash:
            raise ValueError("error_registry_hash must be nonempty")
        if self.trained_on < 0:
            raise ValueError("trained_on must be >= 0")
        if self.version < 1:
            raise ValueError("model version must be >= 1")

    def to_dict(self) -> dict[str, Any]:
        return {
            "w_diag": list(self.w_diag),
            "b": self.b,
            "error_registry_hash": self.error_registry_hash,
            "trained_on": self.trained_on,
            "version": self.version,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CalibrationModel":
        return cls(
            w_diag=tuple(data["w_diag"]),
            b=float(data["b"]),
            error_registry_hash=data["error_registry_hash"],
            trained_on=int(data["trained_on"]),
            version=int(data["version"]),
        )


def default_model(version: int = 1) -> CalibrationModel:
    """Untrained prior: trust p, penalize every error class equally."""
    return CalibrationModel(
        w_diag=(1.0, -1.0, -1.0, -1.0),
        b=0.0,
        error_registry_hash=error_registry_hash(),
        trained_on=0,
        version=version,
    )


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for full-batch gradient descent.

    The seed is required even though full-batch descent from a fixed
    init is deterministic; it is recorded so any future stochastic
    variant stays reproducible.
    """

    seed: int
    learning_rate: float = 0.1
    epochs: int = 500

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


def feature_vector(candidate: CandidateSimplification) -> np.ndarray:
    """[p, pe_1, ..., pe_m] for one candidate."""
    if candidate.error_probs is None:
        raise MissingErrorProbs(
            f"candidate {candidate.candidate_index} has no error probabilities"
        )
    return np.array([candidate.raw_probability, *candidate.error_probs.probs], dtype=float)


def softmax(z: np.ndarray) -> np.ndarray:
    """Numerically stable softmax (log-sum-exp shift)."""
    z = np.asarray(z, dtype=float)
    shifted = z - z.max()
    e = np.exp(shifted)
    return e / e.sum()


def calibrate(cset: CandidateSet, model: CalibrationModel) -> CandidateSet:
    """Fill in calibrated probabilities across the candidate set.

    Logits are z_i = w . f_i + b; q is their softmax, so q sums to 1
    over the set.
    """
    w = np.array(model.w_diag, dtype=float)
    feats = []
    for cand in cset.candidates:
        f = feature_vector(cand)
        if f.shape[0] != w.shape[0]:
            raise DimensionMismatch(
                f"feature length {f.shape[0]} vs weight length {w.shape[0]}"
            )
        feats.append(f)
    logits = np.array([f @ w + model.b for f in feats])
    q = softmax(logits)
    updated = tuple(
        replace(cand, calibrated_probability=float(qi))
        for cand, qi in zip(cset.candidates, q)
    )
    return replace(cset, candidates=updated)


def select(cset: CandidateSet) -> CandidateSimplification:
    """Highest calibrated probability; ties go to the lowest index."""
    best: CandidateSimplification | None = None
    for cand in cset.candidates:
        if cand.calibrated_probability is None:
            raise UncalibratedSet(f"candidate {cand.candidate_index} has no q")
        if best is None or cand.calibrated_probability > best.calibrated_probability:
            best = cand
    assert best is not None  # CandidateSet is never empty
    return best


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def batch_loss(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray) -> float:
    """Mean cross-entropy of sigmoid(X w + b) against verdicts y."""
    s = _sigmoid(X @ w + b)
    s = np.clip(s, _PROB_FLOOR, 1.0 - _PROB_FLOOR)
    return float(np.mean(-y * np.log(s) - (1.0 - y) * np.log(1.0 - s)))


def batch_grad(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Analytic gradient of ``batch_loss`` in (w, b)."""
    s = _sigmoid(X @ w + b)
    g = s - y
    return X.T @ g / len(y), float(g.mean())


def predict_verdict(model: CalibrationModel, features: Sequence[float]) -> int:
    z = float(np.asarray(features, dtype=float) @ np.array(model.w_diag) + model.b)
    return 1 if z > 0 else 0


Featurizer = Callable[[GoldSample], np.ndarray]


def default_featurizer(classifier: ErrorClassifier, fallback_p: float = 0.5) -> Featurizer:
    """Build features the way inference does: recorded p (or a neutral
    fallback) plus rule/remote error probabilities for the pair."""

    def featurize(sample: GoldSample) -> np.ndarray:
        p = sample.raw_probability if sample.raw_probability is not None else fallback_p
        probs = classifier.classify(sample.original_text, sample.simplified_text)
        return np.array([p, *probs.probs], dtype=float)

    return featurize


def fit(
    dataset: GoldDataset,
    featurizer: Featurizer,
    config: TrainConfig,
    version: int = 1,
) -> tuple[CalibrationModel, list[float]]:
    """Gradient-descend the calibrator; returns (model, loss history).

    The history has one entry per epoch, evaluated before that epoch's
    update, plus a final entry for the returned parameters.
    """
    X = np.stack([np.asarray(featurizer(s), dtype=float) for s in dataset.samples])
    if X.shape[1] != FEATURE_DIM:
        raise DimensionMismatch(f"featurizer produced length {X.shape[1]}, need {FEATURE_DIM}")
    y = np.array([s.verdict for s in dataset.samples], dtype=float)
    if len(set(int(v) for v in y)) < 2:
        warnings.warn(
            f"gold dataset has a single verdict class ({int(y[0])}); "
            "the calibrator will fit but cannot separate anything",
            DegenerateDatasetWarning,
            stacklevel=2,
        )

    w = np.array([1.0, -1.0, -1.0, -1.0], dtype=float)
    b = 0.0
    losses: list[float] = []
    for _ in range(config.epochs):
        losses.append(batch_loss(w, b, X, y))
        gw, gb = batch_grad(w, b, X, y)
        w = w - config.learning_rate * gw
        b = b - config.learning_rate * gb
    losses.append(batch_loss(w, b, X, y))

    model = CalibrationModel(
        w_diag=tuple(w),
        b=float(b),
        error_registry_hash=error_registry_hash(),
        trained_on=dataset.k,
        version=version,
    )
    return model, losses


def train(
    dataset: GoldDataset,
    featurizer: Featurizer,
    config: TrainConfig,
    version: int = 1,
) -> CalibrationModel:
    model, _ = fit(dataset, featurizer, config, version=version)
    return model


def save_model(model: CalibrationModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), indent=2) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> CalibrationModel:
    """Load a persisted model, refusing one from a different registry."""
    model = CalibrationModel.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
    active = error_registry_hash()
    if model.error_registry_hash != active:
        raise RegistryMismatch(
            f"model at {path} was trained under registry {model.error_registry_hash[:12]}..., "
            f"active registry is {active[:12]}..."
        )
    return model
