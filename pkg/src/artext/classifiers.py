"""Error classifiers: estimate how likely a candidate rewrite is broken.

The rule-based classifier is deterministic and dependency-free; it is
the default. A remote classifier speaking a small JSON protocol can
stand in when a learned model is available.
"""

from __future__ import annotations

import re
from typing import Mapping, Protocol

import httpx

from .types import ERROR_CLASSES, ErrorClass, ErrorProbabilities

__all__ = [
    "ClassifierUnavailable",
    "ErrorClassifier",
    "RuleBasedClassifier",
    "RemoteClassifier",
    "classify_rules",
    "meaning_altered_score",
    "syntactic_complexity_score",
    "too_long_score",
    "content_words",
]

RULE_CLASSIFIER_ID = "rule-v1"

# Function words dropped before computing content-word recall. Spatial
# prepositions (on, in, under, ...) are deliberately kept: in task
# guidance they carry meaning ("on the mug" is not "under the mug").
STOPWORDS = frozenset(
    """
    a an the and or but nor so yet to too of it its this that these those
    then than as is are was were be been being am do does did done
    will would can could may might must should shall
    i me my we our you your yours they them their he she his her
    please also just very not
    """.split()
)

# Clause-boundary markers: coordinating conjunctions, subordinators and
# relativizers. Each whole-word occurrence counts one clause boundary.
CLAUSE_MARKERS = frozenset(
    """
    and or but nor so yet
    because although though while when whenever after before
    if unless until since whereas once
    which who whom whose that where
    """.split()
)

_WORD_RE = re.compile(r"[a-z0-9']+")


class ClassifierUnavailable(RuntimeError):
    """The remote classifier cannot be reached or replied with garbage."""


def _tokens(text: str) -> list[str]:
    return _WORD_RE.findall(text.lower())


def content_words(text: str) -> set[str]:
    return {t for t in _tokens(text) if t not in STOPWORDS}


def meaning_altered_score(original: str, candidate: str) -> float:
    """1 minus content-word recall of the original in the candidate."""
    needed = content_words(original)
    if not needed:
        return 0.0
    have = set(_tokens(candidate))
    recall = len(needed & have) / len(needed)
    return min(1.0, max(0.0, 1.0 - recall))


def syntactic_complexity_score(candidate: str) -> float:
    """Clause-boundary count scaled so four or more markers saturate at 1."""
    count = sum(1 for t in _tokens(candidate) if t in CLAUSE_MARKERS)
    return min(1.0, count / 4.0)


def too_long_score(original: str, candidate: str) -> float:
    return 1.0 if len(candidate) > len(original) else 0.0


def classify_rules(
    original: str,
    candidate: str,
    registry: tuple[ErrorClass, ...] = ERROR_CLASSES,
) -> ErrorProbabilities:
    """Score one candidate against the original, ordered by ``registry``."""
    if not original.strip():
        raise ValueError("original text must be nonempty")
    scores: Mapping[ErrorClass, float] = {
        ErrorClass.MEANING_ALTERED: meaning_altered_score(original, candidate),
        ErrorClass.SYNTACTICALLY_COMPLEX: syntactic_complexity_score(candidate),
        ErrorClass.TOO_LONG: too_long_score(original, candidate),
    }
    return ErrorProbabilities(
        probs=tuple(scores[c] for c in registry),
        classifier_id=RULE_CLASSIFIER_ID,
    )


class ErrorClassifier(Protocol):
    def classify(self, original: str, candidate: str) -> ErrorProbabilities: ...


class RuleBasedClassifier:
    classifier_id = RULE_CLASSIFIER_ID

    def classify(self, original: str, candidate: str) -> ErrorProbabilities:
        return classify_rules(original, candidate)


class RemoteClassifier:
    """Client for an external classifier service.

    Protocol: POST ``{"original": ..., "candidate": ...}`` to the
    endpoint, expect ``{"probs": [...], "classifier_id": ...}`` back
    with one probability per registered error class.
    """

    def __init__(self, endpoint: str, timeout_s: float = 30.0, client: httpx.Client | None = None):
        self.endpoint = endpoint
        self._client = client or httpx.Client(timeout=timeout_s)

    def classify(self, original: str, candidate: str) -> ErrorProbabilities:
        if not original.strip():
            raise ValueError("original text must be nonempty")
        try:
            resp = self._client.post(
                self.endpoint, json={"original": original, "candidate": candidate}
            )
            resp.raise_for_status()
            data = resp.json()
        except httpx.HTTPError as exc:
            raise ClassifierUnavailable(f"classifier at {self.endpoint}: {exc}") from exc
        try:
            return ErrorProbabilities(
                probs=tuple(float(p) for p in data["probs"]),
                classifier_id=str(data["classifier_id"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ClassifierUnavailable(f"malformed classifier reply: {exc}") from exc
