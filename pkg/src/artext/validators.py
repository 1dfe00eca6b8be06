"""Hard checks a candidate must pass before it can be displayed.

Rules are deliberately cheap and transparent; they gate the calibrated
selection rather than rank it. A failed rule never deletes a candidate,
it only makes it ineligible, and the pipeline falls back to the
original text when nothing passes. Length rules run on the text as
selected, before spatial elaboration adds its phrases; elaboration is
exempt from the length budget by design.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass
from typing import Any, Iterable

from .classifiers import ErrorClassifier, RuleBasedClassifier
from .types import ErrorClass

__all__ = [
    "DisplayProfile",
    "CheckResult",
    "ValidationReport",
    "RULE_IDS",
    "line_count",
    "check_line_count",
    "check_task_terms",
    "check_length_reduction",
    "check_meaning_proxy",
    "validate",
]

MEANING_THRESHOLD = 0.5

RULE_IDS = ("line_count", "task_terms", "length_reduction", "meaning_proxy")


@dataclass(frozen=True)
class DisplayProfile:
    """Geometry of the AR text panel."""

    chars_per_line: int = 40
    max_lines: int | None = None

    def __post_init__(self) -> None:
        if self.chars_per_line < 1:
            raise ValueError("chars_per_line must be >= 1")
        if self.max_lines is not None and self.max_lines < 1:
            raise ValueError("max_lines must be >= 1 when set")

    def to_dict(self) -> dict[str, Any]:
        return {"chars_per_line": self.chars_per_line, "max_lines": self.max_lines}

    @classmethod
    def from_dict(cls, data) -> "DisplayProfile":
        return cls(
            chars_per_line=int(data.get("chars_per_line", 40)),
            max_lines=None if data.get("max_lines") is None else int(data["max_lines"]),
        )


@dataclass(frozen=True)
class CheckResult:
    rule: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {"rule": self.rule, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of every registered rule for one (original, candidate) pair."""

    pair_id: str
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, rule: str) -> CheckResult:
        for c in self.checks:
            if c.rule == rule:
                return c
        raise KeyError(rule)

    def to_dict(self) -> dict[str, Any]:
        return {
            "pair_id": self.pair_id,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }


def pair_id(original: str, candidate: str) -> str:
    digest = hashlib.sha256(f"{original}\x1f{candidate}".encode("utf-8")).hexdigest()
    return digest[:16]


def line_count(text: str, profile: DisplayProfile) -> int:
    """Lines the panel needs for this text: ceil(len / chars_per_line)."""
    return math.ceil(len(text) / profile.chars_per_line)


def check_line_count(original: str, candidate: str, profile: DisplayProfile) -> CheckResult:
    orig_lines = line_count(original, profile)
    cand_lines = line_count(candidate, profile)
    ok = cand_lines <= orig_lines
    if ok and profile.max_lines is not None:
        ok = cand_lines <= profile.max_lines
    return CheckResult(
        rule="line_count",
        passed=ok,
        detail=f"candidate {cand_lines} lines vs original {orig_lines}"
        + (f", cap {profile.max_lines}" if profile.max_lines is not None else ""),
    )


def _term_pattern(term: str) -> re.Pattern[str]:
    return re.compile(r"\b" + re.escape(term) + r"\b", re.IGNORECASE)


def check_task_terms(original: str, candidate: str, glossary: Iterable[str]) -> CheckResult:
    """Every protected term used by the original must survive the rewrite."""
    missing = []
    for term in sorted({t.strip().lower() for t in glossary} - {""}):
        pattern = _term_pattern(term)
        if pattern.search(original) and not pattern.search(candidate):
            missing.append(term)
    return CheckResult(
        rule="task_terms",
        passed=not missing,
        detail="missing: " + ", ".join(missing) if missing else "",
    )


def check_length_reduction(original: str, candidate: str) -> CheckResult:
    return CheckResult(
        rule="length_reduction",
        passed=len(candidate) <= len(original),
        detail=f"{len(candidate)} chars vs {len(original)}",
    )


def check_meaning_proxy(
    original: str,
    candidate: str,
    classifier: ErrorClassifier | None = None,
    threshold: float = MEANING_THRESHOLD,
) -> CheckResult:
    classifier = classifier or RuleBasedClassifier()
    score = classifier.classify(original, candidate).prob_of(ErrorClass.MEANING_ALTERED)
    return CheckResult(
        rule="meaning_proxy",
        passed=score < threshold,
        detail=f"meaning-altered {score:.3f} vs threshold {threshold}",
    )


def validate(
    original: str,
    candidate: str,
    profile: DisplayProfile | None = None,
    glossary: Iterable[str] = (),
    classifier: ErrorClassifier | None = None,
    meaning_threshold: float = MEANING_THRESHOLD,
) -> ValidationReport:
    """Run every registered rule exactly once, in stable order."""
    profile = profile or DisplayProfile()
    checks = (
        check_line_count(original, candidate, profile),
        check_task_terms(original, candidate, glossary),
        check_length_reduction(original, candidate),
        check_meaning_proxy(original, candidate, classifier, meaning_threshold),
    )
    assert tuple(c.rule for c in checks) == RULE_IDS
    return ValidationReport(pair_id=pair_id(original, candidate), checks=checks)
