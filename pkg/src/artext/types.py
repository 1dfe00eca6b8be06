"""Domain types for the simplification pipeline.

Everything here is an immutable value object with a canonical JSON
encoding. The encoding is the wire format of the HTTP service and the
on-disk format of the manual store, so field names are part of the
contract: snake_case, exactly as they appear in ``to_dict``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Iterable, Mapping

__all__ = [
    "SimplificationTechnique",
    "DesignGuideline",
    "ErrorClass",
    "ERROR_CLASSES",
    "error_registry_hash",
    "StepStatus",
    "SpatialRelation",
    "DetectedObject",
    "SpatialContext",
    "ManualStep",
    "ManualDocument",
    "Violation",
    "InvalidManual",
    "validate_manual",
    "PlanAction",
    "SimplificationPlan",
    "ErrorProbabilities",
    "CandidateSimplification",
    "CandidateSet",
    "utc_now",
    "encode_datetime",
    "decode_datetime",
]


class SimplificationTechnique(Enum):
    """The four rewrite techniques a plan may apply."""

    CONTENT_REDUCTION = "content_reduction"
    SYNTACTIC_SIMPLIFICATION = "syntactic_simplification"
    LEXICAL_SIMPLIFICATION = "lexical_simplification"
    ELABORATIVE_SIMPLIFICATION = "elaborative_simplification"


class DesignGuideline(Enum):
    """Design guidelines the prompt preamble commits the model to."""

    MEANING_PRESERVATION = "meaning_preservation"
    AR_CONSTRAINTS = "ar_constraints"
    LENGTH_OVER_GRAMMAR = "length_over_grammar"


class ErrorClass(Enum):
    """Ways a candidate simplification can go wrong."""

    MEANING_ALTERED = "meaning_altered"
    SYNTACTICALLY_COMPLEX = "syntactically_complex"
    TOO_LONG = "too_long"


# Ordered registry. Index positions are load-bearing: error probability
# vectors and calibration feature vectors follow this order, and trained
# models persist a hash of it so a reordered registry cannot silently
# reinterpret old weights.
ERROR_CLASSES: tuple[ErrorClass, ...] = (
    ErrorClass.MEANING_ALTERED,
    ErrorClass.SYNTACTICALLY_COMPLEX,
    ErrorClass.TOO_LONG,
)


def error_registry_hash(registry: tuple[ErrorClass, ...] = ERROR_CLASSES) -> str:
    """Stable fingerprint of the ordered error-class registry."""
    joined = ",".join(c.value for c in registry)
    return hashlib.sha256(joined.encode("utf-8")).hexdigest()


class StepStatus(Enum):
    DRAFT = "draft"
    SIMPLIFIED = "simplified"
    REVIEWED = "reviewed"
    PUBLISHED = "published"


class SpatialRelation(Enum):
    """Egocentric direction of an object relative to the wearer."""

    ON_YOUR_LEFT = "on_your_left"
    ON_YOUR_RIGHT = "on_your_right"
    IN_FRONT_OF_YOU = "in_front_of_you"


def utc_now() -> datetime:
    """Current UTC time truncated to whole seconds."""
    return datetime.now(timezone.utc).replace(microsecond=0)


def encode_datetime(dt: datetime) -> str:
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


def decode_datetime(raw: str) -> datetime:
    try:
        return datetime.strptime(raw, "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=timezone.utc)
    except ValueError as exc:
        raise ValueError(f"bad timestamp {raw!r}: {exc}") from None


def _normalize_ts(dt: datetime, name: str) -> datetime:
    if dt.tzinfo is None:
        raise ValueError(f"{name} must be timezone-aware UTC")
    return dt.astimezone(timezone.utc).replace(microsecond=0)


@dataclass(frozen=True)
class DetectedObject:
    """One object reported by the detector.

    Azimuth follows the wearer's frame: 0 is straight ahead, positive is
    to the right, in degrees within [-180, 180]. Distances and lengths
    are meters.
    """

    label: str
    azimuth_deg: float
    distance_m: float
    confidence: float
    characteristic_length_m: float | None = None

    def __post_init__(self) -> None:
        if not self.label.strip():
            raise ValueError("detected object needs a nonempty label")
        if not -180.0 <= self.azimuth_deg <= 180.0:
            raise ValueError(f"azimuth_deg {self.azimuth_deg} outside [-180, 180]")
        if self.distance_m <= 0:
            raise ValueError("distance_m must be positive")
        if self.characteristic_length_m is not None and self.characteristic_length_m <= 0:
            raise ValueError("characteristic_length_m must be positive when given")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must lie in [0, 1]")

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "azimuth_deg": self.azimuth_deg,
            "distance_m": self.distance_m,
            "confidence": self.confidence,
            "characteristic_length_m": self.characteristic_length_m,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "DetectedObject":
        try:
            return cls(
                label=data["label"],
                azimuth_deg=float(data["azimuth_deg"]),
                distance_m=float(data["distance_m"]),
                confidence=float(data["confidence"]),
                characteristic_length_m=(
                    None
                    if data.get("characteristic_length_m") is None
                    else float(data["characteristic_length_m"])
                ),
            )
        except KeyError as exc:
            raise ValueError(f"detection missing field {exc.args[0]!r}") from None


@dataclass(frozen=True)
class SpatialContext:
    """A snapshot of detected objects around the wearer.

    ``frozen`` marks a snapshot that has been pinned to a step; pinned
    snapshots are never mutated by later detections (they are immutable
    values anyway, the flag records intent on the wire).
    """

    objects: tuple[DetectedObject, ...]
    captured_at: datetime
    frozen: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "captured_at", _normalize_ts(self.captured_at, "captured_at"))

    def freeze(self) -> "SpatialContext":
        return replace(self, frozen=True)

    def to_dict(self) -> dict[str, Any]:
        return {
            "objects": [o.to_dict() for o in self.objects],
            "captured_at": encode_datetime(self.captured_at),
            "frozen": self.frozen,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SpatialContext":
        return cls(
            objects=tuple(DetectedObject.from_dict(o) for o in data["objects"]),
            captured_at=decode_datetime(data["captured_at"]),
            frozen=bool(data.get("frozen", False)),
        )


class InvalidManual(ValueError):
    """Raised when manual invariants are broken at construction."""

    def __init__(self, violations: list["Violation"]):
        self.violations = violations
        super().__init__("; ".join(f"{v.field}: {v.rule}" for v in violations))


@dataclass(frozen=True)
class Violation:
    """One broken invariant, as data rather than as an exception."""

    field: str
    rule: str
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {"field": self.field, "rule": self.rule, "detail": self.detail}


@dataclass(frozen=True)
class ManualStep:
    """A single instruction step of a manual."""

    step_id: int
    original_text: str
    simplified_text: str | None = None
    status: StepStatus = StepStatus.DRAFT
    spatial_snapshot: SpatialContext | None = None

    def __post_init__(self) -> None:
        violations = step_violations(self)
        if violations:
            raise InvalidManual(violations)

    def to_dict(self) -> dict[str, Any]:
        return {
            "step_id": self.step_id,
            "original_text": self.original_text,
            "simplified_text": self.simplified_text,
            "status": self.status.value,
            "spatial_snapshot": (
                None if self.spatial_snapshot is None else self.spatial_snapshot.to_dict()
            ),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ManualStep":
        try:
            status = StepStatus(data.get("status", "draft"))
        except ValueError:
            raise ValueError(f"unknown step status {data.get('status')!r}") from None
        return cls(
            step_id=int(data["step_id"]),
            original_text=data["original_text"],
            simplified_text=data.get("simplified_text"),
            status=status,
            spatial_snapshot=(
                None
                if data.get("spatial_snapshot") is None
                else SpatialContext.from_dict(data["spatial_snapshot"])
            ),
        )


def step_violations(step: "ManualStep | Mapping[str, Any]") -> list[Violation]:
    """Invariant check for one step; works on a step or a raw mapping."""
    if isinstance(step, Mapping):
        step_id = step.get("step_id")
        original = step.get("original_text")
        simplified = step.get("simplified_text")
        status = step.get("status", "draft")
    else:
        step_id = step.step_id
        original = step.original_text
        simplified = step.simplified_text
        status = step.status.value

    out: list[Violation] = []
    if not isinstance(step_id, int) or step_id < 1:
        out.append(Violation("step_id", "must be an ordinal >= 1", detail=repr(step_id)))
    if not isinstance(original, str) or not original.strip():
        out.append(Violation("original_text", "must be nonempty"))
    if status in (StepStatus.REVIEWED.value, StepStatus.PUBLISHED.value):
        if not isinstance(simplified, str) or not simplified.strip():
            out.append(
                Violation(
                    "simplified_text",
                    "required once status is reviewed or published",
                    detail=f"status={status}",
                )
            )
    return out


@dataclass(frozen=True)
class ManualDocument:
    """A versioned instruction manual.

    Invariants: at least one step, step_ids contiguous from 1, version
    >= 1, timestamps timezone-aware UTC at second resolution. Violations
    raise :class:`InvalidManual` at construction; ``validate_manual``
    performs the same checks on raw data without raising.
    """

    manual_id: str
    title: str
    steps: tuple[ManualStep, ...]
    version: int
    created_at: datetime
    updated_at: datetime
    tags: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))
        object.__setattr__(self, "tags", frozenset(self.tags))
        object.__setattr__(self, "created_at", _normalize_ts(self.created_at, "created_at"))
        object.__setattr__(self, "updated_at", _normalize_ts(self.updated_at, "updated_at"))
        violations = _document_violations(
            manual_id=self.manual_id,
            title=self.title,
            steps=self.steps,
            version=self.version,
        )
        if violations:
            raise InvalidManual(violations)

    def step(self, step_id: int) -> ManualStep:
        for s in self.steps:
            if s.step_id == step_id:
                return s
        raise KeyError(f"manual {self.manual_id} has no step {step_id}")

    def glossary(self) -> frozenset[str]:
        """Protected task terms, stored as tags with a ``term:`` prefix."""
        return frozenset(t[len("term:"):].lower() for t in self.tags if t.startswith("term:"))

    def to_dict(self) -> dict[str, Any]:
        return {
            "manual_id": self.manual_id,
            "title": self.title,
            "steps": [s.to_dict() for s in self.steps],
            "tags": sorted(self.tags),
            "version": self.version,
            "created_at": encode_datetime(self.created_at),
            "updated_at": encode_datetime(self.updated_at),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ManualDocument":
        return cls(
            manual_id=data["manual_id"],
            title=data["title"],
            steps=tuple(ManualStep.from_dict(s) for s in data["steps"]),
            tags=frozenset(data.get("tags", ())),
            version=int(data["version"]),
            created_at=decode_datetime(data["created_at"]),
            updated_at=decode_datetime(data["updated_at"]),
        )


def _document_violations(
    manual_id: Any, title: Any, steps: Iterable[Any], version: Any
) -> list[Violation]:
    out: list[Violation] = []
    if not isinstance(manual_id, str) or not manual_id:
        out.append(Violation("manual_id", "must be a nonempty string"))
    if not isinstance(title, str) or not title.strip():
        out.append(Violation("title", "must be nonempty"))
    steps = list(steps)
    if not steps:
        out.append(Violation("steps", "manual needs at least one step"))
    ids = []
    for s in steps:
        if isinstance(s, Mapping):
            out.extend(step_violations(s))
            ids.append(s.get("step_id"))
        else:
            ids.append(s.step_id)
    expected = list(range(1, len(steps) + 1))
    if steps and ids != expected:
        out.append(
            Violation(
                "steps",
                "step_ids must run contiguously from 1",
                detail=f"got {ids}, expected {expected}",
            )
        )
    if not isinstance(version, int) or version < 1:
        out.append(Violation("version", "must be an integer >= 1", detail=repr(version)))
    return out


def validate_manual(doc: "ManualDocument | Mapping[str, Any]") -> list[Violation]:
    """Check manual invariants and return the violations found.

    Accepts either a constructed document (always clean, the constructor
    enforces the same rules) or a raw mapping that has not been through
    the constructor. Returns an empty list exactly when construction
    would succeed.
    """
    if isinstance(doc, ManualDocument):
        return _document_violations(doc.manual_id, doc.title, doc.steps, doc.version)
    out = _document_violations(
        manual_id=doc.get("manual_id"),
        title=doc.get("title"),
        steps=doc.get("steps", ()),
        version=doc.get("version"),
    )
    for name in ("created_at", "updated_at"):
        raw = doc.get(name)
        if not isinstance(raw, str):
            out.append(Violation(name, "must be a UTC timestamp string"))
        else:
            try:
                decode_datetime(raw)
            except ValueError:
                out.append(Violation(name, "must look like 2024-01-01T00:00:00Z", detail=raw))
    return out


# Display names used in prompts and plan text, e.g. "1. content reduction: ...".
_TECHNIQUE_NAMES: dict[SimplificationTechnique, str] = {
    SimplificationTechnique.CONTENT_REDUCTION: "content reduction",
    SimplificationTechnique.SYNTACTIC_SIMPLIFICATION: "syntactic simplification",
    SimplificationTechnique.LEXICAL_SIMPLIFICATION: "lexical simplification",
    SimplificationTechnique.ELABORATIVE_SIMPLIFICATION: "elaborative simplification",
}
_TECHNIQUES_BY_NAME: dict[str, SimplificationTechnique] = {
    **{name: tech for tech, name in _TECHNIQUE_NAMES.items()},
    **{tech.value: tech for tech in SimplificationTechnique},
}


def _collapse_ws(text: str) -> str:
    return " ".join(text.split())


@dataclass(frozen=True)
class PlanAction:
    """One planned rewrite: a technique plus a free-text description.

    Descriptions are whitespace-normalized at construction so every
    constructible action survives the line-oriented plan text format.
    """

    technique: SimplificationTechnique
    description: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "description", _collapse_ws(self.description))

    @property
    def technique_name(self) -> str:
        return _TECHNIQUE_NAMES[self.technique]

    @staticmethod
    def technique_from_name(name: str) -> SimplificationTechnique:
        key = _collapse_ws(name).lower()
        if key not in _TECHNIQUES_BY_NAME:
            raise ValueError(f"unknown technique {name!r}")
        return _TECHNIQUES_BY_NAME[key]

    def to_dict(self) -> dict[str, Any]:
        return {"technique": self.technique.value, "description": self.description}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PlanAction":
        return cls(
            technique=cls.technique_from_name(data["technique"]),
            description=data["description"],
        )


@dataclass(frozen=True)
class SimplificationPlan:
    """Chain-of-thought plus the ordered actions to execute.

    An empty action list is a valid plan meaning "no changes needed".
    """

    thoughts: str
    actions: tuple[PlanAction, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "thoughts", _collapse_ws(self.thoughts))
        object.__setattr__(self, "actions", tuple(self.actions))

    def to_dict(self) -> dict[str, Any]:
        return {"thoughts": self.thoughts, "actions": [a.to_dict() for a in self.actions]}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SimplificationPlan":
        return cls(
            thoughts=data["thoughts"],
            actions=tuple(PlanAction.from_dict(a) for a in data.get("actions", ())),
        )


@dataclass(frozen=True)
class ErrorProbabilities:
    """Per-class error probabilities, ordered like ``ERROR_CLASSES``."""

    probs: tuple[float, ...]
    classifier_id: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if len(self.probs) != len(ERROR_CLASSES):
            raise ValueError(
                f"expected {len(ERROR_CLASSES)} error probabilities, got {len(self.probs)}"
            )
        for p in self.probs:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"error probability {p} outside [0, 1]")
        if not self.classifier_id:
            raise ValueError("classifier_id must be nonempty")

    def prob_of(self, cls_: ErrorClass) -> float:
        return self.probs[ERROR_CLASSES.index(cls_)]

    def to_dict(self) -> dict[str, Any]:
        return {"probs": list(self.probs), "classifier_id": self.classifier_id}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ErrorProbabilities":
        return cls(probs=tuple(data["probs"]), classifier_id=data["classifier_id"])


@dataclass(frozen=True)
class CandidateSimplification:
    """One sampled rewrite with its generation probability.

    ``raw_probability`` is exp(mean token log-probability) as reported
    by the backend, in (0, 1]; ``calibrated_probability`` is filled in
    by calibration and sums to 1 across the candidate set.
    """

    text: str
    raw_probability: float
    candidate_index: int
    error_probs: ErrorProbabilities | None = None
    calibrated_probability: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.raw_probability <= 1.0:
            raise ValueError(f"raw_probability {self.raw_probability} outside (0, 1]")
        if self.candidate_index < 0:
            raise ValueError("candidate_index must be >= 0")
        if self.calibrated_probability is not None and not (
            0.0 <= self.calibrated_probability <= 1.0
        ):
            raise ValueError("calibrated_probability outside [0, 1]")

    def to_dict(self) -> dict[str, Any]:
        return {
            "text": self.text,
            "raw_probability": self.raw_probability,
            "candidate_index": self.candidate_index,
            "error_probs": None if self.error_probs is None else self.error_probs.to_dict(),
            "calibrated_probability": self.calibrated_probability,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CandidateSimplification":
        return cls(
            text=data["text"],
            raw_probability=float(data["raw_probability"]),
            candidate_index=int(data["candidate_index"]),
            error_probs=(
                None
                if data.get("error_probs") is None
                else ErrorProbabilities.from_dict(data["error_probs"])
            ),
            calibrated_probability=(
                None
                if data.get("calibrated_probability") is None
                else float(data["calibrated_probability"])
            ),
        )


@dataclass(frozen=True)
class CandidateSet:
    """The n candidates sampled for one original text."""

    original_text: str
    candidates: tuple[CandidateSimplification, ...]
    n: int = 5

    def __post_init__(self) -> None:
        object.__setattr__(self, "candidates", tuple(self.candidates))
        if not self.original_text:
            raise ValueError("original_text must be nonempty")
        if len(self.candidates) != self.n:
            raise ValueError(f"expected {self.n} candidates, got {len(self.candidates)}")
        indices = [c.candidate_index for c in self.candidates]
        if indices != list(range(self.n)):
            raise ValueError(f"candidate indices must be 0..{self.n - 1} in order, got {indices}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "original_text": self.original_text,
            "candidates": [c.to_dict() for c in self.candidates],
            "n": self.n,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CandidateSet":
        return cls(
            original_text=data["original_text"],
            candidates=tuple(CandidateSimplification.from_dict(c) for c in data["candidates"]),
            n=int(data.get("n", len(data["candidates"]))),
        )


def dumps(obj: Any) -> str:
    """Serialize a domain object (or plain data) to canonical JSON text."""
    payload = obj.to_dict() if hasattr(obj, "to_dict") else obj
    return json.dumps(payload, ensure_ascii=False, separators=(", ", ": "))
