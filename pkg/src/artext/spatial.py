"""Spatial elaboration: ground instructions in what the wearer can see.

Two rewrites operate on already-simplified text. ``elaborate_locations``
tags the first mention of a detected object with its egocentric
direction ("coffee mug" becomes "coffee mug on your right"), and
``substitute_measures`` pairs numeric lengths with a familiar object of
similar size ("seven inches left" gains ", or the length of a
screwdriver"). Detections below confidence 0.5 are invisible to every
operation here.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .types import DetectedObject, SpatialContext, SpatialRelation

__all__ = [
    "MIN_CONFIDENCE",
    "relation_of",
    "relation_phrase",
    "Mention",
    "first_mentions",
    "elaborate_locations",
    "Measure",
    "find_measures",
    "substitute_measures",
    "summarize_context",
]

MIN_CONFIDENCE = 0.5

# Wider than this many degrees off-center counts as left/right.
_FRONT_CONE_DEG = 20.0

_PHRASES = {
    SpatialRelation.ON_YOUR_LEFT: "on your left",
    SpatialRelation.ON_YOUR_RIGHT: "on your right",
    SpatialRelation.IN_FRONT_OF_YOU: "in front of you",
}

_METERS_PER_UNIT = {
    "in": 0.0254, "inch": 0.0254, "inches": 0.0254,
    "cm": 0.01, "centimeter": 0.01, "centimeters": 0.01,
    "mm": 0.001, "millimeter": 0.001, "millimeters": 0.001,
    "ft": 0.3048, "foot": 0.3048, "feet": 0.3048,
    "m": 1.0, "meter": 1.0, "meters": 1.0, "metre": 1.0, "metres": 1.0,
}

_NUMBER_WORDS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6,
    "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11, "twelve": 12,
}

_MEASURE_RE = re.compile(
    r"\b(?P<num>\d+(?:\.\d+)?|" + "|".join(_NUMBER_WORDS) + r")"
    r"\s+(?P<unit>" + "|".join(sorted(_METERS_PER_UNIT, key=len, reverse=True)) + r")\b",
    re.IGNORECASE,
)

_CLAUSE_END_RE = re.compile(r"[.,;:!?]")

# How far an object's length may stray from the written measure.
_LENGTH_TOLERANCE = 0.25


def relation_of(azimuth_deg: float) -> SpatialRelation:
    """Map an azimuth to left / right / front.

    The front cone is [-20, +20] inclusive; exactly +-20 degrees still
    counts as in front.
    """
    if azimuth_deg < -_FRONT_CONE_DEG:
        return SpatialRelation.ON_YOUR_LEFT
    if azimuth_deg > _FRONT_CONE_DEG:
        return SpatialRelation.ON_YOUR_RIGHT
    return SpatialRelation.IN_FRONT_OF_YOU


def relation_phrase(relation: SpatialRelation) -> str:
    return _PHRASES[relation]


def _visible(objects: Iterable[DetectedObject]) -> list[DetectedObject]:
    return [o for o in objects if o.confidence >= MIN_CONFIDENCE]


def _label_pattern(label: str) -> re.Pattern[str]:
    return re.compile(r"\b" + re.escape(label.strip()) + r"\b", re.IGNORECASE)


@dataclass(frozen=True)
class Mention:
    obj: DetectedObject
    start: int
    end: int


def first_mentions(text: str, objects: Iterable[DetectedObject]) -> list[Mention]:
    """First whole-word occurrence of each detected label in the text.

    Matching is case-insensitive and word-bounded, so the label "mug"
    does not match inside "mugs". When the same label is detected more
    than once, the first detection wins. Results come back ordered by
    position in the text.
    """
    seen: set[str] = set()
    found: list[Mention] = []
    for obj in _visible(objects):
        key = obj.label.strip().lower()
        if key in seen:
            continue
        seen.add(key)
        match = _label_pattern(obj.label).search(text)
        if match:
            found.append(Mention(obj=obj, start=match.start(), end=match.end()))
    found.sort(key=lambda m: m.start)
    return found


def _already_elaborated(text: str, end: int) -> bool:
    tail = text[end:].lower()
    return any(tail.startswith(" " + phrase) for phrase in _PHRASES.values())


def elaborate_locations(text: str, context: SpatialContext) -> str:
    """Insert a direction phrase after the first mention of each object.

    Idempotent: a mention already followed by a direction phrase is
    left alone, so running this twice changes nothing.
    """
    insertions: list[tuple[int, str]] = []
    for mention in first_mentions(text, context.objects):
        if _already_elaborated(text, mention.end):
            continue
        phrase = relation_phrase(relation_of(mention.obj.azimuth_deg))
        insertions.append((mention.end, " " + phrase))
    for pos, chunk in sorted(insertions, reverse=True):
        text = text[:pos] + chunk + text[pos:]
    return text


@dataclass(frozen=True)
class Measure:
    meters: float
    start: int
    end: int
    raw: str


def find_measures(text: str) -> list[Measure]:
    """Numeric lengths written as "<number> <unit>", converted to meters."""
    out = []
    for m in _MEASURE_RE.finditer(text):
        num_raw = m.group("num").lower()
        value = float(_NUMBER_WORDS[num_raw]) if num_raw in _NUMBER_WORDS else float(num_raw)
        unit = _METERS_PER_UNIT[m.group("unit").lower()]
        out.append(Measure(meters=value * unit, start=m.start(), end=m.end(), raw=m.group(0)))
    return out


def _clause_end(text: str, from_pos: int) -> int:
    match = _CLAUSE_END_RE.search(text, from_pos)
    return match.start() if match else len(text)


def _article(label: str) -> str:
    return "an" if label[:1].lower() in "aeiou" else "a"


def _closest_by_length(objects: Sequence[DetectedObject], meters: float) -> DetectedObject | None:
    best: DetectedObject | None = None
    best_gap = None
    for obj in objects:
        length = obj.characteristic_length_m
        if length is None:
            continue
        ratio = length / meters
        if not (1.0 - _LENGTH_TOLERANCE) <= ratio <= (1.0 + _LENGTH_TOLERANCE):
            continue
        gap = abs(ratio - 1.0)
        if best_gap is None or gap < best_gap:
            best, best_gap = obj, gap
    return best


def substitute_measures(text: str, context: SpatialContext) -> str:
    """Append a familiar-object comparison after clauses with a measure.

    A detected object qualifies when its characteristic length is
    within 25% of the written measure; the closest ratio wins. The
    comparison lands at the end of the clause containing the measure,
    before the next punctuation mark.
    """
    visible = _visible(context.objects)
    insertions: list[tuple[int, str]] = []
    for measure in find_measures(text):
        obj = _closest_by_length(visible, measure.meters)
        if obj is None:
            continue
        pos = _clause_end(text, measure.end)
        if " or the length of " in text[measure.end:pos + 24].lower():
            continue  # this clause already carries a comparison
        label = obj.label.strip()
        insertions.append((pos, f", or the length of {_article(label)} {label}"))
    for pos, chunk in sorted(insertions, reverse=True):
        text = text[:pos] + chunk + text[pos:]
    return text


def summarize_context(context: SpatialContext | None) -> str:
    """One-line summary for prompts: label, direction, distance."""
    if context is None:
        return "none"
    visible = _visible(context.objects)
    if not visible:
        return "none"
    parts = [
        f"{o.label} {relation_phrase(relation_of(o.azimuth_deg))}, {o.distance_m:g} m away"
        for o in visible
    ]
    return "; ".join(parts)
